#pragma once

#include "geopmp/common.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace geopmp {

/// Named contiguous slice of a trajectory state row, e.g. {"x", 3}.
struct StateBlock
{
  std::string name;
  int size;
};

/**
 * Time-stamped sequence of state rows with named scalar channels.
 *
 * Rows are split into blocks (x, p, u for the full problem; z, pz, mu, u
 * for the reduced one). Times are strictly increasing and every channel has
 * one value per row.
 *
 * CSV layout: header "t", then each block as name1..nameK in layout order,
 * then channels in alphabetical order. Block columns are recognized on read
 * by the pattern letters-then-digits; channel names must not match it.
 * Empty blocks have no columns and read back as absent.
 */
class Trajectory
{
public:
  Trajectory() = default;
  explicit Trajectory(std::vector<StateBlock> layout);

  void append(double t, const Vec& state, const std::map<std::string, double>& channels = {});

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  int state_width() const noexcept { return width_; }

  const std::vector<StateBlock>& layout() const noexcept { return layout_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const Vec& state(std::size_t i) const { return states_.at(i); }
  const std::map<std::string, std::vector<double>>& channels() const noexcept { return channels_; }
  const std::vector<double>& channel(const std::string& name) const;
  bool has_channel(const std::string& name) const { return channels_.count(name) > 0; }

  bool has_block(const std::string& name) const;
  int block_size(const std::string& name) const;
  /// Slice of row i; an absent block yields an empty vector.
  Vec block(std::size_t i, const std::string& name) const;

  /// Linear interpolation of the state row at time t inside [t_0, t_last].
  Vec interpolate(double t) const;

  /// Throws ArgumentError if any structural invariant is broken.
  void validate() const;

  std::vector<std::string> column_names() const;

  void write_csv(std::ostream& os) const;
  static Trajectory read_csv(std::istream& is);
  void write_json(std::ostream& os) const;
  static Trajectory read_json(std::istream& is);

  /// Dispatch on format "csv" or "json".
  void write(std::ostream& os, const std::string& format) const;
  /// Reads a file, choosing JSON when the first non-blank character is '{'.
  static Trajectory load(const std::string& path);

private:
  int offset_of(const std::string& name) const;

  std::vector<StateBlock> layout_;
  int width_ = 0;
  std::vector<double> times_;
  std::vector<Vec> states_;
  std::map<std::string, std::vector<double>> channels_;
};

/**
 * Time derivative of every state row by finite differences of the stored
 * samples: fourth-order five-point stencils (one-sided near the ends) when
 * at least five uniformly spaced rows exist, second order otherwise.
 */
std::vector<Vec> differentiate_rows(const Trajectory& traj);

}  // namespace geopmp
