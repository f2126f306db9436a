#include "geopmp/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geopmp {

namespace {

bool is_block_column(const std::string& name, std::string& prefix, int& index)
{
  std::size_t i = 0;
  while (i < name.size() && std::isalpha(static_cast<unsigned char>(name[i]))) ++i;
  if (i == 0 || i == name.size()) return false;
  for (std::size_t j = i; j < name.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(name[j]))) return false;
  }
  prefix = name.substr(0, i);
  index = std::stoi(name.substr(i));
  return true;
}

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    const auto last = cell.find_last_not_of(" \t\r");
    cell.erase(last == std::string::npos ? 0 : last + 1);
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t line_no)
{
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ArgumentError("malformed CSV: non-numeric cell '" + cell + "' on line " +
                        std::to_string(line_no));
  }
  if (used != cell.size()) {
    throw ArgumentError("malformed CSV: trailing characters in '" + cell + "' on line " +
                        std::to_string(line_no));
  }
  return v;
}

}  // namespace

Trajectory::Trajectory(std::vector<StateBlock> layout) : layout_(std::move(layout))
{
  for (const auto& b : layout_) {
    if (b.size < 0) throw ArgumentError("Trajectory: negative block size");
    if (b.name.empty() ||
        !std::all_of(b.name.begin(), b.name.end(),
                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
      throw ArgumentError("Trajectory: block names must be alphabetic, got '" + b.name + "'");
    }
    width_ += b.size;
  }
}

void Trajectory::append(double t, const Vec& state, const std::map<std::string, double>& channels)
{
  if (!std::isfinite(t)) throw ArgumentError("Trajectory: non-finite time");
  if (!times_.empty() && !(t > times_.back())) {
    throw ArgumentError("Trajectory: times must be strictly increasing");
  }
  require_size(state, width_, "Trajectory row");
  if (times_.empty()) {
    for (const auto& [name, v] : channels) {
      std::string prefix;
      int index = 0;
      if (is_block_column(name, prefix, index) || name == "t" || name.empty()) {
        throw ArgumentError("Trajectory: channel name '" + name + "' collides with state columns");
      }
      channels_[name];
    }
  } else if (channels.size() != channels_.size()) {
    throw ArgumentError("Trajectory: channel set changed between rows");
  }
  for (const auto& [name, v] : channels) {
    auto it = channels_.find(name);
    if (it == channels_.end()) throw ArgumentError("Trajectory: unknown channel '" + name + "'");
    it->second.push_back(v);
  }
  times_.push_back(t);
  states_.push_back(state);
}

const std::vector<double>& Trajectory::channel(const std::string& name) const
{
  const auto it = channels_.find(name);
  if (it == channels_.end()) throw ArgumentError("Trajectory: no channel '" + name + "'");
  return it->second;
}

bool Trajectory::has_block(const std::string& name) const
{
  return std::any_of(layout_.begin(), layout_.end(),
                     [&](const StateBlock& b) { return b.name == name; });
}

int Trajectory::block_size(const std::string& name) const
{
  for (const auto& b : layout_) {
    if (b.name == name) return b.size;
  }
  return 0;
}

int Trajectory::offset_of(const std::string& name) const
{
  int off = 0;
  for (const auto& b : layout_) {
    if (b.name == name) return off;
    off += b.size;
  }
  return -1;
}

Vec Trajectory::block(std::size_t i, const std::string& name) const
{
  const int off = offset_of(name);
  if (off < 0) return Vec(0);
  return states_.at(i).segment(off, block_size(name));
}

Vec Trajectory::interpolate(double t) const
{
  if (times_.empty()) throw ArgumentError("Trajectory: interpolate on empty trajectory");
  const double slack = 1e-12 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - slack || t > times_.back() + slack) {
    throw ArgumentError("Trajectory: interpolation time outside the sampled range");
  }
  if (times_.size() == 1) return states_.front();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  hi = std::clamp<std::size_t>(hi, 1, times_.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = std::clamp((t - times_[lo]) / (times_[hi] - times_[lo]), 0.0, 1.0);
  return (1.0 - w) * states_[lo] + w * states_[hi];
}

void Trajectory::validate() const
{
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw ArgumentError("Trajectory: times not increasing");
  }
  for (const auto& s : states_) require_size(s, width_, "Trajectory row");
  for (const auto& [name, values] : channels_) {
    if (values.size() != times_.size()) {
      throw ArgumentError("Trajectory: channel '" + name + "' length differs from times");
    }
  }
}

std::vector<std::string> Trajectory::column_names() const
{
  std::vector<std::string> cols{"t"};
  for (const auto& b : layout_) {
    for (int i = 1; i <= b.size; ++i) cols.push_back(b.name + std::to_string(i));
  }
  for (const auto& [name, values] : channels_) cols.push_back(name);
  return cols;
}

void Trajectory::write_csv(std::ostream& os) const
{
  const auto cols = column_names();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (std::size_t r = 0; r < times_.size(); ++r) {
    os << format_double(times_[r]);
    for (Eigen::Index k = 0; k < states_[r].size(); ++k) os << ',' << format_double(states_[r][k]);
    for (const auto& [name, values] : channels_) os << ',' << format_double(values[r]);
    os << '\n';
  }
}

Trajectory Trajectory::read_csv(std::istream& is)
{
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  const auto header = split_csv(line);
  if (header.empty() || header.front() != "t") {
    throw ArgumentError("malformed CSV: header must start with 't'");
  }

  std::vector<StateBlock> layout;
  std::vector<std::string> channel_names;
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string prefix;
    int index = 0;
    if (is_block_column(header[c], prefix, index)) {
      if (!channel_names.empty()) {
        throw ArgumentError("malformed CSV: state column '" + header[c] + "' after channels");
      }
      if (!layout.empty() && layout.back().name == prefix) {
        if (index != layout.back().size + 1) {
          throw ArgumentError("malformed CSV: block '" + prefix + "' columns out of order");
        }
        ++layout.back().size;
      } else {
        if (index != 1) {
          throw ArgumentError("malformed CSV: block '" + prefix + "' must start at index 1");
        }
        for (const auto& b : layout) {
          if (b.name == prefix) throw ArgumentError("malformed CSV: block '" + prefix + "' repeated");
        }
        layout.push_back({prefix, 1});
      }
    } else {
      if (header[c].empty()) throw ArgumentError("malformed CSV: empty column name");
      channel_names.push_back(header[c]);
    }
  }

  Trajectory traj(layout);
  const std::size_t width = static_cast<std::size_t>(traj.state_width());
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ArgumentError("malformed CSV: line " + std::to_string(line_no) + " has " +
                          std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header.size()));
    }
    const double t = parse_cell(cells[0], line_no);
    Vec state(static_cast<Eigen::Index>(width));
    for (std::size_t k = 0; k < width; ++k) {
      state[static_cast<Eigen::Index>(k)] = parse_cell(cells[1 + k], line_no);
    }
    std::map<std::string, double> ch;
    for (std::size_t k = 0; k < channel_names.size(); ++k) {
      ch[channel_names[k]] = parse_cell(cells[1 + width + k], line_no);
    }
    traj.append(t, state, ch);
  }
  if (traj.empty()) throw ArgumentError("malformed CSV: no data rows");
  return traj;
}

void Trajectory::write_json(std::ostream& os) const
{
  nlohmann::json j;
  j["layout"] = nlohmann::json::array();
  for (const auto& b : layout_) j["layout"].push_back({{"name", b.name}, {"size", b.size}});
  j["columns"] = column_names();
  j["times"] = times_;
  auto states = nlohmann::json::array();
  for (const auto& s : states_) states.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  j["states"] = std::move(states);
  j["channels"] = nlohmann::json::object();
  for (const auto& [name, values] : channels_) j["channels"][name] = values;
  os << j.dump() << '\n';
}

Trajectory Trajectory::read_json(std::istream& is)
{
  nlohmann::json j;
  try {
    is >> j;
    std::vector<StateBlock> layout;
    for (const auto& b : j.at("layout")) {
      layout.push_back({b.at("name").get<std::string>(), b.at("size").get<int>()});
    }
    Trajectory traj(layout);
    const auto times = j.at("times").get<std::vector<double>>();
    const auto& states = j.at("states");
    if (states.size() != times.size()) throw ArgumentError("trajectory JSON: states/times mismatch");
    std::map<std::string, std::vector<double>> channels;
    if (j.contains("channels")) {
      channels = j.at("channels").get<std::map<std::string, std::vector<double>>>();
    }
    for (std::size_t r = 0; r < times.size(); ++r) {
      const auto row = states[r].get<std::vector<double>>();
      std::map<std::string, double> ch;
      for (const auto& [name, values] : channels) {
        if (values.size() != times.size()) {
          throw ArgumentError("trajectory JSON: channel '" + name + "' length differs from times");
        }
        ch[name] = values[r];
      }
      traj.append(times[r], Eigen::Map<const Vec>(row.data(), static_cast<Eigen::Index>(row.size())),
                  ch);
    }
    return traj;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed trajectory JSON: ") + e.what());
  }
}

void Trajectory::write(std::ostream& os, const std::string& format) const
{
  if (format == "csv") {
    write_csv(os);
  } else if (format == "json") {
    write_json(os);
  } else {
    throw ArgumentError("unknown trajectory format '" + format + "'");
  }
}

Trajectory Trajectory::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open trajectory file '" + path + "'");
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  in.clear();
  in.seekg(0);
  if (c == '{') return read_json(in);
  return read_csv(in);
}

std::vector<Vec> differentiate_rows(const Trajectory& traj)
{
  const std::size_t n = traj.size();
  if (n < 2) throw ArgumentError("differentiate_rows: need at least two samples");
  const auto& t = traj.times();
  std::vector<Vec> d(n);

  const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
  bool uniform = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h) {
      uniform = false;
      break;
    }
  }

  auto f = [&](std::size_t i) -> const Vec& { return traj.state(i); };
  if (uniform && n >= 5) {
    const double s = 12.0 * h;
    d[0] = (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / s;
    d[1] = (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / s;
    for (std::size_t i = 2; i + 2 < n; ++i) {
      d[i] = (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / s;
    }
    const std::size_t m = n - 1;
    d[m] = (25.0 * f(m) - 48.0 * f(m - 1) + 36.0 * f(m - 2) - 16.0 * f(m - 3) + 3.0 * f(m - 4)) / s;
    d[m - 1] = (3.0 * f(m) + 10.0 * f(m - 1) - 18.0 * f(m - 2) + 6.0 * f(m - 3) - f(m - 4)) / s;
    return d;
  }

  d[0] = (f(1) - f(0)) / (t[1] - t[0]);
  d[n - 1] = (f(n - 1) - f(n - 2)) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f(i + 1) - f(i - 1)) / (t[i + 1] - t[i - 1]);
  return d;
}

}  // namespace geopmp
