#include "geopmp/cli.hpp"

#include "geopmp/builtin.hpp"
#include "geopmp/dirac.hpp"
#include "geopmp/pmp.hpp"
#include "geopmp/problem_io.hpp"
#include "geopmp/reconstruct.hpp"
#include "geopmp/reduction.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

namespace geopmp::cli {

namespace {

using json = nlohmann::json;

struct Options
{
  std::string builtin;
  std::string problem;
  std::string x0, p0, u0, lambda0, z0, pz0, g0;
  std::string theta, k;
  std::optional<double> T;
  double step = 1e-3;
  std::optional<double> tol;
  std::optional<double> newton_tol;
  std::string out;
  std::string format;
  int jobs = 1;
  std::string input;
  std::string full;
  std::string reduced;
  bool self_test = false;
  int samples = 200;
  std::uint64_t seed = 0;
};

struct Outcome
{
  int code = kSuccess;
  json result = json::object();
};

/// Problem selected by --builtin or --problem.
struct Selected
{
  std::optional<ControlProblem> full;
  std::optional<ReducedProblem> reduced;
  std::string name;
  bool builtin = false;
};

Selected select_problem(const Options& o)
{
  if (o.builtin.empty() == o.problem.empty()) {
    throw ArgumentError("exactly one of --builtin or --problem is required");
  }
  Selected s;
  if (!o.builtin.empty()) {
    s.full.emplace(builtin_problem(o.builtin));
    s.reduced.emplace(builtin_reduced_problem(o.builtin));
    s.name = o.builtin;
    s.builtin = true;
  } else {
    ProblemDefinition def = load_problem(o.problem);
    s.full = std::move(def.full);
    s.reduced = std::move(def.reduced);
    s.name = s.full ? s.full->name() : s.reduced->name();
  }
  return s;
}

const ControlProblem& require_full(const Selected& s)
{
  if (!s.full) throw ArgumentError("problem '" + s.name + "' has no full control problem");
  return *s.full;
}

const ReducedProblem& require_reduced(const Selected& s)
{
  if (!s.reduced) throw ArgumentError("problem '" + s.name + "' has no reduced problem");
  return *s.reduced;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

Vec vector_option(const std::string& text, const char* flag, Eigen::Index expected)
{
  const Vec v = to_vec(parse_number_list(text, flag));
  if (v.size() != expected) {
    throw ArgumentError(std::string(flag) + " has " + std::to_string(v.size()) +
                        " components, expected " + std::to_string(expected));
  }
  return v;
}

Vec vector_or_zero(const std::string& text, const char* flag, Eigen::Index expected)
{
  return text.empty() ? Vec::Zero(expected) : vector_option(text, flag, expected);
}

double scalar_option(const std::string& text, const char* flag)
{
  const auto v = parse_number_list(text, flag);
  if (v.size() != 1) throw ArgumentError(std::string(flag) + " expects a single number");
  return v.front();
}

double require_T(const Options& o)
{
  if (!o.T) throw ArgumentError("--T is required");
  return *o.T;
}

PmpConfig make_config(const Options& o, const Selected& s)
{
  PmpConfig cfg;
  cfg.rk_step = o.step;
  cfg.newton_tol = o.newton_tol.value_or(s.builtin ? 1e-12 : 1e-8);
  cfg.validate();
  return cfg;
}

std::string output_format(const Options& o)
{
  std::string fmt = o.format;
  if (fmt.empty()) {
    const bool json_ext = o.out.size() >= 5 && o.out.compare(o.out.size() - 5, 5, ".json") == 0;
    fmt = json_ext ? "json" : "csv";
  }
  if (fmt != "csv" && fmt != "json") throw ArgumentError("--format must be csv or json");
  return fmt;
}

void write_trajectory(const Trajectory& traj, const std::string& path, const std::string& fmt)
{
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot open output file '" + path + "'");
  traj.write(f, fmt);
  if (!f) throw ArgumentError("failed writing '" + path + "'");
}

/// "out.csv" -> "out_3.csv"
std::string indexed_path(const std::string& path, std::size_t index)
{
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const std::string suffix = "_" + std::to_string(index);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

double channel_drift(const Trajectory& traj, const std::string& name)
{
  const auto& c = traj.channel(name);
  double worst = 0.0;
  for (double v : c) worst = std::max(worst, std::abs(v - c.front()));
  return worst;
}

std::string sci(double v)
{
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

Vec slice(const Trajectory& traj, const Vec& row, const std::string& block)
{
  int offset = 0;
  for (const auto& b : traj.layout()) {
    if (b.name == block) return row.segment(offset, b.size);
    offset += b.size;
  }
  throw ArgumentError("trajectory has no block '" + block + "'");
}

// ---------------------------------------------------------------- solve-pmp

Outcome cmd_solve_pmp(const Options& o, std::ostream& out)
{
  const Selected sel = select_problem(o);
  const ControlProblem& prob = require_full(sel);
  const PmpConfig cfg = make_config(o, sel);
  const double T = require_T(o);
  const int n = prob.n();
  const Vec x0 = vector_or_zero(o.x0, "--x0", n);

  Vec p0;
  if (!o.p0.empty()) {
    p0 = vector_option(o.p0, "--p0", n);
  } else if (!o.lambda0.empty()) {
    p0 = costate_from_body_momentum(prob, x0, vector_option(o.lambda0, "--lambda0", n));
  } else if (!o.theta.empty() && !o.k.empty()) {
    if (n != 3) throw ArgumentError("--theta/--k need a three-dimensional problem");
    p0 = costate_from_body_momentum(
        prob, x0, heisenberg_lambda(scalar_option(o.theta, "--theta"), scalar_option(o.k, "--k")));
  } else {
    throw ArgumentError("missing initial costate: give --p0, --lambda0 or --theta and --k");
  }
  std::optional<Vec> guess;
  if (!o.u0.empty()) guess = vector_option(o.u0, "--u0", prob.r());

  const Trajectory traj = integrate_pmp(prob, x0, p0, T, cfg, guess);
  if (!o.out.empty()) write_trajectory(traj, o.out, output_format(o));

  Outcome res;
  const double h_drift = channel_drift(traj, "H");
  json momentum = json::array();
  double max_momentum = 0.0;
  if (prob.symmetry()) {
    for (int i = 0; i < prob.symmetry()->algebra.dim(); ++i) {
      const double d = channel_drift(traj, "J_" + std::to_string(i + 1));
      momentum.push_back(d);
      max_momentum = std::max(max_momentum, d);
    }
  }
  double phi = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    phi = std::max(phi, consistency_residual(prob, pontryagin_point(traj, i), cfg.fd_step).norm());
  }
  out << "problem " << prob.name() << ": " << traj.size() << " rows, step "
      << sci(traj.size() > 1 ? traj.times()[1] - traj.times()[0] : 0.0) << "\n";
  out << "H(0) = " << std::setprecision(15) << traj.channel("H").front() << "\n";
  out << "H drift: " << sci(h_drift) << "\n";
  if (prob.symmetry()) out << "momentum drift (max over components): " << sci(max_momentum) << "\n";
  out << "max consistency residual: " << sci(phi) << "\n";

  res.result = {{"rows", traj.size()},
                {"T", T},
                {"H0", traj.channel("H").front()},
                {"H_drift", h_drift},
                {"momentum_drift", momentum},
                {"max_consistency_residual", phi}};
  if (!o.out.empty()) res.result["out"] = o.out;
  if (o.tol && h_drift > *o.tol) {
    res.code = kNumericalError;
    res.result["failure"] = "H drift exceeds --tol";
  }
  return res;
}

// ------------------------------------------------------------ solve-reduced

struct ReducedRun
{
  std::optional<double> theta;
  std::optional<double> k;
  Vec lambda0;
  json summary;
  std::string error;
  int code = kSuccess;
  std::optional<Trajectory> traj;
};

/// Max deviation from the Heisenberg closed form: (lambda1, lambda2) rotates
/// with angular speed lambda3, lambda3 is constant.
double heisenberg_closed_form_error(const Trajectory& traj)
{
  const Vec l0 = traj.block(0, "mu");
  const double k = l0[2];
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times()[i];
    const Vec mu = traj.block(i, "mu");
    const double c = std::cos(k * t), s = std::sin(k * t);
    worst = std::max({worst, std::abs(mu[0] - (l0[0] * c - l0[1] * s)),
                      std::abs(mu[1] - (l0[0] * s + l0[1] * c)), std::abs(mu[2] - k)});
  }
  return worst;
}

void run_reduced(const ReducedProblem& rp, bool heisenberg, const Vec& z0, const Vec& pz0,
                 double T, const ReducedConfig& cfg, ReducedRun& run)
{
  try {
    ReducedState st{z0, pz0, CoalgebraElement{run.lambda0}, Vec::Zero(rp.control_dim())};
    Trajectory traj = integrate_reduced(rp, st, T, cfg);
    json s = {{"rows", traj.size()}, {"h_drift", channel_drift(traj, "h")}};
    json cas = json::object();
    for (const auto& c : rp.casimirs()) cas[c.name] = channel_drift(traj, "casimir_" + c.name);
    s["casimir_drift"] = cas;
    if (heisenberg) s["closed_form_error"] = heisenberg_closed_form_error(traj);
    if (run.theta) s["theta"] = *run.theta;
    if (run.k) s["k"] = *run.k;
    s["lambda0"] = std::vector<double>(run.lambda0.data(), run.lambda0.data() + run.lambda0.size());
    run.summary = s;
    run.traj = std::move(traj);
  } catch (const ArgumentError& e) {
    run.code = kInputError;
    run.error = e.what();
  } catch (const UnsupportedError& e) {
    run.code = kInputError;
    run.error = e.what();
  } catch (const Error& e) {
    run.code = kNumericalError;
    run.error = e.what();
  }
}

Outcome cmd_solve_reduced(const Options& o, std::ostream& out, std::ostream& err)
{
  const Selected sel = select_problem(o);
  const ReducedProblem& rp = require_reduced(sel);
  ReducedConfig cfg;
  static_cast<PmpConfig&>(cfg) = make_config(o, sel);
  cfg.validate();
  const double T = require_T(o);
  const int d = rp.algebra().dim();
  const int s = rp.base_dim();
  const Vec z0 = vector_or_zero(o.z0, "--z0", s);
  const Vec pz0 = vector_or_zero(o.pz0, "--pz0", s);
  const bool heisenberg = sel.builtin && sel.name == "heisenberg";
  if (o.jobs < 1) throw ArgumentError("--jobs must be at least 1");

  std::vector<ReducedRun> runs;
  if (!o.lambda0.empty()) {
    if (!o.theta.empty() || !o.k.empty()) {
      throw ArgumentError("--lambda0 cannot be combined with --theta/--k");
    }
    runs.push_back({{}, {}, vector_option(o.lambda0, "--lambda0", d), {}, {}, kSuccess, {}});
  } else if (!o.theta.empty() && !o.k.empty()) {
    if (!heisenberg) throw ArgumentError("--theta/--k shortcuts need --builtin heisenberg");
    for (double th : parse_number_list(o.theta, "--theta")) {
      for (double k : parse_number_list(o.k, "--k")) {
        runs.push_back({th, k, heisenberg_lambda(th, k), {}, {}, kSuccess, {}});
      }
    }
  } else {
    throw ArgumentError("missing initial momentum: give --lambda0 or --theta and --k");
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      run_reduced(rp, heisenberg, z0, pz0, T, cfg, runs[i]);
    }
  };
  const int workers = std::min<int>(o.jobs, static_cast<int>(runs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Outcome res;
  json list = json::array();
  double worst_closed = 0.0;
  const std::string fmt = o.out.empty() ? std::string() : output_format(o);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ReducedRun& r = runs[i];
    if (r.code != kSuccess) {
      err << "run " << i << ": " << r.error << "\n";
      res.code = std::max(res.code, r.code);
      list.push_back({{"error", r.error}});
      continue;
    }
    if (!o.out.empty()) {
      const std::string path = runs.size() == 1 ? o.out : indexed_path(o.out, i);
      write_trajectory(*r.traj, path, fmt);
      r.summary["out"] = path;
    }
    out << "run " << i;
    if (r.theta) out << " theta=" << *r.theta << " k=" << *r.k;
    out << ": h drift " << sci(r.summary["h_drift"].get<double>());
    if (heisenberg) {
      const double e = r.summary["closed_form_error"].get<double>();
      worst_closed = std::max(worst_closed, e);
      out << ", max closed-form error " << sci(e);
    }
    out << "\n";
    list.push_back(r.summary);
  }
  res.result["runs"] = list;
  if (heisenberg) {
    res.result["max_closed_form_error"] = worst_closed;
    if (o.tol && worst_closed > *o.tol && res.code == kSuccess) {
      res.code = kNumericalError;
      res.result["failure"] = "closed-form error exceeds --tol";
    }
  }
  return res;
}

// -------------------------------------------------------------- reconstruct

bool strictly_upper_3x3(const LieAlgebra& alg)
{
  if (!alg.has_matrix_basis() || alg.matrix_basis().front().rows() != 3) return false;
  for (const Mat& m : alg.matrix_basis()) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j <= i; ++j) {
        if (m(i, j) != 0.0) return false;
      }
    }
  }
  return alg.dim() == 3;
}

Outcome cmd_reconstruct(const Options& o, std::ostream& out)
{
  const Selected sel = select_problem(o);
  const ReducedProblem& rp = require_reduced(sel);
  const LieAlgebra& alg = rp.algebra();
  if (!alg.has_matrix_basis()) throw ArgumentError("reconstruct needs an algebra with a matrix basis");
  if (o.input.empty()) throw ArgumentError("--input <reduced trajectory> is required");
  const Trajectory traj = Trajectory::load(o.input);
  if (traj.empty()) throw ArgumentError("reduced trajectory is empty");
  if (traj.block_size("mu") != alg.dim() || traj.block_size("u") != rp.control_dim() ||
      traj.block_size("z") != rp.base_dim()) {
    throw ArgumentError("input is not a reduced trajectory of problem '" + sel.name + "'");
  }
  const double step = traj.size() > 1 ? uniform_step(traj) : 1.0;
  const auto m = alg.matrix_basis().front().rows();
  const bool chart = strictly_upper_3x3(alg);

  GroupElement g0 = group_identity(alg);
  if (!o.x0.empty()) {
    if (!chart) throw ArgumentError("--x0 chart coordinates need the Heisenberg realization");
    g0 = heisenberg_from_chart(vector_option(o.x0, "--x0", 3));
  } else if (!o.g0.empty()) {
    const Vec flat = vector_option(o.g0, "--g0", m * m);
    g0.matrix = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), m, m);
  }

  const auto xi = reduced_velocities(rp, traj);
  const auto curve = reconstruct_group(alg, g0, xi, step);
  bool unitriangular = true;
  for (const auto& g : curve) unitriangular = unitriangular && is_unitriangular(g, 1e-12);

  Trajectory result;
  std::vector<double> speed(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) speed[i] = traj.block(i, "u").squaredNorm();
  if (chart) {
    result = Trajectory({{"x", 3}});
    for (std::size_t i = 0; i < curve.size(); ++i) {
      result.append(traj.times()[i], heisenberg_chart(curve[i]), {{"speed_sq", speed[i]}});
    }
  } else {
    result = Trajectory({{"g", static_cast<int>(m * m)}});
    for (std::size_t i = 0; i < curve.size(); ++i) {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = curve[i].matrix;
      result.append(traj.times()[i], Eigen::Map<const Vec>(rm.data(), m * m), {{"speed_sq", speed[i]}});
    }
  }
  if (!o.out.empty()) write_trajectory(result, o.out, output_format(o));

  Outcome res;
  double speed_drift = 0.0;
  for (double v : speed) speed_drift = std::max(speed_drift, std::abs(v - speed.front()));
  res.result = {{"rows", result.size()}, {"step", step}, {"speed_drift", speed_drift}};
  out << "reconstructed " << result.size() << " group elements, step " << sci(step) << "\n";
  out << "speed drift (u1^2+u2^2): " << sci(speed_drift) << "\n";
  if (chart) res.result["unitriangular"] = unitriangular;

  std::optional<double> deviation;
  if (chart) {
    const Vec l0 = traj.block(0, "mu");
    const Vec start = result.block(0, "x").head(2);
    const double rho = l0.head(2).norm();
    const double k = l0[2];
    if (rho == 0.0) {
      double moved = 0.0;
      for (std::size_t i = 0; i < result.size(); ++i) {
        moved = std::max(moved, (result.block(i, "x") - result.block(0, "x")).norm());
      }
      res.result["shape"] = "point";
      deviation = moved;
      out << "stationary curve, max displacement " << sci(moved) << "\n";
    } else if (std::abs(k) < 1e-14) {
      const Vec origin = result.block(0, "x");
      const Vec span = result.block(result.size() - 1, "x") - origin;
      const Vec dir = span.norm() > 0.0 ? Vec(span / span.norm()) : Vec::Zero(3);
      double off = 0.0;
      for (std::size_t i = 0; i < result.size(); ++i) {
        const Vec dx = result.block(i, "x") - origin;
        off = std::max(off, (dx - dx.dot(dir) * dir).norm());
      }
      res.result["shape"] = "line";
      deviation = off;
      out << "straight line, max distance from line " << sci(off) << "\n";
    } else {
      const Vec center = start + Eigen::Vector2d(-l0[1] / k, l0[0] / k);
      const double radius = rho / std::abs(k);
      const double dev = max_radial_deviation(result, center, radius);
      res.result["shape"] = "circle";
      res.result["radius"] = radius;
      res.result["center"] = {center[0], center[1]};
      deviation = dev;
      out << "circle radius " << radius << " centered at (" << center[0] << ", " << center[1]
          << "), max radial deviation " << sci(dev) << "\n";
    }
    res.result["max_deviation"] = *deviation;
  }
  if (!o.out.empty()) res.result["out"] = o.out;
  if (o.tol && deviation && *deviation > *o.tol) {
    res.code = kNumericalError;
    res.result["failure"] = "geometric deviation exceeds --tol";
  }
  if (chart && !unitriangular) {
    res.code = kNumericalError;
    res.result["failure"] = "group invariant violated";
  }
  return res;
}

// -------------------------------------------------------------- check-dirac

Outcome dirac_self_test(const Options& o, std::ostream& out)
{
  if (o.samples < 1) throw ArgumentError("--samples must be positive");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 8);
  int graphs = 0;
  int identities = 0;
  for (int s = 0; s < o.samples; ++s) {
    const int d = dim(rng);
    Mat a(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a(i, j) = unit(rng);
    }
    const LinearDiracStructure g = graph_of_two_form(TwoForm(a - a.transpose()));
    if (is_dirac(g)) ++graphs;
    const Mat id = Mat::Identity(d, d);
    if (subspace_equal(backward(id, g), g) && subspace_equal(forward(id, g), g)) ++identities;
  }
  out << graphs << "/" << o.samples << " random two-forms give Dirac structures\n";
  out << identities << "/" << o.samples << " identity backward/forward images agree\n";
  Outcome res;
  res.result = {{"mode", "self-test"}, {"samples", o.samples}, {"dirac", graphs},
                {"identity", identities}};
  if (graphs != o.samples || identities != o.samples) res.code = kNumericalError;
  return res;
}

Outcome cmd_check_dirac(const Options& o, std::ostream& out)
{
  if (o.self_test) return dirac_self_test(o, out);
  const Selected sel = select_problem(o);
  const double tol = o.tol.value_or(1e-6);
  const PmpConfig cfg = make_config(o, sel);
  Outcome res;

  if (!o.input.empty()) {
    const Trajectory traj = Trajectory::load(o.input);
    std::vector<double> residuals;
    std::string kind;
    if (traj.has_block("mu")) {
      residuals = reduced_trajectory_membership(require_reduced(sel), traj, cfg.fd_step);
      kind = "reduced";
    } else if (traj.has_block("x") && traj.has_block("p")) {
      residuals = pmp_trajectory_membership(require_full(sel), traj, cfg.fd_step);
      kind = "full";
    } else {
      throw ArgumentError("input is neither a full nor a reduced PMP trajectory");
    }
    const auto worst = std::max_element(residuals.begin(), residuals.end());
    const std::size_t row = static_cast<std::size_t>(worst - residuals.begin());
    out << kind << " trajectory, " << residuals.size() << " rows, max membership residual "
        << sci(*worst) << " at t = " << traj.times()[row] << " (tol " << sci(tol) << ")\n";
    res.result = {{"mode", "trajectory"}, {"kind", kind}, {"rows", residuals.size()},
                  {"max_residual", *worst}, {"worst_time", traj.times()[row]}, {"tol", tol}};
    if (!(*worst <= tol)) res.code = kNumericalError;
    return res;
  }

  if (!o.lambda0.empty()) {
    const ReducedProblem& rp = require_reduced(sel);
    ReducedConfig rcfg;
    static_cast<PmpConfig&>(rcfg) = cfg;
    const Vec z0 = vector_or_zero(o.z0, "--z0", rp.base_dim());
    const Vec pz0 = vector_or_zero(o.pz0, "--pz0", rp.base_dim());
    const CoalgebraElement mu{vector_option(o.lambda0, "--lambda0", rp.algebra().dim())};
    const Vec u0 = vector_or_zero(o.u0, "--u0", rp.control_dim());
    ReducedState st{z0, pz0, mu, eliminate_controls_reduced(rp, z0, pz0, mu, u0, rcfg).u};
    const ReducedRhs f = reduced_pmp_rhs(rp, st, rcfg);
    const ReducedPartials dh = reduced_partials(rp, st, cfg.fd_step);
    const LinearDiracStructure fiber = reduced_pontryagin_fiber(rp, z0, mu);
    Vec v(fiber.base_dim()), alpha(fiber.base_dim());
    v << f.zdot, f.pzdot, f.xi.coeffs, f.mudot.coeffs;
    alpha << dh.dz, dh.dpz, Vec::Zero(rp.algebra().dim()), dh.dmu;
    const double r = fiber.distance(v, alpha) / (1.0 + std::sqrt(v.squaredNorm() + alpha.squaredNorm()));
    out << "reduced point, membership residual " << sci(r) << " (tol " << sci(tol) << ")\n";
    res.result = {{"mode", "point"}, {"kind", "reduced"}, {"max_residual", r}, {"tol", tol}};
    if (!(r <= tol)) res.code = kNumericalError;
    return res;
  }

  if (o.p0.empty()) throw ArgumentError("check-dirac needs --self-test, --input, --p0 or --lambda0");
  const ControlProblem& prob = require_full(sel);
  const Vec x0 = vector_or_zero(o.x0, "--x0", prob.n());
  const Vec p0 = vector_option(o.p0, "--p0", prob.n());
  const Vec u0 = vector_or_zero(o.u0, "--u0", prob.r());
  const PontryaginPoint pt{x0, p0, optimal_feedback(prob, x0, p0, u0, cfg).u};
  const HamiltonianPartials dh = hamiltonian_partials(prob, pt, cfg.fd_step);
  const LinearDiracStructure fiber = graph_of_two_form(pontryagin_presymplectic_form(prob.n(), prob.r()));
  Vec v(2 * prob.n() + prob.r()), alpha(2 * prob.n() + prob.r());
  v << dh.dp, -dh.dx, Vec::Zero(prob.r());
  alpha << dh.dx, dh.dp, dh.du;
  const double r = fiber.distance(v, alpha) / (1.0 + std::sqrt(v.squaredNorm() + alpha.squaredNorm()));
  const double sigma = control_hessian_min_singular_value(prob, pt, cfg);
  out << "full point, membership residual " << sci(r) << ", sigma_min(W) = " << sigma << "\n";
  res.result = {{"mode", "point"}, {"kind", "full"}, {"max_residual", r}, {"tol", tol},
                {"sigma_min", std::isfinite(sigma) ? json(sigma) : json(nullptr)}};
  if (!(r <= tol)) res.code = kNumericalError;
  return res;
}

// ------------------------------------------------------------------ compare

Outcome cmd_compare(const Options& o, std::ostream& out, std::ostream& err)
{
  const Selected sel = select_problem(o);
  const ControlProblem& prob = require_full(sel);
  if (o.full.empty() || o.reduced.empty()) throw ArgumentError("--full and --reduced are required");
  const Trajectory full = Trajectory::load(o.full);
  const Trajectory red = Trajectory::load(o.reduced);
  if (full.empty() || red.empty()) throw ArgumentError("empty trajectory");
  if (!full.has_block("x") || !full.has_block("p") || !red.has_block("mu")) {
    throw ArgumentError("--full needs x, p, u blocks and --reduced needs a mu block");
  }
  const double lo = std::max(full.times().front(), red.times().front());
  const double hi = std::min(full.times().back(), red.times().back());
  if (lo > hi) throw ArgumentError("trajectories cover disjoint time ranges");

  const bool same_grid = full.times() == red.times();
  if (!same_grid) err << "warning: time grids differ; resampling the reduced trajectory by linear interpolation\n";
  const double tol = o.tol.value_or(1e-5);
  double worst = 0.0;
  double worst_time = lo;
  std::size_t compared = 0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    const double t = full.times()[i];
    if (t < lo || t > hi) {
      ++skipped;
      continue;
    }
    const ReducedState proj = project_full_to_reduced(prob, pontryagin_point(full, i));
    const Vec mu = same_grid ? red.block(i, "mu") : slice(red, red.interpolate(t), "mu");
    require_size(mu, proj.mu.coeffs.size(), "reduced mu block");
    const double dev = (proj.mu.coeffs - mu).lpNorm<Eigen::Infinity>();
    if (compared == 0 || dev > worst) {
      worst = dev;
      worst_time = t;
    }
    ++compared;
  }
  if (skipped > 0) err << "warning: " << skipped << " rows outside the common time range were skipped\n";
  out << "compared " << compared << " rows, max |project(full) - reduced| = " << sci(worst)
      << " at t = " << worst_time << " (tol " << sci(tol) << ")\n";
  Outcome res;
  res.result = {{"rows", compared}, {"skipped", skipped}, {"resampled", !same_grid},
                {"max_deviation", worst}, {"worst_time", worst_time}, {"tol", tol}};
  if (!(worst <= tol)) res.code = kNumericalError;
  return res;
}

// ---------------------------------------------------------- geodesic-report

Outcome cmd_geodesic_report(const Options& o, std::ostream& out)
{
  const double theta = o.theta.empty() ? 0.0 : scalar_option(o.theta, "--theta");
  if (o.k.empty()) throw ArgumentError("--k is required");
  const double k = scalar_option(o.k, "--k");
  if (k == 0.0) throw ArgumentError("geodesic report needs k != 0 (k = 0 gives straight lines)");
  const double T = o.T.value_or(2.0 * M_PI / std::abs(k));
  const GeodesicReport rep = heisenberg_geodesic_report(theta, k, T, o.step, o.tol.value_or(1e-5));

  out << "geodesic from the origin, theta = " << theta << ", k = " << k << ", T = " << T << "\n";
  out << "oracle vs exact solution: " << sci(rep.exact_deviation) << "\n";
  out << "oracle radial deviation from radius 1/|k|: " << sci(rep.radial_deviation) << "\n";
  json comps = json::array();
  for (const auto& c : rep.printed) {
    out << "  " << c.formula << " : max deviation " << sci(c.max_deviation) << " -> "
        << (c.matches ? "matches" : "does not match") << "\n";
    comps.push_back({{"component", c.name}, {"formula", c.formula},
                     {"max_deviation", c.max_deviation}, {"matches", c.matches}});
  }
  Outcome res;
  res.result = {{"theta", theta}, {"k", k}, {"T", T}, {"tolerance", rep.tolerance},
                {"printed", comps}, {"radial_deviation", rep.radial_deviation},
                {"exact_deviation", rep.exact_deviation}, {"consistent", rep.consistent}};
  if (!rep.consistent) res.code = kNumericalError;
  return res;
}

void add_problem_options(CLI::App* cmd, Options& o)
{
  cmd->add_option("--builtin", o.builtin, "Builtin problem (heisenberg)");
  cmd->add_option("--problem", o.problem, "JSON problem file");
  cmd->add_option("--newton-tol", o.newton_tol, "Newton tolerance for control elimination");
}

void add_output_options(CLI::App* cmd, Options& o)
{
  cmd->add_option("--out", o.out, "Output trajectory path");
  cmd->add_option("--format", o.format, "csv or json (default from --out extension, else csv)");
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& what)
{
  std::vector<double> out;
  if (text.empty()) throw ArgumentError(what + ": empty value");
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = text.find(',', pos);
    std::string item = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    char* stop = nullptr;
    const double v = std::strtod(item.c_str(), &stop);
    if (item.empty() || stop != item.c_str() + item.size() || !std::isfinite(v)) {
      throw ArgumentError(what + ": cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  Options o;
  CLI::App app{"Geometric Pontryagin maximum principle solver"};
  app.require_subcommand(1);

  auto* pmp = app.add_subcommand("solve-pmp", "Integrate the full PMP system");
  add_problem_options(pmp, o);
  pmp->add_option("--x0", o.x0, "Initial state, comma separated");
  pmp->add_option("--p0", o.p0, "Initial costate");
  pmp->add_option("--lambda0", o.lambda0, "Initial body momentum (P = G problems)");
  pmp->add_option("--theta", o.theta, "Heisenberg shortcut: lambda0 = (cos theta, sin theta, k)");
  pmp->add_option("--k", o.k, "Heisenberg shortcut");
  pmp->add_option("--u0", o.u0, "Initial control guess");
  pmp->add_option("--T", o.T, "Time horizon");
  pmp->add_option("--step", o.step, "RK4 step");
  pmp->add_option("--tol", o.tol, "Fail (exit 2) if the H drift exceeds this");
  add_output_options(pmp, o);

  auto* red = app.add_subcommand("solve-reduced", "Integrate the reduced PMP system");
  add_problem_options(red, o);
  red->add_option("--lambda0", o.lambda0, "Initial momentum mu(0)");
  red->add_option("--z0", o.z0, "Initial base point");
  red->add_option("--pz0", o.pz0, "Initial base costate");
  red->add_option("--theta", o.theta, "Heisenberg shortcut, comma separated values sweep");
  red->add_option("--k", o.k, "Heisenberg shortcut, comma separated values sweep");
  red->add_option("--T", o.T, "Time horizon");
  red->add_option("--step", o.step, "RK4 step");
  red->add_option("--tol", o.tol, "Fail (exit 2) if the closed-form error exceeds this");
  red->add_option("--jobs", o.jobs, "Worker threads for parameter sweeps");
  add_output_options(red, o);

  auto* rec = app.add_subcommand("reconstruct", "Rebuild the group curve from a reduced trajectory");
  add_problem_options(rec, o);
  rec->add_option("--input", o.input, "Reduced trajectory (CSV or JSON)");
  rec->add_option("--x0", o.x0, "Initial group element in Heisenberg chart coordinates");
  rec->add_option("--g0", o.g0, "Initial group element, row-major matrix entries");
  rec->add_option("--tol", o.tol, "Fail (exit 2) if the geometric deviation exceeds this");
  add_output_options(rec, o);

  auto* dir = app.add_subcommand("check-dirac", "Dirac membership checks");
  add_problem_options(dir, o);
  dir->add_flag("--self-test", o.self_test, "Random two-form property suite");
  dir->add_option("--samples", o.samples, "Self-test sample count");
  dir->add_option("--seed", o.seed, "Self-test seed");
  dir->add_option("--input", o.input, "Full or reduced trajectory");
  dir->add_option("--x0", o.x0, "Point mode: state");
  dir->add_option("--p0", o.p0, "Point mode: costate");
  dir->add_option("--u0", o.u0, "Point mode: control guess");
  dir->add_option("--lambda0", o.lambda0, "Point mode: reduced momentum");
  dir->add_option("--z0", o.z0, "Point mode: reduced base point");
  dir->add_option("--pz0", o.pz0, "Point mode: reduced base costate");
  dir->add_option("--tol", o.tol, "Membership tolerance (default 1e-6)");

  auto* cmp = app.add_subcommand("compare", "Project a full trajectory and compare with a reduced one");
  add_problem_options(cmp, o);
  cmp->add_option("--full", o.full, "Full trajectory");
  cmp->add_option("--reduced", o.reduced, "Reduced trajectory");
  cmp->add_option("--tol", o.tol, "Deviation tolerance (default 1e-5)");

  auto* geo = app.add_subcommand("geodesic-report", "Compare printed geodesic formulas with the oracle");
  geo->add_option("--theta", o.theta, "Initial angle");
  geo->add_option("--k", o.k, "Vertical momentum");
  geo->add_option("--T", o.T, "Horizon (default one period)");
  geo->add_option("--step", o.step, "Oracle RK4 step");
  geo->add_option("--tol", o.tol, "Match tolerance (default 1e-5)");

  std::string command = "geopmp";
  Outcome res;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    if (pmp->parsed()) res = cmd_solve_pmp(o, out);
    else if (red->parsed()) res = cmd_solve_reduced(o, out, err);
    else if (rec->parsed()) res = cmd_reconstruct(o, out);
    else if (dir->parsed()) res = cmd_check_dirac(o, out);
    else if (cmp->parsed()) res = cmd_compare(o, out, err);
    else res = cmd_geodesic_report(o, out);
    res.result["status"] = res.code == kSuccess ? "ok" : "failed";
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    res.result["status"] = "help";
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    res.result["status"] = "help";
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    res.code = kInputError;
    res.result["status"] = "error";
    res.result["error"] = e.what();
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    res.code = kInputError;
    res.result["status"] = "error";
    res.result["error"] = e.what();
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    res.code = kInputError;
    res.result["status"] = "error";
    res.result["error"] = e.what();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    res.code = kNumericalError;
    res.result["status"] = "error";
    res.result["error"] = e.what();
  }
  res.result["command"] = command;
  res.result["exit_code"] = res.code;
  out << "RESULT " << res.result.dump(-1, ' ', false, json::error_handler_t::replace) << std::endl;
  return res.code;
}

}  // namespace geopmp::cli
