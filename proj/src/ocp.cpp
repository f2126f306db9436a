#include "geopmp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace geopmp {

namespace {

double fd_width(double fd_step, double coordinate) { return fd_step * (1.0 + std::abs(coordinate)); }

std::string point_text(const Vec& x, const Vec& u)
{
  return "x=" + format_vector(x) + " u=" + format_vector(u);
}

/// Jacobian of f with respect to x (wrt_state) or u by central differences.
Mat fd_dynamics_jacobian(const ControlProblem& prob, const Vec& x, const Vec& u, bool wrt_state,
                         double fd_step)
{
  const Vec& base = wrt_state ? x : u;
  Mat jac(prob.n(), base.size());
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    const double h = fd_width(fd_step, base[i]);
    Vec plus = base;
    Vec minus = base;
    plus[i] += h;
    minus[i] -= h;
    const Vec fp = wrt_state ? prob.dynamics(plus, u) : prob.dynamics(x, plus);
    const Vec fm = wrt_state ? prob.dynamics(minus, u) : prob.dynamics(x, minus);
    jac.col(i) = (fp - fm) / (plus[i] - minus[i]);
  }
  return jac;
}

Vec fd_lagrangian_gradient(const ControlProblem& prob, const Vec& x, const Vec& u, bool wrt_state,
                           double fd_step)
{
  const Vec& base = wrt_state ? x : u;
  Vec grad(base.size());
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    const double h = fd_width(fd_step, base[i]);
    Vec plus = base;
    Vec minus = base;
    plus[i] += h;
    minus[i] -= h;
    const double lp = wrt_state ? prob.lagrangian(plus, u) : prob.lagrangian(x, plus);
    const double lm = wrt_state ? prob.lagrangian(minus, u) : prob.lagrangian(x, minus);
    grad[i] = (lp - lm) / (plus[i] - minus[i]);
  }
  return grad;
}

Mat dynamics_jacobian(const ControlProblem& prob, const Vec& x, const Vec& u, bool wrt_state,
                      double fd_step)
{
  const auto& d = prob.derivatives();
  const auto& analytic = wrt_state ? d.dynamics_dx : d.dynamics_du;
  if (!analytic) return fd_dynamics_jacobian(prob, x, u, wrt_state, fd_step);
  Mat jac = analytic(x, u);
  const Eigen::Index cols = wrt_state ? prob.n() : prob.r();
  if (jac.rows() != prob.n() || jac.cols() != cols) {
    throw EvaluationError("analytic dynamics jacobian has wrong shape at " + point_text(x, u));
  }
  return jac;
}

Vec lagrangian_gradient(const ControlProblem& prob, const Vec& x, const Vec& u, bool wrt_state,
                        double fd_step)
{
  const auto& d = prob.derivatives();
  const auto& analytic = wrt_state ? d.lagrangian_dx : d.lagrangian_du;
  if (!analytic) return fd_lagrangian_gradient(prob, x, u, wrt_state, fd_step);
  Vec grad = analytic(x, u);
  if (grad.size() != (wrt_state ? prob.n() : prob.r())) {
    throw EvaluationError("analytic lagrangian gradient has wrong length at " + point_text(x, u));
  }
  return grad;
}

void require_finite(const Vec& v, const char* what, const PontryaginPoint& pt)
{
  if (!v.allFinite()) {
    throw EvaluationError(std::string(what) + " is not finite at " + point_text(pt.x, pt.u) +
                          " p=" + format_vector(pt.p));
  }
}

}  // namespace

ControlProblem::ControlProblem(std::string name, int n, int r, VectorField dynamics,
                               ScalarField lagrangian, AnalyticDerivatives derivatives,
                               std::optional<Symmetry> symmetry)
  : name_(std::move(name)), n_(n), r_(r), dynamics_(std::move(dynamics)),
    lagrangian_(std::move(lagrangian)), derivatives_(std::move(derivatives)),
    symmetry_(std::move(symmetry))
{
  if (n_ <= 0) throw ArgumentError("ControlProblem: state dimension must be positive");
  if (r_ < 0) throw ArgumentError("ControlProblem: control dimension must be non-negative");
  if (!dynamics_ || !lagrangian_) throw ArgumentError("ControlProblem: dynamics and lagrangian required");
  if (symmetry_ && !symmetry_->infinitesimal_action) {
    throw ArgumentError("ControlProblem: symmetry needs an infinitesimal action");
  }
}

Vec ControlProblem::dynamics(const Vec& x, const Vec& u) const
{
  Vec f = dynamics_(x, u);
  if (f.size() != n_) {
    throw EvaluationError("dynamics returned length " + std::to_string(f.size()) + ", expected " +
                          std::to_string(n_) + " at " + point_text(x, u));
  }
  if (!f.allFinite()) throw EvaluationError("dynamics not finite at " + point_text(x, u));
  return f;
}

double ControlProblem::lagrangian(const Vec& x, const Vec& u) const
{
  const double l = lagrangian_(x, u);
  if (!std::isfinite(l)) throw EvaluationError("lagrangian not finite at " + point_text(x, u));
  return l;
}

const Symmetry& ControlProblem::require_symmetry() const
{
  if (!symmetry_) throw ArgumentError("problem '" + name_ + "' declares no symmetry");
  return *symmetry_;
}

void ControlProblem::check_conforms(const PontryaginPoint& pt) const
{
  require_size(pt.x, n_, "state x");
  require_size(pt.p, n_, "costate p");
  require_size(pt.u, r_, "control u");
}

double pontryagin_hamiltonian(const ControlProblem& prob, const PontryaginPoint& pt)
{
  prob.check_conforms(pt);
  return pt.p.dot(prob.dynamics(pt.x, pt.u)) - prob.lagrangian(pt.x, pt.u);
}

Vec hamiltonian_dx(const ControlProblem& prob, const PontryaginPoint& pt, double fd_step)
{
  prob.check_conforms(pt);
  Vec g = dynamics_jacobian(prob, pt.x, pt.u, true, fd_step).transpose() * pt.p -
          lagrangian_gradient(prob, pt.x, pt.u, true, fd_step);
  require_finite(g, "dH/dx", pt);
  return g;
}

Vec hamiltonian_du(const ControlProblem& prob, const PontryaginPoint& pt, double fd_step)
{
  prob.check_conforms(pt);
  if (prob.r() == 0) return Vec(0);
  Vec g = dynamics_jacobian(prob, pt.x, pt.u, false, fd_step).transpose() * pt.p -
          lagrangian_gradient(prob, pt.x, pt.u, false, fd_step);
  require_finite(g, "dH/du", pt);
  return g;
}

Mat hamiltonian_duu(const ControlProblem& prob, const PontryaginPoint& pt, double fd_step)
{
  prob.check_conforms(pt);
  const int r = prob.r();
  if (r == 0) return Mat(0, 0);
  const auto& d = prob.derivatives();
  Mat w(r, r);
  if (d.hamiltonian_uu) {
    w = d.hamiltonian_uu(pt.x, pt.p, pt.u);
    if (w.rows() != r || w.cols() != r) throw EvaluationError("analytic d2H/du2 has wrong shape");
  } else if (d.dynamics_du && d.lagrangian_du) {
    // Differentiate the exact gradient once.
    for (int a = 0; a < r; ++a) {
      const double h = fd_width(fd_step, pt.u[a]);
      PontryaginPoint plus = pt;
      PontryaginPoint minus = pt;
      plus.u[a] += h;
      minus.u[a] -= h;
      w.col(a) = (hamiltonian_du(prob, plus, fd_step) - hamiltonian_du(prob, minus, fd_step)) /
                 (plus.u[a] - minus.u[a]);
    }
    w = 0.5 * (w + w.transpose()).eval();
  } else {
    // Second differences of H; a wider step balances truncation and roundoff.
    auto H = [&](const Vec& u) {
      return pt.p.dot(prob.dynamics(pt.x, u)) - prob.lagrangian(pt.x, u);
    };
    const double h0 = H(pt.u);
    std::vector<double> hs(r);
    for (int a = 0; a < r; ++a) hs[a] = fd_width(kSecondDifferenceStep, pt.u[a]);
    for (int a = 0; a < r; ++a) {
      Vec up = pt.u;
      Vec um = pt.u;
      up[a] += hs[a];
      um[a] -= hs[a];
      w(a, a) = (H(up) - 2.0 * h0 + H(um)) / (hs[a] * hs[a]);
      for (int b = 0; b < a; ++b) {
        Vec pp = pt.u, pm = pt.u, mp = pt.u, mm = pt.u;
        pp[a] += hs[a]; pp[b] += hs[b];
        pm[a] += hs[a]; pm[b] -= hs[b];
        mp[a] -= hs[a]; mp[b] += hs[b];
        mm[a] -= hs[a]; mm[b] -= hs[b];
        const double v = (H(pp) - H(pm) - H(mp) + H(mm)) / (4.0 * hs[a] * hs[b]);
        w(a, b) = v;
        w(b, a) = v;
      }
    }
  }
  if (!w.allFinite()) {
    throw EvaluationError("d2H/du2 is not finite at " + point_text(pt.x, pt.u));
  }
  return w;
}

HamiltonianPartials hamiltonian_partials(const ControlProblem& prob, const PontryaginPoint& pt,
                                         double fd_step)
{
  prob.check_conforms(pt);
  HamiltonianPartials out;
  out.dp = prob.dynamics(pt.x, pt.u);
  out.dx = hamiltonian_dx(prob, pt, fd_step);
  out.du = hamiltonian_du(prob, pt, fd_step);
  out.duu = hamiltonian_duu(prob, pt, fd_step);
  return out;
}

JacobianCheckReport check_jacobians(const ControlProblem& prob, int samples, std::uint64_t seed,
                                    double fd_step, double rel_tol)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random_vec = [&](int size) {
    Vec v(size);
    for (int i = 0; i < size; ++i) v[i] = dist(rng);
    return v;
  };
  auto rel_error = [](const Mat& a, const Mat& b) {
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
  };

  const auto& d = prob.derivatives();
  JacobianCheckReport report;
  for (int s = 0; s < samples; ++s) {
    const Vec x = random_vec(prob.n());
    const Vec u = random_vec(prob.r());
    const Vec p = random_vec(prob.n());
    if (d.dynamics_dx) {
      report.max_relative_error = std::max(
          report.max_relative_error,
          rel_error(d.dynamics_dx(x, u), fd_dynamics_jacobian(prob, x, u, true, fd_step)));
    }
    if (d.dynamics_du) {
      report.max_relative_error = std::max(
          report.max_relative_error,
          rel_error(d.dynamics_du(x, u), fd_dynamics_jacobian(prob, x, u, false, fd_step)));
    }
    if (d.lagrangian_dx) {
      report.max_relative_error = std::max(
          report.max_relative_error,
          rel_error(d.lagrangian_dx(x, u), fd_lagrangian_gradient(prob, x, u, true, fd_step)));
    }
    if (d.lagrangian_du) {
      report.max_relative_error = std::max(
          report.max_relative_error,
          rel_error(d.lagrangian_du(x, u), fd_lagrangian_gradient(prob, x, u, false, fd_step)));
    }
    if (d.hamiltonian_uu && prob.r() > 0) {
      // Reference: second differences with every analytic piece switched off.
      ControlProblem bare(prob.name(), prob.n(), prob.r(),
                          [&prob](const Vec& xx, const Vec& uu) { return prob.dynamics(xx, uu); },
                          [&prob](const Vec& xx, const Vec& uu) { return prob.lagrangian(xx, uu); });
      const PontryaginPoint pt{x, p, u};
      report.max_relative_error =
          std::max(report.max_relative_error,
                   rel_error(d.hamiltonian_uu(x, p, u), hamiltonian_duu(bare, pt, fd_step)));
    }
  }
  report.consistent = report.max_relative_error <= rel_tol;
  return report;
}

InvarianceReport check_invariance(const ControlProblem& prob, int samples, std::uint64_t seed,
                                  const InvarianceOptions& options)
{
  const Symmetry& sym = prob.require_symmetry();
  if (!sym.finite_action) {
    throw ArgumentError("check_invariance: symmetry of '" + prob.name() +
                        "' has no finite group action");
  }
  if (samples <= 0) throw ArgumentError("check_invariance: samples must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-options.sample_radius, options.sample_radius);
  auto random_vec = [&](Eigen::Index size) {
    Vec v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = dist(rng);
    return v;
  };

  InvarianceReport report;
  report.samples = samples;
  const int d = sym.algebra.dim();
  for (int s = 0; s < samples; ++s) {
    const AlgebraElement xi{options.identity_only ? Vec(Vec::Zero(d)) : random_vec(d)};
    const Vec x = random_vec(prob.n());
    const Vec u = random_vec(prob.r());
    const Vec f = prob.dynamics(x, u);

    Vec gx;
    Vec pushed;  // T Phi_g applied to f(x, u)
    if (xi.coeffs.isZero(0.0)) {
      // Phi_e is the identity map.
      gx = x;
      pushed = f;
    } else {
      gx = sym.finite_action(xi, x);
      require_size(gx, prob.n(), "finite_action");
      const double fnorm = std::max(1.0, f.norm());
      const double step = 6e-6 * (1.0 + x.norm()) / fnorm;
      pushed = (sym.finite_action(xi, x + step * f) - sym.finite_action(xi, x - step * f)) /
               (2.0 * step);
    }
    report.lagrangian_deviation =
        std::max(report.lagrangian_deviation, std::abs(prob.lagrangian(gx, u) - prob.lagrangian(x, u)));
    report.dynamics_deviation = std::max(report.dynamics_deviation,
                                         (pushed - prob.dynamics(gx, u)).cwiseAbs().maxCoeff());
  }
  report.invariant = report.lagrangian_deviation <= options.tolerance &&
                     report.dynamics_deviation <= options.tolerance;
  return report;
}

}  // namespace geopmp
