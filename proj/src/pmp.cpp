#include "geopmp/pmp.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace geopmp {

namespace {

std::string at_time(double t)
{
  std::ostringstream os;
  os.precision(12);
  os << " (t = " << t << ")";
  return os.str();
}

std::map<std::string, double> pmp_channels(const ControlProblem& prob, const PontryaginPoint& pt)
{
  std::map<std::string, double> ch{{"H", pontryagin_hamiltonian(prob, pt)}};
  if (prob.symmetry()) {
    const CoalgebraElement j = momentum_map(prob, pt.x, pt.p);
    for (Eigen::Index i = 0; i < j.coeffs.size(); ++i) {
      ch["J_" + std::to_string(i + 1)] = j.coeffs[i];
    }
  }
  return ch;
}

}  // namespace

void PmpConfig::validate() const
{
  if (!(newton_tol > 0.0) || !(rk_step > 0.0) || !(fd_step > 0.0) ||
      !(regularity_rank_tol > 0.0) || !(branch_jump_tol > 0.0)) {
    throw ArgumentError("PmpConfig: tolerances and steps must be positive");
  }
  if (newton_max_iter < 1) throw ArgumentError("PmpConfig: newton_max_iter must be at least 1");
}

TimeGrid make_time_grid(double T, double requested_step)
{
  if (!std::isfinite(T) || T < 0.0) throw ArgumentError("time horizon T must be finite and >= 0");
  if (!std::isfinite(requested_step) || requested_step <= 0.0) {
    throw ArgumentError("integration step must be finite and positive");
  }
  if (T == 0.0) return {0, requested_step};
  const double ratio = T / requested_step;
  if (ratio > 1e9) throw ArgumentError("integration step too small for the horizon");
  const int steps = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
  return {steps, T / steps};
}

Vec consistency_residual(const ControlProblem& prob, const PontryaginPoint& pt, double fd_step)
{
  return hamiltonian_du(prob, pt, fd_step);
}

double control_hessian_min_singular_value(const ControlProblem& prob, const PontryaginPoint& pt,
                                          const PmpConfig& cfg)
{
  if (prob.r() == 0) {
    prob.check_conforms(pt);
    return std::numeric_limits<double>::infinity();
  }
  const Mat w = hamiltonian_duu(prob, pt, cfg.fd_step);
  Eigen::JacobiSVD<Mat> svd(w);
  return svd.singularValues().minCoeff();
}

bool regularity_check(const ControlProblem& prob, const PontryaginPoint& pt, const PmpConfig& cfg)
{
  return control_hessian_min_singular_value(prob, pt, cfg) > cfg.regularity_rank_tol;
}

FeedbackSolution optimal_feedback(const ControlProblem& prob, const Vec& x, const Vec& p,
                                  const Vec& u_guess, const PmpConfig& cfg)
{
  cfg.validate();
  PontryaginPoint pt{x, p, u_guess};
  prob.check_conforms(pt);
  FeedbackSolution sol;
  if (prob.r() == 0) {
    sol.u = Vec(0);
    return sol;
  }
  for (;;) {
    const Vec phi = hamiltonian_du(prob, pt, cfg.fd_step);
    sol.residual_norm = phi.norm();
    if (sol.residual_norm <= cfg.newton_tol) break;
    if (sol.iterations >= cfg.newton_max_iter) {
      std::ostringstream os;
      os << "optimal_feedback: no convergence after " << sol.iterations
         << " Newton iterations, |phi| = " << sol.residual_norm;
      throw NoConvergenceError(os.str(), sol.residual_norm);
    }
    const Mat w = hamiltonian_duu(prob, pt, cfg.fd_step);
    Eigen::JacobiSVD<Mat> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() <= cfg.regularity_rank_tol) {
      throw RegularityError("optimal_feedback: d2H/du2 is singular at x=" + format_vector(x) +
                            " p=" + format_vector(p) + " u=" + format_vector(pt.u));
    }
    pt.u -= svd.solve(phi);
    ++sol.iterations;
  }
  sol.u = pt.u;
  return sol;
}

std::vector<StateBlock> pmp_layout(int n, int r) { return {{"x", n}, {"p", n}, {"u", r}}; }

PontryaginPoint pontryagin_point(const Trajectory& traj, std::size_t row)
{
  return {traj.block(row, "x"), traj.block(row, "p"), traj.block(row, "u")};
}

Trajectory integrate_pmp(const ControlProblem& prob, const Vec& x0, const Vec& p0, double T,
                         const PmpConfig& cfg, const std::optional<Vec>& u_guess)
{
  cfg.validate();
  const int n = prob.n();
  const int r = prob.r();
  require_size(x0, n, "initial state x0");
  require_size(p0, n, "initial costate p0");
  const Vec guess = u_guess ? *u_guess : Vec(Vec::Zero(r));
  require_size(guess, r, "initial control guess");
  const TimeGrid grid = make_time_grid(T, cfg.rk_step);
  const double h = grid.step;

  // Eliminates u at (x, p), tracking the branch from u_warm.
  auto feedback = [&](const Vec& y, const Vec& u_warm, double t, bool track) {
    try {
      Vec u = optimal_feedback(prob, y.head(n), y.tail(n), u_warm, cfg).u;
      if (track && (u - u_warm).norm() > cfg.branch_jump_tol * (1.0 + u_warm.norm())) {
        throw BranchSwitchError("integrate_pmp: feedback jumped from u=" + format_vector(u_warm) +
                                " to u=" + format_vector(u));
      }
      return u;
    } catch (const NoConvergenceError& e) {
      throw NoConvergenceError(e.what() + at_time(t), e.last_residual());
    } catch (const RegularityError& e) {
      throw RegularityError(e.what() + at_time(t));
    } catch (const BranchSwitchError& e) {
      throw BranchSwitchError(e.what() + at_time(t));
    } catch (const EvaluationError& e) {
      throw EvaluationError(e.what() + at_time(t));
    }
  };
  auto rhs = [&](const Vec& y, const Vec& u) {
    const PontryaginPoint pt{y.head(n), y.tail(n), u};
    Vec dy(2 * n);
    dy.head(n) = prob.dynamics(pt.x, pt.u);
    dy.tail(n) = -hamiltonian_dx(prob, pt, cfg.fd_step);
    return dy;
  };
  auto row = [&](const Vec& y, const Vec& u) {
    Vec s(2 * n + r);
    s << y, u;
    return s;
  };

  Vec y(2 * n);
  y << x0, p0;
  Vec u = feedback(y, guess, 0.0, false);

  Trajectory traj(pmp_layout(n, r));
  traj.append(0.0, row(y, u), pmp_channels(prob, {x0, p0, u}));

  for (int k = 0; k < grid.steps; ++k) {
    const double t = k * h;
    const Vec k1 = rhs(y, u);
    const Vec y2 = y + 0.5 * h * k1;
    const Vec u2 = feedback(y2, u, t + 0.5 * h, true);
    const Vec k2 = rhs(y2, u2);
    const Vec y3 = y + 0.5 * h * k2;
    const Vec u3 = feedback(y3, u2, t + 0.5 * h, true);
    const Vec k3 = rhs(y3, u3);
    const Vec y4 = y + h * k3;
    const Vec u4 = feedback(y4, u3, t + h, true);
    const Vec k4 = rhs(y4, u4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    u = feedback(y, u4, t + h, true);
    const double t_next = (k + 1 == grid.steps) ? T : (k + 1) * h;
    traj.append(t_next, row(y, u), pmp_channels(prob, {y.head(n), y.tail(n), u}));
  }
  return traj;
}

double lagrange_pontryagin_action(const ControlProblem& prob, const Trajectory& traj)
{
  if (traj.size() < 2) throw ArgumentError("lagrange_pontryagin_action: need at least two samples");
  if (traj.block_size("x") != prob.n() || traj.block_size("p") != prob.n() ||
      traj.block_size("u") != prob.r()) {
    throw ArgumentError("lagrange_pontryagin_action: trajectory layout does not match the problem");
  }
  const auto velocity = differentiate_rows(traj);
  const auto& t = traj.times();
  std::vector<double> integrand(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const PontryaginPoint pt = pontryagin_point(traj, i);
    const Vec xdot = velocity[i].head(prob.n());
    integrand[i] = prob.lagrangian(pt.x, pt.u) + pt.p.dot(xdot - prob.dynamics(pt.x, pt.u));
  }
  double s = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    s += 0.5 * (t[i] - t[i - 1]) * (integrand[i] + integrand[i - 1]);
  }
  return s;
}

CoalgebraElement momentum_map(const ControlProblem& prob, const Vec& x, const Vec& p)
{
  const Symmetry& sym = prob.require_symmetry();
  require_size(x, prob.n(), "momentum_map x");
  require_size(p, prob.n(), "momentum_map p");
  const int d = sym.algebra.dim();
  CoalgebraElement j{Vec(d)};
  for (int i = 0; i < d; ++i) {
    const Vec field = sym.infinitesimal_action(sym.algebra.basis(i), x);
    require_size(field, prob.n(), "infinitesimal action");
    j.coeffs[i] = p.dot(field);
  }
  return j;
}

}  // namespace geopmp
