#include "geopmp/reduction.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <sstream>

namespace geopmp {

namespace {

double fd_width(double fd_step, double coordinate) { return fd_step * (1.0 + std::abs(coordinate)); }

std::string at_time(double t)
{
  std::ostringstream os;
  os.precision(12);
  os << " (t = " << t << ")";
  return os.str();
}

void check_state(const ReducedProblem& rp, const ReducedState& st)
{
  require_size(st.z, rp.base_dim(), "reduced state z");
  require_size(st.pz, rp.base_dim(), "reduced state pz");
  require_size(st.mu.coeffs, rp.algebra().dim(), "reduced state mu");
  require_size(st.u, rp.control_dim(), "reduced state u");
}

/// Central-difference gradient of a scalar function around base.
template <typename F>
Vec fd_gradient(F&& f, const Vec& base, double fd_step)
{
  Vec g(base.size());
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    const double h = fd_width(fd_step, base[i]);
    Vec plus = base;
    Vec minus = base;
    plus[i] += h;
    minus[i] -= h;
    g[i] = (f(plus) - f(minus)) / (plus[i] - minus[i]);
  }
  return g;
}

Vec reduced_dz(const ReducedProblem& rp, const ReducedState& st, double fd_step)
{
  if (rp.base_dim() == 0) return Vec(0);
  const auto& d = rp.derivatives();
  if (d.base_dynamics_dz && d.algebra_dynamics_dz && d.lagrangian_dz) {
    return d.base_dynamics_dz(st.z, st.u).transpose() * st.pz +
           d.algebra_dynamics_dz(st.z, st.u).transpose() * st.mu.coeffs -
           d.lagrangian_dz(st.z, st.u);
  }
  return fd_gradient(
      [&](const Vec& z) {
        ReducedState s = st;
        s.z = z;
        return reduced_hamiltonian(rp, s);
      },
      st.z, fd_step);
}

Vec reduced_du(const ReducedProblem& rp, const ReducedState& st, double fd_step)
{
  if (rp.control_dim() == 0) return Vec(0);
  const auto& d = rp.derivatives();
  if (d.base_dynamics_du && d.algebra_dynamics_du && d.lagrangian_du) {
    return d.base_dynamics_du(st.z, st.u).transpose() * st.pz +
           d.algebra_dynamics_du(st.z, st.u).transpose() * st.mu.coeffs -
           d.lagrangian_du(st.z, st.u);
  }
  return fd_gradient(
      [&](const Vec& u) {
        ReducedState s = st;
        s.u = u;
        return reduced_hamiltonian(rp, s);
      },
      st.u, fd_step);
}

Mat reduced_duu(const ReducedProblem& rp, const ReducedState& st, double fd_step)
{
  const int r = rp.control_dim();
  if (r == 0) return Mat(0, 0);
  const auto& d = rp.derivatives();
  if (d.hamiltonian_uu) {
    Mat w = d.hamiltonian_uu(st.z, st.pz, st.mu.coeffs, st.u);
    if (w.rows() != r || w.cols() != r) throw EvaluationError("analytic d2h/du2 has wrong shape");
    return w;
  }
  Mat w(r, r);
  if (d.base_dynamics_du && d.algebra_dynamics_du && d.lagrangian_du) {
    for (int a = 0; a < r; ++a) {
      const double h = fd_width(fd_step, st.u[a]);
      ReducedState plus = st;
      ReducedState minus = st;
      plus.u[a] += h;
      minus.u[a] -= h;
      w.col(a) = (reduced_du(rp, plus, fd_step) - reduced_du(rp, minus, fd_step)) /
                 (plus.u[a] - minus.u[a]);
    }
    return 0.5 * (w + w.transpose());
  }
  auto H = [&](const Vec& u) {
    ReducedState s = st;
    s.u = u;
    return reduced_hamiltonian(rp, s);
  };
  const double h0 = H(st.u);
  std::vector<double> hs(r);
  for (int a = 0; a < r; ++a) hs[a] = fd_width(kSecondDifferenceStep, st.u[a]);
  for (int a = 0; a < r; ++a) {
    Vec up = st.u, um = st.u;
    up[a] += hs[a];
    um[a] -= hs[a];
    w(a, a) = (H(up) - 2.0 * h0 + H(um)) / (hs[a] * hs[a]);
    for (int b = 0; b < a; ++b) {
      Vec pp = st.u, pm = st.u, mp = st.u, mm = st.u;
      pp[a] += hs[a]; pp[b] += hs[b];
      pm[a] += hs[a]; pm[b] -= hs[b];
      mp[a] -= hs[a]; mp[b] += hs[b];
      mm[a] -= hs[a]; mm[b] -= hs[b];
      const double v = (H(pp) - H(pm) - H(mp) + H(mm)) / (4.0 * hs[a] * hs[b]);
      w(a, b) = v;
      w(b, a) = v;
    }
  }
  return w;
}

std::map<std::string, double> reduced_channels(const ReducedProblem& rp, const ReducedState& st)
{
  std::map<std::string, double> ch{{"h", reduced_hamiltonian(rp, st)}};
  for (const auto& c : rp.casimirs()) ch["casimir_" + c.name] = c.value(st.mu);
  return ch;
}

}  // namespace

ReducedProblem::ReducedProblem(std::string name, int base_dim, LieAlgebra algebra,
                               int control_dim, ScalarField lagrangian, VectorField base_dynamics,
                               VectorField algebra_dynamics, Curvature curvature,
                               ReducedDerivatives derivatives, std::vector<Casimir> casimirs)
  : name_(std::move(name)), s_(base_dim), algebra_(std::move(algebra)), r_(control_dim),
    lagrangian_(std::move(lagrangian)), base_dynamics_(std::move(base_dynamics)),
    algebra_dynamics_(std::move(algebra_dynamics)), curvature_(std::move(curvature)),
    derivatives_(std::move(derivatives)), casimirs_(std::move(casimirs))
{
  if (s_ < 0 || r_ < 0) throw ArgumentError("ReducedProblem: negative dimension");
  if (!lagrangian_ || !algebra_dynamics_) {
    throw ArgumentError("ReducedProblem: lagrangian and algebra dynamics are required");
  }
  if (s_ > 0 && !base_dynamics_) throw ArgumentError("ReducedProblem: base dynamics required");
  for (const auto& c : casimirs_) {
    if (!c.value || c.name.empty()) throw ArgumentError("ReducedProblem: malformed Casimir");
  }
}

double ReducedProblem::lagrangian(const Vec& z, const Vec& u) const
{
  const double l = lagrangian_(z, u);
  if (!std::isfinite(l)) throw EvaluationError("reduced lagrangian not finite at u=" + format_vector(u));
  return l;
}

Vec ReducedProblem::base_dynamics(const Vec& z, const Vec& u) const
{
  if (s_ == 0) return Vec(0);
  Vec v = base_dynamics_(z, u);
  if (v.size() != s_ || !v.allFinite()) {
    throw EvaluationError("reduced base dynamics invalid at z=" + format_vector(z) +
                          " u=" + format_vector(u));
  }
  return v;
}

Vec ReducedProblem::algebra_dynamics(const Vec& z, const Vec& u) const
{
  Vec v = algebra_dynamics_(z, u);
  if (v.size() != algebra_.dim() || !v.allFinite()) {
    throw EvaluationError("reduced algebra dynamics invalid at z=" + format_vector(z) +
                          " u=" + format_vector(u));
  }
  return v;
}

double ReducedProblem::curvature(const Vec& z, const Vec& mu, const Vec& v, const Vec& w) const
{
  if (!curvature_) return 0.0;
  const double c = curvature_(z, mu, v, w);
  if (!std::isfinite(c)) throw EvaluationError("curvature not finite at z=" + format_vector(z));
  return c;
}

Vec ReducedProblem::curvature_covector(const Vec& z, const Vec& mu, const Vec& v) const
{
  Vec out = Vec::Zero(s_);
  if (!curvature_) return out;
  for (int j = 0; j < s_; ++j) {
    Vec e = Vec::Zero(s_);
    e[j] = 1.0;
    out[j] = curvature(z, mu, v, e);
  }
  return out;
}

double ReducedProblem::curvature_antisymmetry_defect(int samples, std::uint64_t seed) const
{
  if (!curvature_ || s_ == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random_vec = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
  };
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec z = random_vec(s_);
    const Vec mu = random_vec(algebra_.dim());
    const Vec v = random_vec(s_);
    const Vec w = random_vec(s_);
    worst = std::max(worst, std::abs(curvature(z, mu, v, w) + curvature(z, mu, w, v)));
  }
  return worst;
}

void ReducedConfig::validate() const
{
  PmpConfig::validate();
  if (coadjoint_sign != 1.0 && coadjoint_sign != -1.0) {
    throw ArgumentError("ReducedConfig: coadjoint_sign must be +1 or -1");
  }
}

double reduced_hamiltonian(const ReducedProblem& rp, const ReducedState& st)
{
  check_state(rp, st);
  double h = st.mu.coeffs.dot(rp.algebra_dynamics(st.z, st.u)) - rp.lagrangian(st.z, st.u);
  if (rp.base_dim() > 0) h += st.pz.dot(rp.base_dynamics(st.z, st.u));
  return h;
}

ReducedPartials reduced_partials(const ReducedProblem& rp, const ReducedState& st, double fd_step)
{
  check_state(rp, st);
  ReducedPartials out;
  out.dpz = rp.base_dynamics(st.z, st.u);
  out.dmu = rp.algebra_dynamics(st.z, st.u);
  out.dz = reduced_dz(rp, st, fd_step);
  out.du = reduced_du(rp, st, fd_step);
  out.duu = reduced_duu(rp, st, fd_step);
  if (!out.dz.allFinite() || !out.du.allFinite() || !out.duu.allFinite()) {
    throw EvaluationError("reduced partials not finite at u=" + format_vector(st.u));
  }
  return out;
}

FeedbackSolution eliminate_controls_reduced(const ReducedProblem& rp, const Vec& z, const Vec& pz,
                                            const CoalgebraElement& mu, const Vec& u_guess,
                                            const ReducedConfig& cfg)
{
  cfg.validate();
  ReducedState st{z, pz, mu, u_guess};
  check_state(rp, st);
  FeedbackSolution sol;
  if (rp.control_dim() == 0) {
    sol.u = Vec(0);
    return sol;
  }
  for (;;) {
    const Vec phi = reduced_du(rp, st, cfg.fd_step);
    sol.residual_norm = phi.norm();
    if (sol.residual_norm <= cfg.newton_tol) break;
    if (sol.iterations >= cfg.newton_max_iter) {
      std::ostringstream os;
      os << "eliminate_controls_reduced: no convergence after " << sol.iterations
         << " Newton iterations, |dh/du| = " << sol.residual_norm;
      throw NoConvergenceError(os.str(), sol.residual_norm);
    }
    const Mat w = reduced_duu(rp, st, cfg.fd_step);
    Eigen::JacobiSVD<Mat> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() <= cfg.regularity_rank_tol) {
      throw RegularityError("eliminate_controls_reduced: d2h/du2 is singular at mu=" +
                            format_vector(mu.coeffs) + " u=" + format_vector(st.u));
    }
    st.u -= svd.solve(phi);
    ++sol.iterations;
  }
  sol.u = st.u;
  return sol;
}

ReducedRhs reduced_pmp_rhs(const ReducedProblem& rp, const ReducedState& st,
                           const ReducedConfig& cfg)
{
  check_state(rp, st);
  ReducedRhs out;
  out.zdot = rp.base_dynamics(st.z, st.u);
  out.xi = AlgebraElement{rp.algebra_dynamics(st.z, st.u)};
  out.pzdot = -reduced_dz(rp, st, cfg.fd_step);
  if (rp.base_dim() > 0) out.pzdot -= rp.curvature_covector(st.z, st.mu.coeffs, out.zdot);
  out.mudot = coadjoint(rp.algebra(), out.xi, st.mu);
  out.mudot.coeffs *= cfg.coadjoint_sign;
  return out;
}

std::vector<StateBlock> reduced_layout(int s, int dim, int r)
{
  return {{"z", s}, {"pz", s}, {"mu", dim}, {"u", r}};
}

ReducedState reduced_state(const Trajectory& traj, std::size_t row)
{
  return {traj.block(row, "z"), traj.block(row, "pz"), CoalgebraElement{traj.block(row, "mu")},
          traj.block(row, "u")};
}

Trajectory integrate_reduced(const ReducedProblem& rp, const ReducedState& st0, double T,
                             const ReducedConfig& cfg)
{
  cfg.validate();
  check_state(rp, st0);
  const int s = rp.base_dim();
  const int d = rp.algebra().dim();
  const int r = rp.control_dim();
  const TimeGrid grid = make_time_grid(T, cfg.rk_step);
  const double h = grid.step;

  auto unpack = [&](const Vec& y, const Vec& u) {
    return ReducedState{y.head(s), y.segment(s, s), CoalgebraElement{y.tail(d)}, u};
  };
  auto feedback = [&](const Vec& y, const Vec& u_warm, double t, bool track) {
    const ReducedState st = unpack(y, u_warm);
    try {
      Vec u = eliminate_controls_reduced(rp, st.z, st.pz, st.mu, u_warm, cfg).u;
      if (track && (u - u_warm).norm() > cfg.branch_jump_tol * (1.0 + u_warm.norm())) {
        throw BranchSwitchError("integrate_reduced: feedback jumped from u=" +
                                format_vector(u_warm) + " to u=" + format_vector(u));
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
    const ReducedRhs f = reduced_pmp_rhs(rp, unpack(y, u), cfg);
    Vec dy(2 * s + d);
    dy << f.zdot, f.pzdot, f.mudot.coeffs;
    return dy;
  };
  auto row = [&](const Vec& y, const Vec& u) {
    Vec out(2 * s + d + r);
    out << y, u;
    return out;
  };

  Vec y(2 * s + d);
  y << st0.z, st0.pz, st0.mu.coeffs;
  Vec u = feedback(y, st0.u, 0.0, false);

  Trajectory traj(reduced_layout(s, d, r));
  traj.append(0.0, row(y, u), reduced_channels(rp, unpack(y, u)));
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
    traj.append(t_next, row(y, u), reduced_channels(rp, unpack(y, u)));
  }
  return traj;
}

ReducedState project_full_to_reduced(const ControlProblem& prob, const PontryaginPoint& pt)
{
  prob.check_conforms(pt);
  const Symmetry& sym = prob.require_symmetry();
  const int d = sym.algebra.dim();
  if (!sym.left_invariant_field || d != prob.n()) {
    throw UnsupportedError("project_full_to_reduced: only the case P = G with a left-invariant "
                           "frame is supported");
  }
  CoalgebraElement lambda{Vec(d)};
  for (int i = 0; i < d; ++i) {
    const Vec field = sym.left_invariant_field(sym.algebra.basis(i), pt.x);
    require_size(field, prob.n(), "left-invariant field");
    lambda.coeffs[i] = pt.p.dot(field);
  }
  return ReducedState{Vec(0), Vec(0), lambda, pt.u};
}

Vec costate_from_body_momentum(const ControlProblem& prob, const Vec& x, const Vec& lambda)
{
  const Symmetry& sym = prob.require_symmetry();
  const int d = sym.algebra.dim();
  if (!sym.left_invariant_field || d != prob.n()) {
    throw UnsupportedError("costate_from_body_momentum: only the case P = G with a left-invariant "
                           "frame is supported");
  }
  require_size(x, prob.n(), "state");
  require_size(lambda, d, "body momentum");
  Mat frame(d, d);
  for (int i = 0; i < d; ++i) {
    const Vec field = sym.left_invariant_field(sym.algebra.basis(i), x);
    require_size(field, prob.n(), "left-invariant field");
    frame.col(i) = field;
  }
  Eigen::FullPivLU<Mat> lu(frame.transpose());
  if (!lu.isInvertible()) {
    throw ArgumentError("left-invariant frame is singular at x=" + format_vector(x));
  }
  return lu.solve(lambda);
}

double membership_residual_reduced(const LieAlgebra& alg, const CoalgebraElement& lambda,
                                   const CoalgebraElement& lambda_dot, const AlgebraElement& xi,
                                   const AlgebraElement& dh_dmu)
{
  const int d = alg.dim();
  require_size(lambda_dot.coeffs, d, "lambda_dot");
  require_size(xi.coeffs, d, "xi");
  require_size(dh_dmu.coeffs, d, "dh/dmu");
  const LinearDiracStructure fiber = reduced_dirac_fiber(alg, lambda);
  Vec v(2 * d);
  Vec alpha(2 * d);
  v << xi.coeffs, lambda_dot.coeffs;
  alpha << Vec::Zero(d), dh_dmu.coeffs;
  const double norm = std::sqrt(v.squaredNorm() + alpha.squaredNorm());
  return fiber.distance(v, alpha) / (1.0 + norm);
}

bool membership_check_reduced(const LieAlgebra& alg, const CoalgebraElement& lambda,
                              const CoalgebraElement& lambda_dot, const AlgebraElement& xi,
                              const AlgebraElement& dh_dmu, double tol)
{
  return membership_residual_reduced(alg, lambda, lambda_dot, xi, dh_dmu) <= tol;
}

LinearDiracStructure reduced_pontryagin_fiber(const ReducedProblem& rp, const Vec& z,
                                              const CoalgebraElement& mu)
{
  const int s = rp.base_dim();
  const int d = rp.algebra().dim();
  require_size(z, s, "reduced fiber z");
  Mat m = Mat::Zero(2 * s + 2 * d, 2 * s + 2 * d);
  for (int i = 0; i < s; ++i) {
    m(i, s + i) = 1.0;
    m(s + i, i) = -1.0;
  }
  if (rp.has_curvature()) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        Vec ei = Vec::Zero(s), ej = Vec::Zero(s);
        ei[i] = 1.0;
        ej[j] = 1.0;
        m(i, j) = -rp.curvature(z, mu.coeffs, ei, ej);
      }
    }
    m.topLeftCorner(s, s) = 0.5 * (m.topLeftCorner(s, s) - m.topLeftCorner(s, s).transpose()).eval();
  }
  m.bottomRightCorner(2 * d, 2 * d) = reduced_fiber_form(rp.algebra(), mu);
  return graph_of_two_form(TwoForm(m));
}

std::vector<double> reduced_trajectory_membership(const ReducedProblem& rp, const Trajectory& traj,
                                                  double fd_step)
{
  const int s = rp.base_dim();
  const int d = rp.algebra().dim();
  if (traj.block_size("z") != s || traj.block_size("pz") != s || traj.block_size("mu") != d ||
      traj.block_size("u") != rp.control_dim()) {
    throw ArgumentError("reduced trajectory layout does not match the reduced problem");
  }
  const auto velocity = differentiate_rows(traj);
  std::vector<double> residuals(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ReducedState st = reduced_state(traj, i);
    const ReducedPartials dh = reduced_partials(rp, st, fd_step);
    // Row layout is (z, pz, mu, u); the fiber uses (z, pz, xi, mu).
    Vec v(2 * s + 2 * d);
    v << velocity[i].head(2 * s), dh.dmu, velocity[i].segment(2 * s, d);
    Vec alpha(2 * s + 2 * d);
    alpha << dh.dz, dh.dpz, Vec::Zero(d), dh.dmu;
    const LinearDiracStructure fiber = reduced_pontryagin_fiber(rp, st.z, st.mu);
    const double norm = std::sqrt(v.squaredNorm() + alpha.squaredNorm());
    residuals[i] = fiber.distance(v, alpha) / (1.0 + norm);
  }
  return residuals;
}

std::vector<double> pmp_trajectory_membership(const ControlProblem& prob, const Trajectory& traj,
                                              double fd_step)
{
  const int n = prob.n();
  const int r = prob.r();
  if (traj.block_size("x") != n || traj.block_size("p") != n || traj.block_size("u") != r) {
    throw ArgumentError("trajectory layout does not match the control problem");
  }
  const LinearDiracStructure fiber = graph_of_two_form(pontryagin_presymplectic_form(n, r));
  const auto velocity = differentiate_rows(traj);
  std::vector<double> residuals(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const PontryaginPoint pt = pontryagin_point(traj, i);
    const HamiltonianPartials dh = hamiltonian_partials(prob, pt, fd_step);
    Vec v(2 * n + r);
    v << velocity[i].head(2 * n), Vec::Zero(r);
    Vec alpha(2 * n + r);
    alpha << dh.dx, dh.dp, dh.du;
    const double norm = std::sqrt(v.squaredNorm() + alpha.squaredNorm());
    residuals[i] = fiber.distance(v, alpha) / (1.0 + norm);
  }
  return residuals;
}

}  // namespace geopmp
