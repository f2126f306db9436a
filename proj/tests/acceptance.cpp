// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "geopmp/builtin.hpp"
#include "geopmp/dirac.hpp"
#include "geopmp/pmp.hpp"
#include "geopmp/reconstruct.hpp"
#include "geopmp/reduction.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace geopmp;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail)
{
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void guarded(int id, const std::string& title, const std::function<std::pair<bool, std::string>()>& body)
{
  try {
    const auto [pass, detail] = body();
    report(id, title, pass, detail);
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a)
{
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double drift(const std::vector<double>& c)
{
  double d = 0.0;
  for (double v : c) d = std::max(d, std::abs(v - c.front()));
  return d;
}

ReducedState reduced_start(const Vec& lambda) { return {Vec(0), Vec(0), {lambda}, Vec::Zero(2)}; }

const double kT = 2 * M_PI;

std::pair<bool, std::string> lie_poisson()
{
  const ReducedProblem rp = heisenberg_reduced_problem();
  double worst = 0.0;
  for (double th : {0.0, M_PI / 4}) {
    for (double k : {0.5, 1.0, 2.0}) {
      const Trajectory tr = integrate_reduced(rp, reduced_start(heisenberg_lambda(th, k)), kT);
      for (std::size_t i = 0; i < tr.size(); ++i) {
        const Vec exact = heisenberg_lambda(th + k * tr.times()[i], k);
        worst = std::max(worst, (tr.block(i, "mu") - exact).cwiseAbs().maxCoeff());
      }
    }
  }
  return {worst <= 1e-6, fmt("max |lambda - closed form| = %.3e over 6 runs, bound 1e-6", worst)};
}

std::pair<bool, std::string> conservation()
{
  const ControlProblem h = heisenberg_problem();
  double hd = 0.0, pd = 0.0, jd = 0.0;
  for (auto [th, k] : {std::pair{0.0, 1.0}, std::pair{0.7, -1.3}}) {
    const Trajectory tr = integrate_pmp(h, Vec::Zero(3), heisenberg_lambda(th, k), kT);
    hd = std::max(hd, drift(tr.channel("H")));
    std::vector<double> l3;
    for (std::size_t i = 0; i < tr.size(); ++i)
      l3.push_back(project_full_to_reduced(h, pontryagin_point(tr, i)).mu.coeffs[2]);
    pd = std::max(pd, drift(l3));
    jd = std::max(jd, drift(tr.channel("J_3")));
  }
  std::ostringstream s;
  s << fmt("H drift %.3e (<= 1e-6), ", hd) << fmt("lambda3 drift %.3e (<= 1e-9), ", pd)
    << fmt("J_3 drift %.3e (<= 1e-8)", jd);
  return {hd <= 1e-6 && pd <= 1e-9 && jd <= 1e-8, s.str()};
}

std::pair<bool, std::string> commutation()
{
  const ControlProblem h = heisenberg_problem();
  const ReducedProblem rp = heisenberg_reduced_problem();
  double worst = 0.0;
  const Vec x0 = (Vec(3) << 0.5, -0.25, 1.0).finished();
  for (auto [th, k] : {std::pair{0.0, 1.0}, std::pair{0.3, 1.7}}) {
    const Vec p0 = heisenberg_costate(x0, heisenberg_lambda(th, k));
    const Trajectory full = integrate_pmp(h, x0, p0, kT);
    const ReducedState st0 = project_full_to_reduced(h, {x0, p0, full.block(0, "u")});
    const Trajectory red = integrate_reduced(rp, st0, kT);
    if (red.size() != full.size()) return {false, "full and reduced grids differ"};
    for (std::size_t i = 0; i < full.size(); ++i) {
      const Vec lam = project_full_to_reduced(h, pontryagin_point(full, i)).mu.coeffs;
      worst = std::max(worst, (lam - red.block(i, "mu")).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-5, fmt("max |project(full) - reduced| = %.3e, bound 1e-5", worst)};
}

std::pair<bool, std::string> membership()
{
  const ControlProblem h = heisenberg_problem();
  const ReducedProblem rp = heisenberg_reduced_problem();
  const Trajectory full = integrate_pmp(h, Vec::Zero(3), heisenberg_lambda(0.3, 1.7), kT);
  const Trajectory red = integrate_reduced(rp, reduced_start(heisenberg_lambda(0.3, 1.7)), kT);
  double wf = 0.0, wr = 0.0;
  for (double v : pmp_trajectory_membership(h, full)) wf = std::max(wf, v);
  for (double v : reduced_trajectory_membership(rp, red)) wr = std::max(wr, v);
  double we = 0.0;
  for (std::size_t i = 0; i < red.size(); ++i) {
    const ReducedState st = reduced_state(red, i);
    const ReducedRhs r = reduced_pmp_rhs(rp, st);
    we = std::max(we, membership_residual_reduced(rp.algebra(), st.mu, r.mudot, r.xi, r.xi));
  }
  std::ostringstream s;
  s << fmt("full %.3e, ", wf) << fmt("reduced %.3e, ", wr) << fmt("reduced (exact velocities) %.3e, bound 1e-6", we);
  return {wf <= 1e-6 && wr <= 1e-6 && we <= 1e-6, s.str()};
}

std::pair<bool, std::string> dirac_suite()
{
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  int graphs = 0, identities = 0;
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 8;
    Mat a(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) a(r, c) = u(rng);
    const LinearDiracStructure g = graph_of_two_form(TwoForm(a - a.transpose()));
    if (is_dirac(g)) ++graphs;
    const Mat id = Mat::Identity(d, d);
    if (subspace_equal(backward(id, g), g) && subspace_equal(forward(id, g), g)) ++identities;
  }
  bool local = true;
  for (auto [n, r] : {std::pair{2, 1}, std::pair{3, 2}}) {
    const LinearDiracStructure back =
        backward(pontryagin_projection(n, r), graph_of_two_form(canonical_cotangent_form(n)));
    local = local && is_dirac(back) &&
            subspace_equal(back, graph_of_two_form(pontryagin_presymplectic_form(n, r)), 1e-10);
  }
  std::ostringstream s;
  s << graphs << "/200 graphs Dirac, " << identities << "/200 identity images, Pontryagin pullback "
    << (local ? "equals" : "differs from") << " the local form";
  return {graphs == 200 && identities == 200 && local, s.str()};
}

std::pair<bool, std::string> geometry()
{
  const ReducedProblem rp = heisenberg_reduced_problem();
  double radial = 0.0, speed = 0.0;
  for (auto [th, k] : {std::pair{0.0, 1.0}, std::pair{M_PI / 4, 2.0}, std::pair{1.0, -0.5}}) {
    const Trajectory red = integrate_reduced(rp, reduced_start(heisenberg_lambda(th, k)), 2 * M_PI / std::abs(k));
    const auto xi = reduced_velocities(rp, red);
    const auto g = reconstruct_group(rp.algebra(), group_identity(rp.algebra()), xi, uniform_step(red));
    const Trajectory chart = heisenberg_chart_trajectory(red.times(), g);
    const Vec c = (Vec(2) << -std::sin(th) / k, std::cos(th) / k).finished();
    radial = std::max(radial, max_radial_deviation(chart, c, 1 / std::abs(k)));
    std::vector<double> sp;
    for (std::size_t i = 0; i < red.size(); ++i) sp.push_back(red.block(i, "u").squaredNorm());
    speed = std::max(speed, drift(sp));
  }
  double line = 0.0;
  for (double th : {0.0, 1.2}) {
    const Trajectory o = heisenberg_geodesic_oracle(th, 0.0, 3.0, 1e-3);
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double t = o.times()[i];
      const Vec expected = (Vec(3) << t * std::cos(th), t * std::sin(th), 0.0).finished();
      line = std::max(line, (o.block(i, "x") - expected).cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream s;
  s << fmt("radial deviation %.3e (<= 1e-5), ", radial) << fmt("speed drift %.3e (<= 1e-6), ", speed)
    << fmt("k = 0 line deviation %.3e", line);
  return {radial <= 1e-5 && speed <= 1e-6 && line <= 1e-12, s.str()};
}

double pmp_endpoint_error(double step)
{
  PmpConfig cfg;
  cfg.rk_step = step;
  const double th = 0.4, k = 1.3, T = 2.0;
  const Trajectory tr = integrate_pmp(heisenberg_problem(), Vec::Zero(3), heisenberg_lambda(th, k), T, cfg);
  return (tr.block(tr.size() - 1, "x") - heisenberg_geodesic_exact(th, k, T)).norm();
}

Vec group_endpoint(int steps)
{
  const double th = 0.4, k = 1.3, T = 2.0;
  std::vector<AlgebraElement> xi;
  for (int i = 0; i <= steps; ++i) {
    const double t = T * i / steps;
    xi.push_back({(Vec(3) << std::cos(th + k * t), std::sin(th + k * t), 0.0).finished()});
  }
  const LieAlgebra h = heisenberg_algebra();
  return heisenberg_chart(reconstruct_group(h, group_identity(h), xi, T / steps).back());
}

std::pair<bool, std::string> orders()
{
  const double rk = pmp_endpoint_error(0.1) / pmp_endpoint_error(0.05);
  const Vec ref = group_endpoint(640);
  const double lie = (group_endpoint(40) - ref).norm() / (group_endpoint(80) - ref).norm();
  std::ostringstream s;
  s << fmt("RK4 ratio %.2f in [12, 20] (steps 0.1, 0.05), ", rk)
    << fmt("reconstruction ratio %.2f >= 3.5 (steps T/40, T/80 vs T/640)", lie);
  return {rk >= 12 && rk <= 20 && lie >= 3.5, s.str()};
}

std::pair<bool, std::string> regularity()
{
  const ControlProblem h = heisenberg_problem();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-5, 5);
  double sigma = 0.0;
  int worst_iter = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec x = (Vec(3) << u(rng), u(rng), u(rng)).finished();
    const Vec lambda = (Vec(3) << u(rng), u(rng), u(rng)).finished();
    const Vec p = heisenberg_costate(x, lambda);
    const FeedbackSolution s = optimal_feedback(h, x, p, Vec::Zero(2));
    worst_iter = std::max(worst_iter, s.iterations);
    sigma = std::max(sigma, std::abs(control_hessian_min_singular_value(h, {x, p, s.u}) - 1.0));
  }
  std::ostringstream s;
  s << fmt("|sigma_min(W) - 1| <= %.3e (<= 1e-12), ", sigma) << "max Newton iterations " << worst_iter
    << " (<= 2) over 1000 samples";
  return {sigma <= 1e-12 && worst_iter <= 2, s.str()};
}

std::pair<bool, std::string> oracle_report()
{
  const GeodesicReport r = heisenberg_geodesic_report(0.0, 1.0, kT, 1e-3, 1e-5);
  std::ostringstream s;
  for (const auto& c : r.printed) {
    s << c.name << (c.matches ? " matches" : " differs") << fmt(" (%.3e); ", c.max_deviation);
  }
  s << (r.consistent ? "report consistent" : "report inconsistent");
  return {r.consistent && r.printed.size() == 3, s.str()};
}

}  // namespace

int main()
{
  guarded(1, "reduced Lie-Poisson closed form", lie_poisson);
  guarded(2, "full PMP conservation", conservation);
  guarded(3, "reduction commutes with dynamics", commutation);
  guarded(4, "Dirac membership", membership);
  guarded(5, "Dirac algebra suite", dirac_suite);
  guarded(6, "geodesic geometry", geometry);
  guarded(7, "convergence orders", orders);
  guarded(8, "regularity and feedback", regularity);
  guarded(9, "printed geodesic report", oracle_report);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
