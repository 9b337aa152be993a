// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_commands.hpp"
#include "sdl/curves.hpp"
#include "sdl/harmonic.hpp"
#include "sdl/metric.hpp"
#include "sdl/numerics.hpp"
#include "sdl/wirtinger.hpp"

using namespace sdl;
using C = std::complex<double>;
using J = Jet3<double>;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const NehariFunction& classical() {
  static const auto p = builtin_nehari(NehariKind::classical_nehari);
  return p;
}

std::vector<CurveJet> curve_matrix() {
  static const auto Fc = extremal_F(classical());
  static const auto Fp = extremal_F(builtin_nehari(NehariKind::constant_pi2));
  auto cubic = curve_from_components("cubic", {[](const J& t) { return t; }, [](const J& t) { return t * t; },
                                               [](const J& t) { return t * t * t; }});
  auto spiral = curve_from_components("spiral", {[](const J& t) { return exp(J(0.3) * t) * cos(J(2.0) * t); },
                                                 [](const J& t) { return exp(J(0.3) * t) * sin(J(2.0) * t); }});
  auto moment = curve_from_components("moment4", {[](const J& t) { return t; }, [](const J& t) { return J(0.5) * t * t; },
                                                  [](const J& t) { return cos(t); },
                                                  [](const J& t) { return sin(J(2.0) * t); }});
  return {curve_by_name("line"), curve_by_name("tanh"), curve_by_name("circle"), curve_by_name("helix"),
          curve_by_name("exp"), line_F_curve(Fc), line_F_curve(Fp, 3), cubic, spiral, moment};
}

MobiusRn random_mobius(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.5, 2.0), far(3.0, 5.0);
  auto vec = [&](double len) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
    return Eigen::VectorXd(v.normalized() * len);
  };
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = g(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(n, n);
  MobiusRn T;
  T.then(MobiusFactor::translation(vec(0.3)))
      .then(MobiusFactor::rotation(q))
      .then(MobiusFactor::scaling(u(rng)))
      .then(MobiusFactor::inversion(vec(far(rng) * 2)))
      .then(MobiusFactor::special_conformal(vec(0.05)));
  return T;
}

std::vector<std::pair<double, double>> real_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.99, 0.99);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(U(rng), U(rng));
  return out;
}

C disk_point(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0, 1);
  return std::polar(rmax * std::sqrt(u(rng)), 2 * kPi * u(rng));
}

// ---------------------------------------------------------------------------

Outcome closed_form_profiles() {
  double worst = 0, slowest = 0;
  for (auto k : {NehariKind::classical_nehari, NehariKind::constant_pi2, NehariKind::pokornyi}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto F = extremal_F(builtin_nehari(k));
    slowest = std::max(slowest, seconds_since(t0));
    for (int i = 0; i <= 1980; ++i) {
      const double x = -0.99 + 0.001 * i;
      worst = std::max(worst, std::abs(F.F(x) - closed_form_F(k, x)));
    }
  }
  return {worst <= 1e-7 && slowest < 1, fmt("max |F - closed form| = %.2e, slowest build %.3f s", worst, slowest)};
}

Outcome arclength_identity() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.98, 0.98);
  double worst = 0;
  for (const auto& c : curve_matrix())
    for (int i = 0; i < 20; ++i) {
      const double x = U(rng);
      worst = std::max(worst, std::abs(ahlfors_s1(c, x) - arclength_decomposition(c, x).s1_recombined));
    }
  return {worst <= 1e-7, fmt("10 curves x 20 abscissae, max residual %.2e", worst)};
}

Outcome mobius_invariance() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-0.95, 0.95);
  const auto curves = curve_matrix();
  double worst = 0;
  for (int m = 0; m < 50; ++m) {
    const auto& c = curves[static_cast<std::size_t>(m) % curves.size()];
    const auto tc = mobius_postcompose(c, random_mobius(c.dim, rng));
    for (int i = 0; i < 20; ++i) {
      const double x = U(rng);
      const double s = ahlfors_s1(c, x);
      worst = std::max(worst, std::abs(ahlfors_s1(tc, x) - s) / (1 + std::abs(s)));
    }
  }
  return {worst <= 1e-7, fmt("50 maps, max relative change %.2e", worst)};
}

Outcome theorem2_specializations() {
  const auto pairs = real_pairs(500, 3);
  const auto Fp = extremal_F(builtin_nehari(NehariKind::constant_pi2));
  const auto Fc = extremal_F(classical());
  double ep = 0, ec = 0;
  for (auto [a, b] : pairs) {
    ep = std::max(ep, std::abs(two_point_profile_bound(Fp, a, b) - 2 / kPi * std::sin(kPi * std::abs(a - b) / 2)));
    const double d = std::abs(std::atanh(a) - std::atanh(b));
    ec = std::max(ec, std::abs(two_point_profile_bound(Fc, a, b) - std::sqrt((1 - a * a) * (1 - b * b)) * d));
  }
  return {ep <= 1e-9 && ec <= 1e-9, fmt("500 pairs, sine form %.2e, classical form %.2e", ep, ec)};
}

Outcome sharpness() {
  double worst = 0;
  for (auto k : {NehariKind::classical_nehari, NehariKind::constant_pi2, NehariKind::pokornyi}) {
    const auto p = builtin_nehari(k);
    const auto F = extremal_F(p);
    const auto c = line_F_curve(F);
    for (const auto& s : verify_theorem1(c, p, F).samples) worst = std::max(worst, std::abs(s.margin));
    for (const auto& s : verify_theorem2(c, p, F, real_pairs(200, 9)).samples) worst = std::max(worst, std::abs(s.margin));
  }
  return {worst <= 1e-6, fmt("extremal curve, max |margin| over 1(a), 1(b), 2 = %.2e", worst)};
}

Outcome analytic_reduction() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  using JC = Jet3Complex;
  double worst = 0, mobius = 0;
  for (int k = 0; k < 10; ++k) {
    HarmonicMap f;
    if (k < 5) {
      f = analytic_map(polynomial({0, 1, C(u(rng), u(rng)), C(u(rng), u(rng)), C(u(rng), u(rng))}), "poly");
    } else {
      const C b(u(rng), u(rng)), c(u(rng), u(rng));
      f = analytic_map(analytic([=](const JC& z) { return (z + JC(b)) / (JC(1.0) + JC(c) * z); }), "mobius");
    }
    for (int i = 0; i < 10; ++i) {
      const C z = disk_point(rng, 0.9);
      const auto j = f.h(z);
      const C r = j.d2 / j.d1;
      const C classical_sf = j.d3 / j.d1 - 1.5 * r * r;
      const C sf = harmonic_schwarzian(f, z);
      worst = std::max(worst, std::abs(sf - classical_sf) / (1 + std::abs(classical_sf)));
      if (k >= 5) mobius = std::max(mobius, std::abs(sf));
    }
  }
  return {worst <= 1e-7 && mobius <= 1e-8, fmt("10 maps, max relative gap %.2e, max |Sf(Mobius)| %.2e", worst, mobius)};
}

Outcome curvature_oracle() {
  // K = -lambda^-2 Laplacian(log lambda), Laplacian = 4 d^2/dz dzbar, from sampled lambda only.
  auto fd_curvature = [](const HarmonicMap& f, C z) {
    auto log_lambda = [&f](C w) { return std::log(std::abs(f.h(w).d1) + std::abs(f.g(w).d1)); };
    const auto est = wirtinger_fd(log_lambda, z, 1e-3, true);
    return -4 * est.s_zzbar.real() / std::exp(2 * est.s.real());
  };
  const auto enneper = enneper_map(1.0);
  const double k0 = gauss_curvature(enneper, 0), k0_fd = fd_curvature(enneper, 0);
  double analytic_worst = 0;
  for (const char* name : {"identity", "log_mobius", "gstar", "koebe"}) {
    const auto f = harmonic_by_name(name);
    for (C z : {C(0), C(0.3, -0.2), C(-0.5, 0.4)}) {
      analytic_worst = std::max({analytic_worst, std::abs(gauss_curvature(f, z)), std::abs(fd_curvature(f, z))});
    }
  }
  const bool ok = std::abs(k0 + 4) <= 1e-5 && std::abs(k0_fd + 4) <= 1e-5 && analytic_worst <= 1e-5;
  return {ok, fmt("Enneper K(0) = %.8f (oracle %.8f), analytic max |K| %.2e", k0, k0_fd, analytic_worst)};
}

Outcome theorem3_suite() {
  std::mt19937_64 rng(23);
  std::vector<std::pair<C, C>> pairs;
  for (int i = 0; i < 200; ++i) pairs.emplace_back(disk_point(rng, 0.95), disk_point(rng, 0.95));
  double worst = std::numeric_limits<double>::infinity();
  for (const char* name : {"enneper_eps", "log_mobius"})
    worst = std::min(worst, verify_theorem3(harmonic_by_name(name), classical(), pairs).report.min_margin);
  const char* argv[] = {"sdl", "verify", "--theorem", "3", "--map", "koebe", "--p", "classical"};
  std::ostringstream out, err;
  const int koebe = cli::run(8, argv, out, err);
  return {worst >= -1e-9 && koebe == 4, fmt("min margin %.2e over 400 pairs, koebe exit code %.0f", worst, koebe)};
}

Outcome covering_radius_checks() {
  double formula = 0;
  for (C a2 : {C(0), C(0.1, 0), C(0, -0.15)}) {
    const auto f = analytic_map(polynomial({0, 1, a2}), "quadratic");
    const auto r = verify_theorem4(f, classical(), {0.5});
    formula = std::max(formula, std::abs(r.covering_radius_R - 1 / (std::abs(a2) + kSqrt2)));
  }
  const auto g = verify_theorem4(harmonic_by_name("gstar"), classical(), {0.5, 0.9, 0.99});
  const double e_r = std::abs(g.covering_radius_R - kSqrt2 / 4), e_b = std::abs(g.boundary_min_rho - kSqrt2 / 4);
  return {formula <= 1e-6 && e_r <= 1e-6 && e_b <= 1e-3,
          fmt("R vs 1/(|a2|+sqrt2) %.2e, gstar R error %.2e, boundary distance error %.2e", formula, e_r, e_b)};
}

struct OracleError {
  double euclid = 0, hyperbolic = 0, build_seconds = 0;
};

OracleError oracle_errors(const GridOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConformalGrid e([](C) { return 1.0; }, o);
  const auto de = e.distances_from(e.origin());
  OracleError out;
  out.build_seconds = seconds_since(t0);
  const ConformalGrid p([](C z) { return 1 / (1 - std::norm(z)); }, o);
  const auto dp = p.distances_from(p.origin());
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!e.inside(k)) continue;
    const double r = std::abs(e.position(k));
    if (r < 0.05) continue;
    out.euclid = std::max(out.euclid, std::abs(de[k] - r) / r);
    out.hyperbolic = std::max(out.hyperbolic, std::abs(dp[k] - std::atanh(r)) / std::atanh(r));
  }
  return out;
}

Outcome distance_oracles() {
  const GridOptions base;
  const auto e0 = oracle_errors(base), e1 = oracle_errors(base.refined(1));
  const bool ok = e0.euclid <= 0.015 && e0.hyperbolic <= 0.02 && e1.euclid <= 0.5 * e0.euclid &&
                  e1.hyperbolic <= 0.5 * e0.hyperbolic && e0.build_seconds < 30;
  std::ostringstream s;
  s << fmt("n=%.0f: euclid %.3f%%, hyperbolic %.3f%%; ", base.n, 100 * e0.euclid, 100 * e0.hyperbolic)
    << fmt("refined: %.3f%%, %.3f%%; ", 100 * e1.euclid, 100 * e1.hyperbolic) << fmt("%.2f s per grid", e0.build_seconds);
  return {ok, s.str()};
}

Outcome theorem4_suite() {
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  auto take = [&](const CoveringReport& r) {
    for (std::size_t i = 0; i < r.radii.size(); ++i) {
      ok = ok && r.margins[i] >= -r.allowance[i];
      worst = std::min(worst, r.margins[i] + r.allowance[i]);
    }
  };
  for (const char* name : {"identity", "log_mobius", "enneper_eps", "gstar"}) {
    const auto f = harmonic_by_name(name);
    take(verify_theorem4(f, classical(), {0.3, 0.6, 0.9}));
    for (C alpha : {C(0), C(0, 0.4)}) take(verify_corollary16(f, alpha, {0.3, 0.6, 0.9}));
  }
  return {ok, fmt("4 maps x (theorem + 2 transports), min (margin + allowance) %.3e", worst)};
}

Outcome lemma12_matrix() {
  const std::vector<DiskCurve> curves{disk_line(), disk_line(C(0.1, 0.2), 0.7), disk_circle(0.5),
                                      disk_circle(0.3, C(-0.2, 0.1))};
  double worst = 0;
  for (const char* name : {"identity", "log_mobius", "enneper_eps", "gstar", "koebe"}) {
    const auto f = harmonic_by_name(name);
    for (const auto& gamma : curves)
      for (double t : {-0.4, -0.2, 0.0, 0.15, 0.35}) worst = std::max(worst, lemma12_residual(f, gamma, t));
  }
  return {worst <= 1e-4, fmt("5 maps x 4 curves x 5 parameters, max residual %.2e", worst)};
}

Outcome sturm_comparison() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coef(0.0, 3.0);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng), d0 = coef(rng) / 3, d1 = coef(rng);
    const RealFn p = [=](double x) { return a0 + a1 * x * x + a2 * std::sin(3 * x) * std::sin(3 * x); };
    const RealFn q = [=](double x) { return p(x) + d0 + d1 * x * x * x * x; };
    const auto up = integrate_linear_ode(p, 1, 1.0, 0.0);
    const auto uq = integrate_linear_ode(q, 1, 1.0, 0.0);
    // u_p >= u_q from 0 out to the first zero of u_q on each side.
    const auto& g = uq.grid();
    const auto centre = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), 0.0) - g.begin());
    for (std::size_t i = centre; i < g.size() && uq.u()[i] > 0; ++i) worst = std::max(worst, uq.u()[i] - up.value(g[i]));
    for (std::size_t i = centre + 1; i-- > 0 && uq.u()[i] > 0;) worst = std::max(worst, uq.u()[i] - up.value(g[i]));
  }
  return {worst <= 1e-9, fmt("20 pairs, max (u_q - u_p) before the first zero %.2e", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form extremal profiles", closed_form_profiles},
      {"arclength decomposition of S1", arclength_identity},
      {"Mobius invariance of S1", mobius_invariance},
      {"two-point bound specializations", theorem2_specializations},
      {"sharpness on the extremal curve", sharpness},
      {"analytic reduction of the harmonic Schwarzian", analytic_reduction},
      {"curvature against finite differences", curvature_oracle},
      {"two-point distortion on the lifted surface", theorem3_suite},
      {"covering radius", covering_radius_checks},
      {"conformal distance oracles", distance_oracles},
      {"ring distance lower bound", theorem4_suite},
      {"lifted Ahlfors Schwarzian identity", lemma12_matrix},
      {"Sturm comparison", sturm_comparison},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu  %-46s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
