#pragma once

// Harmonic maps f = h + conj(g) of the unit disk whose dilatation is a
// square, g' = q^2 h'. Conformal factor, sigma = log(lambda) derivatives,
// harmonic Schwarzian, Gauss curvature of the Weierstrass-Enneper lift,
// disk automorphisms, and the two-point bound for the lift.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sdl/error.hpp"
#include "sdl/jet.hpp"
#include "sdl/margins.hpp"
#include "sdl/nehari.hpp"
#include "sdl/parallel.hpp"
#include "sdl/quadrature.hpp"

namespace sdl {

/// Analytic function returning its jet (value, f', f'', f''') at z.
using AnalyticFn = std::function<Jet3Complex(Complex)>;

/// Wraps an expression in the jet variable into an AnalyticFn.
inline AnalyticFn analytic(std::function<Jet3Complex(const Jet3Complex&)> expr) {
  return [expr = std::move(expr)](Complex z) { return expr(Jet3Complex::variable(z)); };
}

/// Polynomial sum c_k z^k by Horner on jets.
inline AnalyticFn polynomial(std::vector<Complex> coeffs) {
  return [c = std::move(coeffs)](Complex z) {
    const auto t = Jet3Complex::variable(z);
    Jet3Complex acc(Complex(0));
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + Jet3Complex(c[k]);
    return acc;
  };
}

struct HarmonicMap {
  AnalyticFn h;
  AnalyticFn g;
  /// Square root of the dilatation; only value, q', q'' are used.
  AnalyticFn q;
  std::string label;
};

// ---------------------------------------------------------------------------
// Pointwise geometry

struct HarmonicLocal {
  Jet3Complex h, g, q;
  double lambda = 0;
  Complex sigma_z, sigma_zz;
  double sigma_zzbar = 0;
};

inline void require_in_disk(Complex z) {
  if (!(std::abs(z) < 1)) throw Error(ErrorCode::DomainError, "point must lie in the unit disk", std::abs(z));
}

/// Jets and sigma derivatives at z. With s = 1 + |q|^2:
///   lambda = |h'| s,  sigma_z = h''/(2h') + q' conj(q)/s,
///   sigma_zz = (h'''/h' - (h''/h')^2)/2 + q'' conj(q)/s - (q' conj(q))^2/s^2,
///   sigma_zzbar = |q'|^2/s^2.
inline HarmonicLocal local_geometry(const HarmonicMap& f, Complex z) {
  require_in_disk(z);
  HarmonicLocal L;
  L.h = f.h(z);
  L.g = f.g(z);
  L.q = f.q(z);
  const double ah = std::abs(L.h.d1);
  const double s = 1 + std::norm(L.q.v);
  L.lambda = ah * s;
  if (!(L.lambda > 1e-300) || !(ah > 0)) {
    throw Error(ErrorCode::ZeroConformalFactor, f.label + ": conformal factor vanishes", std::abs(z));
  }
  const Complex r = L.h.d2 / L.h.d1;
  const Complex qc = std::conj(L.q.v);
  const Complex a = L.q.d1 * qc / s;
  L.sigma_z = 0.5 * r + a;
  L.sigma_zz = 0.5 * (L.h.d3 / L.h.d1 - r * r) + L.q.d2 * qc / s - a * a;
  L.sigma_zzbar = std::norm(L.q.d1) / (s * s);
  return L;
}

struct ConformalFactor {
  double lambda = 0;
  Complex sigma_z;
};

inline ConformalFactor conformal_factor(const HarmonicMap& f, Complex z) {
  const auto L = local_geometry(f, z);
  return {L.lambda, L.sigma_z};
}

/// 2 (sigma_zz - sigma_z^2).
inline Complex harmonic_schwarzian(const HarmonicMap& f, Complex z) {
  const auto L = local_geometry(f, z);
  return 2.0 * (L.sigma_zz - L.sigma_z * L.sigma_z);
}

/// K = -lambda^{-2} Laplacian(log lambda) = -4 sigma_zzbar / lambda^2.
inline double gauss_curvature(const HarmonicMap& f, Complex z) {
  const auto L = local_geometry(f, z);
  const double K = -4 * L.sigma_zzbar / (L.lambda * L.lambda);
  if (K > 1e-9) throw Error(ErrorCode::PositiveCurvature, f.label + ": positive Gauss curvature", std::abs(z));
  return K;
}

/// |q^2 h' - g'| / lambda^2; the factorization must hold to 1e-9.
inline double dilatation_defect(const HarmonicMap& f, Complex z) {
  const auto L = local_geometry(f, z);
  return std::abs(L.q.v * L.q.v * L.h.d1 - L.g.d1) / (L.lambda * L.lambda);
}

/// 2p(|z|) - |Sf(z)| - lambda(z)^2 |K(z)|; nonnegative where the
/// univalence criterion holds.
inline double criterion5_margin(const HarmonicMap& f, const NehariFunction& p, Complex z) {
  const auto L = local_geometry(f, z);
  const Complex sf = 2.0 * (L.sigma_zz - L.sigma_z * L.sigma_z);
  return 2 * p(std::abs(z)) - std::abs(sf) - 4 * L.sigma_zzbar;
}

/// arctanh |(z1 - z2)/(1 - conj(z1) z2)|.
inline double hyperbolic_distance(Complex z1, Complex z2) {
  require_in_disk(z1);
  require_in_disk(z2);
  return std::atanh(std::abs((z1 - z2) / (1.0 - std::conj(z1) * z2)));
}

// ---------------------------------------------------------------------------
// Weierstrass-Enneper lift

struct LiftPoint {
  double U = 0, V = 0, W = 0;
  double lambda = 0;
  double K = 0;
  Complex sf;

  Eigen::Vector3d position() const { return {U, V, W}; }
};

/// 2 Im of the integral of h' q along the polyline `path` (vertices in the
/// disk). Segments of a convex disk stay inside when the vertices do.
inline double lift_height(const HarmonicMap& f, const std::vector<Complex>& path, double tol = 1e-13) {
  Complex total(0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!(std::abs(path[i]) < 1)) {
      throw Error(ErrorCode::PathOutsideDisk, "lift path leaves the disk", std::abs(path[i]));
    }
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Complex a = path[i], d = path[i + 1] - path[i];
    if (d == Complex(0)) continue;
    total += quadrature_complex(
        [&](double t) {
          const Complex z = a + t * d;
          return f.h(z).d1 * f.q(z).v * d;
        },
        0.0, 1.0, tol);
  }
  return 2 * total.imag();
}

/// Lift at z along `path` (default: the radial segment from 0).
inline LiftPoint we_lift(const HarmonicMap& f, Complex z, std::vector<Complex> path = {}) {
  if (path.empty()) path = {Complex(0), z};
  if (std::abs(path.front()) != 0 || path.back() != z) {
    throw Error(ErrorCode::InvalidArgument, "lift path must run from 0 to z");
  }
  const auto L = local_geometry(f, z);
  LiftPoint P;
  const Complex w = L.h.v + std::conj(L.g.v);
  P.U = w.real();
  P.V = w.imag();
  P.W = lift_height(f, path);
  P.lambda = L.lambda;
  P.K = -4 * L.sigma_zzbar / (L.lambda * L.lambda);
  P.sf = 2.0 * (L.sigma_zz - L.sigma_z * L.sigma_z);
  return P;
}

/// 3-jet in t of the lifted curve t -> f~(gamma(t)), given the complex
/// jet of gamma in t. `height` is W at gamma(t) (from lift_height).
inline Jet3Real lift_curve_jet(const HarmonicMap& f, const Jet3Complex& gamma, double height) {
  const auto L = local_geometry(f, gamma.v);
  const Jet3Complex hg = compose(L.h, gamma);
  const Jet3Complex gg = compose(L.g, gamma);
  // Phi' = h' q and its derivatives.
  const Jet3Complex phi{Complex(0), L.h.d1 * L.q.v, L.h.d2 * L.q.v + L.h.d1 * L.q.d1,
                        L.h.d3 * L.q.v + 2.0 * L.h.d2 * L.q.d1 + L.h.d1 * L.q.d2};
  const Jet3Complex pg = compose(phi, gamma);
  Jet3Real j(3);
  const Complex c[4] = {hg.v + std::conj(gg.v), hg.d1 + std::conj(gg.d1), hg.d2 + std::conj(gg.d2),
                        hg.d3 + std::conj(gg.d3)};
  const Complex w[4] = {pg.v, pg.d1, pg.d2, pg.d3};
  Eigen::VectorXd* slots[4] = {&j.value, &j.d1, &j.d2, &j.d3};
  for (int k = 0; k < 4; ++k) {
    (*slots[k])[0] = c[k].real();
    (*slots[k])[1] = c[k].imag();
    (*slots[k])[2] = 2 * w[k].imag();
  }
  j.value[2] = height;
  return j;
}

// ---------------------------------------------------------------------------
// Disk automorphisms

struct DiskAutomorphism {
  Complex alpha;
  double theta = 0;

  DiskAutomorphism(Complex a = 0, double th = 0) : alpha(a), theta(th) {
    if (!(std::abs(a) < 1)) throw Error(ErrorCode::DomainError, "automorphism needs |alpha| < 1", std::abs(a));
  }

  /// z -> (i rho - z)/(1 + i rho z).
  static DiskAutomorphism reflect_through(double rho) {
    return DiskAutomorphism(Complex(0, -rho), std::numbers::pi);
  }

  Jet3Complex jet(Complex z) const {
    const auto t = Jet3Complex::variable(z);
    return Jet3Complex(std::polar(1.0, theta)) * (t + Jet3Complex(alpha)) /
           (Jet3Complex(Complex(1)) + Jet3Complex(std::conj(alpha)) * t);
  }
  Complex operator()(Complex z) const { return std::polar(1.0, theta) * (z + alpha) / (1.0 + std::conj(alpha) * z); }
  Complex derivative(Complex z) const {
    const Complex d = 1.0 + std::conj(alpha) * z;
    return std::polar(1.0, theta) * (1.0 - std::norm(alpha)) / (d * d);
  }
};

/// f o T with the decomposition kept canonical (g1(0) = 0).
inline HarmonicMap transport_by_automorphism(const HarmonicMap& f, const DiskAutomorphism& T) {
  const Complex g0 = f.g(T(0)).v;
  HarmonicMap out;
  out.h = [f, T, g0](Complex z) {
    auto j = compose(f.h(T(z)), T.jet(z));
    j.v += std::conj(g0);
    return j;
  };
  out.g = [f, T, g0](Complex z) {
    auto j = compose(f.g(T(z)), T.jet(z));
    j.v -= g0;
    return j;
  };
  out.q = [f, T](Complex z) { return compose(f.q(T(z)), T.jet(z)); };
  out.label = f.label + "*T";
  return out;
}

// ---------------------------------------------------------------------------
// Catalog

inline HarmonicMap analytic_map(AnalyticFn h, std::string label) {
  auto zero = [](Complex) { return Jet3Complex(Complex(0)); };
  return {std::move(h), zero, zero, std::move(label)};
}

/// h = z, g = eps^2 z^3 / 3, q = eps z.
inline HarmonicMap enneper_map(double eps = 1 / std::numbers::sqrt2) {
  const double e2 = eps * eps;
  return {polynomial({0, 1}), polynomial({0, 0, 0, e2 / 3}), polynomial({0, eps}),
          "enneper_eps(" + std::to_string(eps) + ")"};
}

/// Names: identity, log_mobius, enneper_eps, gstar, koebe.
inline HarmonicMap harmonic_by_name(const std::string& name, double eps = 1 / std::numbers::sqrt2) {
  using J = Jet3Complex;
  if (name == "identity") return analytic_map(polynomial({0, 1}), "identity");
  if (name == "log_mobius") {
    return analytic_map(analytic([](const J& z) {
                          return J(Complex(0.5)) * log((J(Complex(1)) + z) / (J(Complex(1)) - z));
                        }),
                        "log_mobius");
  }
  if (name == "enneper_eps") {
    auto m = enneper_map(eps);
    m.label = "enneper_eps";
    return m;
  }
  if (name == "gstar") {
    const double c = std::numbers::sqrt2 / 4;
    return analytic_map(analytic([c](const J& z) {
                          return J(Complex(c)) *
                                 (J(Complex(1)) - pow((J(Complex(1)) - z) / (J(Complex(1)) + z), std::numbers::sqrt2));
                        }),
                        "gstar");
  }
  if (name == "koebe") {
    return analytic_map(analytic([](const J& z) {
                          const J d = J(Complex(1)) - z;
                          return z / (d * d);
                        }),
                        "koebe");
  }
  throw Error(ErrorCode::UnknownKind, "unknown harmonic map '" + name + "'");
}

/// Coefficients of the primitive of q^2 h' vanishing at 0.
inline std::vector<Complex> dilatation_primitive(const std::vector<Complex>& h, const std::vector<Complex>& q) {
  if (h.size() < 2) throw Error(ErrorCode::InvalidArgument, "h needs a linear term");
  std::vector<Complex> dh(h.size() - 1);
  for (std::size_t k = 1; k < h.size(); ++k) dh[k - 1] = static_cast<double>(k) * h[k];
  std::vector<Complex> q2(q.empty() ? 1 : 2 * q.size() - 1, Complex(0));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) q2[i + j] += q[i] * q[j];
  std::vector<Complex> dg(q2.size() + dh.size() - 1, Complex(0));
  for (std::size_t i = 0; i < q2.size(); ++i)
    for (std::size_t j = 0; j < dh.size(); ++j) dg[i + j] += q2[i] * dh[j];
  std::vector<Complex> g(dg.size() + 1, Complex(0));
  for (std::size_t k = 0; k < dg.size(); ++k) g[k + 1] = dg[k] / static_cast<double>(k + 1);
  return g;
}

/// Polynomial h and q; g is the primitive of q^2 h' with g(0) = 0.
inline HarmonicMap polynomial_map(const std::vector<Complex>& h, const std::vector<Complex>& q, std::string label) {
  return {polynomial(h), polynomial(dilatation_primitive(h, q)),
          polynomial(q.empty() ? std::vector<Complex>{0} : q), std::move(label)};
}

// ---------------------------------------------------------------------------
// Two-point bound on the lift

struct CoverGrid {
  std::size_t radii = 60;
  std::size_t angles = 96;
  double r_max = 0.99;
};

inline std::vector<Complex> polar_points(const CoverGrid& g) {
  std::vector<Complex> pts{Complex(0)};
  for (std::size_t i = 1; i <= g.radii; ++i) {
    const double r = g.r_max * static_cast<double>(i) / static_cast<double>(g.radii);
    for (std::size_t k = 0; k < g.angles; ++k) {
      pts.push_back(std::polar(r, 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(g.angles)));
    }
  }
  return pts;
}

struct CriterionScan {
  bool ok = true;
  std::optional<Complex> witness;
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t points = 0;
};

/// criterion5_margin >= -1e-9 (1 + 2p) at every grid point.
inline CriterionScan scan_criterion5(const HarmonicMap& f, const NehariFunction& p, const CoverGrid& grid = {}) {
  const auto pts = polar_points(grid);
  std::vector<double> m(pts.size()), tol(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    m[i] = criterion5_margin(f, p, pts[i]);
    tol[i] = 1e-9 * (1 + 2 * p(std::abs(pts[i])));
  });
  CriterionScan r;
  r.points = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (m[i] < r.min_margin) r.min_margin = m[i];
    if (r.ok && m[i] < -tol[i]) {
      r.ok = false;
      r.witness = pts[i];
    }
  }
  return r;
}

struct Theorem3Options {
  double eps = 1e-3;
  double tol = 1e-10;
  CoverGrid grid;
  /// Scan parameters when p is not flagged extremal.
  double scan_c_max = 4.0;
  int scan_steps = 14;
};

struct Theorem3Report {
  DistortionReport report;
  /// Constant c with p1 = c p used for F (1 when p is flagged extremal).
  double rescale = 1;
};

/// |f~(z1) - f~(z2)| >= sqrt(lambda1 lambda2 / (F'(|z1|) F'(|z2|))) d(z1, z2).
/// Margins are lhs - rhs. Each lift point uses its own radial path.
inline Theorem3Report verify_theorem3(const HarmonicMap& f, const NehariFunction& p,
                                      const std::vector<std::pair<Complex, Complex>>& pairs,
                                      const Theorem3Options& o = {}) {
  Theorem3Report out;
  auto& rep = out.report;
  rep.theorem = "3";
  rep.p_kind = to_string(p.kind());
  const auto flags = verify_flags(p, o.eps);
  if (!flags.ok) {
    throw Error(ErrorCode::HypothesisFailed, p.name() + " fails claimed flag '" + flags.issues.front().flag + "'",
                flags.issues.front().x);
  }
  NehariFunction p1 = p;
  if (!p.flags().extremal) {
    out.rescale = extremal_scan(p, o.scan_c_max, o.scan_steps);
    p1 = p.scaled(out.rescale);
    rep.hypothesis_note = "sampled hypothesis; p rescaled by " + std::to_string(out.rescale) + " to an extremal weight";
  }
  // The criterion is checked for the given p; c* p only enlarges the bound.
  const auto scan = scan_criterion5(f, p, o.grid);
  rep.hypothesis_nodes = scan.points;
  rep.hypothesis_max_excess = -scan.min_margin;
  if (!scan.ok) {
    rep.hypothesis_ok = false;
    throw Error(ErrorCode::HypothesisFailed,
                f.label + ": criterion fails near |z| = " + std::to_string(std::abs(*scan.witness)),
                std::abs(*scan.witness));
  }
  const auto F = extremal_F(p1, o.eps, o.tol);
  rep.samples.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [z1, z2] = pairs[i];
    const auto a = we_lift(f, z1), b = we_lift(f, z2);
    auto& s = rep.samples[i];
    s.x1 = z1.real();
    s.y1 = z1.imag();
    s.x2 = z2.real();
    s.y2 = z2.imag();
    s.part = "pair";
    s.lhs = (a.position() - b.position()).norm();
    s.rhs = std::sqrt(a.lambda * b.lambda / (F.dF(std::abs(z1)) * F.dF(std::abs(z2)))) * hyperbolic_distance(z1, z2);
    s.margin = s.lhs - s.rhs;
  });
  rep.finalize();
  return out;
}

}  // namespace sdl
