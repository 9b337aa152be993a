#pragma once

// Curves in R^n given as exact 3-jets: the Ahlfors Schwarzian, its
// arclength/curvature split, Moebius postcomposition and normalization,
// and sampled checks of the one- and two-point distortion bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
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

namespace sdl {

struct CurveJet {
  Eigen::Index dim = 0;
  std::function<Jet3Real(double)> eval;
  std::string label;

  Jet3Real operator()(double x) const {
    Jet3Real j = eval(x);
    if (j.dim() != dim) throw Error(ErrorCode::InvalidArgument, label + ": jet dimension mismatch", x);
    if (!j.finite()) throw Error(ErrorCode::DomainError, label + ": jet is not finite", x);
    return j;
  }
};

/// Curve whose i-th coordinate is comps[i] applied to the jet of x.
inline CurveJet curve_from_components(std::string label,
                                      std::vector<std::function<Jet3<double>(const Jet3<double>&)>> comps) {
  const auto n = static_cast<Eigen::Index>(comps.size());
  return {n,
          [comps = std::move(comps)](double x) {
            const auto t = Jet3<double>::variable(x);
            std::vector<Jet3<double>> out;
            out.reserve(comps.size());
            for (const auto& c : comps) out.push_back(c(t));
            return Jet3Real::from_components(out);
          },
          std::move(label)};
}

// ---------------------------------------------------------------------------
// Pointwise invariants

namespace detail {

struct TangentData {
  double v2, ab, ac, bb;
};

inline TangentData tangent_data(const Jet3Real& j, double x) {
  const double v2 = j.d1.squaredNorm();
  if (!(std::sqrt(v2) >= 1e-12)) {
    throw Error(ErrorCode::DegenerateTangent, "tangent vanishes at x = " + std::to_string(x), x);
  }
  return {v2, j.d1.dot(j.d2), j.d1.dot(j.d3), j.d2.squaredNorm()};
}

inline double s1_from_jet(const Jet3Real& j, double x) {
  const auto t = tangent_data(j, x);
  return t.ac / t.v2 - 3 * t.ab * t.ab / (t.v2 * t.v2) + 1.5 * t.bb / t.v2;
}

}  // namespace detail

/// <phi', phi'''>/|phi'|^2 - 3 <phi', phi''>^2/|phi'|^4 + 3/2 |phi''|^2/|phi'|^2.
inline double ahlfors_s1(const CurveJet& curve, double x) { return detail::s1_from_jet(curve(x), x); }

struct ArclengthSplit {
  double v = 0;
  /// Schwarzian of the arclength function s(x).
  double Ss = 0;
  /// Curvature of the curve.
  double k = 0;
  double s1_recombined = 0;
};

inline ArclengthSplit arclength_decomposition(const CurveJet& curve, double x) {
  const auto j = curve(x);
  const auto t = detail::tangent_data(j, x);
  ArclengthSplit r;
  r.v = std::sqrt(t.v2);
  const double dv = t.ab / r.v;
  const double d2v = (t.bb + t.ac) / r.v - t.ab * t.ab / (t.v2 * r.v);
  r.Ss = d2v / r.v - 1.5 * (dv / r.v) * (dv / r.v);
  const Eigen::VectorXd normal = j.d2 - (t.ab / t.v2) * j.d1;
  r.k = normal.norm() / t.v2;
  r.s1_recombined = r.Ss + 0.5 * t.v2 * r.k * r.k;
  return r;
}

/// Central-difference 3-jet of a point-valued curve; a cross-check only.
inline Jet3Real finite_difference_jet(const std::function<Eigen::VectorXd(double)>& phi, double x, double h = 1e-3) {
  const Eigen::VectorXd m2 = phi(x - 2 * h), m1 = phi(x - h), c = phi(x), p1 = phi(x + h), p2 = phi(x + 2 * h);
  Jet3Real j(c.size());
  j.value = c;
  j.d1 = (p1 - m1) / (2 * h);
  j.d2 = (p1 - 2 * c + m1) / (h * h);
  j.d3 = (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h * h * h);
  return j;
}

// ---------------------------------------------------------------------------
// Moebius maps of R^n

struct MobiusFactor {
  enum class Kind { translation, rotation, scaling, inversion, special_conformal };
  Kind kind = Kind::translation;
  Eigen::VectorXd vec;
  Eigen::MatrixXd rot;
  double scale = 1;

  static MobiusFactor translation(Eigen::VectorXd v) { return {Kind::translation, std::move(v), {}, 1}; }
  static MobiusFactor rotation(Eigen::MatrixXd q) {
    if (q.rows() != q.cols()) throw Error(ErrorCode::InvalidArgument, "rotation must be square");
    const double dev = (q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
    if (dev > 1e-12) throw Error(ErrorCode::InvalidArgument, "rotation is not orthogonal", dev);
    return {Kind::rotation, {}, std::move(q), 1};
  }
  static MobiusFactor scaling(double s) {
    if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "scaling must be positive", s);
    return {Kind::scaling, {}, {}, s};
  }
  /// Unit-radius inversion y = c + (x - c)/|x - c|^2.
  static MobiusFactor inversion(Eigen::VectorXd center) { return {Kind::inversion, std::move(center), {}, 1}; }
  /// y = (x - b|x|^2)/(1 - 2<b,x> + |b|^2 |x|^2); fixes 0 with derivative I there.
  static MobiusFactor special_conformal(Eigen::VectorXd b) {
    return {Kind::special_conformal, std::move(b), {}, 1};
  }

  /// Applies the factor to coordinates of scalar type T (double or a jet).
  /// `x` only labels errors.
  template <class T>
  std::vector<T> apply(const std::vector<T>& p, double x) const {
    const std::size_t n = p.size();
    auto check_dim = [&](Eigen::Index m) {
      if (static_cast<std::size_t>(m) != n) throw Error(ErrorCode::InvalidArgument, "Moebius factor dimension mismatch");
    };
    std::vector<T> out(n);
    switch (kind) {
      case Kind::translation:
        check_dim(vec.size());
        for (std::size_t i = 0; i < n; ++i) out[i] = p[i] + T(vec[static_cast<Eigen::Index>(i)]);
        return out;
      case Kind::rotation:
        check_dim(rot.rows());
        for (std::size_t i = 0; i < n; ++i) {
          T s(0.0);
          for (std::size_t k = 0; k < n; ++k) {
            s += T(rot(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) * p[k];
          }
          out[i] = s;
        }
        return out;
      case Kind::scaling:
        for (std::size_t i = 0; i < n; ++i) out[i] = T(scale) * p[i];
        return out;
      case Kind::inversion: {
        check_dim(vec.size());
        T r2(0.0);
        std::vector<T> d(n);
        for (std::size_t i = 0; i < n; ++i) {
          d[i] = p[i] - T(vec[static_cast<Eigen::Index>(i)]);
          r2 += d[i] * d[i];
        }
        if (!(value_of(r2) > 1e-24)) {
          throw Error(ErrorCode::InversionSingularity, "curve meets the inversion center at x = " + std::to_string(x), x);
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = T(vec[static_cast<Eigen::Index>(i)]) + d[i] / r2;
        return out;
      }
      case Kind::special_conformal: {
        check_dim(vec.size());
        T x2(0.0), bx(0.0);
        for (std::size_t i = 0; i < n; ++i) {
          x2 += p[i] * p[i];
          bx += T(vec[static_cast<Eigen::Index>(i)]) * p[i];
        }
        const T den = T(1.0) - T(2.0) * bx + T(vec.squaredNorm()) * x2;
        if (!(std::abs(value_of(den)) > 1e-12)) {
          throw Error(ErrorCode::InversionSingularity, "special conformal map is singular at x = " + std::to_string(x), x);
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = (p[i] - T(vec[static_cast<Eigen::Index>(i)]) * x2) / den;
        return out;
      }
    }
    return out;
  }

 private:
  static double value_of(double v) { return v; }
  static double value_of(const Jet3<double>& v) { return v.v; }
};

/// Composition; factors apply in order (factors[0] first).
struct MobiusRn {
  std::vector<MobiusFactor> factors;

  MobiusRn& then(MobiusFactor f) {
    factors.push_back(std::move(f));
    return *this;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& p) const {
    std::vector<double> c(p.data(), p.data() + p.size());
    for (const auto& f : factors) c = f.apply(c, 0.0);
    return Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  }

  Jet3Real apply(const Jet3Real& j, double x) const {
    auto c = j.components();
    for (const auto& f : factors) c = f.apply(c, x);
    return Jet3Real::from_components(c);
  }
};

inline CurveJet mobius_postcompose(const CurveJet& curve, const MobiusRn& T) {
  return {curve.dim, [curve, T](double x) { return T.apply(curve(x), x); }, curve.label + "*mobius"};
}

struct NormalizedCurve {
  CurveJet curve;
  MobiusRn T;
};

/// Translate, scale and apply a special conformal map so that psi(0) = 0,
/// |psi'(0)| = 1 and <psi'(0), psi''(0)> = 0.
inline NormalizedCurve normalize_curve(const CurveJet& curve) {
  const auto j = curve(0.0);
  const double v = std::sqrt(detail::tangent_data(j, 0.0).v2);
  MobiusRn T;
  T.then(MobiusFactor::translation(-j.value)).then(MobiusFactor::scaling(1 / v));
  const Eigen::VectorXd a = j.d1 / v, c = j.d2 / v;
  T.then(MobiusFactor::special_conformal(-(a.dot(c) / 2) * a));
  return {mobius_postcompose(curve, T), T};
}

struct NormalizationDefect {
  double origin = 0;
  double speed = 0;
  double orthogonality = 0;
  double max() const { return std::max({origin, speed, orthogonality}); }
};

inline NormalizationDefect normalization_defect(const CurveJet& curve) {
  const auto j = curve(0.0);
  return {j.value.norm(), std::abs(j.d1.norm() - 1), std::abs(j.d1.dot(j.d2))};
}

// ---------------------------------------------------------------------------
// Hypothesis scan: S1 phi <= 2 p on a dense grid

struct HypothesisScan {
  bool ok = true;
  std::optional<double> witness;
  std::string reason;
  /// max over nodes of S1 - 2p (negative when the bound holds with room).
  double max_excess = -std::numeric_limits<double>::infinity();
  std::size_t nodes = 0;
};

inline std::vector<double> uniform_grid(double eps, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least two nodes");
  std::vector<double> xs(n);
  const double hi = 1 - eps;
  for (std::size_t i = 0; i < n; ++i) xs[i] = -hi + 2 * hi * static_cast<double>(i) / static_cast<double>(n - 1);
  xs.front() = -1 + eps;
  xs.back() = 1 - eps;
  return xs;
}

/// Sampled check of S1 phi <= 2p (tolerance 1e-9 (1 + 2p)) and of
/// regularity: a tangent that vanishes at a node or turns by 90 degrees or
/// more between neighbouring nodes fails the scan.
inline HypothesisScan scan_hypothesis(const CurveJet& curve, const NehariFunction& p, double eps = 1e-3,
                                      std::size_t nodes = 2001) {
  const auto xs = uniform_grid(eps, nodes);
  std::vector<Jet3Real> jets(nodes);
  std::vector<double> excess(nodes, 0.0), bound(nodes, 0.0);
  std::vector<char> degenerate(nodes, 0);
  parallel_for(nodes, [&](std::size_t i) {
    jets[i] = curve(xs[i]);
    bound[i] = 2 * p(xs[i]);
    if (!(jets[i].d1.norm() >= 1e-12)) {
      degenerate[i] = 1;
      return;
    }
    excess[i] = detail::s1_from_jet(jets[i], xs[i]) - bound[i];
  });
  HypothesisScan r;
  r.nodes = nodes;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (degenerate[i]) {
      r.ok = false;
      r.witness = xs[i];
      r.reason = "tangent vanishes";
      return r;
    }
    if (i > 0 && jets[i].d1.dot(jets[i - 1].d1) <= 0) {
      r.ok = false;
      r.witness = 0.5 * (xs[i] + xs[i - 1]);
      r.reason = "tangent degenerates or turns by 90 degrees or more between samples";
      return r;
    }
    r.max_excess = std::max(r.max_excess, excess[i]);
    if (r.ok && excess[i] > 1e-9 * (1 + bound[i])) {
      r.ok = false;
      r.witness = xs[i];
      r.reason = "S1 exceeds 2p by " + std::to_string(excess[i]);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Distortion verification

struct CurveVerifyOptions {
  double eps = 1e-3;
  double tol = 1e-10;
  std::size_t hypothesis_nodes = 2001;
  /// Uniform sample count for the one-point bounds.
  std::size_t samples = 401;
};

namespace detail {

inline void require_hypothesis(const CurveJet& curve, const NehariFunction& p, const CurveVerifyOptions& o,
                               DistortionReport& rep) {
  const auto scan = scan_hypothesis(curve, p, o.eps, o.hypothesis_nodes);
  rep.hypothesis_max_excess = scan.max_excess;
  rep.hypothesis_nodes = scan.nodes;
  if (!scan.ok) {
    rep.hypothesis_ok = false;
    throw Error(ErrorCode::HypothesisFailed,
                curve.label + ": " + scan.reason + " near x = " + std::to_string(scan.witness.value_or(0)),
                scan.witness);
  }
}

}  // namespace detail

/// One-point bounds for a normalized curve: (a) |phi'| <= F' and
/// (b) |phi'|/(1+|phi|^2) <= F'/(1+F^2). Margins are rhs - lhs.
inline DistortionReport verify_theorem1(const CurveJet& curve, const NehariFunction& p, const ExtremalProfile& F,
                                        const CurveVerifyOptions& o = {}) {
  DistortionReport rep;
  rep.theorem = "1";
  rep.p_kind = to_string(p.kind());
  const auto defect = normalization_defect(curve);
  if (defect.max() > 1e-9) {
    throw Error(ErrorCode::HypothesisFailed, curve.label + " is not normalized at 0", defect.max());
  }
  detail::require_hypothesis(curve, p, o, rep);
  const auto xs = uniform_grid(o.eps, o.samples);
  rep.samples.resize(2 * xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const double x = xs[i];
    const auto j = curve(x);
    const double speed = j.d1.norm(), r2 = j.value.squaredNorm();
    const double Fx = F.F(x), dF = F.dF(x);
    auto& a = rep.samples[2 * i];
    a.x1 = x;
    a.part = "a";
    a.lhs = speed;
    a.rhs = dF;
    a.margin = a.rhs - a.lhs;
    auto& b = rep.samples[2 * i + 1];
    b.x1 = x;
    b.part = "b";
    b.lhs = speed / (1 + r2);
    b.rhs = dF / (1 + Fx * Fx);
    b.margin = b.rhs - b.lhs;
  });
  rep.finalize();
  return rep;
}

inline DistortionReport verify_theorem1(const CurveJet& curve, const NehariFunction& p,
                                        const CurveVerifyOptions& o = {}) {
  return verify_theorem1(curve, p, extremal_F(p, o.eps, o.tol), o);
}

/// |F(x1) - F(x2)| / sqrt(F'(x1) F'(x2)).
inline double two_point_profile_bound(const ExtremalProfile& F, double x1, double x2) {
  return std::abs(F.F(x1) - F.F(x2)) / std::sqrt(F.dF(x1) * F.dF(x2));
}

/// Two-point bound |phi(x1) - phi(x2)| / sqrt(|phi'(x1)| |phi'(x2)|) >= the
/// same expression for F. Needs no normalization. Margins are lhs - rhs.
inline DistortionReport verify_theorem2(const CurveJet& curve, const NehariFunction& p, const ExtremalProfile& F,
                                        const std::vector<std::pair<double, double>>& pairs,
                                        const CurveVerifyOptions& o = {}) {
  DistortionReport rep;
  rep.theorem = "2";
  rep.p_kind = to_string(p.kind());
  detail::require_hypothesis(curve, p, o, rep);
  rep.samples.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [x1, x2] = pairs[i];
    const auto j1 = curve(x1), j2 = curve(x2);
    auto& s = rep.samples[i];
    s.x1 = x1;
    s.x2 = x2;
    s.part = "pair";
    s.lhs = (j1.value - j2.value).norm() / std::sqrt(j1.d1.norm() * j2.d1.norm());
    s.rhs = two_point_profile_bound(F, x1, x2);
    s.margin = s.lhs - s.rhs;
  });
  rep.finalize();
  return rep;
}

inline DistortionReport verify_theorem2(const CurveJet& curve, const NehariFunction& p,
                                        const std::vector<std::pair<double, double>>& pairs,
                                        const CurveVerifyOptions& o = {}) {
  return verify_theorem2(curve, p, extremal_F(p, o.eps, o.tol), pairs, o);
}

// ---------------------------------------------------------------------------
// Injectivity probe

namespace detail {

// Parameters (s, t) in [0, 1]^2 of the closest points of segments
// [p0, p1] and [q0, q1].
inline std::pair<double, double> closest_on_segments(const Eigen::VectorXd& p0, const Eigen::VectorXd& p1,
                                                     const Eigen::VectorXd& q0, const Eigen::VectorXd& q1) {
  const Eigen::VectorXd d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0, t = 0;
  if (a <= 1e-300 && e <= 1e-300) return {0, 0};
  if (a <= 1e-300) return {0, std::clamp(f / e, 0.0, 1.0)};
  const double c = d1.dot(r);
  if (e <= 1e-300) return {std::clamp(-c / a, 0.0, 1.0), 0};
  const double b = d1.dot(d2), den = a * e - b * b;
  s = den > 1e-14 * a * e ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
  t = (b * s + f) / e;
  if (t < 0) {
    t = 0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1) {
    t = 1;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  return {s, t};
}

}  // namespace detail

/// Looks for x1 != x2 with phi(x1) = phi(x2): polyline segments through m
/// samples that come close are refined by clamped Gauss-Newton.
inline std::optional<std::pair<double, double>> injectivity_probe(const CurveJet& curve, std::size_t m,
                                                                  double eps = 1e-3, std::size_t max_refinements = 400) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "injectivity probe needs m >= 2");
  const auto xs = uniform_grid(eps, m);
  std::vector<Eigen::VectorXd> pts(m);
  double diam = 0;
  for (std::size_t i = 0; i < m; ++i) {
    pts[i] = curve(xs[i]).value;
    diam = std::max(diam, (pts[i] - pts[0]).norm());
  }
  double seg_max = 0;
  for (std::size_t i = 0; i + 1 < m; ++i) seg_max = std::max(seg_max, (pts[i + 1] - pts[i]).norm());
  const double near = std::max(seg_max, 1e-12 * (1 + diam));

  struct Candidate {
    double dist, s, t;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = i + 2; j + 1 < m; ++j) {
      const auto [s, t] = detail::closest_on_segments(pts[i], pts[i + 1], pts[j], pts[j + 1]);
      const Eigen::VectorXd a = pts[i] + s * (pts[i + 1] - pts[i]);
      const Eigen::VectorXd b = pts[j] + t * (pts[j + 1] - pts[j]);
      const double d = (a - b).norm();
      if (d < near) cands.push_back({d, xs[i] + s * (xs[i + 1] - xs[i]), xs[j] + t * (xs[j + 1] - xs[j])});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  if (cands.size() > max_refinements) cands.resize(max_refinements);

  const double lo = xs.front(), hi = xs.back();
  for (const auto& c : cands) {
    double s = c.s, t = c.t;
    for (int it = 0; it < 50; ++it) {
      const auto js = curve(s), jt = curve(t);
      const Eigen::VectorXd r = js.value - jt.value;
      const double scale = 1 + js.value.norm();
      if (r.norm() < 1e-9 * scale) {
        if (std::abs(s - t) > 1e-6) return std::make_pair(std::min(s, t), std::max(s, t));
        break;
      }
      Eigen::MatrixXd J(r.size(), 2);
      J.col(0) = js.d1;
      J.col(1) = -jt.d1;
      const Eigen::Vector2d step = J.completeOrthogonalDecomposition().solve(-r);
      if (!step.allFinite()) break;
      s = std::clamp(s + step[0], lo, hi);
      t = std::clamp(t + step[1], lo, hi);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Catalog

/// phi(x) = F(x) e1 in R^dim: the extremal curve for p.
inline CurveJet line_F_curve(const ExtremalProfile& F, Eigen::Index dim = 2) {
  return {dim,
          [F, dim](double x) {
            Jet3Real j(dim);
            j.value[0] = F.F(x);
            j.d1[0] = F.dF(x);
            j.d2[0] = F.d2F(x);
            j.d3[0] = F.d3F(x);
            return j;
          },
          "line_F"};
}

/// Names: line, tanh, circle, helix, sin3pi, exp.
inline CurveJet curve_by_name(const std::string& name) {
  using J = Jet3<double>;
  auto zero = [](const J&) { return J(0.0); };
  if (name == "line") return curve_from_components("line", {[](const J& t) { return t; }, zero});
  if (name == "tanh") return curve_from_components("tanh", {[](const J& t) { return tanh(t); }, zero});
  if (name == "circle") {
    return curve_from_components("circle", {[](const J& t) { return cos(t); }, [](const J& t) { return sin(t); }});
  }
  if (name == "helix") {
    const double r = 1 / std::numbers::sqrt2;
    return curve_from_components("helix", {[r](const J& t) { return J(r) * cos(t); },
                                           [r](const J& t) { return J(r) * sin(t); },
                                           [r](const J& t) { return J(r) * t; }});
  }
  if (name == "sin3pi") {
    return curve_from_components("sin3pi", {[](const J& t) { return sin(J(3 * std::numbers::pi) * t); }, zero});
  }
  if (name == "exp") return curve_from_components("exp", {[](const J& t) { return exp(t); }, zero});
  throw Error(ErrorCode::UnknownKind, "unknown curve '" + name + "'");
}

}  // namespace sdl
