#pragma once

// Nehari weights p on (-1, 1), the even solution u0 of u'' + p u = 0, the
// extremal profiles F = int u0^{-2} and G (same construction from
// u'' - p u = 0), and grid checks of the structural hypotheses.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdl/error.hpp"
#include "sdl/ode.hpp"
#include "sdl/quadrature.hpp"

namespace sdl {

enum class NehariKind { classical_nehari, constant_pi2, pokornyi, custom };

inline const char* to_string(NehariKind k) {
  switch (k) {
    case NehariKind::classical_nehari: return "classical_nehari";
    case NehariKind::constant_pi2: return "constant_pi2";
    case NehariKind::pokornyi: return "pokornyi";
    case NehariKind::custom: return "custom";
  }
  return "custom";
}

struct NehariFlags {
  bool even = false;
  bool positive = false;
  /// (1 - x^2)^2 p(x) nonincreasing on [0, 1).
  bool decay_nonincreasing = false;
  /// p nondecreasing on [0, 1).
  bool monotone_nondecreasing = false;
  /// Claimed extremal: no c > 1 keeps c p disconjugate.
  bool extremal = false;
};

class NehariFunction {
 public:
  /// `weight`, if given, evaluates (1 - x^2)^2 p(x) at x = tanh(t) without
  /// cancellation; it lets the disconjugacy check run far into the ends.
  NehariFunction(NehariKind kind, std::string name, RealFn p, NehariFlags flags, RealFn weight = {})
      : kind_(kind), name_(std::move(name)), p_(std::move(p)), weight_(std::move(weight)), flags_(flags) {
    if (!p_) throw Error(ErrorCode::InvalidArgument, "Nehari function needs an evaluator");
  }

  static NehariFunction custom(std::string name, RealFn p, NehariFlags flags, RealFn weight = {}) {
    return NehariFunction(NehariKind::custom, std::move(name), std::move(p), flags, std::move(weight));
  }

  /// p(x) = c; flags follow from c > 0.
  static NehariFunction constant(double c) {
    NehariFlags f;
    f.even = true;
    f.positive = c > 0;
    f.decay_nonincreasing = c >= 0;
    f.monotone_nondecreasing = true;
    return custom("constant", [c](double) { return c; }, f, [c](double t) {
      const double s = 1.0 / std::cosh(t);
      return c * s * s * s * s;
    });
  }

  double operator()(double x) const { return p_(x); }
  const RealFn& evaluator() const { return p_; }
  NehariKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const NehariFlags& flags() const { return flags_; }
  bool has_weight() const { return static_cast<bool>(weight_); }

  /// (1 - x^2)^2 p(x) at x = tanh(t).
  double weight(double t) const {
    if (weight_) return weight_(t);
    const double x = std::tanh(t);
    const double s = (1 - x) * (1 + x);
    return s * s * p_(x);
  }

  /// c p, with flags kept except extremality (which does not survive c != 1).
  NehariFunction scaled(double c) const {
    NehariFlags f = flags_;
    if (c != 1.0) f.extremal = false;
    if (!(c > 0)) f.positive = false;
    RealFn p = [c, q = p_](double x) { return c * q(x); };
    RealFn w;
    if (weight_) w = [c, q = weight_](double t) { return c * q(t); };
    return NehariFunction(c == 1.0 ? kind_ : NehariKind::custom, name_ + (c == 1.0 ? "" : "*" + std::to_string(c)),
                          std::move(p), f, std::move(w));
  }

 private:
  NehariKind kind_;
  std::string name_;
  RealFn p_;
  RealFn weight_;
  NehariFlags flags_;
};

inline NehariFunction builtin_nehari(NehariKind kind) {
  NehariFlags f{true, true, true, true, true};
  switch (kind) {
    case NehariKind::classical_nehari:
      return NehariFunction(
          kind, "classical_nehari",
          [](double x) {
            const double s = (1 - x) * (1 + x);
            return 1.0 / (s * s);
          },
          f, [](double) { return 1.0; });
    case NehariKind::constant_pi2: {
      constexpr double c = std::numbers::pi * std::numbers::pi / 4;
      return NehariFunction(
          kind, "constant_pi2", [](double) { return c; }, f,
          [](double t) {
            const double s = 1.0 / std::cosh(t);
            return c * s * s * s * s;
          });
    }
    case NehariKind::pokornyi:
      return NehariFunction(
          kind, "pokornyi", [](double x) { return 2.0 / ((1 - x) * (1 + x)); }, f,
          [](double t) {
            const double s = 1.0 / std::cosh(t);
            return 2 * s * s;
          });
    case NehariKind::custom: break;
  }
  throw Error(ErrorCode::UnknownKind, "no built-in Nehari function of kind custom");
}

/// Accepts "classical", "classical_nehari", "pi2", "constant_pi2", "pokornyi".
inline NehariFunction builtin_nehari(std::string_view name) {
  if (name == "classical" || name == "classical_nehari") return builtin_nehari(NehariKind::classical_nehari);
  if (name == "pi2" || name == "constant_pi2") return builtin_nehari(NehariKind::constant_pi2);
  if (name == "pokornyi") return builtin_nehari(NehariKind::pokornyi);
  throw Error(ErrorCode::UnknownKind, "unknown Nehari function '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Flag verification

struct FlagIssue {
  std::string flag;
  double x = 0;
  std::string detail;
};

struct FlagCheck {
  bool ok = true;
  std::vector<FlagIssue> issues;
};

/// Checks every claimed flag (except `extremal`) on a uniform grid of
/// [-(1 - eps), 1 - eps]; the first failure of each flag is reported.
inline FlagCheck verify_flags(const NehariFunction& p, double eps = 1e-3, std::size_t samples = 2001) {
  FlagCheck out;
  const auto& fl = p.flags();
  const double hi = 1 - eps;
  auto fail = [&](const char* flag, double x, std::string d) {
    for (const auto& i : out.issues)
      if (i.flag == flag) return;
    out.ok = false;
    out.issues.push_back({flag, x, std::move(d)});
  };
  double prev_decay = 0, prev_p = 0;
  bool first = true;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -hi + 2 * hi * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double v = p(x);
    if (!std::isfinite(v)) {
      fail("positive", x, "p is not finite");
      continue;
    }
    if (fl.positive && !(v > 0)) fail("positive", x, "p(x) = " + std::to_string(v));
    if (fl.even) {
      const double m = p(-x);
      if (std::abs(m - v) > 1e-12 * std::max(1.0, std::abs(v))) {
        fail("even", x, "p(-x) - p(x) = " + std::to_string(m - v));
      }
    }
    if (x < 0) continue;
    const double s = (1 - x) * (1 + x);
    const double decay = s * s * v;
    if (!first) {
      if (fl.decay_nonincreasing && decay > prev_decay * (1 + 1e-10) + 1e-14) {
        fail("decay_nonincreasing", x, "(1-x^2)^2 p increases");
      }
      if (fl.monotone_nondecreasing && v < prev_p * (1 - 1e-10) - 1e-14) {
        fail("monotone_nondecreasing", x, "p decreases");
      }
    }
    first = false;
    prev_decay = decay;
    prev_p = v;
  }
  return out;
}

/// Throws HypothesisFailed unless each named flag is claimed and passes
/// verify_flags. Names: even, positive, decay_nonincreasing,
/// monotone_nondecreasing, extremal.
inline void require_flags(const NehariFunction& p, const std::vector<std::string>& needed, double eps = 1e-3) {
  const auto& fl = p.flags();
  auto claimed = [&](const std::string& n) {
    if (n == "even") return fl.even;
    if (n == "positive") return fl.positive;
    if (n == "decay_nonincreasing") return fl.decay_nonincreasing;
    if (n == "monotone_nondecreasing") return fl.monotone_nondecreasing;
    if (n == "extremal") return fl.extremal;
    throw Error(ErrorCode::InvalidArgument, "unknown flag '" + n + "'");
  };
  for (const auto& n : needed) {
    if (!claimed(n)) throw Error(ErrorCode::HypothesisFailed, p.name() + " does not declare flag '" + n + "'");
  }
  const auto check = verify_flags(p, eps);
  for (const auto& issue : check.issues) {
    if (std::find(needed.begin(), needed.end(), issue.flag) != needed.end()) {
      throw Error(ErrorCode::HypothesisFailed,
                  p.name() + " fails claimed flag '" + issue.flag + "': " + issue.detail, issue.x);
    }
  }
}

// ---------------------------------------------------------------------------
// Extremal profiles

enum class ProfileKind { F_profile, G_profile };

/// Either F (from u0, sign +1) or G (from the convex solution, sign -1).
/// Between ODE nodes u is the quintic Hermite interpolant built from u, u'
/// and u'' = -sign p u, and the integral of u^{-2} uses Gauss-Legendre on
/// each interval.
class ExtremalProfile {
 public:
  ExtremalProfile(OdeProfile base, NehariFunction p, ProfileKind kind)
      : base_(std::move(base)), p_(std::move(p)), kind_(kind) {
    const auto& xs = base_.grid();
    d2u_.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) d2u_[i] = -base_.sign() * p_(xs[i]) * base_.u()[i];
    cum_.assign(xs.size(), 0.0);
    zero_ = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), 0.0) - xs.begin());
    if (zero_ >= xs.size() || xs[zero_] != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "profile grid must contain x = 0");
    }
    for (std::size_t i = zero_ + 1; i < xs.size(); ++i) cum_[i] = cum_[i - 1] + piece(xs[i - 1], xs[i]);
    for (std::size_t i = zero_; i-- > 0;) cum_[i] = cum_[i + 1] - piece(xs[i], xs[i + 1]);
  }

  const OdeProfile& base() const { return base_; }
  const NehariFunction& nehari() const { return p_; }
  ProfileKind kind() const { return kind_; }
  int sign() const { return base_.sign(); }
  double lo() const { return base_.lo(); }
  double hi() const { return base_.hi(); }
  const std::vector<double>& grid() const { return base_.grid(); }
  /// Profile values at the ODE nodes.
  const std::vector<double>& node_values() const { return cum_; }

  double u(double x) const { return eval(x, 0); }
  double du(double x) const { return eval(x, 1); }
  double d2u(double x) const { return eval(x, 2); }

  double F(double x) const {
    const std::size_t i = base_.interval(x);
    const double x0 = grid()[i];
    if (x == x0) return cum_[i];
    if (x == grid()[i + 1]) return cum_[i + 1];
    // Integrate from the node nearer the origin so F(-x) mirrors F(x).
    if (x0 >= 0) return cum_[i] + piece(x0, x);
    return cum_[i + 1] - piece(x, grid()[i + 1]);
  }
  double dF(double x) const {
    const double v = u(x);
    return 1.0 / (v * v);
  }
  double d2F(double x) const {
    const double v = u(x);
    return -2 * du(x) / (v * v * v);
  }
  /// Integral of u^{-2} over [a, b] inside one interval. Near the ends
  /// 1/u^2 is steep on the scale of a step, so a fixed rule is not enough.
  double piece(double a, double b) const {
    auto inv2 = [this](double x) {
      const double v = eval(x, 0);
      return 1.0 / (v * v);
    };
    const double rough = gauss_legendre8(inv2, a, b);
    return quadrature(inv2, a, b, 1e-14 * std::max(1.0, std::abs(rough)) + 1e-16);
  }

  /// Aliases for G profiles.
  double G(double x) const { return F(x); }
  double dG(double x) const { return dF(x); }

  /// Uses u'' = -sign p u, so the Schwarzian of F is exactly 2 sign p in
  /// these jets.
  double d3F(double x) const {
    const double v = u(x), dv = du(x);
    return 2 * sign() * p_(x) / (v * v) + 6 * dv * dv / (v * v * v * v);
  }

  /// Value at the right end plus a one-step tail estimate eps * dF / 2.
  double limit_at_one() const {
    const double e = 1 - hi();
    return F(hi()) + 0.5 * e * dF(hi());
  }

 private:
  double eval(double x, int order) const {
    const std::size_t i = base_.interval(x);
    const auto& xs = grid();
    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double u0 = base_.u()[i], u1 = base_.u()[i + 1];
    const double m0 = base_.du()[i] * h, m1 = base_.du()[i + 1] * h;
    const double c0 = d2u_[i] * h * h, c1 = d2u_[i + 1] * h * h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    switch (order) {
      case 0:
        return (1 - 10 * t3 + 15 * t4 - 6 * t5) * u0 + (t - 6 * t3 + 8 * t4 - 3 * t5) * m0 +
               (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5) * c0 + (10 * t3 - 15 * t4 + 6 * t5) * u1 +
               (-4 * t3 + 7 * t4 - 3 * t5) * m1 + (0.5 * t3 - t4 + 0.5 * t5) * c1;
      case 1:
        return ((-30 * t2 + 60 * t3 - 30 * t4) * u0 + (1 - 18 * t2 + 32 * t3 - 15 * t4) * m0 +
                (t - 4.5 * t2 + 6 * t3 - 2.5 * t4) * c0 + (30 * t2 - 60 * t3 + 30 * t4) * u1 +
                (-12 * t2 + 28 * t3 - 15 * t4) * m1 + (1.5 * t2 - 4 * t3 + 2.5 * t4) * c1) /
               h;
      default:
        return ((-60 * t + 180 * t2 - 120 * t3) * u0 + (-36 * t + 96 * t2 - 60 * t3) * m0 +
                (1 - 9 * t + 18 * t2 - 10 * t3) * c0 + (60 * t - 180 * t2 + 120 * t3) * u1 +
                (-24 * t + 84 * t2 - 60 * t3) * m1 + (3 * t - 12 * t2 + 10 * t3) * c1) /
               (h * h);
    }
  }

  OdeProfile base_;
  NehariFunction p_;
  ProfileKind kind_;
  std::vector<double> d2u_;
  std::vector<double> cum_;
  std::size_t zero_ = 0;
};

/// First sign change of u on the grid, located by bisection on the cubic
/// interpolant.
inline std::optional<double> first_zero(const OdeProfile& prof, bool from_right = false) {
  const auto& xs = prof.grid();
  const auto& us = prof.u();
  auto locate = [&](std::size_t i) {
    if (us[i] == 0) return xs[i];
    double a = xs[i], b = xs[i + 1];
    const double sa = us[i];
    for (int k = 0; k < 60; ++k) {
      const double m = 0.5 * (a + b);
      if ((prof.value(m) > 0) == (sa > 0)) a = m; else b = m;
    }
    return 0.5 * (a + b);
  };
  if (!from_right) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (us[i] == 0 || (us[i] > 0) != (us[i + 1] > 0)) return locate(i);
  } else {
    for (std::size_t i = xs.size() - 1; i-- > 0;)
      if (us[i + 1] == 0 || (us[i] > 0) != (us[i + 1] > 0)) return locate(i);
  }
  return std::nullopt;
}

/// F for p: u0 solves u'' + p u = 0 with u(0) = 1, u'(0) = 0.
inline ExtremalProfile extremal_F(const NehariFunction& p, double eps = 1e-3, double tol = 1e-10,
                                  OdeOptions opt = {}) {
  OdeProfile u0 = integrate_linear_ode(p.evaluator(), 1, 1.0, 0.0, eps, tol, opt);
  const auto& us = u0.u();
  if (std::any_of(us.begin(), us.end(), [](double v) { return !(v > 0); })) {
    // Report the zero closest to the origin.
    const auto r = first_zero(u0, false);
    const auto l = first_zero(u0, true);
    double where = r ? *r : 0;
    if (l && (!r || std::abs(*l) < std::abs(*r))) where = *l;
    throw Error(ErrorCode::DoubleZeroDetected,
                "u0 vanishes at x = " + std::to_string(where) + "; " + p.name() + " is not disconjugate", where);
  }
  return ExtremalProfile(std::move(u0), p, ProfileKind::F_profile);
}

/// G for p: the convex solution of u'' - p u = 0 with u(0) = 1, u'(0) = 0.
inline ExtremalProfile extremal_G(const NehariFunction& p, double eps = 1e-3, double tol = 1e-10,
                                  OdeOptions opt = {}) {
  OdeProfile u = integrate_linear_ode(p.evaluator(), -1, 1.0, 0.0, eps, tol, opt);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.u()[i] < 1 - 1e-9) {
      throw Error(ErrorCode::ConvexityViolated,
                  "convex solution dropped below 1 at x = " + std::to_string(u.grid()[i]), u.grid()[i]);
    }
  }
  return ExtremalProfile(std::move(u), p, ProfileKind::G_profile);
}

// ---------------------------------------------------------------------------
// Closed forms

inline void require_open_interval(double x) {
  if (!(x > -1 && x < 1)) throw Error(ErrorCode::DomainError, "x must lie in (-1, 1)", x);
}

/// F for the three built-in weights.
inline double closed_form_F(NehariKind kind, double x) {
  require_open_interval(x);
  switch (kind) {
    case NehariKind::classical_nehari: return std::atanh(x);
    case NehariKind::constant_pi2: return (2 / std::numbers::pi) * std::tan(std::numbers::pi * x / 2);
    case NehariKind::pokornyi: return 0.5 * std::atanh(x) + 0.5 * x / ((1 - x) * (1 + x));
    case NehariKind::custom: break;
  }
  throw Error(ErrorCode::UnknownKind, "no closed form for custom weights");
}

/// u0 for the three built-in weights.
inline double closed_form_u0(NehariKind kind, double x) {
  require_open_interval(x);
  switch (kind) {
    case NehariKind::classical_nehari: return std::sqrt((1 - x) * (1 + x));
    case NehariKind::constant_pi2: return std::cos(std::numbers::pi * x / 2);
    case NehariKind::pokornyi: return (1 - x) * (1 + x);
    case NehariKind::custom: break;
  }
  throw Error(ErrorCode::UnknownKind, "no closed form for custom weights");
}

/// G for the classical weight; tends to 1/sqrt(2) as x -> 1.
inline double closed_form_G_classical(double x) {
  require_open_interval(x);
  const double a = std::pow(1 + x, std::numbers::sqrt2), b = std::pow(1 - x, std::numbers::sqrt2);
  return (a - b) / (a + b) / std::numbers::sqrt2;
}

// ---------------------------------------------------------------------------
// Structure checks

struct GrowthReport {
  bool ok = true;
  /// (1 - x^2) F'(x) at x = 0 and at the last node.
  double value_at_zero = 0;
  double value_at_end = 0;
  std::optional<double> first_violation;
  std::string detail;
};

/// (1 - x^2) F'(x) >= 1 and nondecreasing on the nodes in [0, 1 - eps).
inline GrowthReport check_F_growth(const ExtremalProfile& prof) {
  if (prof.kind() != ProfileKind::F_profile) {
    throw Error(ErrorCode::InvalidArgument, "growth check needs an F profile");
  }
  GrowthReport r;
  double prev = 0;
  bool first = true;
  const auto& xs = prof.grid();
  const auto& us = prof.base().u();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (x < 0) continue;
    const double g = (1 - x) * (1 + x) / (us[i] * us[i]);
    if (first) r.value_at_zero = g;
    r.value_at_end = g;
    if (r.ok) {
      if (g < 1 - 1e-9) {
        r.ok = false;
        r.first_violation = x;
        r.detail = "(1-x^2)F' = " + std::to_string(g) + " < 1";
      } else if (!first && g < prev - 1e-9 * std::max(1.0, prev)) {
        r.ok = false;
        r.first_violation = x;
        r.detail = "(1-x^2)F' decreases";
      }
    }
    prev = g;
    first = false;
  }
  return r;
}

struct DisconjugacyOptions {
  /// Reach in t = artanh x; |t| <= 100 is 1 - |x| >= ~1e-87.
  double t_max = 100;
  /// Used when p has no stable weight evaluator (tanh t rounds to 1 past this).
  double t_cap_plain = 16.5;
  double tol = 1e-12;
  double max_step = 0.05;
  /// Zeros are trusted only while |w| + |w'| stays above this fraction of
  /// its running maximum.
  double noise_floor = 1e-4;
};

struct DisconjugacyReport {
  bool ok = true;
  bool u0_positive = true;
  std::optional<std::pair<double, double>> witness;
  /// Reach actually resolved, as an abscissa in (0, 1).
  double horizon = 0;
  std::string evidence = "numerical evidence";
};

namespace detail {

// Marches w'' + (Q(t) - 1) w = 0 from t0 to t1 in unit chunks, stopping at
// the first trusted zero or when the state falls into the noise floor.
// Returns the zero (in t) if found; `reach` receives the last trusted t.
inline std::optional<double> hyperbolic_zero(const NehariFunction& p, double t0, double w0, double dw0, double t1,
                                             const DisconjugacyOptions& o, double& reach) {
  const RealFn coef = [&p](double t) { return p.weight(t) - 1.0; };
  OdeOptions opt;
  opt.tol = o.tol;
  opt.max_step = o.max_step;
  opt.atol = 1e-300;
  const double dir = t1 > t0 ? 1 : -1;
  double t = t0, w = w0, dw = dw0;
  double peak = std::abs(w) + std::abs(dw);
  reach = t0;
  while (dir * (t1 - t) > 0) {
    const double next = dir > 0 ? std::min(t + 1.0, t1) : std::max(t - 1.0, t1);
    std::vector<double> xs, us, dus;
    march(coef, t, {w, dw}, next, opt, xs, us, dus);
    double prev_t = t, prev_w = w;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double state = std::abs(us[i]) + std::abs(dus[i]);
      if (state < o.noise_floor * peak) return std::nullopt;
      peak = std::max(peak, state);
      if (prev_w != 0 && (us[i] == 0 || (us[i] > 0) != (prev_w > 0))) {
        // Secant is adequate: the step is short and the crossing transversal.
        return prev_t + (xs[i] - prev_t) * prev_w / (prev_w - us[i]);
      }
      reach = xs[i];
      prev_t = xs[i];
      prev_w = us[i];
    }
    t = xs.back();
    w = us.back();
    dw = dus.back();
  }
  return std::nullopt;
}

}  // namespace detail

/// Numerical disconjugacy evidence in t = artanh x, where u = sqrt(1-x^2) w
/// turns u'' + p u = 0 into w'' + ((1-x^2)^2 p - 1) w = 0. Checks that the
/// even solution u0 keeps its sign and that the solution vanishing at the
/// left end does not vanish again.
inline DisconjugacyReport disconjugacy_check(const NehariFunction& p, const DisconjugacyOptions& o = {}) {
  const double T = p.has_weight() ? o.t_max : std::min(o.t_max, o.t_cap_plain);
  DisconjugacyReport r;
  double reach_r = 0, reach_l = 0, reach_b = 0;
  const auto zr = detail::hyperbolic_zero(p, 0.0, 1.0, 0.0, T, o, reach_r);
  const auto zl = detail::hyperbolic_zero(p, 0.0, 1.0, 0.0, -T, o, reach_l);
  r.u0_positive = !zr && !zl;
  if (zr && zl) r.witness = std::make_pair(std::tanh(*zl), std::tanh(*zr));
  if (!r.witness) {
    const auto zb = detail::hyperbolic_zero(p, -T, 0.0, 1.0, T, o, reach_b);
    if (zb) r.witness = std::make_pair(std::tanh(-T), std::tanh(*zb));
  }
  r.ok = !r.witness;
  r.horizon = std::tanh(std::min(reach_r, -reach_l));
  return r;
}

/// Largest c in [1, c_max] with c p disconjugate, by bisection.
inline double extremal_scan(const NehariFunction& p, double c_max = 4.0, int steps = 14,
                            const DisconjugacyOptions& o = {}) {
  if (!(c_max > 1)) throw Error(ErrorCode::InvalidArgument, "c_max must exceed 1");
  const auto base = disconjugacy_check(p, o);
  if (!base.ok) {
    throw Error(ErrorCode::DoubleZeroDetected, p.name() + " itself is not disconjugate",
                base.witness ? std::optional<double>(base.witness->second) : std::nullopt);
  }
  if (disconjugacy_check(p.scaled(c_max), o).ok) return c_max;
  double lo = 1, hi = c_max;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (disconjugacy_check(p.scaled(mid), o).ok) lo = mid; else hi = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Export

/// Columns x, u, du, F, dF at the ODE nodes.
inline void write_profile_csv(std::ostream& os, const ExtremalProfile& prof) {
  os.precision(17);
  os << (prof.kind() == ProfileKind::F_profile ? "x,u,du,F,dF\n" : "x,u,du,G,dG\n");
  const auto& xs = prof.grid();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = prof.base().u()[i];
    os << xs[i] << ',' << u << ',' << prof.base().du()[i] << ',' << prof.node_values()[i] << ','
       << 1.0 / (u * u) << '\n';
  }
}

}  // namespace sdl
