#pragma once

// Adaptive Dormand-Prince 5(4) integration of the linear second-order
// equation u'' + c(x) u = 0, written as the first-order system (u, u').
// Solutions are stored on the accepted step grid and queried between
// nodes by cubic Hermite interpolation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sdl/error.hpp"

namespace sdl {

using RealFn = std::function<double(double)>;

struct OdeOptions {
  /// Domain cut: work happens on [-1 + eps, 1 - eps].
  double eps = 1e-3;
  /// Relative local error tolerance per step.
  double tol = 1e-10;
  /// Absolute floor for the error scale.
  double atol = 1e-15;
  /// Largest accepted step; keeps the Hermite interpolant accurate.
  double max_step = 0.005;
  double min_step = 1e-15;
  std::size_t max_steps = 5'000'000;
  /// Abscissae the integrator must land on exactly (any order).
  std::vector<double> stops;
};

/// Sampled solution of u'' + sign * p u = 0. `sign` is +1 or -1.
class OdeProfile {
 public:
  OdeProfile() = default;
  OdeProfile(std::vector<double> grid, std::vector<double> u, std::vector<double> du, int sign)
      : grid_(std::move(grid)), u_(std::move(u)), du_(std::move(du)), sign_(sign) {
    if (grid_.size() < 2 || u_.size() != grid_.size() || du_.size() != grid_.size()) {
      throw Error(ErrorCode::InvalidArgument, "profile needs matching grid, u, du of length >= 2");
    }
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      if (!(grid_[i] > grid_[i - 1])) {
        throw Error(ErrorCode::InvalidArgument, "profile grid must be strictly increasing", grid_[i]);
      }
    }
  }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& du() const { return du_; }
  int sign() const { return sign_; }
  double lo() const { return grid_.front(); }
  double hi() const { return grid_.back(); }
  std::size_t size() const { return grid_.size(); }

  /// Index i of the interval [x_i, x_{i+1}] containing x (clamped).
  std::size_t interval(double x) const {
    if (x < lo() || x > hi()) {
      throw Error(ErrorCode::DomainError, "query outside the integrated domain", x);
    }
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const auto idx = static_cast<std::size_t>(std::distance(grid_.begin(), it));
    return std::min(idx == 0 ? 0 : idx - 1, grid_.size() - 2);
  }

  double value(double x) const { return hermite(x, 0); }
  double slope(double x) const { return hermite(x, 1); }
  /// Second derivative of the interpolant (piecewise linear between nodes).
  double curvature(double x) const { return hermite(x, 2); }

 private:
  double hermite(double x, int order) const {
    const std::size_t i = interval(x);
    const double x0 = grid_[i], h = grid_[i + 1] - x0;
    const double t = (x - x0) / h;
    const double u0 = u_[i], u1 = u_[i + 1], m0 = du_[i] * h, m1 = du_[i + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    switch (order) {
      case 0:
        return (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * u1 +
               (t3 - t2) * m1;
      case 1:
        return ((6 * t2 - 6 * t) * u0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * u1 +
                (3 * t2 - 2 * t) * m1) / h;
      default:
        return ((12 * t - 6) * u0 + (6 * t - 4) * m0 + (-12 * t + 6) * u1 + (6 * t - 2) * m1) / (h * h);
    }
  }

  std::vector<double> grid_;
  std::vector<double> u_;
  std::vector<double> du_;
  int sign_ = 1;
};

namespace detail {

struct State {
  double u;
  double du;
};

// Dormand-Prince 5(4) tableau.
inline constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double kE[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                 -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

// Integrates from x0 to x_end (either direction), appending accepted nodes
// (excluding the start) to the output vectors.
inline void march(const RealFn& coef, double x0, State y, double x_end, const OdeOptions& opt,
                  std::vector<double>& xs, std::vector<double>& us, std::vector<double>& dus) {
  const double dir = x_end >= x0 ? 1.0 : -1.0;
  if (x_end == x0) return;

  auto eval_coef = [&](double x) {
    const double c = coef(x);
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::NonFiniteCoefficient, "coefficient is not finite at x = " + std::to_string(x), x);
    }
    return c;
  };
  auto rhs = [&](double x, const State& s) { return State{s.du, -eval_coef(x) * s.u}; };

  // Stops strictly between x0 and x_end, in marching order.
  std::vector<double> stops;
  for (double s : opt.stops) {
    if (dir * (s - x0) > 0 && dir * (x_end - s) > 0) stops.push_back(s);
  }
  std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return dir * a < dir * b; });
  stops.push_back(x_end);
  std::size_t next_stop = 0;

  double x = x0;
  double h = dir * std::min(opt.max_step, 1e-3);
  State k[7];
  k[0] = rhs(x, y);
  std::size_t steps = 0;

  while (dir * (x_end - x) > 0) {
    if (++steps > opt.max_steps) {
      throw Error(ErrorCode::StepUnderflow, "step budget exhausted at x = " + std::to_string(x), x);
    }
    const double target = stops[next_stop];
    const bool hits_target = dir * (x + h - target) >= 0;
    if (hits_target) h = target - x;

    for (int s = 1; s < 7; ++s) {
      State yi = y;
      for (int j = 0; j < s; ++j) {
        yi.u += h * kA[s][j] * k[j].u;
        yi.du += h * kA[s][j] * k[j].du;
      }
      k[s] = rhs(x + kC[s] * h, yi);
    }
    // Row 6 of the tableau is the fifth-order solution (FSAL).
    State y_new = y;
    for (int j = 0; j < 6; ++j) {
      y_new.u += h * kA[6][j] * k[j].u;
      y_new.du += h * kA[6][j] * k[j].du;
    }
    double eu = 0, edu = 0;
    for (int j = 0; j < 7; ++j) {
      eu += kE[j] * k[j].u;
      edu += kE[j] * k[j].du;
    }
    eu *= h;
    edu *= h;
    // Relative control on u (its reciprocal square feeds the profiles);
    // u' is measured against the larger of |u|, |u'|.
    const double mag_u = std::max(std::abs(y.u), std::abs(y_new.u));
    const double mag_du = std::max({std::abs(y.du), std::abs(y_new.du), mag_u});
    const double err = std::max(std::abs(eu) / (opt.atol + opt.tol * mag_u),
                                std::abs(edu) / (opt.atol + opt.tol * mag_du));
    if (!std::isfinite(err)) {
      throw Error(ErrorCode::StepUnderflow, "non-finite error estimate at x = " + std::to_string(x), x);
    }

    if (err <= 1.0) {
      if (hits_target) {
        x = target;
        ++next_stop;
      } else {
        x += h;
      }
      y = y_new;
      k[0] = k[6];
      xs.push_back(x);
      us.push_back(y.u);
      dus.push_back(y.du);
    }
    const double factor = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    double mag = std::min(std::abs(h) * factor, opt.max_step);
    if (mag < opt.min_step * std::max(1.0, std::abs(x))) {
      throw Error(ErrorCode::StepUnderflow, "adaptive step stalled at x = " + std::to_string(x), x);
    }
    h = dir * mag;
  }
}

}  // namespace detail

/// Solves u'' + coef(x) u = 0 on [a, b] with u(x0) = u0, u'(x0) = du0,
/// integrating outward from x0 in both directions. `sign` is recorded
/// on the profile as a label only.
inline OdeProfile solve_linear_ode(const RealFn& coef, double x0, double u0, double du0, double a, double b,
                                   const OdeOptions& opt = {}, int sign = 1) {
  if (!(a <= x0 && x0 <= b && a < b)) {
    throw Error(ErrorCode::InvalidArgument, "need a <= x0 <= b and a < b");
  }
  if (!(opt.tol > 0) || !(opt.max_step > 0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerance and max step must be positive");
  }
  std::vector<double> xl, ul, dul, xr, ur, dur;
  detail::march(coef, x0, {u0, du0}, a, opt, xl, ul, dul);
  detail::march(coef, x0, {u0, du0}, b, opt, xr, ur, dur);

  std::vector<double> xs, us, dus;
  xs.reserve(xl.size() + xr.size() + 1);
  us.reserve(xs.capacity());
  dus.reserve(xs.capacity());
  for (std::size_t i = xl.size(); i-- > 0;) {
    xs.push_back(xl[i]);
    us.push_back(ul[i]);
    dus.push_back(dul[i]);
  }
  xs.push_back(x0);
  us.push_back(u0);
  dus.push_back(du0);
  xs.insert(xs.end(), xr.begin(), xr.end());
  us.insert(us.end(), ur.begin(), ur.end());
  dus.insert(dus.end(), dur.begin(), dur.end());
  return OdeProfile(std::move(xs), std::move(us), std::move(dus), sign);
}

/// u'' + sign * p(x) u = 0 on the cut domain [-1 + eps, 1 - eps] with data
/// imposed at x = 0.
inline OdeProfile integrate_linear_ode(const RealFn& p, int sign, double init_value, double init_slope,
                                       double eps = 1e-3, double tol = 1e-10, OdeOptions opt = {}) {
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  if (!(eps > 0 && eps < 1)) throw Error(ErrorCode::InvalidArgument, "domain cut must lie in (0, 1)");
  opt.eps = eps;
  opt.tol = tol;
  const RealFn coef = sign > 0 ? p : RealFn([&p](double x) { return -p(x); });
  return solve_linear_ode(coef, 0.0, init_value, init_slope, -1.0 + eps, 1.0 - eps, opt, sign);
}

}  // namespace sdl
