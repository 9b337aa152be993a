#pragma once

// Globally adaptive Gauss-Kronrod (7, 15) quadrature. The interval with the
// largest error estimate is bisected until the summed estimate meets the
// tolerance.

#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

#include "sdl/error.hpp"

namespace sdl {

struct QuadratureResult {
  double value = 0;
  double error = 0;
  std::size_t intervals = 0;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod abscissae kXgk[1], [3], [5], [7].
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class R>
struct Segment {
  double a, b;
  R value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class R>
bool finite_value(const R& v) {
  if constexpr (std::is_floating_point_v<R>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

template <class R, class F>
Segment<R> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  auto eval = [&](double x) {
    R v = f(x);
    if (!finite_value(v)) {
      throw Error(ErrorCode::NonFiniteIntegrand, "integrand is not finite at x = " + std::to_string(x), x);
    }
    return v;
  };
  const R fc = eval(c);
  R kron = fc * kWgk[7];
  R gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const R s = eval(c - r * kXgk[i]) + eval(c + r * kXgk[i]);
    kron += s * kWgk[i];
    if (i % 2 == 1) gauss += s * kWg[i / 2];
  }
  kron *= r;
  gauss *= r;
  return {a, b, kron, std::abs(kron - gauss)};
}

template <class R, class F>
R integrate_adaptive(F&& f, double a, double b, double tol, std::size_t max_intervals, double* err_out,
                     std::size_t* count_out) {
  if (!(tol > 0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
  if (a == b) {
    if (err_out) *err_out = 0;
    if (count_out) *count_out = 0;
    return R{};
  }
  if (b < a) return -integrate_adaptive<R>(f, b, a, tol, max_intervals, err_out, count_out);

  std::priority_queue<Segment<R>> heap;
  auto first = gk15<R>(f, a, b);
  R total = first.value;
  double total_err = first.error;
  heap.push(first);
  std::size_t count = 1;
  while (total_err > tol) {
    if (count >= max_intervals) {
      const auto& worst = heap.top();
      std::ostringstream msg;
      msg << "subdivision limit " << max_intervals << " reached; worst interval [" << worst.a << ", " << worst.b
          << "] error " << worst.error;
      throw Error(ErrorCode::MaxSubdivisions, msg.str(), 0.5 * (worst.a + worst.b));
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      std::ostringstream msg;
      msg << "interval [" << worst.a << ", " << worst.b << "] cannot be bisected further";
      throw Error(ErrorCode::MaxSubdivisions, msg.str(), mid);
    }
    auto left = gk15<R>(f, worst.a, mid);
    auto right = gk15<R>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift from incremental updates.
  R sum{};
  double err = 0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (err_out) *err_out = err;
  if (count_out) *count_out = count;
  return sum;
}

}  // namespace detail

/// Adaptive estimate of the integral of f over [a, b] with absolute error
/// estimate at most tol. Swapping a and b negates the result.
template <class F>
double quadrature(F&& f, double a, double b, double tol = 1e-10, std::size_t max_intervals = 20000) {
  return detail::integrate_adaptive<double>(f, a, b, tol, max_intervals, nullptr, nullptr);
}

template <class F>
QuadratureResult quadrature_detailed(F&& f, double a, double b, double tol = 1e-10,
                                     std::size_t max_intervals = 20000) {
  QuadratureResult r;
  r.value = detail::integrate_adaptive<double>(f, a, b, tol, max_intervals, &r.error, &r.intervals);
  return r;
}

/// Complex-valued integrand on a real interval.
template <class F>
std::complex<double> quadrature_complex(F&& f, double a, double b, double tol = 1e-12,
                                        std::size_t max_intervals = 20000) {
  return detail::integrate_adaptive<std::complex<double>>(f, a, b, tol, max_intervals, nullptr, nullptr);
}

/// Fixed 8-point Gauss-Legendre rule on [a, b]; used on smooth pieces
/// such as single interpolation intervals.
template <class F>
double gauss_legendre8(F&& f, double a, double b) {
  static constexpr double x[4] = {0.183434642495649804939476142360184, 0.525532409916328985817739049189254,
                                  0.796666477413626739591553936475830, 0.960289856497536231683560868569473};
  static constexpr double w[4] = {0.362683783378361982965150449277196, 0.313706645877887287337962201986601,
                                  0.222381034453374470544355994426241, 0.101228536290376259152531354309962};
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < 4; ++i) s += w[i] * (f(c - r * x[i]) + f(c + r * x[i]));
  return s * r;
}

}  // namespace sdl
