#pragma once

// Third-order jets: truncated Taylor data (value and first three
// derivatives) propagated through arithmetic by the Leibniz and
// Faa di Bruno rules. Works for real and complex scalars.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sdl/error.hpp"

namespace sdl {

using Complex = std::complex<double>;

template <class T>
struct Jet3 {
  T v{};
  T d1{};
  T d2{};
  T d3{};

  Jet3() = default;
  constexpr Jet3(T value) : v(value) {}  // NOLINT: constants promote implicitly
  constexpr Jet3(T value, T first, T second, T third) : v(value), d1(first), d2(second), d3(third) {}

  /// Independent variable seeded at x.
  static constexpr Jet3 variable(T x) { return Jet3(x, T(1), T(0), T(0)); }

  Jet3& operator+=(const Jet3& o) {
    v += o.v; d1 += o.d1; d2 += o.d2; d3 += o.d3;
    return *this;
  }
  Jet3& operator-=(const Jet3& o) {
    v -= o.v; d1 -= o.d1; d2 -= o.d2; d3 -= o.d3;
    return *this;
  }
  Jet3& operator*=(const Jet3& o) { return *this = *this * o; }
  Jet3& operator/=(const Jet3& o) { return *this = *this / o; }

  friend Jet3 operator-(const Jet3& a) { return {-a.v, -a.d1, -a.d2, -a.d3}; }
  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }

  friend Jet3 operator*(const Jet3& a, const Jet3& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + T(2) * a.d1 * b.d1 + a.v * b.d2,
            a.d3 * b.v + T(3) * a.d2 * b.d1 + T(3) * a.d1 * b.d2 + a.v * b.d3};
  }

  friend Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }

  /// Applies a scalar function whose derivatives f0..f3 at b.v are given.
  friend Jet3 chain(const Jet3& b, T f0, T f1, T f2, T f3) {
    return {f0,
            f1 * b.d1,
            f2 * b.d1 * b.d1 + f1 * b.d2,
            f3 * b.d1 * b.d1 * b.d1 + T(3) * f2 * b.d1 * b.d2 + f1 * b.d3};
  }

  friend Jet3 reciprocal(const Jet3& b) {
    const T r = T(1) / b.v;
    return chain(b, r, -r * r, T(2) * r * r * r, T(-6) * r * r * r * r);
  }
};

template <class T>
Jet3<T> sqrt(const Jet3<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  const T inv = T(1) / a.v;
  return chain(a, s, T(0.5) * s * inv, T(-0.25) * s * inv * inv, T(0.375) * s * inv * inv * inv);
}

template <class T>
Jet3<T> exp(const Jet3<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return chain(a, e, e, e, e);
}

template <class T>
Jet3<T> log(const Jet3<T>& a) {
  using std::log;
  const T inv = T(1) / a.v;
  return chain(a, log(a.v), inv, -inv * inv, T(2) * inv * inv * inv);
}

template <class T>
Jet3<T> sin(const Jet3<T>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.v), c = cos(a.v);
  return chain(a, s, c, -s, -c);
}

template <class T>
Jet3<T> cos(const Jet3<T>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.v), c = cos(a.v);
  return chain(a, c, -s, -c, s);
}

template <class T>
Jet3<T> tanh(const Jet3<T>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  const T s = T(1) - t * t;  // sech^2
  return chain(a, t, s, T(-2) * t * s, T(-2) * s * (s - T(2) * t * t));
}

/// Principal-branch power a^e for real exponent e.
template <class T>
Jet3<T> pow(const Jet3<T>& a, double e) {
  using std::pow;
  const T p = pow(a.v, T(e));
  const T inv = T(1) / a.v;
  return chain(a, p, T(e) * p * inv, T(e * (e - 1)) * p * inv * inv,
               T(e * (e - 1) * (e - 2)) * p * inv * inv * inv);
}

using Jet3Complex = Jet3<Complex>;

/// Composition of analytic jets: given the jet of an outer function at w = inner.v
/// (derivatives with respect to w), returns the jet of outer(inner(z)).
template <class T>
Jet3<T> compose(const Jet3<T>& outer, const Jet3<T>& inner) {
  return chain(inner, outer.v, outer.d1, outer.d2, outer.d3);
}

/// 3-jet of a curve in R^n: value and first three parameter derivatives.
struct Jet3Real {
  Eigen::VectorXd value;
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;
  Eigen::VectorXd d3;

  Jet3Real() = default;
  explicit Jet3Real(Eigen::Index n)
      : value(Eigen::VectorXd::Zero(n)), d1(Eigen::VectorXd::Zero(n)),
        d2(Eigen::VectorXd::Zero(n)), d3(Eigen::VectorXd::Zero(n)) {}

  Eigen::Index dim() const { return value.size(); }

  bool finite() const {
    return value.allFinite() && d1.allFinite() && d2.allFinite() && d3.allFinite();
  }

  std::vector<Jet3<double>> components() const {
    std::vector<Jet3<double>> out(static_cast<std::size_t>(dim()));
    for (Eigen::Index i = 0; i < dim(); ++i) {
      out[static_cast<std::size_t>(i)] = {value[i], d1[i], d2[i], d3[i]};
    }
    return out;
  }

  static Jet3Real from_components(const std::vector<Jet3<double>>& comps) {
    if (comps.empty()) throw Error(ErrorCode::InvalidArgument, "curve jet needs dimension >= 1");
    Jet3Real j(static_cast<Eigen::Index>(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      j.value[k] = comps[i].v;
      j.d1[k] = comps[i].d1;
      j.d2[k] = comps[i].d2;
      j.d3[k] = comps[i].d3;
    }
    return j;
  }
};

}  // namespace sdl
