#pragma once

// Central-difference estimates of Wirtinger derivatives of a scalar field
// on the unit disk. Test oracle only; production formulas are analytic.

#include <cmath>
#include <complex>
#include <type_traits>

#include "sdl/error.hpp"

namespace sdl {

struct WirtingerEstimate {
  std::complex<double> s;
  std::complex<double> s_z;
  std::complex<double> s_zbar;
  std::complex<double> s_zz;
  /// d^2/dz dzbar, a quarter of the Laplacian.
  std::complex<double> s_zzbar;
};

namespace detail {

template <class Field>
WirtingerEstimate wirtinger_stencil(Field& field, std::complex<double> z, double h) {
  using C = std::complex<double>;
  auto f = [&](C w) { return C(field(w)); };
  const C I(0, 1);
  const C f0 = f(z);
  const C fxp = f(z + h), fxm = f(z - h), fyp = f(z + I * h), fym = f(z - I * h);
  const C fpp = f(z + h + I * h), fpm = f(z + h - I * h), fmp = f(z - h + I * h), fmm = f(z - h - I * h);
  const C sx = (fxp - fxm) / (2 * h);
  const C sy = (fyp - fym) / (2 * h);
  const C sxx = (fxp - 2.0 * f0 + fxm) / (h * h);
  const C syy = (fyp - 2.0 * f0 + fym) / (h * h);
  const C sxy = (fpp - fpm - fmp + fmm) / (4 * h * h);
  return {f0, 0.5 * (sx - I * sy), 0.5 * (sx + I * sy), 0.25 * (sxx - syy - 2.0 * I * sxy), 0.25 * (sxx + syy)};
}

}  // namespace detail

/// Estimates s, s_z, s_zbar, s_zz, s_zzbar at z with O(h^2) error. With
/// `richardson`, combines steps h and h/2 for O(h^4).
template <class Field>
WirtingerEstimate wirtinger_fd(Field&& field, std::complex<double> z, double h = 1e-4, bool richardson = false) {
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  if (std::abs(z) + 2 * h >= 1.0) {
    throw Error(ErrorCode::StencilOutsideDomain, "stencil of radius 2h leaves the unit disk", std::abs(z));
  }
  const auto coarse = detail::wirtinger_stencil(field, z, h);
  if (!richardson) return coarse;
  const auto fine = detail::wirtinger_stencil(field, z, 0.5 * h);
  auto extrapolate = [](std::complex<double> c, std::complex<double> f) { return (4.0 * f - c) / 3.0; };
  return {coarse.s, extrapolate(coarse.s_z, fine.s_z), extrapolate(coarse.s_zbar, fine.s_zbar),
          extrapolate(coarse.s_zz, fine.s_zz), extrapolate(coarse.s_zzbar, fine.s_zzbar)};
}

}  // namespace sdl
