#pragma once

// Intrinsic distance on the lifted surface, approximated by shortest paths
// on a Cartesian lattice with density lambda; the covering bound
// H(r) = lambda(0) G(r) / (1 + |sigma_z(0)| G(r)) and its verification;
// the Ahlfors Schwarzian of a lifted disk curve.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sdl/curves.hpp"
#include "sdl/error.hpp"
#include "sdl/harmonic.hpp"
#include "sdl/nehari.hpp"
#include "sdl/parallel.hpp"

namespace sdl {

struct GridOptions {
  /// Lattice points per side (odd, so the origin is a node).
  std::size_t n = 401;
  double r_max = 0.995;
  /// Neighbours are all primitive offsets (a, b) with max(|a|, |b|) <= radius.
  int stencil_radius = 3;
  int refinement = 0;

  /// k doublings of both the resolution and the stencil radius.
  GridOptions refined(int k = 1) const {
    GridOptions o = *this;
    for (int i = 0; i < k; ++i) {
      o.n = 2 * o.n - 1;
      o.stencil_radius *= 2;
      ++o.refinement;
    }
    return o;
  }
};

class ConformalGrid {
 public:
  using Density = std::function<double(Complex)>;

  ConformalGrid(const Density& density, GridOptions o = {}) : opt_(o) {
    if (o.n < 3 || o.n % 2 == 0) throw Error(ErrorCode::InvalidArgument, "grid size must be odd and at least 3");
    if (!(o.r_max > 0 && o.r_max < 1)) throw Error(ErrorCode::DomainError, "r_max must lie in (0, 1)", o.r_max);
    if (o.stencil_radius < 1) throw Error(ErrorCode::InvalidArgument, "stencil radius must be positive");
    const std::size_t n = o.n;
    h_ = 2 * o.r_max / static_cast<double>(n - 1);
    inside_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) inside_[i * n + j] = std::abs(position(i * n + j)) <= o.r_max * (1 + 1e-12);
    // Density on the half-lattice: nodes and every edge midpoint.
    const std::size_t m = 2 * n - 1;
    half_.assign(m * m, std::numeric_limits<double>::quiet_NaN());
    const double hh = 0.5 * h_;
    std::vector<int> bad(m, 0);
    parallel_for(m, [&](std::size_t a) {
      for (std::size_t b = 0; b < m; ++b) {
        const Complex z(hh * (static_cast<double>(a) - static_cast<double>(n - 1)),
                        hh * (static_cast<double>(b) - static_cast<double>(n - 1)));
        if (std::abs(z) > o.r_max * (1 + 1e-12)) continue;
        const double v = density(z);
        if (!(v > 0) || !std::isfinite(v)) bad[a] = 1;
        half_[a * m + b] = v;
      }
    });
    if (std::find(bad.begin(), bad.end(), 1) != bad.end()) {
      throw Error(ErrorCode::DomainError, "grid density must be positive and finite");
    }
    for (int a = -o.stencil_radius; a <= o.stencil_radius; ++a)
      for (int b = -o.stencil_radius; b <= o.stencil_radius; ++b)
        if ((a || b) && std::gcd(a, b) == 1) stencil_.emplace_back(a, b);
  }

  const GridOptions& options() const { return opt_; }
  double cell() const { return h_; }
  std::size_t size() const { return opt_.n * opt_.n; }
  bool inside(std::size_t node) const { return inside_[node] != 0; }
  std::size_t neighbours() const { return stencil_.size(); }

  Complex position(std::size_t node) const {
    const auto c = static_cast<long>(opt_.n / 2);
    const auto i = static_cast<long>(node / opt_.n), j = static_cast<long>(node % opt_.n);
    return {h_ * static_cast<double>(i - c), h_ * static_cast<double>(j - c)};
  }
  double density_at(std::size_t node) const {
    const std::size_t m = 2 * opt_.n - 1, i = node / opt_.n, j = node % opt_.n;
    return half_[2 * i * m + 2 * j];
  }

  /// Nearest lattice node inside the disk; OutOfGrid beyond r_max.
  std::size_t node_near(Complex z) const {
    if (std::abs(z) > opt_.r_max * (1 + 1e-12)) {
      throw Error(ErrorCode::OutOfGrid, "point lies outside the grid radius", std::abs(z));
    }
    const auto n = static_cast<long>(opt_.n);
    const long i0 = std::lround((z.real() + opt_.r_max) / h_), j0 = std::lround((z.imag() + opt_.r_max) / h_);
    std::size_t best = size();
    double bd = std::numeric_limits<double>::infinity();
    for (long i = i0 - 1; i <= i0 + 1; ++i)
      for (long j = j0 - 1; j <= j0 + 1; ++j) {
        if (i < 0 || j < 0 || i >= n || j >= n) continue;
        const auto k = static_cast<std::size_t>(i * n + j);
        if (!inside(k)) continue;
        const double d = std::abs(position(k) - z);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
    if (best == size()) throw Error(ErrorCode::OutOfGrid, "no grid node near the point", std::abs(z));
    return best;
  }

  std::size_t origin() const { return (opt_.n / 2) * opt_.n + opt_.n / 2; }

  /// Nodes within half a cell of the circle |z| = r.
  std::vector<std::size_t> ring(double r) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
      if (inside(k) && std::abs(std::abs(position(k)) - r) <= 0.5 * h_) out.push_back(k);
    return out;
  }

  /// Single-source shortest-path lengths; infinity outside the disk.
  std::vector<double> distances_from(std::size_t src) const {
    const auto n = static_cast<long>(opt_.n);
    const long m = 2 * n - 1;
    std::vector<double> dist(size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.emplace(0.0, src);
    std::vector<double> len(stencil_.size());
    for (std::size_t s = 0; s < stencil_.size(); ++s) len[s] = h_ * std::hypot(stencil_[s].first, stencil_[s].second);
    while (!pq.empty()) {
      const auto [d, k] = pq.top();
      pq.pop();
      if (d > dist[k]) continue;
      const long i = static_cast<long>(k) / n, j = static_cast<long>(k) % n;
      const double lk = half_[static_cast<std::size_t>(2 * i * m + 2 * j)];
      for (std::size_t s = 0; s < stencil_.size(); ++s) {
        const long a = i + stencil_[s].first, b = j + stencil_[s].second;
        if (a < 0 || b < 0 || a >= n || b >= n) continue;
        const auto t = static_cast<std::size_t>(a * n + b);
        if (!inside(t)) continue;
        const double mid = half_[static_cast<std::size_t>((i + a) * m + (j + b))];
        const double lt = half_[static_cast<std::size_t>(2 * a * m + 2 * b)];
        const double nd = d + len[s] * (lk + 4 * mid + lt) / 6;
        if (nd < dist[t]) {
          dist[t] = nd;
          pq.emplace(nd, t);
        }
      }
    }
    return dist;
  }

  double distance(Complex z1, Complex z2) const {
    const auto a = node_near(z1), b = node_near(z2);
    if (a == b) return 0;
    const double d = distances_from(a)[b];
    if (!std::isfinite(d)) throw Error(ErrorCode::Disconnected, "grid nodes are not connected");
    return d;
  }

 private:
  GridOptions opt_;
  double h_ = 0;
  std::vector<char> inside_;
  std::vector<double> half_;
  std::vector<std::pair<int, int>> stencil_;
};

inline double conformal_distance(const ConformalGrid& grid, Complex z1, Complex z2) {
  return grid.distance(z1, z2);
}

/// CSV of node position, density and distance (finite entries only).
inline void write_distance_field(std::ostream& os, const ConformalGrid& grid, const std::vector<double>& dist) {
  os << "x,y,lambda,rho\n";
  os.precision(12);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.inside(k) || !std::isfinite(dist[k])) continue;
    const Complex z = grid.position(k);
    os << z.real() << ',' << z.imag() << ',' << grid.density_at(k) << ',' << dist[k] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Covering bound

inline double H_bound(const ExtremalProfile& G, double lambda0, double sigma_z0_abs, double r) {
  if (!(r >= 0 && r < 1)) throw Error(ErrorCode::DomainError, "radius must lie in [0, 1)", r);
  if (!(lambda0 > 0)) throw Error(ErrorCode::DomainError, "lambda(0) must be positive", lambda0);
  if (!(sigma_z0_abs >= 0)) throw Error(ErrorCode::DomainError, "|sigma_z(0)| must be nonnegative", sigma_z0_abs);
  const double g = G.G(r);
  return lambda0 * g / (1 + sigma_z0_abs * g);
}

/// G(1): exact 1/sqrt2 for the classical weight, extrapolated otherwise.
inline double G_at_one(const ExtremalProfile& G) {
  if (G.nehari().kind() == NehariKind::classical_nehari) return 1 / std::numbers::sqrt2;
  return G.limit_at_one();
}

inline double covering_radius(double G1, double lambda0, double sigma_z0_abs) {
  return lambda0 * G1 / (1 + sigma_z0_abs * G1);
}

struct CoveringReport {
  std::string theorem = "4";
  std::string p_kind;
  std::string map_label;
  Complex alpha;
  std::vector<double> radii;
  std::vector<double> measured_min_rho;
  std::vector<double> H_bound;
  std::vector<double> margins;
  std::vector<double> allowance;
  double covering_radius_R = 0;
  double G_one = 0;
  Complex sigma_z0;
  double lambda0 = 0;
  /// Relative ring-distance error of the flat metric on the same grid.
  double calibration_error = 0;
  /// Smallest distance from the origin to the outermost ring (|z| ~ r_max).
  double boundary_min_rho = 0;
  GridOptions grid;
  std::string hypothesis_note = "sampled hypothesis";

  bool holds() const {
    for (std::size_t i = 0; i < margins.size(); ++i)
      if (margins[i] < -allowance[i]) return false;
    return true;
  }
  double min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : margins) m = std::min(m, x);
    return m;
  }
};

/// Minimum of `dist` over the ring of radius r.
inline double ring_min(const ConformalGrid& grid, const std::vector<double>& dist, double r) {
  double best = std::numeric_limits<double>::infinity();
  for (auto k : grid.ring(r)) best = std::min(best, dist[k]);
  if (!std::isfinite(best)) throw Error(ErrorCode::Disconnected, "ring is not reachable", r);
  return best;
}

/// max_r |ring_min(r) - r| / r for the flat metric at these grid settings.
inline double calibrate_grid(const GridOptions& o, const std::vector<double>& radii) {
  const ConformalGrid flat([](Complex) { return 1.0; }, o);
  const auto dist = flat.distances_from(flat.origin());
  double e = 0;
  for (double r : radii) {
    if (r <= 0) continue;
    e = std::max(e, std::abs(ring_min(flat, dist, r) - r) / r);
  }
  return e;
}

struct Theorem4Options {
  GridOptions grid;
  double eps = 1e-3;
  double tol = 1e-10;
};

/// min over |z| = r of rho(f~(z), f~(0)) >= H(r) for each radius, with
/// allowance 2 x calibration error x measured distance.
inline CoveringReport verify_theorem4(const HarmonicMap& f, const NehariFunction& p, const std::vector<double>& radii,
                                      const Theorem4Options& o = {}) {
  require_flags(p, {"monotone_nondecreasing"}, o.eps);
  for (double r : radii) {
    if (!(r > 0 && r <= o.grid.r_max)) throw Error(ErrorCode::DomainError, "radius outside the grid", r);
  }
  const auto scan = scan_criterion5(f, p, CoverGrid{60, 96, o.grid.r_max});
  if (!scan.ok) {
    throw Error(ErrorCode::HypothesisFailed,
                f.label + ": criterion fails near |z| = " + std::to_string(std::abs(*scan.witness)),
                std::abs(*scan.witness));
  }
  CoveringReport rep;
  rep.p_kind = to_string(p.kind());
  rep.map_label = f.label;
  rep.grid = o.grid;
  const auto L0 = conformal_factor(f, 0);
  rep.lambda0 = L0.lambda;
  rep.sigma_z0 = L0.sigma_z;
  const auto G = extremal_G(p, o.eps, o.tol);
  rep.G_one = G_at_one(G);
  rep.covering_radius_R = covering_radius(rep.G_one, rep.lambda0, std::abs(rep.sigma_z0));

  std::vector<double> cal_radii = radii;
  cal_radii.push_back(o.grid.r_max);
  rep.calibration_error = calibrate_grid(o.grid, cal_radii);

  const ConformalGrid grid([&](Complex z) { return conformal_factor(f, z).lambda; }, o.grid);
  const auto dist = grid.distances_from(grid.origin());
  for (double r : radii) {
    const double m = ring_min(grid, dist, r);
    const double b = H_bound(G, rep.lambda0, std::abs(rep.sigma_z0), r);
    rep.radii.push_back(r);
    rep.measured_min_rho.push_back(m);
    rep.H_bound.push_back(b);
    rep.margins.push_back(m - b);
    rep.allowance.push_back(2 * rep.calibration_error * m);
  }
  rep.boundary_min_rho = ring_min(grid, dist, o.grid.r_max);
  return rep;
}

/// Invariant form at alpha for the classical weight: Theorem 4 applied to
/// f o T with T(z) = (z + alpha)/(1 + conj(alpha) z).
inline CoveringReport verify_corollary16(const HarmonicMap& f, Complex alpha, const std::vector<double>& radii,
                                         const Theorem4Options& o = {}) {
  const auto f1 = transport_by_automorphism(f, DiskAutomorphism(alpha));
  auto rep = verify_theorem4(f1, builtin_nehari(NehariKind::classical_nehari), radii, o);
  rep.theorem = "corollary";
  rep.alpha = alpha;
  rep.map_label = f.label;
  return rep;
}

// ---------------------------------------------------------------------------
// Ahlfors Schwarzian of a lifted curve

/// Disk curve as its complex 3-jet in the parameter.
using DiskCurve = std::function<Jet3Complex(double)>;

/// t -> c + e^{i theta} t.
inline DiskCurve disk_line(Complex c = 0, double theta = 0) {
  const Complex u = std::polar(1.0, theta);
  return [c, u](double t) { return Jet3Complex(c + u * t, u, 0.0, 0.0); };
}

/// Unit-speed circle of radius rho about c.
inline DiskCurve disk_circle(double rho, Complex c = 0) {
  return [rho, c](double t) {
    const Complex e = std::exp(Complex(0, t / rho));
    const Complex I(0, 1);
    return Jet3Complex(c + rho * e, I * e, -e / rho, -I * e / (rho * rho));
  };
}

struct Lemma12Terms {
  double s1 = 0;
  double schwarzian_term = 0;
  double lambda = 0;
  double K = 0;
  double k_e = 0;
  double kappa = 0;
  double rhs = 0;
  double residual = 0;
};

/// Both sides of S1 phi = Re{Sf(gamma) gamma'^2} + lambda^2 (|K| + k_e^2)/2 + kappa^2/2
/// for unit-speed gamma. S1 comes from the lifted 3-jet; k_e is the normal
/// component of the lifted curvature vector, with the normal taken from the
/// coordinate tangents of the lift. The curvature enters as |K| = -K; with
/// +K the identity already fails for the Enneper map on the real diameter,
/// whose lift is the straight line t + t^3/6 with S1 = 1 at t = 0.
inline Lemma12Terms lemma12_terms(const HarmonicMap& f, const DiskCurve& gamma, double t) {
  const Jet3Complex g = gamma(t);
  if (std::abs(std::abs(g.d1) - 1) > 1e-8) {
    throw Error(ErrorCode::InvalidArgument, "disk curve must be unit speed", t);
  }
  const auto L = local_geometry(f, g.v);
  const double W = lift_height(f, {Complex(0), g.v});
  const auto phi = lift_curve_jet(f, g, W);
  const Eigen::Vector3d xu = lift_curve_jet(f, Jet3Complex(g.v, 1.0, 0.0, 0.0), W).d1;
  const Eigen::Vector3d xv = lift_curve_jet(f, Jet3Complex(g.v, Complex(0, 1), 0.0, 0.0), W).d1;
  const Eigen::Vector3d N = xu.cross(xv).normalized();
  Lemma12Terms r;
  r.s1 = detail::s1_from_jet(phi, t);
  const Complex sf = 2.0 * (L.sigma_zz - L.sigma_z * L.sigma_z);
  r.schwarzian_term = (sf * g.d1 * g.d1).real();
  r.lambda = L.lambda;
  r.K = -4 * L.sigma_zzbar / (L.lambda * L.lambda);
  const Eigen::Vector3d a = phi.d2, v = phi.d1;
  r.k_e = a.dot(N) / v.squaredNorm();
  r.kappa = (g.d2 * std::conj(g.d1)).imag();
  r.rhs = r.schwarzian_term + 0.5 * r.lambda * r.lambda * (r.k_e * r.k_e - r.K) + 0.5 * r.kappa * r.kappa;
  r.residual = std::abs(r.s1 - r.rhs);
  return r;
}

inline double lemma12_residual(const HarmonicMap& f, const DiskCurve& gamma, double t) {
  return lemma12_terms(f, gamma, t).residual;
}

}  // namespace sdl
