#pragma once

// JSON / CSV / OBJ export of verification reports, profiles and lifted
// meshes. JSON documents carry "schema": 1 and keep insertion order.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdl/harmonic.hpp"
#include "sdl/margins.hpp"
#include "sdl/metric.hpp"
#include "sdl/nehari.hpp"

namespace sdl {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

namespace detail {

// NaN and infinities become null.
inline Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
inline Json complex_pair(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

}  // namespace detail

inline Json to_json(const DistortionSample& s) {
  Json j;
  j["part"] = s.part;
  j["x1"] = detail::number(s.x1);
  j["y1"] = detail::number(s.y1);
  j["x2"] = detail::number(s.x2);
  j["y2"] = detail::number(s.y2);
  j["lhs"] = detail::number(s.lhs);
  j["rhs"] = detail::number(s.rhs);
  j["margin"] = detail::number(s.margin);
  return j;
}

inline Json to_json(const DistortionReport& r, bool with_samples = true) {
  Json j;
  j["schema"] = kReportSchema;
  j["theorem"] = r.theorem;
  j["p_kind"] = r.p_kind;
  j["sample_count"] = r.samples.size();
  j["min_margin"] = detail::number(r.min_margin);
  j["worst_site"] = r.samples.empty() ? Json(nullptr) : to_json(r.samples[r.worst_site]);
  j["holds"] = r.holds();
  j["holds_up_to_rounding"] = r.holds_up_to_rounding();
  j["rounding_count"] = r.rounding_count;
  j["violation_count"] = r.violation_count;
  j["hypothesis"] = {{"ok", r.hypothesis_ok},
                     {"note", r.hypothesis_note},
                     {"max_excess", detail::number(r.hypothesis_max_excess)},
                     {"nodes", r.hypothesis_nodes}};
  if (with_samples) {
    Json arr = Json::array();
    for (const auto& s : r.samples) arr.push_back(to_json(s));
    j["samples"] = std::move(arr);
  }
  return j;
}

inline void write_csv(std::ostream& os, const DistortionReport& r) {
  os << "part,x1,y1,x2,y2,lhs,rhs,margin\n";
  os.precision(17);
  for (const auto& s : r.samples) {
    os << s.part << ',' << s.x1 << ',' << s.y1 << ',' << s.x2 << ',' << s.y2 << ',' << s.lhs << ',' << s.rhs << ','
       << s.margin << '\n';
  }
}

inline Json to_json(const CoveringReport& r) {
  Json j;
  j["schema"] = kReportSchema;
  j["theorem"] = r.theorem;
  j["map"] = r.map_label;
  j["p_kind"] = r.p_kind;
  j["alpha"] = detail::complex_pair(r.alpha);
  j["lambda0"] = detail::number(r.lambda0);
  j["sigma_z0"] = detail::complex_pair(r.sigma_z0);
  j["G_one"] = detail::number(r.G_one);
  j["covering_radius_R"] = detail::number(r.covering_radius_R);
  j["boundary_min_rho"] = detail::number(r.boundary_min_rho);
  j["calibration_error"] = detail::number(r.calibration_error);
  j["grid"] = {{"n", r.grid.n},
               {"r_max", r.grid.r_max},
               {"stencil_radius", r.grid.stencil_radius},
               {"refinement", r.grid.refinement}};
  j["holds"] = r.holds();
  j["min_margin"] = detail::number(r.min_margin());
  j["hypothesis_note"] = r.hypothesis_note;
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    rows.push_back({{"r", r.radii[i]},
                    {"measured_min_rho", detail::number(r.measured_min_rho[i])},
                    {"H_bound", detail::number(r.H_bound[i])},
                    {"margin", detail::number(r.margins[i])},
                    {"allowance", detail::number(r.allowance[i])}});
  }
  j["radii"] = std::move(rows);
  return j;
}

inline void write_csv(std::ostream& os, const CoveringReport& r) {
  os << "r,measured_min_rho,H_bound,margin,allowance\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    os << r.radii[i] << ',' << r.measured_min_rho[i] << ',' << r.H_bound[i] << ',' << r.margins[i] << ','
       << r.allowance[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Profiles

/// One CSV over the F nodes: x, u, du, F, dF, then G and dG on the same
/// abscissae (interpolated on the G profile).
inline void write_profiles_csv(std::ostream& os, const ExtremalProfile& F, const ExtremalProfile& G) {
  os << "x,u,du,F,dF,G,dG\n";
  os.precision(17);
  for (double x : F.grid()) {
    os << x << ',' << F.u(x) << ',' << F.du(x) << ',' << F.F(x) << ',' << F.dF(x) << ',' << G.G(x) << ','
       << G.dG(x) << '\n';
  }
}

struct ProfileSummary {
  std::string p_kind;
  std::string p_name;
  double eps = 0;
  std::size_t F_nodes = 0;
  std::size_t G_nodes = 0;
  double F_at_end = 0;
  double G_at_end = 0;
  double G_limit_at_one = 0;
  /// Max |F - closed form| on [-0.99, 0.99] (built-ins only, else NaN).
  double F_closed_form_error = std::numeric_limits<double>::quiet_NaN();
  double G_closed_form_error = std::numeric_limits<double>::quiet_NaN();
};

inline ProfileSummary summarize_profiles(const ExtremalProfile& F, const ExtremalProfile& G, double eps) {
  ProfileSummary s;
  const auto& p = F.nehari();
  s.p_kind = to_string(p.kind());
  s.p_name = p.name();
  s.eps = eps;
  s.F_nodes = F.grid().size();
  s.G_nodes = G.grid().size();
  s.F_at_end = F.F(F.hi());
  s.G_at_end = G.G(G.hi());
  s.G_limit_at_one = G.limit_at_one();
  if (p.kind() != NehariKind::custom) {
    double ef = 0, eg = 0;
    for (int i = 0; i <= 1980; ++i) {
      const double x = -0.99 + 0.001 * i;
      ef = std::max(ef, std::abs(F.F(x) - closed_form_F(p.kind(), x)));
      if (p.kind() == NehariKind::classical_nehari) eg = std::max(eg, std::abs(G.G(x) - closed_form_G_classical(x)));
    }
    s.F_closed_form_error = ef;
    if (p.kind() == NehariKind::classical_nehari) s.G_closed_form_error = eg;
  }
  return s;
}

inline Json to_json(const ProfileSummary& s) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = "profile";
  j["p_kind"] = s.p_kind;
  j["p_name"] = s.p_name;
  j["eps"] = s.eps;
  j["F_nodes"] = s.F_nodes;
  j["G_nodes"] = s.G_nodes;
  j["F_at_end"] = detail::number(s.F_at_end);
  j["G_at_end"] = detail::number(s.G_at_end);
  j["G_limit_at_one"] = detail::number(s.G_limit_at_one);
  j["F_closed_form_max_error"] = detail::number(s.F_closed_form_error);
  j["G_closed_form_max_error"] = detail::number(s.G_closed_form_error);
  return j;
}

// ---------------------------------------------------------------------------
// Lifted mesh

struct MeshVertex {
  Complex z;
  LiftPoint lift;
  double margin = 0;
};

struct LiftMesh {
  std::vector<MeshVertex> vertices;
  /// 1-based OBJ triangles.
  std::vector<std::array<std::size_t, 3>> faces;
};

/// Polar disk mesh: the centre, then `rings` circles of `sectors` vertices
/// out to r_max, ring by ring, counterclockwise from the positive axis.
inline LiftMesh lift_mesh(const HarmonicMap& f, const NehariFunction& p, std::size_t rings, std::size_t sectors,
                          double r_max = 0.95) {
  if (rings < 1 || sectors < 3) throw Error(ErrorCode::InvalidArgument, "mesh needs at least 1 ring and 3 sectors");
  if (!(r_max > 0 && r_max < 1)) throw Error(ErrorCode::DomainError, "mesh radius must lie in (0, 1)", r_max);
  LiftMesh m;
  m.vertices.resize(1 + rings * sectors);
  m.vertices[0].z = 0;
  for (std::size_t i = 1; i <= rings; ++i)
    for (std::size_t k = 0; k < sectors; ++k)
      m.vertices[1 + (i - 1) * sectors + k].z =
          std::polar(r_max * static_cast<double>(i) / static_cast<double>(rings),
                     2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(sectors));
  parallel_for(m.vertices.size(), [&](std::size_t v) {
    m.vertices[v].lift = we_lift(f, m.vertices[v].z);
    m.vertices[v].margin = criterion5_margin(f, p, m.vertices[v].z);
  });
  auto idx = [&](std::size_t ring, std::size_t k) { return 2 + (ring - 1) * sectors + k % sectors; };
  for (std::size_t k = 0; k < sectors; ++k) m.faces.push_back({1, idx(1, k), idx(1, k + 1)});
  for (std::size_t i = 1; i < rings; ++i)
    for (std::size_t k = 0; k < sectors; ++k) {
      m.faces.push_back({idx(i, k), idx(i + 1, k), idx(i + 1, k + 1)});
      m.faces.push_back({idx(i, k), idx(i + 1, k + 1), idx(i, k + 1)});
    }
  return m;
}

inline void write_obj(std::ostream& os, const LiftMesh& m, const std::string& label) {
  os << "# lifted surface of " << label << '\n';
  os << "# vertices " << m.vertices.size() << " faces " << m.faces.size() << '\n';
  os.precision(12);
  for (const auto& v : m.vertices) os << "v " << v.lift.U << ' ' << v.lift.V << ' ' << v.lift.W << '\n';
  for (const auto& f : m.faces) os << "f " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

/// Per-vertex attributes, one row per OBJ vertex in the same order.
inline void write_mesh_attributes(std::ostream& os, const LiftMesh& m) {
  os << "index,x,y,U,V,W,lambda,K,criterion_margin\n";
  os.precision(12);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const auto& v = m.vertices[i];
    os << i + 1 << ',' << v.z.real() << ',' << v.z.imag() << ',' << v.lift.U << ',' << v.lift.V << ',' << v.lift.W
       << ',' << v.lift.lambda << ',' << v.lift.K << ',' << v.margin << '\n';
  }
}

}  // namespace sdl
