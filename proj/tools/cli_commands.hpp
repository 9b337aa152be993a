#pragma once

// Command implementations for the sdl tool. run() parses argv and returns
// the process exit code: 0 holds, 1 violation, 2 configuration error,
// 3 numerical failure, 4 hypothesis not satisfied.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdl/curves.hpp"
#include "sdl/harmonic.hpp"
#include "sdl/metric.hpp"
#include "sdl/nehari.hpp"
#include "sdl/report.hpp"

namespace sdl::cli {

enum ExitCode : int { kHolds = 0, kViolation = 1, kConfig = 2, kNumerical = 3, kHypothesis = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string p_name = "classical";
  std::string p_file;
  std::string map_name;
  std::string map_file;
  std::string theorem;
  double eps = 1e-3;
  double tol = 1e-10;
  double tolerance = 1e-9;
  double enneper_eps = 1 / std::numbers::sqrt2;
  std::size_t pairs = 200;
  std::size_t samples = 401;
  std::size_t grid = 401;
  double pair_radius = 0.95;
  std::vector<double> radii{0.3, 0.6, 0.9};
  std::string alpha = "0,0";
  bool normalize = false;
  unsigned long seed = 1;
  std::size_t rings = 20;
  std::size_t sectors = 48;
  double mesh_radius = 0.95;
  std::string out;
  std::string csv;
  std::string attributes;
  std::string summary;
};

// ---------------------------------------------------------------------------
// Inputs

/// Lines "x p(x)" with 0 = x_0 < x_1 < ... covering [0, 1 - eps]; '#'
/// comments; an optional "# flags: name ..." line lists claimed flags
/// beyond even and positive. p is extended evenly and interpolated linearly.
inline NehariFunction load_p_file(const std::string& path, double eps) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open p-file '" + path + "'");
  std::vector<double> xs, ps;
  NehariFlags flags;
  flags.even = flags.positive = true;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream c(line.substr(hash + 1));
      std::string word;
      c >> word;
      if (word == "flags:") {
        while (c >> word) {
          if (word == "decay_nonincreasing") flags.decay_nonincreasing = true;
          else if (word == "monotone_nondecreasing") flags.monotone_nondecreasing = true;
          else if (word == "extremal") flags.extremal = true;
          else throw ConfigError("unknown flag '" + word + "' in p-file");
        }
      }
      line.resize(hash);
    }
    std::istringstream s(line);
    double x, p;
    if (!(s >> x)) continue;
    if (!(s >> p)) throw ConfigError("p-file row needs two numbers: '" + line + "'");
    if (!std::isfinite(p) || !(p > 0)) throw ConfigError("p must be positive");
    xs.push_back(x);
    ps.push_back(p);
  }
  if (xs.size() < 2) throw ConfigError("p-file needs at least two rows");
  if (xs.front() != 0) throw ConfigError("p-file must start at x = 0");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw ConfigError("p-file abscissae must increase");
  if (xs.back() >= 1) throw ConfigError("p-file abscissae must lie in [0, 1)");
  if (xs.back() < 1 - eps) throw ConfigError("p-file must cover [0, 1 - eps]");
  auto p = [xs, ps](double x) {
    const double a = std::abs(x);
    if (a >= xs.back()) return ps.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), a);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (a - xs[i]) / (xs[i + 1] - xs[i]);
    return ps[i] + t * (ps[i + 1] - ps[i]);
  };
  return NehariFunction::custom(path, p, flags);
}

inline NehariFunction resolve_p(const RunConfig& c) {
  if (!c.p_file.empty()) return load_p_file(c.p_file, c.eps);
  return builtin_nehari(c.p_name);
}

inline std::vector<Complex> read_coefficients(const Json& j, const char* key) {
  std::vector<Complex> out;
  if (!j.contains(key)) return out;
  for (const auto& e : j.at(key)) {
    if (e.is_number()) out.emplace_back(e.get<double>(), 0.0);
    else if (e.is_array() && e.size() == 2) out.emplace_back(e[0].get<double>(), e[1].get<double>());
    else throw ConfigError(std::string("coefficient in '") + key + "' must be a number or [re, im]");
  }
  return out;
}

/// {"label": ..., "h": [[re, im], ...], "q": [...], "g": [...]}. g is the
/// primitive of q^2 h'; a supplied g must agree with it, and a nonzero g
/// needs q.
inline HarmonicMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open map file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("map file is not valid JSON: " + std::string(e.what()));
  }
  const auto h = read_coefficients(j, "h");
  const auto q = read_coefficients(j, "q");
  const auto g = read_coefficients(j, "g");
  if (h.size() < 2 || h[1] == Complex(0)) throw ConfigError("map file needs h with a nonzero linear term");
  const bool g_zero = std::all_of(g.begin(), g.end(), [](Complex c) { return c == Complex(0); });
  if (q.empty() && !g_zero) throw ConfigError("q coefficients are required when g is nonzero");
  const std::string label = j.value("label", path);
  auto f = polynomial_map(h, q, label);
  if (!g.empty()) {
    const auto derived = dilatation_primitive(h, q);
    const std::size_t n = std::max(g.size(), derived.size());
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = k < g.size() ? g[k] : Complex(0), b = k < derived.size() ? derived[k] : Complex(0);
      if (std::abs(a - b) > 1e-9 * (1 + std::abs(b))) {
        throw ConfigError("g is inconsistent with q^2 h' at coefficient " + std::to_string(k));
      }
    }
  }
  return f;
}

inline HarmonicMap resolve_map(const RunConfig& c) {
  if (!c.map_file.empty()) return load_map_file(c.map_file);
  if (c.map_name.empty()) throw ConfigError("--map or --map-file is required");
  return harmonic_by_name(c.map_name, c.enneper_eps);
}

inline CurveJet resolve_curve(const RunConfig& c, const ExtremalProfile& F) {
  if (!c.map_file.empty()) throw ConfigError("curve theorems take a named curve (--map), not a map file");
  if (c.map_name.empty()) throw ConfigError("--map is required");
  CurveJet curve = c.map_name == "line_F" ? line_F_curve(F) : curve_by_name(c.map_name);
  if (c.normalize) curve = normalize_curve(curve).curve;
  return curve;
}

inline Complex parse_complex(const std::string& s) {
  std::istringstream in(s);
  double re = 0, im = 0;
  char comma = 0;
  if (!(in >> re)) throw ConfigError("cannot parse complex number '" + s + "'");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw ConfigError("complex number must be 're,im': '" + s + "'");
  }
  return {re, im};
}

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

inline void apply_environment(RunConfig& c) {
  if (const char* e = std::getenv("SDL_EPS")) {
    char* end = nullptr;
    const double v = std::strtod(e, &end);
    if (end == e || !(v > 0 && v < 0.5)) throw ConfigError("SDL_EPS must be a number in (0, 0.5)");
    c.eps = v;
  }
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_profile(const RunConfig& c, std::ostream& out) {
  const auto p = resolve_p(c);
  const auto F = extremal_F(p, c.eps, c.tol);
  const auto G = extremal_G(p, c.eps, c.tol);
  std::ostringstream csv;
  write_profiles_csv(csv, F, G);
  write_text(c.out.empty() ? std::string("-") : c.out, csv.str());
  const auto summary = summarize_profiles(F, G, c.eps);
  if (!c.summary.empty()) write_text(c.summary, to_json(summary).dump(2) + "\n");
  if (c.out.empty()) return kHolds;
  out << "profile " << summary.p_name << ": " << summary.F_nodes << " F nodes, F(1-eps) = " << summary.F_at_end
      << ", G(1) ~ " << summary.G_limit_at_one << '\n';
  return kHolds;
}

inline std::vector<std::pair<double, double>> random_axis_pairs(std::size_t n, double eps, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1 + eps, 1 - eps);
  std::vector<std::pair<double, double>> pairs(n);
  for (auto& pr : pairs) {
    pr.first = u(rng);
    pr.second = u(rng);
  }
  return pairs;
}

inline std::vector<std::pair<Complex, Complex>> random_disk_pairs(std::size_t n, double r_max, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  auto point = [&] { return std::polar(r_max * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng)); };
  std::vector<std::pair<Complex, Complex>> pairs(n);
  for (auto& pr : pairs) {
    pr.first = point();
    pr.second = point();
  }
  return pairs;
}

inline int finish_distortion(const RunConfig& c, const DistortionReport& rep, std::ostream& out) {
  write_text(c.out, to_json(rep).dump(2) + "\n");
  if (!c.csv.empty()) {
    std::ostringstream s;
    write_csv(s, rep);
    write_text(c.csv, s.str());
  }
  const bool ok = rep.min_margin >= -c.tolerance;
  out << "theorem " << rep.theorem << " (" << rep.p_kind << "): " << rep.samples.size() << " samples, min margin "
      << rep.min_margin << (ok ? ", holds" : ", VIOLATED") << '\n';
  return ok ? kHolds : kViolation;
}

inline int finish_covering(const RunConfig& c, const CoveringReport& rep, std::ostream& out) {
  write_text(c.out, to_json(rep).dump(2) + "\n");
  if (!c.csv.empty()) {
    std::ostringstream s;
    write_csv(s, rep);
    write_text(c.csv, s.str());
  }
  out << rep.theorem << " (" << rep.map_label << ", " << rep.p_kind << "): R = " << rep.covering_radius_R
      << ", min margin " << rep.min_margin() << (rep.holds() ? ", holds" : ", VIOLATED") << '\n';
  return rep.holds() ? kHolds : kViolation;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto& t = c.theorem;
  if (t == "1" || t == "2" || t == "A-probe") {
    const auto p = resolve_p(c);
    const auto F = extremal_F(p, c.eps, c.tol);
    const auto curve = resolve_curve(c, F);
    CurveVerifyOptions o;
    o.eps = c.eps;
    o.tol = c.tol;
    o.samples = c.samples;
    if (t == "1") return finish_distortion(c, verify_theorem1(curve, p, F, o), out);
    if (t == "2") return finish_distortion(c, verify_theorem2(curve, p, F, random_axis_pairs(c.pairs, c.eps, c.seed), o), out);
    // Injectivity probe under the sampled hypothesis.
    const auto scan = scan_hypothesis(curve, p, c.eps, o.hypothesis_nodes);
    if (!scan.ok) {
      throw Error(ErrorCode::HypothesisFailed, curve.label + ": " + scan.reason, scan.witness);
    }
    const auto hit = injectivity_probe(curve, c.samples, c.eps);
    Json j;
    j["schema"] = kReportSchema;
    j["theorem"] = "A-probe";
    j["curve"] = curve.label;
    j["p_kind"] = to_string(p.kind());
    j["hypothesis"] = {{"ok", scan.ok}, {"max_excess", detail::number(scan.max_excess)}, {"nodes", scan.nodes}};
    j["collision"] = hit ? Json{{"x1", hit->first}, {"x2", hit->second}} : Json(nullptr);
    j["holds"] = !hit.has_value();
    write_text(c.out, j.dump(2) + "\n");
    out << "A-probe (" << curve.label << "): " << (hit ? "collision found, VIOLATED" : "no collision, holds") << '\n';
    return hit ? kViolation : kHolds;
  }
  if (t == "3") {
    const auto p = resolve_p(c);
    const auto f = resolve_map(c);
    Theorem3Options o;
    o.eps = c.eps;
    o.tol = c.tol;
    const auto r = verify_theorem3(f, p, random_disk_pairs(c.pairs, c.pair_radius, c.seed), o);
    return finish_distortion(c, r.report, out);
  }
  if (t == "4" || t == "corollary") {
    const auto f = resolve_map(c);
    Theorem4Options o;
    o.eps = c.eps;
    o.tol = c.tol;
    o.grid.n = c.grid;
    if (t == "4") return finish_covering(c, verify_theorem4(f, resolve_p(c), c.radii, o), out);
    return finish_covering(c, verify_corollary16(f, parse_complex(c.alpha), c.radii, o), out);
  }
  throw ConfigError("unknown theorem '" + t + "' (expected 1, 2, 3, 4, corollary or A-probe)");
}

inline int cmd_lift_mesh(const RunConfig& c, std::ostream& out) {
  const auto f = resolve_map(c);
  const auto p = resolve_p(c);
  const auto mesh = lift_mesh(f, p, c.rings, c.sectors, c.mesh_radius);
  std::ostringstream obj, attr;
  write_obj(obj, mesh, f.label);
  write_mesh_attributes(attr, mesh);
  const std::string path = c.out.empty() ? std::string("-") : c.out;
  write_text(path, obj.str());
  const std::string sidecar = !c.attributes.empty() ? c.attributes : (path == "-" ? std::string() : path + ".csv");
  write_text(sidecar, attr.str());
  if (path != "-") out << "mesh " << f.label << ": " << mesh.vertices.size() << " vertices, " << mesh.faces.size() << " faces\n";
  return kHolds;
}

// ---------------------------------------------------------------------------
// Entry point

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::HypothesisFailed:
    case ErrorCode::DoubleZeroDetected:
    case ErrorCode::ConvexityViolated: return kHypothesis;
    case ErrorCode::UnknownKind:
    case ErrorCode::InvalidArgument:
    case ErrorCode::OutOfGrid: return kConfig;
    default: return kNumerical;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Schwarzian distortion toolkit"};
  app.require_subcommand(1);

  auto add_p = [&](CLI::App* s) {
    auto* opt = s->add_option("--p", c.p_name, "built-in weight: classical, pi2, pokornyi");
    s->add_option("--p-file", c.p_file, "weight samples 'x p(x)' on [0, 1)")->excludes(opt);
    s->add_option("--eps", c.eps, "domain cut 1 - eps (SDL_EPS overrides)")->check(CLI::Range(1e-8, 0.5));
    s->add_option("--tol", c.tol, "ODE tolerance")->check(CLI::PositiveNumber);
  };
  auto add_map = [&](CLI::App* s) {
    auto* opt = s->add_option("--map", c.map_name, "named map or curve");
    s->add_option("--map-file", c.map_file, "polynomial map spec (JSON)")->excludes(opt);
    s->add_option("--enneper-eps", c.enneper_eps, "parameter of enneper_eps");
  };

  auto* profile = app.add_subcommand("profile", "extremal profiles F and G");
  add_p(profile);
  profile->add_option("--out", c.out, "CSV path (default stdout)");
  profile->add_option("--json", c.summary, "summary JSON path");

  auto* verify = app.add_subcommand("verify", "run a verifier");
  add_p(verify);
  add_map(verify);
  verify->add_option("--theorem", c.theorem, "1, 2, 3, 4, corollary or A-probe")->required();
  verify->add_option("--pairs", c.pairs, "random pair count")->check(CLI::PositiveNumber);
  verify->add_option("--samples", c.samples, "samples for one-point bounds and the probe")->check(CLI::Range(2, 1000000));
  verify->add_option("--seed", c.seed, "random seed");
  verify->add_option("--pair-radius", c.pair_radius, "disk radius for random pairs")->check(CLI::Range(0.0, 0.999));
  verify->add_option("--radii", c.radii, "radii for the covering bound")->delimiter(',');
  verify->add_option("--alpha", c.alpha, "base point 're,im' for the corollary");
  verify->add_option("--grid", c.grid, "lattice points per side (odd)");
  verify->add_option("--tolerance", c.tolerance, "margin tolerance for exit 0")->check(CLI::NonNegativeNumber);
  verify->add_flag("--normalize", c.normalize, "normalize the curve first");
  verify->add_option("--out", c.out, "JSON report path");
  verify->add_option("--csv", c.csv, "CSV samples path");

  auto* mesh = app.add_subcommand("lift-mesh", "triangulated lifted surface (OBJ)");
  add_p(mesh);
  add_map(mesh);
  mesh->add_option("--rings", c.rings, "rings")->check(CLI::PositiveNumber);
  mesh->add_option("--sectors", c.sectors, "sectors")->check(CLI::Range(3, 100000));
  mesh->add_option("--radius", c.mesh_radius, "outer radius")->check(CLI::Range(0.01, 0.999));
  mesh->add_option("--out", c.out, "OBJ path (default stdout)");
  mesh->add_option("--attributes", c.attributes, "per-vertex CSV (default OBJ path + .csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kHolds : kConfig;
  }
  try {
    apply_environment(c);
    if (*profile) return cmd_profile(c, out);
    if (*verify) return cmd_verify(c, out);
    return cmd_lift_mesh(c, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    err << (code == kHypothesis ? "hypothesis not satisfied: " : "error: ") << e.what();
    if (e.where()) err << " (at " << *e.where() << ")";
    err << '\n';
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace sdl::cli
