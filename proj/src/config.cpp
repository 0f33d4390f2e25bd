#include "fatlas/config.hpp"

#include <fstream>
#include <set>

namespace fatlas {

namespace {

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " needs '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::size_t count(const Json& j, const std::string& key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_unsigned()) throw ConfigError(where + "." + key + " must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

std::optional<double> auto_or_number(const Json& v, const std::string& key) {
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return std::nullopt;
    throw ConfigError(key + " must be a number or \"auto\"");
  }
  if (!v.is_number()) throw ConfigError(key + " must be a number or \"auto\"");
  const double x = v.get<double>();
  if (!(x > 0)) throw ConfigError(key + " must be positive");
  return x;
}

std::optional<double> eps_from_text(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    if (!(x > 0)) throw ConfigError("--eps must be positive");
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("--eps must be a number or auto, got '" + text + "'");
  }
}

std::array<double, 4> domain(const Json& desc, double half) {
  if (!desc.contains("domain")) return {-half, half, -half, half};
  const Json& d = desc.at("domain");
  if (!d.is_array() || d.size() != 4) throw ConfigError("surface.domain must be [x0, x1, y0, y1]");
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    if (!d[k].is_number()) throw ConfigError("surface.domain must hold numbers");
    out[k] = d[k].get<double>();
  }
  if (!(out[0] < out[1] && out[2] < out[3])) throw ConfigError("surface.domain is empty");
  return out;
}

}  // namespace

ChartedSurface surface_from_json(const Json& desc) {
  if (!desc.is_object() || !desc.contains("type") || !desc.at("type").is_string())
    throw ConfigError("surface needs a string 'type'");
  const std::string type = desc.at("type").get<std::string>();
  const std::string where = "surface";
  auto positive = [&](const std::string& key, double fallback) {
    const double x = number_or(desc, key, fallback, where);
    if (!(x > 0)) throw ConfigError(where + "." + key + " must be positive");
    return x;
  };
  if (type == "sphere") {
    only_keys(desc, {"type", "radius"}, where);
    return make_sphere(positive("radius", 1.0));
  }
  if (type == "ellipsoid") {
    only_keys(desc, {"type", "a", "b", "c"}, where);
    return make_ellipsoid(positive("a", 1.0), positive("b", 1.0), positive("c", 1.0));
  }
  if (type == "torus") {
    only_keys(desc, {"type", "R", "r"}, where);
    const double R = positive("R", 2.0), r = positive("r", 1.0);
    if (!(r < R)) throw ConfigError("torus needs r < R");
    return make_torus(R, r);
  }
  if (type == "flat_torus") {
    only_keys(desc, {"type", "L1", "L2"}, where);
    return make_flat_torus(positive("L1", 1.0), positive("L2", 1.0));
  }
  if (type == "paraboloid") {
    // z = a (x^2 + y^2)
    only_keys(desc, {"type", "a", "domain"}, where);
    const double a = positive("a", 1.0);
    const auto d = domain(desc, 2.0);
    return make_graph_surface({{2, 0, a}, {0, 2, a}}, d[0], d[1], d[2], d[3]);
  }
  if (type == "graph") {
    // z = sum c x^i y^j, coefficients as [i, j, c]
    only_keys(desc, {"type", "coefficients", "domain"}, where);
    if (!desc.contains("coefficients") || !desc.at("coefficients").is_array())
      throw ConfigError("graph surface needs 'coefficients' as [[i, j, c], ...]");
    std::vector<Monomial> poly;
    for (const auto& m : desc.at("coefficients")) {
      if (!m.is_array() || m.size() != 3 || !m[0].is_number_unsigned() || !m[1].is_number_unsigned() ||
          !m[2].is_number())
        throw ConfigError("graph coefficient must be [i, j, c] with i, j >= 0");
      poly.push_back({m[0].get<int>(), m[1].get<int>(), m[2].get<double>()});
    }
    const auto d = domain(desc, 2.0);
    return make_graph_surface(std::move(poly), d[0], d[1], d[2], d[3]);
  }
  throw ConfigError("unknown surface type '" + type + "'");
}

RunConfig parse_run_config(const Json& j, const Overrides& o, const std::filesystem::path& base_dir) {
  only_keys(j, {"surface", "eps", "safety", "h", "seed", "thicken", "phi0", "qmmap", "mesh", "out", "exhaust"},
            "config");
  RunConfig c;
  auto& p = c.pipeline;
  if (j.contains("surface")) {
    c.surface_json = j.at("surface");
    c.surface = surface_from_json(c.surface_json);
  }
  if (j.contains("eps")) p.eps = auto_or_number(j.at("eps"), "eps");
  if (o.eps) p.eps = eps_from_text(*o.eps);
  p.safety = number_or(j, "safety", 0.9, "config");
  if (j.contains("h")) p.h = auto_or_number(j.at("h"), "h");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    p.seed = j.at("seed").get<std::uint64_t>();
    c.has_seed = true;
  }
  if (o.seed) {
    p.seed = *o.seed;
    c.has_seed = true;
  }
  if (j.contains("thicken")) {
    const Json& t = j.at("thicken");
    only_keys(t, {"budget", "phi_target", "max_move"}, "thicken");
    p.thicken_budget = count(t, "budget", p.thicken_budget, "thicken");
    p.phi_target = number_or(t, "phi_target", p.phi_target, "thicken");
    if (t.contains("max_move")) p.max_move = number(t, "max_move", "thicken");
  }
  p.phi0 = number_or(j, "phi0", 0.0, "config");
  if (o.phi0) p.phi0 = *o.phi0;
  if (p.phi0 < 0) throw ConfigError("phi0 must be non-negative");
  if (j.contains("qmmap")) {
    const Json& q = j.at("qmmap");
    only_keys(q, {"samples", "samples_per_simplex", "face_points"}, "qmmap");
    c.samples = count(q, "samples", c.samples, "qmmap");
    if (q.contains("samples_per_simplex")) c.samples_per_simplex = count(q, "samples_per_simplex", 0, "qmmap");
    c.face_points = count(q, "face_points", c.face_points, "qmmap");
  }
  if (j.contains("mesh")) {
    if (!j.at("mesh").is_string()) throw ConfigError("mesh must be a path string");
    std::filesystem::path m = j.at("mesh").get<std::string>();
    c.mesh = m.is_relative() && !base_dir.empty() ? base_dir / m : m;
  }
  if (o.mesh) c.mesh = *o.mesh;
  if (j.contains("out")) {
    if (!j.at("out").is_string()) throw ConfigError("out must be a path string");
    c.out = j.at("out").get<std::string>();
  }
  if (o.out) c.out = *o.out;
  if (j.contains("exhaust")) {
    const Json& e = j.at("exhaust");
    only_keys(e, {"radii", "base"}, "exhaust");
    if (e.contains("radii")) {
      if (!e.at("radii").is_array()) throw ConfigError("exhaust.radii must be an array");
      for (const auto& r : e.at("radii")) {
        if (!r.is_number()) throw ConfigError("exhaust.radii must hold numbers");
        c.radii.push_back(r.get<double>());
      }
    }
    if (e.contains("base")) {
      const Json& b = e.at("base");
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
        throw ConfigError("exhaust.base must be [u, v]");
      c.base = Vec2(b[0].get<double>(), b[1].get<double>());
    }
  }
  validate_pipeline_config(p);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return parse_run_config(j, o, path.parent_path());
}

}  // namespace fatlas
