#pragma once

#include "fatlas/io.hpp"

namespace fatlas {

// Parsed JSON run configuration. Keys:
//   surface   {"type": sphere|ellipsoid|torus|flat_torus|paraboloid|graph, ...}
//   eps       number or "auto"        safety   (0, 1], default 0.9
//   h         number or "auto"        seed     unsigned integer (required)
//   thicken   {budget, phi_target, max_move}
//   phi0      thickness threshold for reports and verify
//   qmmap     {samples, samples_per_simplex, face_points}
//   mesh      input mesh for qmmap / verify (relative to the config file)
//   out       output directory
//   exhaust   {radii: [...], base: [u, v]}
struct RunConfig {
  Json surface_json;
  ChartedSurface surface;
  PipelineConfig pipeline;
  bool has_seed = false;
  std::size_t samples = 10000;              // accepted dilatation samples in total
  std::optional<std::size_t> samples_per_simplex;
  std::size_t face_points = 1000;
  std::optional<std::filesystem::path> mesh;
  std::filesystem::path out = "fatlas_out";
  std::vector<double> radii;
  Vec2 base = Vec2::Zero();
};

// Command-line values; they win over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> eps;  // number or "auto"
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> mesh;
  std::optional<double> phi0;
};

ChartedSurface surface_from_json(const Json& desc);

// Throws ConfigError on unknown keys, wrong types or out-of-range values.
// `base_dir` resolves a relative mesh path.
RunConfig parse_run_config(const Json& j, const Overrides& o = {},
                           const std::filesystem::path& base_dir = {});
// Reads and parses a config file; unreadable or malformed JSON is a ConfigError.
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& o = {});

}  // namespace fatlas
