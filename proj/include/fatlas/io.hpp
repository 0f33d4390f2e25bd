#pragma once

#include "fatlas/alexander.hpp"
#include "fatlas/triangulate.hpp"

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

namespace fatlas {

using Json = nlohmann::json;

class IoError : public Error {
  using Error::Error;
};

// Triangle mesh as written to disk. Complexes with per-simplex realized
// coordinates (the unwrapped flat torus) get one exported vertex per distinct
// unwrapped position; `source` maps each exported vertex back to the complex
// vertex and `seam` marks vertices that were duplicated along a seam.
struct MeshExport {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // oriented
  std::vector<int> source;
  std::vector<bool> seam;
};

MeshExport export_mesh(const SimplicialComplex& complex);
// Inverse of export_mesh: seam copies are merged back into one vertex and
// their positions kept as per-simplex realized coordinates.
SimplicialComplex import_mesh(const MeshExport& mesh);

// OFF and OBJ text. Seam copies are recorded as "# seam <vertex> <first copy>"
// comment lines, which other readers ignore. Read meshes use exported vertex
// indices as sources.
void write_off(std::ostream& out, const MeshExport& mesh);
void write_obj(std::ostream& out, const MeshExport& mesh);
// Polygons are fanned into triangles; OBJ accepts v/vt/vn face tokens and
// negative indices. Throws IoError on malformed input.
MeshExport read_off(std::istream& in);
MeshExport read_obj(std::istream& in);

// By extension (.off or .obj). Throws IoError when the file cannot be opened
// or parsed.
void save_mesh(const std::filesystem::path& path, const SimplicialComplex& complex);
SimplicialComplex load_mesh(const std::filesystem::path& path);

Json net_to_json(const EpsilonNet& net);
EpsilonNet net_from_json(const Json& j);

// {stage, inputs, metrics, witnesses}
Json make_report(const std::string& stage, Json inputs, Json metrics, Json witnesses);

Json to_json(const GeometryEstimates& est);
Json to_json(const NetReport& r);
Json to_json(const ThicknessReport& r);
Json to_json(const RetryAttempt& a);
Json to_json(const DilatationReport& r);
Json to_json(const HistogramBucket& b);

// Header bucket_lo,bucket_hi,count.
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBucket>& buckets);

// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fatlas
