#pragma once

#include "fatlas/net.hpp"
#include "fatlas/thickness.hpp"

namespace fatlas {

// Mesh location where three or more Voronoi cells meet: a cluster of grid
// triangles carrying three distinct cell labels, joined when they share a
// mesh vertex.
struct VoronoiCorner {
  std::vector<int> labels;     // sorted cell ids
  std::vector<int> cycle;      // the same ids counterclockwise around the corner
  std::vector<int> triangles;  // grid triangle ids
};

struct VoronoiPartition {
  std::vector<int> label;  // nearest center per mesh vertex
  std::vector<double> dist;
  std::vector<Edge> adjacency;  // cell pairs sharing a grid edge, sorted
  std::vector<VoronoiCorner> corners;
  std::vector<int> components;  // connected pieces per cell
  std::size_t reassigned = 0;   // vertices moved off small detached pieces

  std::size_t cells() const { return components.size(); }
  bool cells_connected() const;
};

// Multi-source Dijkstra from the net centers. `offsets` are optional additive
// weights per center (used to break cocircular ties). Connectivity is judged
// along grid-triangle edges; detached pieces smaller than 5% of their cell are
// handed to the neighbouring cell they border most.
VoronoiPartition geodesic_voronoi(const ChartedSurface& s, const BackgroundMesh& mesh,
                                  const EpsilonNet& net, const std::vector<double>& offsets = {});

struct NerveOptions {
  std::optional<int> expected_euler;
  bool allow_boundary = false;
};

struct NerveResult {
  bool ok = false;
  SimplicialComplex complex;  // vertices are the chart coordinates of the centers
  std::vector<int> vertex_centers;  // net center of each complex vertex
  std::vector<int> dropped_centers;  // boundary centers in no triangle
  std::string failure;        // empty when ok
  std::vector<int> witness;
  PseudomanifoldReport validation;
  long euler = 0;
  std::size_t fanned_corners = 0;      // corners with four or more cells
  std::size_t unused_adjacencies = 0;  // adjacent cells without a common triangle
};

// Triangles from the corners of the partition; corners with k > 3 cells are
// fanned in their cyclic order. Validity is checked, never assumed. With
// allow_boundary, centers whose cell meets no corner (cells at the rim of the
// domain) are left out of the complex instead of failing.
NerveResult nerve_complex(const VoronoiPartition& partition, const EpsilonNet& net,
                          const NerveOptions& options = {});

// Euclidean realization: ambient vertex coordinates for embedded surfaces, a
// per-simplex unwrap for the flat torus. The orientation is flipped if needed
// so that triangles agree with the surface normal. Throws ContractError on
// repeated vertices, degenerate triangles or surfaces without a realization.
SimplicialComplex realize_coordinates(const SimplicialComplex& complex, const ChartedSurface& s);

struct PipelineConfig {
  std::optional<double> eps;  // nullopt: convrad_low * safety
  double safety = 0.9;
  std::optional<double> h;    // nullopt: eps / 20
  std::uint64_t seed = 0;
  std::size_t thicken_budget = 20000;
  double phi_target = 0.4;
  std::optional<double> max_move;  // nullopt: eps / 5
  int max_shrinks = 5;
  double phi0 = 0.0;  // threshold recorded in thickness reports
};

// Throws ConfigError on out-of-range settings (safety outside (0, 1], h > eps / 20, ...).
void validate_pipeline_config(const PipelineConfig& config);

// Geometry estimates on a mesh of spacing config.h, or sqrt(area / 20000).
GeometryEstimates pipeline_estimates(const ChartedSurface& s, const PipelineConfig& config);

struct RetryAttempt {
  double eps = 0;
  double h = 0;
  std::size_t n0 = 0;
  bool perturbed = false;
  std::string stage;
  std::string failure;  // empty for the accepted attempt
  std::vector<int> witness;
};

struct StageTiming {
  std::string stage;
  double seconds = 0;
};

class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what, std::vector<int> witness,
                std::vector<RetryAttempt> trace)
      : Error(stage + ": " + what),
        stage(std::move(stage)),
        witness(std::move(witness)),
        trace(std::move(trace)) {}
  std::string stage;
  std::vector<int> witness;
  std::vector<RetryAttempt> trace;
};

struct PipelineResult {
  GeometryEstimates est;
  bool eps_auto = false;
  double eps_requested = 0;
  double eps = 0;  // scale of the accepted attempt
  double h = 0;
  EpsilonNet net;
  NetReport net_report;
  NerveResult nerve;
  SimplicialComplex realized;  // nerve with Euclidean coordinates
  ThickenResult thickening;
  SimplicialComplex subdivided;  // colored output
  EvenIncidenceReport even;
  ColoringResult coloring;
  ThicknessReport final_thickness;
  double edge_distortion = 0;  // max |chord - geodesic| / geodesic over nerve edges
  std::vector<RetryAttempt> trace;
  std::vector<StageTiming> timings;
};

// Estimate, net, Voronoi nerve (perturbed once, then eps <- 2 eps / 3 up to
// max_shrinks times), realization, thickening, subdivision, coloring.
PipelineResult fat_triangulation_pipeline(const ChartedSurface& s, const PipelineConfig& config);

struct ExhaustionPiece {
  double radius = 0;
  std::size_t vertices = 0;    // background-mesh vertices within radius
  std::size_t collar = 0;      // vertices added by the next piece
  bool nested = true;          // contains the previous piece
  bool ok = false;
  std::string failure;
  double eps = 0;
  std::size_t n0 = 0;
  std::size_t dropped = 0;  // rim centers left out of the complex
  std::size_t triangles = 0;
  std::size_t boundary_edges = 0;
  long euler = 0;
  double phi_min = 0;
  std::vector<RetryAttempt> trace;
};

struct ExhaustionReport {
  double eps = 0;
  double h = 0;
  std::vector<ExhaustionPiece> pieces;
  std::size_t covered = 0;  // mesh vertices in the union of the pieces
  std::size_t total = 0;
  bool nested = true;
};

// Geodesic balls around `base` for increasing radii, each triangulated as a
// disk on its own sub-mesh. Collars between pieces are reported, not merged.
ExhaustionReport exhaustion_demo(const ChartedSurface& s, const Vec2& base,
                                 const std::vector<double>& radii, const PipelineConfig& config);

}  // namespace fatlas
