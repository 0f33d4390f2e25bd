#pragma once

#include "fatlas/surface.hpp"

#include <array>

namespace fatlas {

// Grid graph over a chart domain with metric edge lengths. Each vertex is
// joined to the grid vertices at the 32 primitive offsets of max-norm <= 3;
// on polar charts the two pole vertices are joined along meridians to the
// first three rows. Grid spacing per axis is h / sqrt(max metric component),
// so no edge of the basic 8-neighbourhood is longer than about sqrt(2) h.
struct BackgroundMesh {
  double h = 0;  // target metric spacing
  int rows = 0;  // grid rows along u (excluding poles)
  int cols = 0;  // grid columns along v
  double du = 0, dv = 0;
  bool polar = false;
  std::vector<Vec2> coords;  // chart coordinates per vertex

  // CSR adjacency.
  std::vector<std::size_t> offsets;
  std::vector<int> targets;
  std::vector<double> lengths;
  std::vector<Vec2> steps;  // unwrapped chart displacement of each edge

  // Triangles of the grid (quads split along a diagonal, fans at the poles).
  std::vector<std::array<int, 3>> triangles;

  std::size_t size() const { return coords.size(); }
  std::size_t edge_count() const { return targets.size(); }
  // Grid vertex at (row, col); for polar meshes row -1 and rows are the poles.
  int index(int row, int col) const;
  // Vertex nearest to a chart point.
  int nearest_vertex(const ChartedSurface& s, const Vec2& p) const;
};

BackgroundMesh build_background_mesh(const ChartedSurface& s, double h);

// Restricts a mesh to a vertex subset; returns the sub-mesh and the map from
// new to old vertex ids. Triangles with any vertex outside are dropped.
std::pair<BackgroundMesh, std::vector<int>> submesh(const BackgroundMesh& mesh,
                                                    const std::vector<char>& keep);

struct DistanceField {
  std::vector<double> dist;
  std::vector<int> label;   // index into the source list, -1 if unreached
  std::vector<int> parent;  // predecessor vertex, -1 at sources
};

// Multi-source Dijkstra over mesh vertices. Equal distances resolve to the
// lowest source index. With `limit`, vertices farther than it stay unreached.
DistanceField distance_field(const BackgroundMesh& mesh, const std::vector<int>& sources,
                             double limit = kInf);

// Weighted variant: each source starts at its given offset (additive weights).
DistanceField distance_field(const BackgroundMesh& mesh, const std::vector<int>& sources,
                             const std::vector<double>& offsets, double limit = kInf);

// Lowers `dist` in place with distances from one new source; only vertices
// whose value improves are visited.
void relax_from(const BackgroundMesh& mesh, int source, std::vector<double>& dist);

// Convenience: geodesic distance field of chart points (snapped to vertices).
std::vector<double> geodesic_distance_field(const ChartedSurface& s, const BackgroundMesh& mesh,
                                            const std::vector<Vec2>& sources);

}  // namespace fatlas
