#pragma once

#include "fatlas/geometry.hpp"

namespace fatlas {

using Edge = std::pair<int, int>;

struct EpsilonNet {
  double eps = 0;
  std::vector<int> vertices;  // background-mesh vertex of each center
  std::vector<Vec2> centers;  // chart coordinates
  std::vector<Edge> pattern;  // k < l with d(p_k, p_l) < 2 eps
  std::uint64_t seed = 0;
  std::string surface;

  std::size_t size() const { return vertices.size(); }
};

// Greedy farthest-point sampling on the background mesh. The seed picks the
// first center; each further center is the vertex farthest from the current
// set (lowest index on ties) until every vertex is within eps. Throws
// ResolutionError unless eps > 3h.
EpsilonNet farthest_point_net(const ChartedSurface& s, const BackgroundMesh& mesh, double eps,
                              std::uint64_t seed);

// Pairs of centers closer than 2 eps, sorted.
std::vector<Edge> intersection_pattern(const EpsilonNet& net, const BackgroundMesh& mesh);

struct NetReport {
  double covering_radius = 0;
  int covering_witness = -1;  // mesh vertex attaining the covering radius
  double min_separation = kInf;
  Edge separation_pair{-1, -1};
  std::size_t n0 = 0;
  long packing_bound = 0;
  int max_degree = 0;
  int max_degree_center = -1;
  long degree_bound = 0;
  int max_neighbourhood = 0;  // most centers within 2 eps of one mesh vertex

  bool covering_ok() const;
  bool separation_ok() const;
  bool packing_ok() const { return static_cast<long>(n0) <= packing_bound; }
  bool degree_ok() const { return max_degree <= degree_bound; }
  bool ok() const { return covering_ok() && separation_ok() && packing_ok() && degree_ok(); }

  double eps = 0;
};

NetReport verify_net(const EpsilonNet& net, const BackgroundMesh& mesh,
                     const GeometryEstimates& est);

}  // namespace fatlas
