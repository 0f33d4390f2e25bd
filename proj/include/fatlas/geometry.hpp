#pragma once

#include "fatlas/mesh.hpp"

namespace fatlas {

struct InjradBound {
  double value = 0;          // 0 when no rule applies
  std::string route = "none";  // catalog | maeda | klingenberg | heuristic | none
  bool certified = false;
};

struct GeometryEstimates {
  double k_low = 0;          // inflated lower curvature bound
  double K_up = 0;           // inflated upper curvature bound
  double k_min_sampled = 0;  // refined sampled extremes
  double k_max_sampled = 0;
  double fd_error = 0;
  double D_up = 0;
  double v_low = 0;          // area
  double loop_half = 0;      // half the shortest detected geodesic loop, 0 if not searched
  InjradBound injrad;
  double injrad_low = 0;
  double convrad_low = 0;
};

struct EstimateOptions {
  int curvature_grid = 120;
  int area_grid = 400;
  int sweep_sources = 8;
  int loop_sources = 12;
};

// Midpoint-rule area on an n x n grid of the chart.
double surface_area(const ChartedSurface& s, int n = 400);

GeometryEstimates estimate_geometry(const ChartedSurface& s, const BackgroundMesh& mesh,
                                    const EstimateOptions& options = {});

// Best applicable lower bound for the injectivity radius: the catalog value,
// Maeda's pi/sqrt(K) for complete noncompact planes with K >= 0, Klingenberg's
// pi/sqrt(K) for positively curved spheres, or min(pi/sqrt(K), loop_half) as
// an uncertified heuristic on other compact surfaces.
InjradBound injrad_lower_bound(const GeometryEstimates& est, bool compact, Topology topology,
                               std::optional<double> catalog);

// Area of an r-ball in the 2-dimensional space form of curvature k.
double comparison_volume(double k, double r);

// Upper bound on the size of an eps-net: disjoint eps/2-balls inside a
// D-ball, volumes compared in the space form of curvature k_low (or of
// ricci_low / (n - 1) when a Ricci lower bound is supplied).
long packing_bound(const GeometryEstimates& est, double eps,
                   std::optional<double> ricci_low = std::nullopt);

// Upper bound on the number of net centers within 2 eps of a point.
long degree_bound(const GeometryEstimates& est, double eps);

}  // namespace fatlas
