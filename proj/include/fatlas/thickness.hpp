#pragma once

#include "fatlas/complex.hpp"

namespace fatlas {

struct HistogramBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct ThicknessReport {
  std::vector<double> phi;  // per top simplex
  double phi_min = 0.0;
  std::size_t argmin = 0;
  std::vector<HistogramBucket> histogram;
  double threshold = 0.0;
  std::vector<std::size_t> below_threshold;
};

// Thickness of every top simplex on its realized coordinates. Histogram
// buckets span [0, regular-simplex thickness]. Throws on an empty complex.
ThicknessReport thickness_report(const SimplicialComplex& complex, double phi0 = 0.0,
                                 int buckets = 10);

struct ThickenOptions {
  std::size_t budget = 20000;  // vertex proposals
  double phi_target = 0.4;
  double max_move = 0.1;       // per-vertex displacement cap
  std::uint64_t seed = 1;
};

struct ThickenResult {
  SimplicialComplex complex;
  ThicknessReport before;
  ThicknessReport after;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  bool reached_target = false;
  std::vector<double> min_history;  // global minimum after each accepted move
};

// Coordinate-wise stochastic ascent on the minimum thickness of the simplices
// around one vertex at a time. A proposal is accepted only if it strictly
// raises that local minimum and keeps every incident simplex's orientation,
// so the global minimum never decreases. Per-vertex trust radii halve on
// rejection. Combinatorics are never modified.
ThickenResult thicken(const SimplicialComplex& complex, const ThickenOptions& options);

// Whether `moved` has the same orientation as `original` within the affine
// span of `original` (works in any codimension).
bool same_orientation(std::span<const Point> original, std::span<const Point> moved);

}  // namespace fatlas
