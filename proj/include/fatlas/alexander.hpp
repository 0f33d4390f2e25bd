#pragma once

#include "fatlas/complex.hpp"
#include "fatlas/simplex.hpp"

namespace fatlas {

// Regular n-simplex of unit diameter centered at the origin (its incenter),
// positively oriented in the order q_0..q_n.
struct ModelTarget {
  int n = 2;
  std::vector<Point> vertices;
  Point center;
  double inradius = 0;
  std::vector<Point> normals;  // outward unit normal of the facet opposite q_i

  // Minkowski gauge of x - center: 1 on the boundary, < 1 inside.
  double gauge(const Point& x) const;
  // Distance from x to the boundary of the simplex (x inside).
  double boundary_distance(const Point& x) const;
};

ModelTarget model_target(int n);

// Point of the one-point compactification of R^n.
struct ModelPoint {
  Point x;
  bool infinite = false;
};

// Radial fold through the incenter: c + t (b - c) -> c + (b - c) / t for
// boundary points b. Fixes the boundary, sends the center to infinity.
ModelPoint radial_fold(const ModelTarget& m, const Point& x);

// Inverse stereographic projection onto the unit n-sphere (infinity -> north pole).
Point to_sphere(const ModelPoint& p);

// Affine map from the local frame of a realized simplex onto given targets.
struct AffineMap {
  SimplexFrame frame;     // local coordinates of the source simplex
  Eigen::MatrixXd A;      // n x n, local -> model
  Point b;

  Point operator()(const Point& local) const { return A * local + b; }
};

// Maps tau[i] to target[i]; throws ContractError on a degenerate source.
AffineMap affine_to_model(std::span<const Point> tau, std::span<const Point> target);

// |A|^n / det A from singular values; +inf when det A <= 0.
double outer_dilatation(const Eigen::MatrixXd& A);

struct SimplexMap {
  std::vector<int> labels;  // model vertex of each vertex, sorted vertex order
  bool folded = false;
  AffineMap affine;         // in oriented vertex order
  Simplex oriented;
  double diameter = 0;
};

struct AlexanderMap {
  ModelTarget model;
  std::vector<SimplexMap> parts;
  std::vector<std::vector<Point>> points;  // realized vertices, sorted order
  bool swapped = false;  // q_1 and q_2 exchanged to match the coloring

  std::size_t size() const { return parts.size(); }
};

// Per-simplex Alexander maps of a colored complex. Vertex labels come from
// vertex_types (or propagation); color +1 simplices map affinely onto the
// model, color -1 simplices are folded onto its complement. Throws
// ContractError on an uncolored or unlabelable complex, or when the coloring
// disagrees with the orientation of the labels.
AlexanderMap assemble_qm_map(const SimplicialComplex& complex);

// Image of the point with barycentric coordinates `bary` (sorted vertex order).
ModelPoint evaluate(const AlexanderMap& f, std::size_t simplex, const Point& bary);

struct PointDilatation {
  bool rejected = false;
  double K = 1;  // outer dilatation |f'|^n / J_f
  double J = 0;  // Jacobian determinant
  double norm = 0;  // operator norm |f'|
};

// Affine parts use the closed form; folded parts a central-difference
// Jacobian with step 1e-6 * diam. Points within 1e-3 * diam of the model
// center or boundary are rejected.
PointDilatation dilatation_at(const AlexanderMap& f, std::size_t simplex, const Point& bary);
// Finite-difference measurement for any part (used to cross-check the closed form).
PointDilatation dilatation_fd(const AlexanderMap& f, std::size_t simplex, const Point& bary);

struct DilatationReport {
  std::vector<double> simplex_max;
  std::vector<double> simplex_q99;
  double global_K = 0;
  std::size_t samples = 0;   // accepted
  std::size_t rejected = 0;
  double min_J = kInf;
  std::size_t violations = 0;  // accepted samples failing 0 < |f'|^n <= K J
  std::size_t worst_simplex = 0;

  bool quasiregular() const { return samples > 0 && violations == 0; }
};

DilatationReport dilatation_report(const AlexanderMap& f, std::size_t samples_per_simplex,
                                   std::uint64_t seed);

// Largest disagreement between the two evaluations of random points on shared
// (n-1)-faces; the folded side is evaluated through the fold.
struct FaceConsistency {
  std::size_t points = 0;
  double max_error = 0;
  Simplex worst_face;
};
FaceConsistency face_consistency(const AlexanderMap& f, const SimplicialComplex& complex,
                                 std::size_t points, std::uint64_t seed);

// The (n-2)-skeleton.
std::vector<Simplex> branching_set(const SimplicialComplex& complex);

// Two-sided test at random points of shared (n-1)-faces: stepping into either
// incident simplex must land on opposite sides of the model facet.
struct InjectivityReport {
  std::size_t checked = 0;
  std::size_t failures = 0;
  Simplex witness;
};
InjectivityReport local_injectivity(const AlexanderMap& f, const SimplicialComplex& complex,
                                    std::size_t points, std::uint64_t seed);

// Uniform random barycentric coordinates of an n-simplex.
Point random_barycentric(Rng& rng, int n);

}  // namespace fatlas
