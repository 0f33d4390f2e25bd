#pragma once

#include "fatlas/common.hpp"

#include <map>
#include <optional>

namespace fatlas {

// Sorted vertex-index tuple.
using Simplex = std::vector<int>;

// Pure simplicial complex described by its top-dimensional simplices. Every
// face of a listed simplex is implicitly part of the complex.
struct SimplicialComplex {
  int dim = 0;
  std::vector<Point> vertices;
  std::vector<Simplex> simplices;  // sorted index tuples
  // +1/-1 per simplex relative to its sorted order; empty when unknown.
  std::vector<int> orientation;
  // Optional per-simplex realized coordinates (sorted vertex order), used for
  // quotients that are unwrapped into a covering space.
  std::vector<std::vector<Point>> realized;
  // Chessboard color per simplex (+1/-1); empty when uncolored.
  std::vector<int> colors;
  // Vertex labels in 0..dim such that every simplex carries all labels; set by
  // barycentric subdivision (dimension of the face a barycenter came from).
  std::vector<int> vertex_types;

  std::size_t size() const { return simplices.size(); }
  std::size_t ambient_dim() const;
  // Coordinates of simplex i in sorted vertex order.
  std::vector<Point> simplex_points(std::size_t i) const;
  // Vertex indices of simplex i listed in its oriented order.
  Simplex oriented(std::size_t i) const;
};

// Builds a complex from ordered simplices; the given order defines the
// orientation of each simplex.
SimplicialComplex make_complex(int dim, std::vector<Point> vertices,
                               const std::vector<std::vector<int>>& ordered_simplices);

// Sign of the permutation that sorts `tuple`; 0 if it has repeated entries.
int permutation_sign(std::vector<int> tuple);

// All k-faces as sorted, unique tuples in lexicographic order.
std::vector<Simplex> faces(const SimplicialComplex& complex, int k);

// Top simplices incident to each (dim-1)-face.
std::map<Simplex, std::vector<int>> facet_incidence(const SimplicialComplex& complex);

// Euler characteristic sum_k (-1)^k f_k.
long euler_characteristic(const SimplicialComplex& complex);

struct PseudomanifoldReport {
  bool facets_ok = false;       // every (n-1)-face in exactly two simplices
  bool connected = false;       // dual graph connected
  bool orientable = false;
  bool links_ok = false;        // n = 2: vertex links are single cycles (paths on the boundary)
  bool has_boundary = false;
  long euler = 0;
  std::vector<long> face_counts;
  std::vector<Simplex> bad_facets;  // witnesses
  std::vector<int> bad_vertices;    // n = 2 link witnesses

  bool valid() const { return facets_ok && connected && links_ok; }
};

// Checks closed-pseudomanifold validity. With allow_boundary, facets lying in a
// single simplex are accepted and recorded via has_boundary.
PseudomanifoldReport validate_closed_pseudomanifold(const SimplicialComplex& complex,
                                                    bool allow_boundary = false);

// Consistent orientation by propagation across facets, or nullopt if the
// complex is not orientable. The first simplex keeps its current orientation.
std::optional<std::vector<int>> consistent_orientation(const SimplicialComplex& complex);

struct EvenIncidenceReport {
  bool ok = true;
  std::vector<Simplex> offending;  // (n-2)-faces with odd incidence
  std::vector<int> counts;         // incidence count per offending face
};

EvenIncidenceReport check_even_incidence(const SimplicialComplex& complex);

// Each n-simplex is replaced by the (n+1)! simplices spanned by barycenters of
// complete flags. The output carries vertex types, a propagated orientation
// and flag-parity colors when the input is orientable.
SimplicialComplex barycentric_subdivision(const SimplicialComplex& complex);

struct ColoringResult {
  bool ok = false;
  std::vector<int> colors;    // +1/-1 per simplex
  std::vector<int> odd_cycle; // simplex ids of an odd dual cycle on failure
  std::string method;         // "propagation" or "flag-parity"
};

// Proper 2-coloring of the dual graph by breadth-first propagation. When the
// complex has vertex types and an orientation, the flag-parity coloring is
// returned after being cross-checked against propagation.
ColoringResult chessboard_coloring(const SimplicialComplex& complex);

// Vertex labels 0..n such that every simplex uses each label once, by
// propagation across facets. Uses vertex_types when present.
std::optional<std::vector<int>> vertex_labeling(const SimplicialComplex& complex);

}  // namespace fatlas
