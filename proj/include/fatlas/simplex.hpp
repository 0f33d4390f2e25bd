#pragma once

// Euclidean simplex measurements. A simplex is an ordered list of k+1 points
// in some R^N with k <= N.

#include "fatlas/common.hpp"

#include <span>

namespace fatlas {

// k-dimensional volume sqrt(det(E^T E)) / k! with E the edge vectors from the
// first vertex. A single point has volume 1 by convention.
double simplex_volume(std::span<const Point> vertices);

// Largest pairwise Euclidean distance; 0 for a point.
double simplex_diameter(std::span<const Point> vertices);

// Thickness: the minimum over all faces sigma of Vol_j(sigma) / diam(sigma)^j.
// Faces of dimension 0 and 1 contribute exactly 1 (0 for a zero-length edge),
// so the result lies in [0, 1] and is 0 iff the vertices are affinely
// dependent.
double thickness(std::span<const Point> vertices);

// Thickness of the regular k-simplex, the largest value any k-simplex attains.
double regular_simplex_thickness(int k);

// Sign of det(p_1 - p_0, ..., p_n - p_0) for n+1 points in R^n; 0 when the
// determinant vanishes relative to the edge lengths.
int orientation_sign(std::span<const Point> vertices);

// Vertices of the regular k-simplex with unit edge length, centered at the
// origin of R^k.
std::vector<Point> regular_simplex(int k);

// Orthonormal frame of the affine span of a nondegenerate simplex. The columns
// of `basis` are ordered so that the local coordinates of the vertices have a
// positive orientation in the given vertex order.
struct SimplexFrame {
  Point origin;
  Eigen::MatrixXd basis;  // N x k

  Point to_local(const Point& p) const { return basis.transpose() * (p - origin); }
  Point to_ambient(const Point& y) const { return origin + basis * y; }
};

SimplexFrame simplex_frame(std::span<const Point> vertices);

}  // namespace fatlas
