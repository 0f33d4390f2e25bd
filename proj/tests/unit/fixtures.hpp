#pragma once

#include "fatlas/complex.hpp"

namespace fatlas::fixtures {

inline Point p3(double x, double y, double z) { return Vec3(x, y, z); }
inline Point p2(double x, double y) { return Vec2(x, y); }

// Boundary of the regular tetrahedron, consistently oriented (outward).
inline SimplicialComplex tetrahedron_boundary() {
  std::vector<Point> v{p3(1, 1, 1), p3(1, -1, -1), p3(-1, 1, -1), p3(-1, -1, 1)};
  return make_complex(2, v, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

// Regular octahedron with unit-norm vertices, outward orientation.
inline SimplicialComplex octahedron() {
  std::vector<Point> v{p3(1, 0, 0), p3(-1, 0, 0), p3(0, 1, 0),
                       p3(0, -1, 0), p3(0, 0, 1), p3(0, 0, -1)};
  return make_complex(2, v,
                      {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                       {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
}

// Boundary of the 4-simplex: a closed 3-pseudomanifold (3-sphere).
inline SimplicialComplex four_simplex_boundary() {
  std::vector<Point> v;
  for (int i = 0; i < 5; ++i) {
    Point p = Point::Zero(4);
    if (i < 4) p[i] = 1.0;
    else p.setConstant(-0.5);
    v.push_back(p);
  }
  std::vector<std::vector<int>> tets;
  for (int drop = 0; drop < 5; ++drop) {
    std::vector<int> t;
    for (int i = 0; i < 5; ++i)
      if (i != drop) t.push_back(i);
    tets.push_back(t);
  }
  SimplicialComplex c = make_complex(3, v, tets);
  c.orientation.clear();
  return c;
}

}  // namespace fatlas::fixtures
