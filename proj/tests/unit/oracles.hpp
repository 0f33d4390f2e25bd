#pragma once

// Test-only reference implementations. These deliberately avoid the library's
// code paths so they can serve as independent checks.

#include "fatlas/common.hpp"

#include <algorithm>
#include <vector>

namespace fatlas::oracle {

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Volume of a k-simplex from its pairwise distances (Cayley-Menger).
inline double cayley_menger_volume(const std::vector<Point>& v) {
  const int k = static_cast<int>(v.size()) - 1;
  if (k == 0) return 1.0;
  Eigen::MatrixXd cm = Eigen::MatrixXd::Ones(k + 2, k + 2);
  cm(0, 0) = 0.0;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) cm(i + 1, j + 1) = (v[i] - v[j]).squaredNorm();
  const double sign = (k + 1) % 2 == 0 ? 1.0 : -1.0;
  const double v2 = sign * cm.determinant() / (std::pow(2.0, k) * factorial(k) * factorial(k));
  return v2 > 0 ? std::sqrt(v2) : 0.0;
}

inline double pairwise_diameter(const std::vector<Point>& v) {
  double d = 0;
  for (const auto& a : v)
    for (const auto& b : v) d = std::max(d, (a - b).norm());
  return d;
}

// Thickness by enumerating every face and evaluating the defining ratio with
// the Cayley-Menger volume; dimension 0 and 1 faces contribute 1.
inline double brute_force_thickness(const std::vector<Point>& v) {
  const std::size_t n = v.size();
  double phi = 1.0;
  for (std::size_t size = 2; size <= n; ++size) {
    std::vector<bool> sel(n, false);
    std::fill(sel.begin(), sel.begin() + size, true);
    do {
      std::vector<Point> face;
      for (std::size_t i = 0; i < n; ++i)
        if (sel[i]) face.push_back(v[i]);
      const double diam = pairwise_diameter(face);
      const double ratio = diam == 0 ? 0.0 : cayley_menger_volume(face) / std::pow(diam, size - 1);
      phi = std::min(phi, ratio);
    } while (std::prev_permutation(sel.begin(), sel.end()));
  }
  return std::clamp(phi, 0.0, 1.0);
}

inline std::vector<Point> random_simplex(Rng& rng, int k, int ambient) {
  std::vector<Point> v;
  for (int i = 0; i <= k; ++i) {
    Point p(ambient);
    for (int d = 0; d < ambient; ++d) p[d] = rng.uniform(-1.0, 1.0);
    v.push_back(p);
  }
  return v;
}

inline Eigen::MatrixXd random_rotation(Rng& rng, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace fatlas::oracle
