#include "fatlas/simplex.hpp"

#include <algorithm>
#include <bit>

namespace fatlas {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Eigen::MatrixXd edge_matrix(std::span<const Point> vertices) {
  const auto k = static_cast<Eigen::Index>(vertices.size()) - 1;
  Eigen::MatrixXd edges(vertices.front().size(), k);
  for (Eigen::Index j = 0; j < k; ++j) edges.col(j) = vertices[j + 1] - vertices[0];
  return edges;
}

}  // namespace

double simplex_volume(std::span<const Point> vertices) {
  if (vertices.empty()) throw ContractError("simplex_volume: no vertices");
  const int k = static_cast<int>(vertices.size()) - 1;
  if (k == 0) return 1.0;
  const Eigen::MatrixXd edges = edge_matrix(vertices);
  if (edges.rows() < k) return 0.0;
  const double gram = (edges.transpose() * edges).determinant();
  return gram > 0.0 ? std::sqrt(gram) / factorial(k) : 0.0;
}

double simplex_diameter(std::span<const Point> vertices) {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, (vertices[i] - vertices[j]).norm());
  return d;
}

double thickness(std::span<const Point> vertices) {
  if (vertices.empty()) throw ContractError("thickness: no vertices");
  const std::size_t count = vertices.size();
  if (count > 20) throw ContractError("thickness: face enumeration limited to dimension 19");

  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j)
      if ((vertices[i] - vertices[j]).squaredNorm() == 0.0) return 0.0;

  double phi = 1.0;
  std::vector<Point> face;
  const std::uint32_t full = (1u << count) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const int size = std::popcount(mask);
    if (size < 3) continue;
    face.clear();
    for (std::size_t i = 0; i < count; ++i)
      if (mask & (1u << i)) face.push_back(vertices[i]);
    const double diam = simplex_diameter(face);
    const double ratio = simplex_volume(face) / std::pow(diam, size - 1);
    phi = std::min(phi, ratio);
  }
  return std::clamp(phi, 0.0, 1.0);
}

double regular_simplex_thickness(int k) {
  if (k <= 1) return 1.0;
  // Unit-edge regular simplex: V_k = sqrt(k+1) / (k! 2^{k/2}); faces are
  // regular too and the top face attains the minimum.
  double phi = 1.0;
  for (int j = 2; j <= k; ++j)
    phi = std::min(phi, std::sqrt(j + 1.0) / (factorial(j) * std::pow(2.0, j / 2.0)));
  return phi;
}

int orientation_sign(std::span<const Point> vertices) {
  const auto n = static_cast<Eigen::Index>(vertices.size()) - 1;
  if (n < 1 || vertices.front().size() != n)
    throw ContractError("orientation_sign: need n+1 points in R^n");
  const Eigen::MatrixXd edges = edge_matrix(vertices);
  const double det = edges.determinant();
  double scale = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) scale *= edges.col(j).norm();
  if (std::abs(det) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) return 0;
  return det > 0 ? 1 : -1;
}

std::vector<Point> regular_simplex(int k) {
  // Standard basis vertices of R^{k+1} lie in a hyperplane; map them to R^k
  // with an orthonormal basis of that hyperplane.
  Eigen::MatrixXd ambient = Eigen::MatrixXd::Identity(k + 1, k + 1) / std::sqrt(2.0);
  const Eigen::VectorXd centroid = ambient.rowwise().mean();
  Eigen::MatrixXd centered = ambient.colwise() - centroid;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(centered);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k + 1, k);
  std::vector<Point> out;
  out.reserve(k + 1);
  for (int i = 0; i <= k; ++i) out.emplace_back(q.transpose() * centered.col(i));
  if (k >= 1 && orientation_sign(out) < 0) std::swap(out[0], out[1]);
  return out;
}

SimplexFrame simplex_frame(std::span<const Point> vertices) {
  const Eigen::MatrixXd edges = edge_matrix(vertices);
  const auto k = edges.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(edges);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(edges.rows(), k);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) == 0.0) throw ContractError("simplex_frame: degenerate simplex");
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return {vertices.front(), q};
}

}  // namespace fatlas
