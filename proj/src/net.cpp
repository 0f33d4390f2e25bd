#include "fatlas/net.hpp"

#include <algorithm>

namespace fatlas {

namespace {

// Mesh vertices within `limit` of one center, with their distances.
struct Ball {
  std::vector<int> verts;
  std::vector<double> dist;
};

std::vector<Ball> center_balls(const EpsilonNet& net, const BackgroundMesh& mesh, double limit) {
  std::vector<Ball> balls(net.size());
  parallel_for(net.size(), [&](std::size_t k) {
    const DistanceField f = distance_field(mesh, {net.vertices[k]}, limit);
    for (std::size_t v = 0; v < mesh.size(); ++v)
      if (f.dist[v] < limit) {
        balls[k].verts.push_back(static_cast<int>(v));
        balls[k].dist.push_back(f.dist[v]);
      }
  });
  return balls;
}

// Distance from center k to every later center inside its ball, as (l, d).
std::vector<std::vector<std::pair<int, double>>> close_pairs(const EpsilonNet& net,
                                                             const BackgroundMesh& mesh,
                                                             const std::vector<Ball>& balls) {
  std::vector<std::vector<int>> at(mesh.size());
  for (std::size_t k = 0; k < net.size(); ++k) at[net.vertices[k]].push_back(static_cast<int>(k));
  std::vector<std::vector<std::pair<int, double>>> out(net.size());
  for (std::size_t k = 0; k < net.size(); ++k) {
    for (std::size_t i = 0; i < balls[k].verts.size(); ++i)
      for (int l : at[balls[k].verts[i]])
        if (l > static_cast<int>(k)) out[k].emplace_back(l, balls[k].dist[i]);
    std::sort(out[k].begin(), out[k].end());
  }
  return out;
}

std::vector<Edge> pattern_from_pairs(const std::vector<std::vector<std::pair<int, double>>>& pairs,
                                     double eps) {
  std::vector<Edge> out;
  for (std::size_t k = 0; k < pairs.size(); ++k)
    for (const auto& [l, d] : pairs[k])
      if (d < 2 * eps) out.emplace_back(static_cast<int>(k), l);
  return out;
}

}  // namespace

EpsilonNet farthest_point_net(const ChartedSurface& s, const BackgroundMesh& mesh, double eps,
                              std::uint64_t seed) {
  if (!(eps > 3 * mesh.h))
    throw ResolutionError("eps = " + std::to_string(eps) + " must exceed 3h = " +
                          std::to_string(3 * mesh.h));
  if (mesh.size() == 0) throw ContractError("farthest_point_net: empty mesh");
  EpsilonNet net;
  net.eps = eps;
  net.seed = seed;
  net.surface = s.tag;
  Rng rng(seed);
  std::vector<double> dist(mesh.size(), kInf);
  int next = static_cast<int>(rng.index(mesh.size()));
  while (true) {
    net.vertices.push_back(next);
    net.centers.push_back(mesh.coords[next]);
    relax_from(mesh, next, dist);
    const auto it = std::max_element(dist.begin(), dist.end());
    if (*it < eps) break;
    next = static_cast<int>(it - dist.begin());
  }
  net.pattern = intersection_pattern(net, mesh);
  return net;
}

std::vector<Edge> intersection_pattern(const EpsilonNet& net, const BackgroundMesh& mesh) {
  return pattern_from_pairs(close_pairs(net, mesh, center_balls(net, mesh, 2 * net.eps)), net.eps);
}

bool NetReport::covering_ok() const { return covering_radius <= eps; }
bool NetReport::separation_ok() const { return n0 <= 1 || min_separation >= eps; }

NetReport verify_net(const EpsilonNet& net, const BackgroundMesh& mesh,
                     const GeometryEstimates& est) {
  NetReport r;
  r.eps = net.eps;
  r.n0 = net.size();
  if (net.size() == 0) {
    r.covering_radius = kInf;
    return r;
  }
  const DistanceField cover = distance_field(mesh, net.vertices);
  for (std::size_t v = 0; v < mesh.size(); ++v)
    if (cover.dist[v] > r.covering_radius) {
      r.covering_radius = cover.dist[v];
      r.covering_witness = static_cast<int>(v);
    }

  const auto balls = center_balls(net, mesh, 2 * net.eps);
  const auto pairs = close_pairs(net, mesh, balls);
  for (std::size_t k = 0; k < net.size(); ++k)
    for (const auto& [l, d] : pairs[k])
      if (d < r.min_separation) {
        r.min_separation = d;
        r.separation_pair = {static_cast<int>(k), l};
      }

  std::vector<int> degree(net.size(), 0);
  for (const auto& [k, l] : pattern_from_pairs(pairs, net.eps)) {
    ++degree[k];
    ++degree[l];
  }
  for (std::size_t k = 0; k < net.size(); ++k)
    if (degree[k] > r.max_degree) {
      r.max_degree = degree[k];
      r.max_degree_center = static_cast<int>(k);
    }

  std::vector<int> near(mesh.size(), 0);
  for (const auto& b : balls)
    for (int v : b.verts) ++near[v];
  r.max_neighbourhood = *std::max_element(near.begin(), near.end());

  r.packing_bound = packing_bound(est, net.eps);
  r.degree_bound = degree_bound(est, net.eps);
  return r;
}

}  // namespace fatlas
