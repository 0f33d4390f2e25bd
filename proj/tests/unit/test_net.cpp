#include "fatlas/net.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace fatlas;

namespace {

struct Setup {
  ChartedSurface s;
  BackgroundMesh mesh;
  GeometryEstimates est;
};

Setup setup(ChartedSurface s, double h) {
  Setup out{std::move(s), {}, {}};
  out.mesh = build_background_mesh(out.s, h);
  out.est = estimate_geometry(out.s, out.mesh);
  return out;
}

// Brute-force oracle: every pair under 2 eps from full distance fields.
std::set<Edge> brute_pattern(const EpsilonNet& net, const BackgroundMesh& mesh) {
  std::set<Edge> out;
  for (std::size_t k = 0; k < net.size(); ++k) {
    const auto f = distance_field(mesh, {net.vertices[k]});
    for (std::size_t l = k + 1; l < net.size(); ++l)
      if (f.dist[net.vertices[l]] < 2 * net.eps) out.emplace(k, l);
  }
  return out;
}

}  // namespace

TEST(Net, SingleCenterWhenEpsExceedsDiameter) {
  const auto t = setup(make_flat_torus(1, 1), 0.02);
  const auto net = farthest_point_net(t.s, t.mesh, 1.0, 3);
  EXPECT_EQ(net.size(), 1u);
  EXPECT_TRUE(net.pattern.empty());
  const auto r = verify_net(net, t.mesh, t.est);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.max_degree, 0);
}

TEST(Net, SphereQuarterCircleAcrossSeeds) {
  const double eps = kPi / 2;
  const auto t = setup(make_sphere(1), eps / 20);
  EXPECT_EQ(packing_bound(t.est, eps), 6);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto net = farthest_point_net(t.s, t.mesh, eps, seed);
    EXPECT_GE(net.size(), 4u) << "seed " << seed;
    EXPECT_LE(net.size(), 6u) << "seed " << seed;
    const auto r = verify_net(net, t.mesh, t.est);
    EXPECT_TRUE(r.ok()) << "seed " << seed;
  }
}

TEST(Net, FlatTorusInvariants) {
  const double eps = 0.3;
  const auto t = setup(make_flat_torus(1, 1), eps / 20);
  const auto net = farthest_point_net(t.s, t.mesh, eps, 11);
  const auto r = verify_net(net, t.mesh, t.est);
  EXPECT_LE(r.covering_radius, eps);
  EXPECT_GE(r.min_separation, eps);
  EXPECT_LE(static_cast<long>(r.n0), r.packing_bound);
  EXPECT_LE(r.max_degree, r.degree_bound);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(std::set<Edge>(net.pattern.begin(), net.pattern.end()), brute_pattern(net, t.mesh));
  for (std::size_t k = 0; k < net.size(); ++k)
    EXPECT_EQ(net.centers[k], t.mesh.coords[net.vertices[k]]);
}

TEST(Net, DeletedCenterBreaksCovering) {
  const double eps = 0.3;
  const auto t = setup(make_flat_torus(1, 1), eps / 20);
  auto net = farthest_point_net(t.s, t.mesh, eps, 2);
  const int removed = net.vertices[3];
  net.vertices.erase(net.vertices.begin() + 3);
  net.centers.erase(net.centers.begin() + 3);
  const auto r = verify_net(net, t.mesh, t.est);
  EXPECT_FALSE(r.covering_ok());
  EXPECT_FALSE(r.ok());
  ASSERT_GE(r.covering_witness, 0);
  // The witness is uncovered by the remaining centers, and the removed one covered it.
  const auto f = distance_field(t.mesh, net.vertices);
  EXPECT_EQ(f.dist[r.covering_witness], r.covering_radius);
  EXPECT_GT(r.covering_radius, eps);
  EXPECT_LT(distance_field(t.mesh, {removed}).dist[r.covering_witness], eps);
}

TEST(Net, DuplicatedCenterBreaksSeparation) {
  const double eps = 0.3;
  const auto t = setup(make_flat_torus(1, 1), eps / 20);
  auto net = farthest_point_net(t.s, t.mesh, eps, 2);
  net.vertices.push_back(net.vertices[1]);
  net.centers.push_back(net.centers[1]);
  const auto r = verify_net(net, t.mesh, t.est);
  EXPECT_FALSE(r.separation_ok());
  EXPECT_EQ(r.min_separation, 0.0);
  EXPECT_EQ(r.separation_pair, Edge(1, static_cast<int>(net.size()) - 1));
}

TEST(Net, SizeNonIncreasingInEps) {
  const auto s = make_flat_torus(1, 1);
  const auto mesh = build_background_mesh(s, 0.01);
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (double eps : {0.1, 0.15, 0.2, 0.3, 0.45, 0.6, 0.8}) {
    const auto n = farthest_point_net(s, mesh, eps, 0).size();
    EXPECT_LE(n, prev) << "eps " << eps;
    prev = n;
  }
}

TEST(Net, PatternThreshold) {
  // Path graph of 7 unit edges; centers at both ends.
  BackgroundMesh m;
  const int n = 8;
  m.h = 0.1;
  for (int i = 0; i < n; ++i) m.coords.emplace_back(i, 0);
  m.offsets.push_back(0);
  for (int i = 0; i < n; ++i) {
    if (i > 0) m.targets.push_back(i - 1);
    if (i + 1 < n) m.targets.push_back(i + 1);
    m.offsets.push_back(m.targets.size());
  }
  m.lengths.assign(m.targets.size(), 1.0);
  m.steps.assign(m.targets.size(), Vec2::Zero());
  EpsilonNet net;
  net.vertices = {0, 7};
  net.centers = {m.coords[0], m.coords[7]};
  net.eps = 3.5;  // distance 7 = 2 eps: not strictly closer
  EXPECT_TRUE(intersection_pattern(net, m).empty());
  net.eps = 3.5 + 1e-9;
  EXPECT_EQ(intersection_pattern(net, m), std::vector<Edge>{Edge(0, 1)});
}

TEST(Net, Deterministic) {
  const auto s = make_torus(2, 1);
  const auto mesh = build_background_mesh(s, 0.05);
  const auto a = farthest_point_net(s, mesh, 1.0, 9);
  const auto b = farthest_point_net(s, mesh, 1.0, 9);
  EXPECT_EQ(a.vertices, b.vertices);
  EXPECT_EQ(a.pattern, b.pattern);
}

TEST(Net, ResolutionError) {
  const auto s = make_flat_torus(1, 1);
  const auto mesh = build_background_mesh(s, 0.1);
  EXPECT_THROW(farthest_point_net(s, mesh, 0.3, 0), ResolutionError);
  EXPECT_NO_THROW(farthest_point_net(s, mesh, 0.31, 0));
}
