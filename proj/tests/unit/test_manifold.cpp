#include "fatlas/geometry.hpp"

#include <gtest/gtest.h>

using namespace fatlas;

namespace {

ChartedSurface paraboloid(double half_width = 2.0) {
  return make_graph_surface({{2, 0, 1.0}, {0, 2, 1.0}}, -half_width, half_width, -half_width,
                            half_width);
}

// Central-difference pullback of the embedding.
Mat2 numeric_pullback(const ChartedSurface& s, double u, double v) {
  const double h = 1e-5;
  const Vec3 eu = (embed(s, u + h, v) - embed(s, u - h, v)) / (2 * h);
  const Vec3 ev = (embed(s, u, v + h) - embed(s, u, v - h)) / (2 * h);
  Mat2 g;
  g << eu.dot(eu), eu.dot(ev), eu.dot(ev), ev.dot(ev);
  return g;
}

Vec3 unit_sphere_point(const Vec2& p) {
  return {std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]), std::cos(p[0])};
}

// Ambient tangent of a chart direction on the unit sphere.
Vec3 unit_sphere_tangent(const Vec2& p, const Vec2& d) {
  const Vec3 eu(std::cos(p[0]) * std::cos(p[1]), std::cos(p[0]) * std::sin(p[1]), -std::sin(p[0]));
  const Vec3 ev(-std::sin(p[0]) * std::sin(p[1]), std::sin(p[0]) * std::cos(p[1]), 0);
  return d[0] * eu + d[1] * ev;
}

}  // namespace

TEST(Metric, CatalogValues) {
  const auto sphere = make_sphere(1.0);
  for (double phi : {0.0, 1.0, 4.0}) {
    const Mat2 g = metric_at(sphere, kPi / 2, phi);
    EXPECT_NEAR(g(0, 0), 1, 1e-15);
    EXPECT_NEAR(g(1, 1), 1, 1e-15);
    EXPECT_NEAR(g(0, 1), 0, 1e-15);
  }
  EXPECT_EQ(metric_at(make_flat_torus(1, 1), 0.3, 0.7), Mat2::Identity());
  const Mat2 t = metric_at(make_torus(2, 1), 0.0, 0.4);
  EXPECT_NEAR(t(0, 0), 1, 1e-14);
  EXPECT_NEAR(t(1, 1), 9, 1e-14);
  EXPECT_NEAR(t(0, 1), 0, 1e-14);
}

TEST(Metric, InvalidMetricCarriesLocation) {
  EXPECT_THROW(metric_at(make_sphere(1), 0.0, 0.0), InvalidMetric);
  const auto bad = make_custom_surface(
      [](double u, double) {
        Mat2 g;
        g << 1, 0, 0, u - 0.5;
        return g;
      },
      0, 1, 0, 1, false, false, false, Topology::unknown);
  try {
    metric_at(bad, 0.25, 0.75);
    FAIL();
  } catch (const InvalidMetric& e) {
    EXPECT_EQ(e.u, 0.25);
    EXPECT_EQ(e.v, 0.75);
  }
  EXPECT_THROW(make_flat_torus(0, 1), InvalidMetric);
}

TEST(Metric, PullbackConsistency) {
  Rng rng(17);
  for (const auto& s : {make_sphere(1.5), make_ellipsoid(1, 2, 3), make_torus(2, 1), paraboloid()}) {
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform(s.u0 + 0.01, s.u1 - 0.01);
      const double v = rng.uniform(s.v0, s.v1);
      const Mat2 diff = metric_at(s, u, v) - numeric_pullback(s, u, v);
      ASSERT_LT(diff.cwiseAbs().maxCoeff(), 1e-6) << s.tag << " at " << u << "," << v;
    }
  }
}

TEST(Curvature, Fixtures) {
  EXPECT_NEAR(gauss_curvature(make_sphere(1), 1.0, 2.0), 1.0, 1e-12);
  EXPECT_NEAR(gauss_curvature(make_sphere(1), 0.0, 0.0), 1.0, 1e-12);  // at a chart pole
  EXPECT_EQ(gauss_curvature(make_flat_torus(1, 1), 0.5, 0.5), 0.0);
  EXPECT_NEAR(gauss_curvature(paraboloid(), 0.0, 0.0), 4.0, 1e-12);
}

TEST(Curvature, MatchesClosedForms) {
  Rng rng(23);
  const double R = 2, r = 1, a = 1, b = 2, c = 3;
  const auto sphere = make_sphere(2.0);
  const auto torus = make_torus(R, r);
  const auto par = paraboloid();
  const auto ell = make_ellipsoid(a, b, c);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(0, kPi), v = rng.uniform(0, 2 * kPi);
    EXPECT_NEAR(gauss_curvature(sphere, u, v), 0.25, 1e-4);
    const double tu = rng.uniform(0, 2 * kPi);
    EXPECT_NEAR(gauss_curvature(torus, tu, v), std::cos(tu) / (r * (R + r * std::cos(tu))), 1e-4);
    const double x = rng.uniform(-2, 2), y = rng.uniform(-2, 2);
    const double rho2 = x * x + y * y;
    EXPECT_NEAR(gauss_curvature(par, x, y), 4 / std::pow(1 + 4 * rho2, 2), 1e-4);
    const Vec3 p = embed(ell, u, v);
    const double q = p.x() * p.x() / std::pow(a, 4) + p.y() * p.y() / std::pow(b, 4) +
                     p.z() * p.z() / std::pow(c, 4);
    EXPECT_NEAR(gauss_curvature(ell, u, v), 1 / (a * a * b * b * c * c * q * q), 1e-4);
  }
}

TEST(Curvature, FiniteDifferenceMetric) {
  // The unit sphere metric given only as a callback.
  const auto s = make_custom_surface(
      [](double u, double) {
        Mat2 g;
        g << 1, 0, 0, std::sin(u) * std::sin(u);
        return g;
      },
      0.3, 2.8, 0, 2 * kPi, false, true, false, Topology::unknown);
  Rng rng(2);
  for (int i = 0; i < 100; ++i)
    EXPECT_NEAR(gauss_curvature(s, rng.uniform(0.4, 2.7), rng.uniform(0, 6)), 1.0, 1e-4);
}

TEST(Geodesic, SphereEquatorToPole) {
  const auto s = make_sphere(1);
  const Vec2 end = geodesic_shoot(s, Vec2(kPi / 2, 0.3), Vec2(-1, 0), kPi / 2);
  EXPECT_NEAR((embed(s, end[0], end[1]) - Vec3(0, 0, 1)).norm(), 0, 1e-6);
}

TEST(Geodesic, SphereMatchesGreatCircles) {
  const auto s = make_sphere(1);
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p(rng.uniform(0.1, kPi - 0.1), rng.uniform(0, 2 * kPi));
    const double alpha = rng.uniform(0, 2 * kPi);
    const Vec2 dir(std::cos(alpha), std::sin(alpha) / std::sin(p[0]));
    const double len = rng.uniform(0, kPi / 2);
    const Vec2 end = geodesic_shoot(s, p, dir, len);
    const Vec3 expected = std::cos(len) * unit_sphere_point(p) +
                          std::sin(len) * unit_sphere_tangent(p, dir);
    EXPECT_LT((unit_sphere_point(end) - expected).norm(), 1e-6);
  }
}

TEST(Geodesic, ThroughThePole) {
  const auto s = make_sphere(1);
  const Vec2 end = geodesic_shoot(s, Vec2(0.5, 1.0), Vec2(-1, 0), 1.0);
  const Vec3 expected = unit_sphere_point(Vec2(0.5, 1.0 + kPi));
  EXPECT_LT((unit_sphere_point(end) - expected).norm(), 1e-6);
}

TEST(Geodesic, FlatTorusAndZeroLength) {
  const auto s = make_flat_torus(1, 1);
  const Vec2 d = Vec2(3, 4) / 5;
  const Vec2 end = geodesic_shoot(s, Vec2(0.9, 0.2), d, 0.5);
  EXPECT_NEAR(end[0], std::fmod(0.9 + 0.3, 1.0), 1e-12);
  EXPECT_NEAR(end[1], 0.6, 1e-12);
  const auto sphere = make_sphere(1);
  const Vec2 p(1.0, 2.0);
  EXPECT_EQ(geodesic_shoot(sphere, p, Vec2(1, 0), 0.0), p);
}

TEST(Geodesic, TorusOuterEquator) {
  const auto s = make_torus(2, 1);
  const Vec2 end = geodesic_shoot(s, Vec2(0, 0.5), Vec2(0, 1.0 / 3.0), 2.0);
  EXPECT_NEAR(end[0], 0.0, 1e-7);
  EXPECT_NEAR(end[1], 0.5 + 2.0 / 3.0, 1e-7);
}

TEST(LogMap, SphereGreatCircle) {
  const auto s = make_sphere(1);
  Rng rng(41);
  int checked = 0;
  while (checked < 50) {
    const Vec2 p(rng.uniform(0.2, kPi - 0.2), rng.uniform(0, 2 * kPi));
    const Vec2 q(rng.uniform(0.05, kPi - 0.05), rng.uniform(0, 2 * kPi));
    const Vec3 a = unit_sphere_point(p), b = unit_sphere_point(q);
    const double dist = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
    if (dist > 2.0 || dist < 1e-3) continue;
    const auto res = log_map(s, p, q);
    ASSERT_TRUE(res.has_value());
    EXPECT_NEAR(res->length, dist, 1e-6);
    const Vec3 expected = (b - a.dot(b) * a).normalized();
    EXPECT_LT((unit_sphere_tangent(p, res->direction) - expected).norm(), 1e-6);
    ++checked;
  }
}

TEST(LogMap, IdentityAndFlatTorus) {
  const auto s = make_sphere(1);
  const auto same = log_map(s, Vec2(1, 1), Vec2(1, 1));
  ASSERT_TRUE(same.has_value());
  EXPECT_EQ(same->length, 0.0);
  EXPECT_EQ(same->direction, Vec2::Zero());

  const auto ft = make_flat_torus(1, 1);
  const auto r = log_map(ft, Vec2(0.1, 0.1), Vec2(0.9, 0.95));
  ASSERT_TRUE(r.has_value());
  // Oracle: shortest of the nine lattice translates.
  double best = kInf;
  Vec2 best_d;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      const Vec2 d = Vec2(0.9 + i, 0.95 + j) - Vec2(0.1, 0.1);
      if (d.norm() < best) {
        best = d.norm();
        best_d = d;
      }
    }
  EXPECT_NEAR(r->length, best, 1e-12);
  EXPECT_LT((r->direction - best_d / best).norm(), 1e-12);
}

TEST(LogMap, TorusRoundTrip) {
  const auto s = make_torus(2, 1);
  Rng rng(43);
  for (int i = 0; i < 20; ++i) {
    const Vec2 p(rng.uniform(0, 2 * kPi), rng.uniform(0, 2 * kPi));
    const Mat2 g = metric_at(s, p[0], p[1]);
    Vec2 d(rng.normal(), rng.normal());
    d /= std::sqrt(d.dot(g * d));
    const double len = rng.uniform(0.1, 1.0);
    const Vec2 q = geodesic_shoot(s, p, d, len);
    const auto r = log_map(s, p, q);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(r->length, len, 1e-6);
    EXPECT_LT((r->direction - d).norm(), 1e-5);
  }
}

TEST(BackgroundMesh, BasicStructure) {
  const auto s = make_flat_torus(1, 1);
  const auto m = build_background_mesh(s, 0.05);
  EXPECT_EQ(m.size(), 400u);
  EXPECT_EQ(m.edge_count(), 400u * 32);
  for (double l : m.lengths) EXPECT_GT(l, 0);
  const auto f = distance_field(m, {0});
  for (double d : f.dist) EXPECT_TRUE(std::isfinite(d));
  EXPECT_EQ(m.triangles.size(), 800u);
  const auto sphere = build_background_mesh(make_sphere(1), 0.1);
  EXPECT_EQ(sphere.triangles.size(),
            static_cast<std::size_t>(2 * sphere.cols * (sphere.rows - 1) + 2 * sphere.cols));
}

TEST(Distance, SphereMatchesGreatCircleWithin3h) {
  const auto s = make_sphere(1);
  const double h = 0.05;
  const auto m = build_background_mesh(s, h);
  for (const Vec2 src : {Vec2(kPi / 2, 0.0), Vec2(0.0, 0.0), Vec2(1.0, 2.0)}) {
    const int id = m.nearest_vertex(s, src);
    const auto f = distance_field(m, {id});
    const Vec3 a = unit_sphere_point(m.coords[id]);
    double worst = 0;
    for (std::size_t v = 0; v < m.size(); ++v) {
      const double exact = std::acos(std::clamp(a.dot(unit_sphere_point(m.coords[v])), -1.0, 1.0));
      worst = std::max(worst, std::abs(f.dist[v] - exact));
    }
    EXPECT_LE(worst, 3 * h);
    EXPECT_EQ(f.dist[id], 0.0);
  }
}

TEST(Distance, AllSourcesGiveZero) {
  const auto s = make_flat_torus(1, 1);
  const auto m = build_background_mesh(s, 0.1);
  std::vector<Vec2> all(m.coords.begin(), m.coords.end());
  for (double d : geodesic_distance_field(s, m, all)) EXPECT_EQ(d, 0.0);
}

TEST(Distance, FlatTorusDiagonal) {
  const auto s = make_flat_torus(1, 1);
  const double h = 0.01;
  const auto m = build_background_mesh(s, h);
  const auto d = geodesic_distance_field(s, m, {Vec2(0, 0)});
  EXPECT_NEAR(d[m.nearest_vertex(s, Vec2(0.5, 0.5))], std::sqrt(0.5), 3 * h);
}

TEST(Distance, TriangleInequality) {
  const auto s = make_torus(2, 1);
  const double h = 0.1;
  const auto m = build_background_mesh(s, h);
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const int a = static_cast<int>(rng.index(m.size())), b = static_cast<int>(rng.index(m.size()));
    const auto fa = distance_field(m, {a}), fb = distance_field(m, {b});
    for (int k = 0; k < 50; ++k) {
      const int c = static_cast<int>(rng.index(m.size()));
      EXPECT_LE(fa.dist[c], fa.dist[b] + fb.dist[c] + 2 * h);
    }
  }
}

TEST(Distance, LowestSourceWinsTies) {
  // Path graph 0 - 1 - 2 with unit edges.
  BackgroundMesh m;
  m.coords = {Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)};
  m.offsets = {0, 1, 3, 4};
  m.targets = {1, 0, 2, 1};
  m.lengths = {1, 1, 1, 1};
  m.steps.assign(4, Vec2::Zero());
  EXPECT_EQ(distance_field(m, {0, 2}).label[1], 0);
  EXPECT_EQ(distance_field(m, {2, 0}).label[1], 0);
  const auto limited = distance_field(m, {0}, 1.5);
  EXPECT_EQ(limited.label[2], -1);
  EXPECT_EQ(limited.dist[2], kInf);
}

TEST(Estimates, UnitSphere) {
  const auto s = make_sphere(1);
  const double h = 0.05;
  const auto est = estimate_geometry(s, build_background_mesh(s, h));
  EXPECT_NEAR(est.D_up - 3 * h, kPi, 3 * h);
  EXPECT_NEAR(est.v_low, 4 * kPi, 0.01 * 4 * kPi);
  EXPECT_NEAR(est.k_low, 1.0, 1e-6);
  EXPECT_NEAR(est.K_up, 1.0, 1e-6);
  EXPECT_LE(est.k_low, est.K_up);
  EXPECT_EQ(est.injrad.route, "catalog");
  EXPECT_NEAR(est.injrad_low, kPi, 1e-15);
  EXPECT_EQ(est.convrad_low, est.injrad_low / 2);
}

TEST(Estimates, FlatTorus) {
  const auto s = make_flat_torus(1, 1);
  const double h = 0.01;
  const auto est = estimate_geometry(s, build_background_mesh(s, h));
  EXPECT_NEAR(est.D_up - 3 * h, std::sqrt(0.5), 3 * h);
  EXPECT_NEAR(est.v_low, 1.0, 1e-12);
  EXPECT_EQ(est.k_low, 0.0);
  EXPECT_EQ(est.K_up, 0.0);
  EXPECT_EQ(est.injrad_low, 0.5);
  EXPECT_EQ(est.convrad_low, 0.25);
}

TEST(Estimates, ParaboloidMaeda) {
  const auto s = paraboloid();
  const auto est = estimate_geometry(s, build_background_mesh(s, 0.1));
  EXPECT_NEAR(est.k_max_sampled, 4.0, 1e-9);
  EXPECT_EQ(est.injrad.route, "maeda");
  EXPECT_TRUE(est.injrad.certified);
  EXPECT_NEAR(est.injrad_low, kPi / 2, 1e-3);
}

TEST(Estimates, TorusHeuristic) {
  const auto s = make_torus(2, 1);
  const auto est = estimate_geometry(s, build_background_mesh(s, 0.1));
  EXPECT_EQ(est.injrad.route, "heuristic");
  EXPECT_FALSE(est.injrad.certified);
  // The meridians are closed geodesics of length 2*pi.
  EXPECT_NEAR(est.loop_half, kPi, 0.1 * kPi);
  EXPECT_NEAR(est.k_min_sampled, -1.0, 1e-6);
  EXPECT_NEAR(est.k_max_sampled, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(est.v_low, 4 * kPi * kPi * 2, 1e-3);
}

TEST(Estimates, EllipsoidKlingenberg) {
  const auto s = make_ellipsoid(1, 1.2, 1.5);
  const auto est = estimate_geometry(s, build_background_mesh(s, 0.08));
  EXPECT_EQ(est.injrad.route, "klingenberg");
  // Extremes sit at the axis endpoints: c^2/(a^2 b^2) and a^2/(b^2 c^2).
  EXPECT_NEAR(est.k_max_sampled, 1.5 * 1.5 / (1.2 * 1.2), 1e-6);
  EXPECT_NEAR(est.k_min_sampled, 1.0 / (1.2 * 1.2 * 1.5 * 1.5), 1e-6);
}

TEST(Estimates, DegenerateDomain) {
  auto s = make_flat_torus(1, 1);
  s.u1 = s.u0;
  EXPECT_THROW(estimate_geometry(s, BackgroundMesh{}), InvalidMetric);
  EXPECT_THROW(build_background_mesh(s, 0.1), InvalidMetric);
}

TEST(InjradBound, NoRuleApplies) {
  GeometryEstimates est;
  est.k_min_sampled = -1;
  est.k_max_sampled = 1;
  const auto b = injrad_lower_bound(est, false, Topology::unknown, std::nullopt);
  EXPECT_EQ(b.route, "none");
  EXPECT_EQ(b.value, 0.0);
}

TEST(ComparisonVolume, ClosedForms) {
  EXPECT_NEAR(comparison_volume(0, 1), kPi, 1e-15);
  EXPECT_NEAR(comparison_volume(1, kPi), 4 * kPi, 1e-12);
  EXPECT_NEAR(comparison_volume(1, 5), 4 * kPi, 1e-12);
  EXPECT_NEAR(comparison_volume(1, kPi / 4), 2 * kPi * (1 - std::sqrt(2.0) / 2), 1e-12);
  EXPECT_NEAR(comparison_volume(1, kPi / 4), 1.8403, 1e-4);
  EXPECT_NEAR(comparison_volume(-1, 1), 2 * kPi * (std::cosh(1.0) - 1), 1e-12);
}

TEST(ComparisonVolume, Monotonicity) {
  const std::vector<double> ks{-2, -1, -0.1, 0, 0.1, 1, 2};
  for (double k : ks) {
    double prev = 0;
    for (double r = 0.01; r < 3; r += 0.01) {
      const double v = comparison_volume(k, r);
      if (k > 0 && r * std::sqrt(k) >= kPi) EXPECT_GE(v, prev);
      else EXPECT_GT(v, prev);
      prev = v;
    }
  }
  for (double k : ks)
    for (double k2 : ks) {
      if (k > k2) continue;
      const double rmax = kPi / (2 * std::sqrt(std::max({k, k2, 0.0}) + 1e-300));
      for (double r = 0.01; r <= std::min(rmax, 5.0); r += 0.05)
        EXPECT_GE(comparison_volume(k, r), comparison_volume(k2, r));
    }
}

TEST(Bounds, Fixtures) {
  GeometryEstimates sphere;
  sphere.k_low = 1;
  sphere.D_up = kPi;
  EXPECT_EQ(packing_bound(sphere, kPi / 2), 6);
  EXPECT_EQ(packing_bound(sphere, 2 * kPi), 1);
  EXPECT_EQ(degree_bound(sphere, kPi / 4), 18);
  EXPECT_NEAR(degree_bound(sphere, 0.01), 25, 1);

  GeometryEstimates flat;
  flat.k_low = 0;
  flat.D_up = std::sqrt(0.5);
  EXPECT_EQ(packing_bound(flat, 0.3), 22);
  for (double eps : {0.01, 0.1, 0.3, 1.0}) EXPECT_EQ(degree_bound(flat, eps), 25);
  // A Ricci-type lower bound replaces the sectional one.
  EXPECT_EQ(packing_bound(flat, kPi / 2, 1.0), 1);
}

TEST(Bounds, NonIncreasingInEps) {
  for (double k : {0.0, 0.5, 1.0}) {
    GeometryEstimates est;
    est.k_low = k;
    est.D_up = 3.0;
    long prev_p = std::numeric_limits<long>::max(), prev_d = prev_p;
    for (double eps = 0.02; eps < 3; eps += 0.02) {
      EXPECT_LE(packing_bound(est, eps), prev_p);
      EXPECT_LE(degree_bound(est, eps), prev_d);
      prev_p = packing_bound(est, eps);
      prev_d = degree_bound(est, eps);
    }
  }
  // With negative curvature the packing bound still decreases; the degree
  // ratio V(5r)/V(r) grows with r in hyperbolic space.
  GeometryEstimates hyp;
  hyp.k_low = -1;
  hyp.D_up = 3.0;
  long prev = std::numeric_limits<long>::max();
  for (double eps = 0.02; eps < 3; eps += 0.02) {
    EXPECT_LE(packing_bound(hyp, eps), prev);
    prev = packing_bound(hyp, eps);
  }
  EXPECT_GT(degree_bound(hyp, 1.0), degree_bound(hyp, 0.1));
}
