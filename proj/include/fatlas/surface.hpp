#pragma once

#include "fatlas/common.hpp"

#include <array>
#include <optional>

namespace fatlas {

enum class SurfaceKind { sphere, ellipsoid, torus, flat_torus, graph, custom };
enum class Topology { unknown, sphere, torus, plane };

struct Monomial {
  int i = 0;  // power of x
  int j = 0;  // power of y
  double c = 0.0;
};

// Value and partial derivatives up to second order of a scalar field.
struct Jet2 {
  double f = 0, fu = 0, fv = 0, fuu = 0, fuv = 0, fvv = 0;
};

struct MetricJet {
  Jet2 E, F, G;
  double det() const { return E.f * G.f - F.f * F.f; }
};

// d[i][j] = partial derivative with i u-derivatives and j v-derivatives, i+j <= 3.
struct EmbeddingJet {
  std::array<std::array<Vec3, 4>, 4> d;
};

// A 2-manifold given by one rectangular chart and a metric tensor field.
// Polar charts (sphere, ellipsoid) collapse the rows u = u0 and u = u1 to single
// points; those surfaces carry a second, rotated chart used internally by the
// geodesic integrator so that no computation happens at a coordinate pole.
struct ChartedSurface {
  SurfaceKind kind = SurfaceKind::custom;
  std::string tag;
  double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
  bool periodic_u = false;
  bool periodic_v = false;
  bool polar = false;
  bool compact = false;
  Topology topology = Topology::unknown;
  std::vector<double> params;
  std::vector<Monomial> poly;  // graph surfaces: z = sum c x^i y^j
  std::function<Mat2(double, double)> metric_fn;  // custom surfaces

  bool embedded() const {
    return kind != SurfaceKind::flat_torus && kind != SurfaceKind::custom;
  }
  double width_u() const { return u1 - u0; }
  double width_v() const { return v1 - v0; }
};

ChartedSurface make_sphere(double radius);
ChartedSurface make_ellipsoid(double a, double b, double c);
// Tube angle u, toroidal angle v; R is the distance from the axis to the tube center.
ChartedSurface make_torus(double R, double r);
ChartedSurface make_flat_torus(double L1, double L2);
ChartedSurface make_graph_surface(std::vector<Monomial> poly, double x0, double x1, double y0,
                                  double y1);
ChartedSurface make_custom_surface(std::function<Mat2(double, double)> metric, double u0,
                                   double u1, double v0, double v1, bool periodic_u,
                                   bool periodic_v, bool compact, Topology topology);

double eval_poly(const std::vector<Monomial>& poly, double x, double y, int dx = 0, int dy = 0);

// First fundamental form. Throws InvalidMetric where it is not positive definite.
Mat2 metric_at(const ChartedSurface& s, double u, double v);
// Same without the definiteness check (valid at chart poles).
Mat2 metric_unchecked(const ChartedSurface& s, double u, double v);

// Metric and its derivatives: analytic for catalog surfaces, central
// differences for custom metrics. chart = 1 selects the rotated polar chart.
MetricJet metric_jet(const ChartedSurface& s, double u, double v, int chart = 0);

// Brioschi formula.
double gauss_curvature(const ChartedSurface& s, double u, double v);
double gauss_curvature(const MetricJet& m);

// Christoffel symbols gamma[k][i][j] in the chart.
std::array<Mat2, 2> christoffel(const MetricJet& m);

EmbeddingJet embedding_jet(const ChartedSurface& s, double u, double v, int chart = 0);
Vec3 embed(const ChartedSurface& s, double u, double v);
// Unit normal oriented like e_u x e_v; well defined at polar chart poles.
Vec3 ambient_normal(const ChartedSurface& s, double u, double v);

// Wraps periodic coordinates into the domain; for polar charts also reflects
// u across the poles.
Vec2 normalize_chart(const ChartedSurface& s, Vec2 p);
// Shortest chart displacement from a to b under the periodic identifications.
Vec2 chart_difference(const ChartedSurface& s, const Vec2& a, const Vec2& b);

// Point reached by the geodesic from p with initial chart direction `dir`
// (unit length in the metric at p) after arc length `length`. Classical RK4 on
// the geodesic equation; the step count doubles until halving the step moves
// the endpoint by less than 1e-7.
Vec2 geodesic_shoot(const ChartedSurface& s, const Vec2& p, const Vec2& dir, double length);

struct LogMapResult {
  Vec2 direction;  // unit in the metric at p
  double length = 0;
};

// Inverse of geodesic_shoot by damped Newton on the shooting residual.
// `guess` is an initial tangent vector (direction * length); by default the
// chart displacement is used. Returns nullopt when Newton fails to converge.
std::optional<LogMapResult> log_map(const ChartedSurface& s, const Vec2& p, const Vec2& q,
                                    std::optional<Vec2> guess = std::nullopt);

// Known injectivity radius for catalog members where it has a closed form.
std::optional<double> catalog_injrad(const ChartedSurface& s);
// Euler characteristic for compact surfaces with known topology.
std::optional<int> expected_euler(const ChartedSurface& s);

}  // namespace fatlas
