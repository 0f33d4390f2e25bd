#include "fatlas/surface.hpp"

#include <algorithm>

namespace fatlas {

namespace {

double dsin(int i, double x) {
  switch (i % 4) {
    case 0: return std::sin(x);
    case 1: return std::cos(x);
    case 2: return -std::sin(x);
    default: return -std::cos(x);
  }
}

double dcos(int i, double x) { return dsin(i + 1, x); }

void require_domain(double u0, double u1, double v0, double v1) {
  if (!(u1 > u0) || !(v1 > v0))
    throw InvalidMetric("chart domain has zero extent", u0, v0);
}

void require_positive(std::initializer_list<double> values, const char* what) {
  for (double x : values)
    if (!(x > 0) || !std::isfinite(x)) throw Error(std::string(what) + ": parameters must be positive");
}

double wrap(double x, double lo, double width) {
  double r = std::fmod(x - lo, width);
  if (r < 0) r += width;
  if (r >= width) r -= width;
  return lo + r;
}

double wrap_delta(double d, double width) {
  d = std::fmod(d, width);
  if (d > width / 2) d -= width;
  if (d < -width / 2) d += width;
  return d;
}

MetricJet metric_from_embedding(const EmbeddingJet& j) {
  const auto& d = j.d;
  const Vec3 &eu = d[1][0], &ev = d[0][1], &euu = d[2][0], &euv = d[1][1], &evv = d[0][2];
  const Vec3 &euuu = d[3][0], &euuv = d[2][1], &euvv = d[1][2], &evvv = d[0][3];
  MetricJet m;
  m.E = {eu.dot(eu),
         2 * euu.dot(eu),
         2 * euv.dot(eu),
         2 * (euuu.dot(eu) + euu.dot(euu)),
         2 * (euuv.dot(eu) + euu.dot(euv)),
         2 * (euvv.dot(eu) + euv.dot(euv))};
  m.F = {eu.dot(ev),
         euu.dot(ev) + eu.dot(euv),
         euv.dot(ev) + eu.dot(evv),
         euuu.dot(ev) + 2 * euu.dot(euv) + eu.dot(euuv),
         euuv.dot(ev) + euu.dot(evv) + euv.dot(euv) + eu.dot(euvv),
         euvv.dot(ev) + 2 * euv.dot(evv) + eu.dot(evvv)};
  m.G = {ev.dot(ev),
         2 * euv.dot(ev),
         2 * evv.dot(ev),
         2 * (euuv.dot(ev) + euv.dot(euv)),
         2 * (euvv.dot(ev) + euv.dot(evv)),
         2 * (evvv.dot(ev) + evv.dot(evv))};
  return m;
}

MetricJet metric_by_differences(const std::function<Mat2(double, double)>& g, double u,
                                double v) {
  const double h = 1e-4;
  const Mat2 c = g(u, v);
  const Mat2 pu = g(u + h, v), mu = g(u - h, v), pv = g(u, v + h), mv = g(u, v - h);
  const Mat2 pp = g(u + h, v + h), pm = g(u + h, v - h), mp = g(u - h, v + h),
             mm = g(u - h, v - h);
  auto jet = [&](int a, int b) {
    Jet2 j;
    j.f = c(a, b);
    j.fu = (pu(a, b) - mu(a, b)) / (2 * h);
    j.fv = (pv(a, b) - mv(a, b)) / (2 * h);
    j.fuu = (pu(a, b) - 2 * c(a, b) + mu(a, b)) / (h * h);
    j.fvv = (pv(a, b) - 2 * c(a, b) + mv(a, b)) / (h * h);
    j.fuv = (pp(a, b) - pm(a, b) - mp(a, b) + mm(a, b)) / (4 * h * h);
    return j;
  };
  return {jet(0, 0), jet(0, 1), jet(1, 1)};
}

// Unit-sphere point for the two polar charts.
Vec3 polar_xi(int chart, double u, double v) {
  if (chart == 0) return {std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)};
  return {std::cos(u), std::sin(u) * std::cos(v), std::sin(u) * std::sin(v)};
}

Vec2 polar_params(int chart, const Vec3& xi) {
  const double twopi = 2 * kPi;
  if (chart == 0)
    return {std::acos(std::clamp(xi.z(), -1.0, 1.0)), wrap(std::atan2(xi.y(), xi.x()), 0, twopi)};
  return {std::acos(std::clamp(xi.x(), -1.0, 1.0)), wrap(std::atan2(xi.z(), xi.y()), 0, twopi)};
}

Eigen::Matrix<double, 3, 2> polar_jacobian(int chart, double u, double v) {
  Eigen::Matrix<double, 3, 2> j;
  if (chart == 0) {
    j.col(0) << std::cos(u) * std::cos(v), std::cos(u) * std::sin(v), -std::sin(u);
    j.col(1) << -std::sin(u) * std::sin(v), std::sin(u) * std::cos(v), 0;
  } else {
    j.col(0) << -std::sin(u), std::cos(u) * std::cos(v), std::cos(u) * std::sin(v);
    j.col(1) << 0, -std::sin(u) * std::sin(v), std::sin(u) * std::cos(v);
  }
  return j;
}

struct ChartState {
  int chart = 0;
  Vec2 x;
  Vec2 vel;
};

// Moves a state on a polar surface into whichever chart keeps it away from
// that chart's poles.
void switch_chart_if_needed(ChartState& st) {
  if (std::abs(std::sin(st.x[0])) >= 0.5) return;
  const int other = 1 - st.chart;
  const Vec3 xi = polar_xi(st.chart, st.x[0], st.x[1]);
  const Vec3 w = polar_jacobian(st.chart, st.x[0], st.x[1]) * st.vel;
  const Vec2 y = polar_params(other, xi);
  const auto jo = polar_jacobian(other, y[0], y[1]);
  st.vel = (jo.transpose() * jo).ldlt().solve(jo.transpose() * w);
  st.chart = other;
  st.x = y;
}

Vec2 to_main_chart(const ChartedSurface& s, const ChartState& st) {
  if (st.chart == 0) return normalize_chart(s, st.x);
  return normalize_chart(s, polar_params(0, polar_xi(1, st.x[0], st.x[1])));
}

Vec2 geodesic_accel(const ChartedSurface& s, int chart, const Vec2& x, const Vec2& vel) {
  const auto gamma = christoffel(metric_jet(s, x[0], x[1], chart));
  return {-vel.dot(gamma[0] * vel), -vel.dot(gamma[1] * vel)};
}

Vec2 integrate_geodesic(const ChartedSurface& s, const Vec2& p, const Vec2& dir, double length,
                        int steps) {
  ChartState st{0, p, dir};
  const double h = length / steps;
  using Vec4 = Eigen::Vector4d;
  auto rhs = [&](int chart, const Vec4& y) {
    const Vec2 x = y.head<2>(), vel = y.tail<2>();
    Vec4 out;
    out << vel, geodesic_accel(s, chart, x, vel);
    return out;
  };
  for (int k = 0; k < steps; ++k) {
    if (s.polar) switch_chart_if_needed(st);
    Vec4 y;
    y << st.x, st.vel;
    const Vec4 k1 = rhs(st.chart, y);
    const Vec4 k2 = rhs(st.chart, y + 0.5 * h * k1);
    const Vec4 k3 = rhs(st.chart, y + 0.5 * h * k2);
    const Vec4 k4 = rhs(st.chart, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    st.x = y.head<2>();
    st.vel = y.tail<2>();
  }
  return to_main_chart(s, st);
}

double endpoint_gap(const ChartedSurface& s, const Vec2& a, const Vec2& b) {
  if (s.embedded()) return (embed(s, a[0], a[1]) - embed(s, b[0], b[1])).norm();
  return chart_difference(s, a, b).norm();
}

// Chart in which q is regular, and q's coordinates there.
std::pair<int, Vec2> regular_chart(const ChartedSurface& s, const Vec2& q) {
  if (s.polar && std::abs(std::sin(q[0])) < 0.5)
    return {1, polar_params(1, polar_xi(0, q[0], q[1]))};
  return {0, q};
}

}  // namespace

double eval_poly(const std::vector<Monomial>& poly, double x, double y, int dx, int dy) {
  double total = 0;
  for (const auto& m : poly) {
    if (m.i < dx || m.j < dy) continue;
    double coef = m.c;
    for (int k = 0; k < dx; ++k) coef *= m.i - k;
    for (int k = 0; k < dy; ++k) coef *= m.j - k;
    total += coef * std::pow(x, m.i - dx) * std::pow(y, m.j - dy);
  }
  return total;
}

ChartedSurface make_ellipsoid(double a, double b, double c) {
  require_positive({a, b, c}, "ellipsoid");
  ChartedSurface s;
  s.kind = SurfaceKind::ellipsoid;
  s.tag = "ellipsoid";
  s.u0 = 0;
  s.u1 = kPi;
  s.v0 = 0;
  s.v1 = 2 * kPi;
  s.periodic_v = true;
  s.polar = true;
  s.compact = true;
  s.topology = Topology::sphere;
  s.params = {a, b, c};
  return s;
}

ChartedSurface make_sphere(double radius) {
  require_positive({radius}, "sphere");
  ChartedSurface s = make_ellipsoid(radius, radius, radius);
  s.kind = SurfaceKind::sphere;
  s.tag = "sphere";
  return s;
}

ChartedSurface make_torus(double R, double r) {
  require_positive({R, r}, "torus");
  if (!(R > r)) throw Error("torus: require R > r");
  ChartedSurface s;
  s.kind = SurfaceKind::torus;
  s.tag = "torus";
  s.u0 = 0;
  s.u1 = 2 * kPi;
  s.v0 = 0;
  s.v1 = 2 * kPi;
  s.periodic_u = s.periodic_v = true;
  s.compact = true;
  s.topology = Topology::torus;
  s.params = {R, r};
  return s;
}

ChartedSurface make_flat_torus(double L1, double L2) {
  require_domain(0, L1, 0, L2);
  ChartedSurface s;
  s.kind = SurfaceKind::flat_torus;
  s.tag = "flat_torus";
  s.u1 = L1;
  s.v1 = L2;
  s.periodic_u = s.periodic_v = true;
  s.compact = true;
  s.topology = Topology::torus;
  s.params = {L1, L2};
  return s;
}

ChartedSurface make_graph_surface(std::vector<Monomial> poly, double x0, double x1, double y0,
                                  double y1) {
  require_domain(x0, x1, y0, y1);
  for (const auto& m : poly)
    if (m.i < 0 || m.j < 0) throw Error("graph surface: negative exponent");
  ChartedSurface s;
  s.kind = SurfaceKind::graph;
  s.tag = "graph";
  s.u0 = x0;
  s.u1 = x1;
  s.v0 = y0;
  s.v1 = y1;
  s.compact = false;
  s.topology = Topology::plane;
  s.poly = std::move(poly);
  return s;
}

ChartedSurface make_custom_surface(std::function<Mat2(double, double)> metric, double u0,
                                   double u1, double v0, double v1, bool periodic_u,
                                   bool periodic_v, bool compact, Topology topology) {
  require_domain(u0, u1, v0, v1);
  ChartedSurface s;
  s.kind = SurfaceKind::custom;
  s.tag = "custom";
  s.u0 = u0;
  s.u1 = u1;
  s.v0 = v0;
  s.v1 = v1;
  s.periodic_u = periodic_u;
  s.periodic_v = periodic_v;
  s.compact = compact;
  s.topology = topology;
  s.metric_fn = std::move(metric);
  return s;
}

EmbeddingJet embedding_jet(const ChartedSurface& s, double u, double v, int chart) {
  EmbeddingJet j;
  for (auto& row : j.d)
    for (auto& e : row) e.setZero();
  switch (s.kind) {
    case SurfaceKind::sphere:
    case SurfaceKind::ellipsoid: {
      const double a = s.params[0], b = s.params[1], c = s.params[2];
      for (int i = 0; i <= 3; ++i)
        for (int k = 0; i + k <= 3; ++k) {
          if (chart == 0)
            j.d[i][k] = Vec3(a * dsin(i, u) * dcos(k, v), b * dsin(i, u) * dsin(k, v),
                             k == 0 ? c * dcos(i, u) : 0.0);
          else
            j.d[i][k] = Vec3(k == 0 ? a * dcos(i, u) : 0.0, b * dsin(i, u) * dcos(k, v),
                             c * dsin(i, u) * dsin(k, v));
        }
      break;
    }
    case SurfaceKind::torus: {
      const double R = s.params[0], r = s.params[1];
      for (int i = 0; i <= 3; ++i)
        for (int k = 0; i + k <= 3; ++k) {
          const double rho = i == 0 ? R + r * std::cos(u) : r * dcos(i, u);
          j.d[i][k] = Vec3(rho * dcos(k, v), rho * dsin(k, v), k == 0 ? r * dsin(i, u) : 0.0);
        }
      break;
    }
    case SurfaceKind::graph: {
      for (int i = 0; i <= 3; ++i)
        for (int k = 0; i + k <= 3; ++k) j.d[i][k].z() = eval_poly(s.poly, u, v, i, k);
      j.d[0][0].x() = u;
      j.d[0][0].y() = v;
      j.d[1][0].x() = 1;
      j.d[0][1].y() = 1;
      break;
    }
    default:
      throw ContractError("surface has no embedding");
  }
  return j;
}

Vec3 embed(const ChartedSurface& s, double u, double v) { return embedding_jet(s, u, v).d[0][0]; }

Vec3 ambient_normal(const ChartedSurface& s, double u, double v) {
  if (s.polar) {
    // Gradient of the ellipsoid's implicit equation, which is outward like e_u x e_v.
    const Vec3 p = embed(s, u, v);
    const Vec3 g(p.x() / (s.params[0] * s.params[0]), p.y() / (s.params[1] * s.params[1]),
                 p.z() / (s.params[2] * s.params[2]));
    return g.normalized();
  }
  const EmbeddingJet j = embedding_jet(s, u, v);
  return j.d[1][0].cross(j.d[0][1]).normalized();
}

MetricJet metric_jet(const ChartedSurface& s, double u, double v, int chart) {
  if (chart != 0 && !s.polar) throw ContractError("only polar surfaces have a second chart");
  switch (s.kind) {
    case SurfaceKind::flat_torus: {
      MetricJet m;
      m.E.f = m.G.f = 1.0;
      return m;
    }
    case SurfaceKind::custom:
      return metric_by_differences(s.metric_fn, u, v);
    default:
      return metric_from_embedding(embedding_jet(s, u, v, chart));
  }
}

Mat2 metric_unchecked(const ChartedSurface& s, double u, double v) {
  if (s.kind == SurfaceKind::custom) return s.metric_fn(u, v);
  const MetricJet m = metric_jet(s, u, v);
  Mat2 g;
  g << m.E.f, m.F.f, m.F.f, m.G.f;
  return g;
}

Mat2 metric_at(const ChartedSurface& s, double u, double v) {
  const Mat2 g = metric_unchecked(s, u, v);
  const double tr = g.trace();
  if (!g.allFinite() || std::abs(g(0, 1) - g(1, 0)) > 1e-12 * std::max(1.0, tr) ||
      g(0, 0) <= 0 || g(1, 1) <= 0 || g.determinant() <= 1e-14 * tr * tr)
    throw InvalidMetric("metric is not symmetric positive definite", u, v);
  return g;
}

double gauss_curvature(const MetricJet& m) {
  const Jet2 &E = m.E, &F = m.F, &G = m.G;
  Eigen::Matrix3d a, b;
  a << -E.fvv / 2 + F.fuv - G.fuu / 2, E.fu / 2, F.fu - E.fv / 2,
       F.fv - G.fu / 2, E.f, F.f,
       G.fv / 2, F.f, G.f;
  b << 0, E.fv / 2, G.fu / 2,
       E.fv / 2, E.f, F.f,
       G.fu / 2, F.f, G.f;
  const double det = m.det();
  return (a.determinant() - b.determinant()) / (det * det);
}

double gauss_curvature(const ChartedSurface& s, double u, double v) {
  if (s.polar && std::abs(std::sin(u)) < 0.5) {
    const Vec2 y = polar_params(1, polar_xi(0, u, v));
    return gauss_curvature(metric_jet(s, y[0], y[1], 1));
  }
  return gauss_curvature(metric_jet(s, u, v));
}

std::array<Mat2, 2> christoffel(const MetricJet& m) {
  const Jet2 &E = m.E, &F = m.F, &G = m.G;
  const double d2 = 2 * m.det();
  std::array<Mat2, 2> gamma;
  const double uuu = (G.f * E.fu - 2 * F.f * F.fu + F.f * E.fv) / d2;
  const double vuu = (2 * E.f * F.fu - E.f * E.fv - F.f * E.fu) / d2;
  const double uuv = (G.f * E.fv - F.f * G.fu) / d2;
  const double vuv = (E.f * G.fu - F.f * E.fv) / d2;
  const double uvv = (2 * G.f * F.fv - G.f * G.fu - F.f * G.fv) / d2;
  const double vvv = (E.f * G.fv - 2 * F.f * F.fv + F.f * G.fu) / d2;
  gamma[0] << uuu, uuv, uuv, uvv;
  gamma[1] << vuu, vuv, vuv, vvv;
  return gamma;
}

Vec2 normalize_chart(const ChartedSurface& s, Vec2 p) {
  if (s.polar) {
    double u = wrap(p[0], 0, 2 * kPi);
    if (u > kPi) {
      u = 2 * kPi - u;
      p[1] += kPi;
    }
    p[0] = u;
  }
  if (s.periodic_u) p[0] = wrap(p[0], s.u0, s.width_u());
  if (s.periodic_v || s.polar) p[1] = wrap(p[1], s.v0, s.width_v());
  return p;
}

Vec2 chart_difference(const ChartedSurface& s, const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  if (s.periodic_u) d[0] = wrap_delta(d[0], s.width_u());
  if (s.periodic_v) d[1] = wrap_delta(d[1], s.width_v());
  return d;
}

Vec2 geodesic_shoot(const ChartedSurface& s, const Vec2& p, const Vec2& dir, double length) {
  if (length < 0) throw ContractError("geodesic_shoot: negative length");
  if (length == 0) return normalize_chart(s, p);
  if (s.kind == SurfaceKind::flat_torus) return normalize_chart(s, p + length * dir);
  int steps = 8;
  Vec2 coarse = integrate_geodesic(s, p, dir, length, steps);
  while (steps < (1 << 20)) {
    steps *= 2;
    const Vec2 fine = integrate_geodesic(s, p, dir, length, steps);
    if (endpoint_gap(s, coarse, fine) < 1e-7) return fine;
    coarse = fine;
  }
  throw Error("geodesic_shoot: step control failed to converge");
}

std::optional<LogMapResult> log_map(const ChartedSurface& s, const Vec2& p, const Vec2& q,
                                    std::optional<Vec2> guess) {
  const Vec2 d0 = chart_difference(s, p, q);
  if (s.kind == SurfaceKind::flat_torus) {
    const double len = d0.norm();
    if (len == 0) return LogMapResult{Vec2::Zero(), 0.0};
    return LogMapResult{d0 / len, len};
  }
  if (endpoint_gap(s, p, q) < 1e-14) return LogMapResult{Vec2::Zero(), 0.0};

  const Mat2 g = metric_at(s, p[0], p[1]);
  const auto [chart, qc] = regular_chart(s, q);
  auto residual = [&](const Vec2& w) -> Vec2 {
    const double len = std::sqrt(w.dot(g * w));
    const Vec2 end = len == 0 ? p : geodesic_shoot(s, p, w / len, len);
    Vec2 e = end;
    if (chart == 1) e = polar_params(1, polar_xi(0, end[0], end[1]));
    Vec2 r = e - qc;
    if (s.polar) r[1] = wrap_delta(r[1], 2 * kPi);
    if (s.periodic_u) r[0] = wrap_delta(r[0], s.width_u());
    if (s.periodic_v) r[1] = wrap_delta(r[1], s.width_v());
    return r;
  };

  // Default seed: for embedded surfaces the chord projected to the tangent
  // plane, which points the right way even across chart seams.
  double chord = kInf;
  Vec2 w = d0;
  if (s.embedded()) {
    const EmbeddingJet j = embedding_jet(s, p[0], p[1]);
    Eigen::Matrix<double, 3, 2> jac;
    jac << j.d[1][0], j.d[0][1];
    const Vec3 c = embed(s, q[0], q[1]) - j.d[0][0];
    chord = c.norm();
    const Vec2 t = (jac.transpose() * jac).ldlt().solve(jac.transpose() * c);
    const double tl = std::sqrt(t.dot(g * t));
    if (tl > 0 && std::isfinite(tl)) w = t * (chord / tl);
  }
  if (guess) w = *guess;
  Vec2 r = residual(w);
  for (int iter = 0; iter < 60; ++iter) {
    if (r.norm() < 1e-10) break;
    const double step = 1e-6 * std::max(1e-3, w.norm());
    Mat2 jac;
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e[k] = step;
      jac.col(k) = (residual(w + e) - residual(w - e)) / (2 * step);
    }
    if (!jac.allFinite() || std::abs(jac.determinant()) < 1e-14) return std::nullopt;
    const Vec2 delta = -jac.inverse() * r;
    double lambda = 1.0;
    bool improved = false;
    while (lambda > 1e-4) {
      const Vec2 trial = w + lambda * delta;
      const Vec2 rt = residual(trial);
      if (rt.norm() < r.norm()) {
        w = trial;
        r = rt;
        improved = true;
        break;
      }
      lambda /= 2;
    }
    if (!improved) break;
  }
  if (!(r.norm() < 1e-7)) return std::nullopt;
  const double len = std::sqrt(w.dot(g * w));
  // A geodesic much longer than the chord wraps around the surface.
  if (len > 3 * chord) return std::nullopt;
  if (len == 0) return LogMapResult{Vec2::Zero(), 0.0};
  return LogMapResult{w / len, len};
}

std::optional<double> catalog_injrad(const ChartedSurface& s) {
  switch (s.kind) {
    case SurfaceKind::sphere: return kPi * s.params[0];
    case SurfaceKind::flat_torus: return std::min(s.params[0], s.params[1]) / 2;
    default: return std::nullopt;
  }
}

std::optional<int> expected_euler(const ChartedSurface& s) {
  if (!s.compact) return std::nullopt;
  switch (s.topology) {
    case Topology::sphere: return 2;
    case Topology::torus: return 0;
    default: return std::nullopt;
  }
}

}  // namespace fatlas
