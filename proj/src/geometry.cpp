#include "fatlas/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace fatlas {

namespace {

struct Extreme {
  Vec2 at;
  double value;
};

Vec2 clamp_to_domain(const ChartedSurface& s, Vec2 p) {
  if (s.periodic_u) p = normalize_chart(s, p);
  else p[0] = std::clamp(p[0], s.u0, s.u1);
  if (s.periodic_v || s.polar) p = normalize_chart(s, p);
  else p[1] = std::clamp(p[1], s.v0, s.v1);
  return p;
}

// Compass search from a grid sample; sign = +1 maximizes, -1 minimizes.
Extreme refine(const ChartedSurface& s, Extreme e, double step_u, double step_v, double sign) {
  double su = step_u, sv = step_v;
  const Vec2 dirs[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (int iter = 0; iter < 400 && (su > 1e-10 * step_u || sv > 1e-10 * step_v); ++iter) {
    bool moved = false;
    for (const auto& d : dirs) {
      const Vec2 p = clamp_to_domain(s, e.at + Vec2(d[0] * su, d[1] * sv));
      const double k = gauss_curvature(s, p[0], p[1]);
      if (std::isfinite(k) && sign * k > sign * e.value) {
        e = {p, k};
        moved = true;
        break;
      }
    }
    if (!moved) {
      su /= 2;
      sv /= 2;
    }
  }
  return e;
}

// Direction of each vertex's first step away from the source, used to spot
// pairs of neighbouring vertices reached by geodesics leaving in very
// different directions: such pairs straddle the cut locus.
double cut_distance_from(const ChartedSurface& s, const BackgroundMesh& mesh, int source) {
  const DistanceField f = distance_field(mesh, {source});
  std::vector<int> order(mesh.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(f.dist[a], a) < std::tie(f.dist[b], b);
  });
  std::vector<int> first_hop(mesh.size(), -1);
  for (int v : order) {
    if (v == source || f.parent[v] < 0) continue;
    first_hop[v] = f.parent[v] == source ? v : first_hop[f.parent[v]];
  }
  const Vec2 src = mesh.coords[source];
  const Mat2 g = s.embedded() ? Mat2::Identity() : metric_unchecked(s, src[0], src[1]);
  std::vector<Vec3> dirs(mesh.size(), Vec3::Zero());
  for (std::size_t v = 0; v < mesh.size(); ++v) {
    if (first_hop[v] < 0) continue;
    const Vec2 hop = mesh.coords[first_hop[v]];
    Vec3 d;
    if (s.embedded()) {
      d = embed(s, hop[0], hop[1]) - embed(s, src[0], src[1]);
    } else {
      const Vec2 c = chart_difference(s, src, hop);
      const Eigen::LLT<Mat2> llt(g);
      const Vec2 w = llt.matrixU() * c;
      d = Vec3(w[0], w[1], 0);
    }
    dirs[v] = d.normalized();
  }
  const double near = 6 * mesh.h;
  double best = kInf;
  for (std::size_t v = 0; v < mesh.size(); ++v) {
    if (first_hop[v] < 0 || f.dist[v] < near) continue;
    for (std::size_t k = mesh.offsets[v]; k < mesh.offsets[v + 1]; ++k) {
      const int w = mesh.targets[k];
      if (first_hop[w] < 0 || f.dist[w] < near) continue;
      if (dirs[v].dot(dirs[w]) < 0) best = std::min(best, (f.dist[v] + f.dist[w]) / 2);
    }
  }
  return best;
}

std::vector<int> spread_sources(const BackgroundMesh& mesh, int count) {
  std::vector<int> out;
  const std::size_t n = mesh.size();
  for (int i = 0; i < count; ++i) out.push_back(static_cast<int>((n * (2 * i + 1)) / (2 * count)));
  return out;
}

}  // namespace

double surface_area(const ChartedSurface& s, int n) {
  const double du = s.width_u() / n, dv = s.width_v() / n;
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double acc = 0;
    for (int j = 0; j < n; ++j) {
      const Mat2 g = metric_unchecked(s, s.u0 + (i + 0.5) * du, s.v0 + (j + 0.5) * dv);
      acc += std::sqrt(std::max(0.0, g.determinant()));
    }
    rows[i] = acc * du * dv;
  });
  return std::accumulate(rows.begin(), rows.end(), 0.0);
}

GeometryEstimates estimate_geometry(const ChartedSurface& s, const BackgroundMesh& mesh,
                                    const EstimateOptions& options) {
  if (!(s.u1 > s.u0) || !(s.v1 > s.v0))
    throw InvalidMetric("chart domain has zero extent", s.u0, s.v0);
  GeometryEstimates est;
  est.v_low = surface_area(s, options.area_grid);

  const int n = options.curvature_grid;
  const double su = s.width_u() / n, sv = s.width_v() / n;
  Extreme lo{Vec2::Zero(), kInf}, hi{Vec2::Zero(), -kInf};
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Vec2 p(s.u0 + i * su, s.v0 + j * sv);
      const double k = gauss_curvature(s, p[0], p[1]);
      if (!std::isfinite(k)) continue;
      if (k < lo.value) lo = {p, k};
      if (k > hi.value) hi = {p, k};
    }
  if (!std::isfinite(lo.value)) throw InvalidMetric("curvature is not finite on the domain", s.u0, s.v0);
  lo = refine(s, lo, su, sv, -1);
  hi = refine(s, hi, su, sv, +1);
  est.k_min_sampled = lo.value;
  est.k_max_sampled = hi.value;
  est.fd_error = s.kind == SurfaceKind::custom
                     ? 1e-3 * std::max(1.0, std::max(std::abs(lo.value), std::abs(hi.value)))
                     : 0.0;
  const double range = hi.value - lo.value;
  est.k_low = lo.value - 0.05 * range - est.fd_error;
  est.K_up = hi.value + 0.05 * range + est.fd_error;

  std::vector<int> sources{0};
  {
    const DistanceField f = distance_field(mesh, {0});
    sources.push_back(static_cast<int>(
        std::max_element(f.dist.begin(), f.dist.end()) - f.dist.begin()));
  }
  for (int v : spread_sources(mesh, options.sweep_sources)) sources.push_back(v);
  std::vector<double> ecc(sources.size(), 0.0);
  parallel_for(sources.size(), [&](std::size_t i) {
    const DistanceField f = distance_field(mesh, {sources[i]});
    double m = 0;
    for (double d : f.dist)
      if (std::isfinite(d)) m = std::max(m, d);
    ecc[i] = m;
  });
  est.D_up = *std::max_element(ecc.begin(), ecc.end()) + 3 * mesh.h;

  const auto catalog = catalog_injrad(s);
  const bool klingenberg = s.compact && s.topology == Topology::sphere && est.k_min_sampled > 0;
  if (!catalog && s.compact && !klingenberg) {
    const auto loop_src = spread_sources(mesh, options.loop_sources);
    std::vector<double> cut(loop_src.size(), kInf);
    parallel_for(loop_src.size(), [&](std::size_t i) { cut[i] = cut_distance_from(s, mesh, loop_src[i]); });
    const double m = *std::min_element(cut.begin(), cut.end());
    est.loop_half = std::isfinite(m) ? m : 0.0;
  }
  est.injrad = injrad_lower_bound(est, s.compact, s.topology, catalog);
  est.injrad_low = est.injrad.value;
  est.convrad_low = est.injrad_low / 2;
  return est;
}

InjradBound injrad_lower_bound(const GeometryEstimates& est, bool compact, Topology topology,
                               std::optional<double> catalog) {
  if (catalog && *catalog > 0) return {*catalog, "catalog", true};
  const double kmax = est.k_max_sampled;
  const double conj = kmax > 0 ? kPi / std::sqrt(kmax) : kInf;
  if (!compact && topology == Topology::plane && est.k_min_sampled >= 0 && kmax > 0)
    return {conj, "maeda", true};
  if (compact && topology == Topology::sphere && est.k_min_sampled > 0)
    return {conj, "klingenberg", true};
  if (compact && est.loop_half > 0) return {std::min(conj, est.loop_half), "heuristic", false};
  return {};
}

double comparison_volume(double k, double r) {
  if (r <= 0) return 0.0;
  if (k == 0) return kPi * r * r;
  if (k > 0) {
    const double sk = std::sqrt(k);
    if (r * sk >= kPi) return 4 * kPi / k;
    return 2 * kPi / k * (1 - std::cos(r * sk));
  }
  const double sk = std::sqrt(-k);
  return 2 * kPi / -k * (std::cosh(r * sk) - 1);
}

long packing_bound(const GeometryEstimates& est, double eps, std::optional<double> ricci_low) {
  if (!(eps > 0)) throw ContractError("packing_bound: eps must be positive");
  const double k = ricci_low ? *ricci_low : est.k_low;  // n - 1 = 1 for surfaces
  const double ratio = comparison_volume(k, est.D_up) / comparison_volume(k, eps / 2);
  return std::max(1L, static_cast<long>(std::floor(ratio * (1 + 1e-12))));
}

long degree_bound(const GeometryEstimates& est, double eps) {
  if (!(eps > 0)) throw ContractError("degree_bound: eps must be positive");
  const double ratio =
      comparison_volume(est.k_low, 2.5 * eps) / comparison_volume(est.k_low, eps / 2);
  return std::max(1L, static_cast<long>(std::floor(ratio * (1 + 1e-12))));
}

}  // namespace fatlas
