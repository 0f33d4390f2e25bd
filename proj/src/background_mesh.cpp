#include "fatlas/mesh.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <tuple>

namespace fatlas {

namespace {

struct RawEdge {
  int from, to;
  double length;
  Vec2 step;
};

// Metric length of the chart segment p + t*d, t in [0,1], by composite Simpson.
double segment_length(const ChartedSurface& s, const Vec2& p, const Vec2& d, int intervals) {
  auto speed = [&](double t) {
    const Vec2 x = p + t * d;
    const Mat2 g = metric_unchecked(s, x[0], x[1]);
    return std::sqrt(std::max(0.0, d.dot(g * d)));
  };
  const double hstep = 1.0 / intervals;
  double sum = speed(0) + speed(1);
  for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4 : 2) * speed(k * hstep);
  return sum * hstep / 3;
}

// Half of the primitive offsets with max-norm <= 3; the other half are negatives.
std::vector<std::pair<int, int>> half_stencil() {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      if (a == 0 && b <= 0) continue;
      if (std::gcd(a, std::abs(b)) != 1) continue;
      out.emplace_back(a, b);
    }
  return out;
}

void build_csr(BackgroundMesh& m, std::vector<RawEdge>& edges) {
  std::stable_sort(edges.begin(), edges.end(), [](const RawEdge& a, const RawEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  m.offsets.assign(m.size() + 1, 0);
  for (const auto& e : edges) ++m.offsets[e.from + 1];
  for (std::size_t i = 0; i < m.size(); ++i) m.offsets[i + 1] += m.offsets[i];
  m.targets.resize(edges.size());
  m.lengths.resize(edges.size());
  m.steps.resize(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    m.targets[k] = edges[k].to;
    m.lengths[k] = edges[k].length;
    m.steps[k] = edges[k].step;
  }
}

int axis_count(double width, double spacing, int minimum) {
  const int n = static_cast<int>(std::ceil(width / spacing - 1e-9));
  return std::max(n, minimum);
}

}  // namespace

int BackgroundMesh::index(int row, int col) const {
  if (polar) {
    if (row < 0) return 0;
    if (row >= rows) return 1;
    return 2 + row * cols + col;
  }
  return row * cols + col;
}

int BackgroundMesh::nearest_vertex(const ChartedSurface& s, const Vec2& p) const {
  if (coords.size() != static_cast<std::size_t>(rows * cols + (polar ? 2 : 0)))
    throw ContractError("nearest_vertex: grid lookup on a sub-mesh");
  const Vec2 q = normalize_chart(s, p);
  int r;
  if (polar) {
    const int i = static_cast<int>(std::lround((q[0] - s.u0) / du));
    if (i <= 0) return 0;
    if (i > rows) return 1;
    r = i - 1;
  } else {
    r = static_cast<int>(std::lround((q[0] - s.u0) / du));
    r = s.periodic_u ? ((r % rows) + rows) % rows : std::clamp(r, 0, rows - 1);
  }
  int c = static_cast<int>(std::lround((q[1] - s.v0) / dv));
  c = (s.periodic_v || polar) ? ((c % cols) + cols) % cols : std::clamp(c, 0, cols - 1);
  return index(r, c);
}

BackgroundMesh build_background_mesh(const ChartedSurface& s, double h) {
  if (!(s.u1 > s.u0) || !(s.v1 > s.v0))
    throw InvalidMetric("chart domain has zero extent", s.u0, s.v0);
  if (!(h > 0)) throw ContractError("mesh resolution must be positive");

  double max_e = 0, max_g = 0;
  const int probe = 64;
  for (int i = 0; i <= probe; ++i)
    for (int j = 0; j <= probe; ++j) {
      const double u = s.u0 + s.width_u() * i / probe, v = s.v0 + s.width_v() * j / probe;
      const Mat2 g = metric_unchecked(s, u, v);
      if (!g.allFinite()) throw InvalidMetric("metric is not finite", u, v);
      max_e = std::max(max_e, g(0, 0));
      max_g = std::max(max_g, g(1, 1));
    }
  if (!(max_e > 0) || !(max_g > 0)) throw InvalidMetric("metric vanishes on the domain", s.u0, s.v0);

  BackgroundMesh m;
  m.h = h;
  m.polar = s.polar;
  const bool per_u = s.periodic_u, per_v = s.periodic_v || s.polar;
  const int nu = axis_count(s.width_u(), h / std::sqrt(max_e), s.polar || per_u ? 8 : 2);
  const int nv = axis_count(s.width_v(), h / std::sqrt(max_g), per_v ? 8 : 2);
  m.du = s.width_u() / nu;
  m.dv = s.width_v() / nv;
  m.cols = per_v ? nv : nv + 1;
  if (s.polar)
    m.rows = nu - 1;
  else
    m.rows = per_u ? nu : nu + 1;
  const int first_row = s.polar ? 1 : 0;

  if (s.polar) {
    m.coords.emplace_back(s.u0, s.v0);
    m.coords.emplace_back(s.u1, s.v0);
  }
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c)
      m.coords.emplace_back(s.u0 + (r + first_row) * m.du, s.v0 + c * m.dv);

  std::vector<RawEdge> edges;
  const auto stencil = half_stencil();
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) {
      const int from = m.index(r, c);
      for (auto [a, b] : stencil) {
        int r2 = r + a, c2 = c + b;
        if (per_u) r2 = ((r2 % m.rows) + m.rows) % m.rows;
        else if (r2 < 0 || r2 >= m.rows) continue;
        if (per_v) c2 = ((c2 % m.cols) + m.cols) % m.cols;
        else if (c2 < 0 || c2 >= m.cols) continue;
        const int to = m.index(r2, c2);
        const Vec2 step(a * m.du, b * m.dv);
        const double len = segment_length(s, m.coords[from], step, 4);
        edges.push_back({from, to, len, step});
        edges.push_back({to, from, len, -step});
      }
    }
  if (s.polar) {
    for (int pole = 0; pole < 2; ++pole)
      for (int k = 0; k < std::min(3, m.rows); ++k) {
        const int r = pole == 0 ? k : m.rows - 1 - k;
        for (int c = 0; c < m.cols; ++c) {
          const int to = m.index(r, c);
          const Vec2 start(pole == 0 ? s.u0 : s.u1, m.coords[to][1]);
          const Vec2 step = m.coords[to] - start;
          const double len = segment_length(s, start, step, 8);
          edges.push_back({pole, to, len, step});
          edges.push_back({to, pole, len, -step});
        }
      }
  }
  build_csr(m, edges);

  const int quad_rows = per_u ? m.rows : m.rows - 1;
  const int quad_cols = per_v ? m.cols : m.cols - 1;
  for (int r = 0; r < quad_rows; ++r)
    for (int c = 0; c < quad_cols; ++c) {
      const int a = m.index(r, c), b = m.index((r + 1) % m.rows, c),
                d = m.index(r, (c + 1) % m.cols), e = m.index((r + 1) % m.rows, (c + 1) % m.cols);
      m.triangles.push_back({a, b, e});
      m.triangles.push_back({a, e, d});
    }
  if (s.polar)
    for (int c = 0; c < m.cols; ++c) {
      const int c2 = (c + 1) % m.cols;
      m.triangles.push_back({0, m.index(0, c), m.index(0, c2)});
      m.triangles.push_back({1, m.index(m.rows - 1, c2), m.index(m.rows - 1, c)});
    }
  return m;
}

std::pair<BackgroundMesh, std::vector<int>> submesh(const BackgroundMesh& mesh,
                                                    const std::vector<char>& keep) {
  std::vector<int> new_id(mesh.size(), -1), old_id;
  for (std::size_t v = 0; v < mesh.size(); ++v)
    if (keep[v]) {
      new_id[v] = static_cast<int>(old_id.size());
      old_id.push_back(static_cast<int>(v));
    }
  BackgroundMesh sub;
  sub.h = mesh.h;
  sub.du = mesh.du;
  sub.dv = mesh.dv;
  sub.polar = mesh.polar;
  for (int v : old_id) sub.coords.push_back(mesh.coords[v]);
  std::vector<RawEdge> edges;
  for (int v : old_id)
    for (std::size_t k = mesh.offsets[v]; k < mesh.offsets[v + 1]; ++k)
      if (new_id[mesh.targets[k]] >= 0)
        edges.push_back({new_id[v], new_id[mesh.targets[k]], mesh.lengths[k], mesh.steps[k]});
  build_csr(sub, edges);
  for (const auto& t : mesh.triangles)
    if (new_id[t[0]] >= 0 && new_id[t[1]] >= 0 && new_id[t[2]] >= 0)
      sub.triangles.push_back({new_id[t[0]], new_id[t[1]], new_id[t[2]]});
  return {std::move(sub), std::move(old_id)};
}

DistanceField distance_field(const BackgroundMesh& mesh, const std::vector<int>& sources,
                             const std::vector<double>& offsets, double limit) {
  DistanceField f;
  f.dist.assign(mesh.size(), kInf);
  f.label.assign(mesh.size(), -1);
  f.parent.assign(mesh.size(), -1);
  using Key = std::tuple<double, int, int>;  // distance, label, vertex
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const int v = sources[i];
    const double d0 = offsets.empty() ? 0.0 : offsets[i];
    const int lab = static_cast<int>(i);
    if (d0 < f.dist[v] || (d0 == f.dist[v] && lab < f.label[v])) {
      f.dist[v] = d0;
      f.label[v] = lab;
      heap.emplace(d0, lab, v);
    }
  }
  while (!heap.empty()) {
    const auto [d, lab, v] = heap.top();
    heap.pop();
    if (d != f.dist[v] || lab != f.label[v]) continue;
    for (std::size_t k = mesh.offsets[v]; k < mesh.offsets[v + 1]; ++k) {
      const int w = mesh.targets[k];
      const double nd = d + mesh.lengths[k];
      if (nd > limit) continue;
      if (nd < f.dist[w] || (nd == f.dist[w] && lab < f.label[w])) {
        f.dist[w] = nd;
        f.label[w] = lab;
        f.parent[w] = v;
        heap.emplace(nd, lab, w);
      }
    }
  }
  return f;
}

DistanceField distance_field(const BackgroundMesh& mesh, const std::vector<int>& sources,
                             double limit) {
  return distance_field(mesh, sources, {}, limit);
}

void relax_from(const BackgroundMesh& mesh, int source, std::vector<double>& dist) {
  using Key = std::pair<double, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  dist[source] = 0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d != dist[v]) continue;
    for (std::size_t k = mesh.offsets[v]; k < mesh.offsets[v + 1]; ++k) {
      const int w = mesh.targets[k];
      const double nd = d + mesh.lengths[k];
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
}

std::vector<double> geodesic_distance_field(const ChartedSurface& s, const BackgroundMesh& mesh,
                                            const std::vector<Vec2>& sources) {
  std::vector<int> ids;
  for (const auto& p : sources) ids.push_back(mesh.nearest_vertex(s, p));
  return distance_field(mesh, ids).dist;
}

}  // namespace fatlas
