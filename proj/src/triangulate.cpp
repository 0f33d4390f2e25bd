#include "fatlas/triangulate.hpp"

#include "fatlas/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>

namespace fatlas {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Neighbours along grid-triangle edges (no long stencil jumps).
std::vector<std::vector<int>> triangle_graph(const BackgroundMesh& mesh) {
  std::vector<std::vector<int>> nb(mesh.size());
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      nb[t[i]].push_back(t[(i + 1) % 3]);
      nb[t[(i + 1) % 3]].push_back(t[i]);
    }
  for (auto& v : nb) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return nb;
}

Vec2 chart_of(const Point& p) { return {p[0], p[1]}; }

// Tangent frame (e1, e2) with e1 x e2 along the surface normal.
std::pair<Vec3, Vec3> tangent_frame(const ChartedSurface& s, const Vec2& at) {
  if (!s.embedded()) return {Vec3::UnitX(), Vec3::UnitY()};
  const Vec3 n = ambient_normal(s, at[0], at[1]);
  int k = 0;
  n.cwiseAbs().minCoeff(&k);
  const Vec3 axis = Vec3::Unit(k);
  const Vec3 e1 = (axis - axis.dot(n) * n).normalized();
  return {e1, n.cross(e1)};
}

Vec3 offset_from(const ChartedSurface& s, const Vec2& ref, const Vec2& p) {
  if (s.embedded()) return embed(s, p[0], p[1]) - embed(s, ref[0], ref[1]);
  const Vec2 d = chart_difference(s, ref, p);
  return {d[0], d[1], 0};
}

// Cell labels of a corner cluster sorted by angle around its centroid.
std::vector<int> cyclic_order(const ChartedSurface& s, const BackgroundMesh& mesh,
                              const std::vector<int>& label, const std::vector<int>& tris) {
  std::vector<int> verts;
  for (int t : tris)
    for (int v : mesh.triangles[t]) verts.push_back(v);
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  const Vec2 ref = mesh.coords[verts.front()];
  const auto [e1, e2] = tangent_frame(s, ref);
  Vec3 center = Vec3::Zero();
  std::map<int, std::pair<Vec3, int>> sums;
  for (int v : verts) {
    const Vec3 d = offset_from(s, ref, mesh.coords[v]);
    center += d;
    auto& [sum, count] = sums[label[v]];
    if (count == 0) sum = Vec3::Zero();
    sum += d;
    ++count;
  }
  center /= static_cast<double>(verts.size());
  std::vector<std::pair<double, int>> angles;
  for (const auto& [l, sc] : sums) {
    const Vec3 d = sc.first / sc.second - center;
    angles.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), l);
  }
  std::sort(angles.begin(), angles.end());
  std::vector<int> out;
  for (const auto& a : angles) out.push_back(a.second);
  return out;
}

// Sign of a realized triangle against the surface normal at its first vertex.
int normal_sign(const ChartedSurface& s, const std::vector<Point>& pts, const Vec2& chart) {
  if (pts.front().size() == 2) return orientation_sign(pts);
  const Vec3 a = pts[0], b = pts[1], c = pts[2];
  const double d = (b - a).cross(c - a).dot(ambient_normal(s, chart[0], chart[1]));
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

std::vector<int> flatten(const std::vector<Simplex>& faces) {
  std::vector<int> out;
  for (const auto& f : faces) out.insert(out.end(), f.begin(), f.end());
  return out;
}

class Timer {
 public:
  explicit Timer(std::vector<StageTiming>& out) : out_(out) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    for (auto& t : out_)
      if (t.stage == stage) {
        t.seconds += dt;
        return;
      }
    out_.push_back({stage, dt});
  }

 private:
  std::vector<StageTiming>& out_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Accepted {
  EpsilonNet net;
  NerveResult nerve;
};

// One eps level: unperturbed Voronoi, then once with perturbed centers.
std::optional<Accepted> try_level(const ChartedSurface& s, const BackgroundMesh& mesh,
                                  const EpsilonNet& net, std::uint64_t seed, int level,
                                  const NerveOptions& options, std::vector<RetryAttempt>& trace) {
  for (bool perturbed : {false, true}) {
    std::vector<double> offsets;
    if (perturbed) {
      Rng rng(seed ^ (0x5EEDull + static_cast<std::uint64_t>(level)));
      for (std::size_t k = 0; k < net.size(); ++k) offsets.push_back(rng.uniform(0, mesh.h / 10));
    }
    const auto partition = geodesic_voronoi(s, mesh, net, offsets);
    NerveResult nerve = nerve_complex(partition, net, options);
    trace.push_back({net.eps, mesh.h, net.size(), perturbed, "nerve", nerve.failure, nerve.witness});
    if (nerve.ok) return Accepted{net, std::move(nerve)};
  }
  return std::nullopt;
}

double choose_eps(const PipelineConfig& config, const GeometryEstimates& est) {
  if (config.eps) return *config.eps;
  if (!(est.convrad_low > 0))
    throw ConfigError("eps = auto needs an injectivity radius bound and none applies");
  return est.convrad_low * config.safety;
}

NerveOptions nerve_options(const ChartedSurface& s) {
  NerveOptions o;
  o.expected_euler = expected_euler(s);
  if (!s.compact) {
    o.allow_boundary = true;
    if (s.topology == Topology::plane) o.expected_euler = 1;
  }
  return o;
}

double edge_distortion(const ChartedSurface& s, const SimplicialComplex& nerve) {
  if (!s.embedded()) return 0.0;
  std::vector<Simplex> edges = faces(nerve, 1);
  std::vector<double> err(edges.size(), 0.0);
  parallel_for(edges.size(), [&](std::size_t i) {
    const Vec2 a = chart_of(nerve.vertices[edges[i][0]]), b = chart_of(nerve.vertices[edges[i][1]]);
    const auto lm = log_map(s, a, b);
    if (!lm || lm->length <= 0) return;
    const double chord = (embed(s, a[0], a[1]) - embed(s, b[0], b[1])).norm();
    err[i] = std::abs(chord - lm->length) / lm->length;
  });
  return edges.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
}

}  // namespace

GeometryEstimates pipeline_estimates(const ChartedSurface& s, const PipelineConfig& config) {
  const double h = config.h ? *config.h : std::sqrt(surface_area(s, 200) / 20000);
  return estimate_geometry(s, build_background_mesh(s, h));
}

void validate_pipeline_config(const PipelineConfig& config) {
  if (!(config.safety > 0 && config.safety <= 1)) throw ConfigError("safety must lie in (0, 1]");
  if (config.eps && !(*config.eps > 0)) throw ConfigError("eps must be positive");
  if (config.h && !(*config.h > 0)) throw ConfigError("h must be positive");
  if (config.eps && config.h && *config.h > *config.eps / 20 * (1 + 1e-12))
    throw ConfigError("h must not exceed eps / 20");
  if (config.max_shrinks < 0) throw ConfigError("max_shrinks must be non-negative");
  if (config.max_move && !(*config.max_move > 0)) throw ConfigError("max_move must be positive");
}

bool VoronoiPartition::cells_connected() const {
  return std::all_of(components.begin(), components.end(), [](int c) { return c == 1; });
}

VoronoiPartition geodesic_voronoi(const ChartedSurface& s, const BackgroundMesh& mesh,
                                  const EpsilonNet& net, const std::vector<double>& offsets) {
  if (net.size() == 0) throw ContractError("geodesic_voronoi: empty net");
  const DistanceField f = offsets.empty() ? distance_field(mesh, net.vertices)
                                          : distance_field(mesh, net.vertices, offsets);
  VoronoiPartition p;
  p.label = f.label;
  p.dist = f.dist;
  for (std::size_t v = 0; v < mesh.size(); ++v)
    if (p.label[v] < 0) throw ContractError("geodesic_voronoi: mesh vertex unreachable from the net");

  const auto nb = triangle_graph(mesh);
  // Pieces of a cell that are not triangle-connected to its center come from
  // long stencil edges; small ones go to the neighbouring cell they touch most.
  std::vector<int> comp(mesh.size());
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<int> sizes;
    std::vector<char> has_center;
    std::fill(comp.begin(), comp.end(), -1);
    for (std::size_t v = 0; v < mesh.size(); ++v) {
      if (comp[v] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      sizes.push_back(0);
      has_center.push_back(0);
      std::vector<int> stack{static_cast<int>(v)};
      comp[v] = id;
      while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        ++sizes[id];
        if (x == net.vertices[p.label[x]]) has_center[id] = 1;
        for (int w : nb[x])
          if (comp[w] < 0 && p.label[w] == p.label[x]) {
            comp[w] = id;
            stack.push_back(w);
          }
      }
    }
    std::vector<int> cell_size(net.size(), 0);
    for (std::size_t v = 0; v < mesh.size(); ++v) ++cell_size[p.label[v]];
    std::vector<std::map<int, int>> touching(sizes.size());
    for (std::size_t v = 0; v < mesh.size(); ++v)
      for (int w : nb[v])
        if (p.label[w] != p.label[v]) ++touching[comp[v]][p.label[w]];
    std::vector<int> target(sizes.size(), -1);
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (has_center[c] || touching[c].empty()) continue;
      int best = -1, count = 0;
      for (const auto& [l, n] : touching[c])
        if (n > count) best = l, count = n;
      target[c] = best;
    }
    bool changed = false;
    for (std::size_t v = 0; v < mesh.size(); ++v) {
      const int c = comp[v];
      if (target[c] >= 0 && 20 * sizes[c] < cell_size[p.label[v]]) {
        p.label[v] = target[c];
        ++p.reassigned;
        changed = true;
      }
    }
    if (!changed) break;
  }

  std::set<Edge> adjacency;
  for (std::size_t v = 0; v < mesh.size(); ++v)
    for (int w : nb[v]) {
      const int a = p.label[v], b = p.label[w];
      if (a != b) adjacency.emplace(std::min(a, b), std::max(a, b));
    }
  p.adjacency.assign(adjacency.begin(), adjacency.end());

  p.components.assign(net.size(), 0);
  std::vector<char> seen(mesh.size(), 0);
  std::vector<int> stack;
  for (std::size_t v = 0; v < mesh.size(); ++v) {
    if (seen[v]) continue;
    ++p.components[p.label[v]];
    seen[v] = 1;
    stack.assign(1, static_cast<int>(v));
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int w : nb[x])
        if (!seen[w] && p.label[w] == p.label[x]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
  }

  std::vector<int> multi;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int a = p.label[tri[0]], b = p.label[tri[1]], c = p.label[tri[2]];
    if (a != b && b != c && a != c) multi.push_back(static_cast<int>(t));
  }
  UnionFind uf(multi.size());
  std::vector<int> owner(mesh.size(), -1);
  for (std::size_t i = 0; i < multi.size(); ++i)
    for (int v : mesh.triangles[multi[i]]) {
      if (owner[v] < 0) owner[v] = static_cast<int>(i);
      else uf.unite(owner[v], static_cast<int>(i));
    }
  std::map<int, std::vector<int>> clusters;
  for (std::size_t i = 0; i < multi.size(); ++i)
    clusters[uf.find(static_cast<int>(i))].push_back(multi[i]);
  for (auto& [root, tris] : clusters) {
    VoronoiCorner c;
    c.triangles = std::move(tris);
    for (int t : c.triangles)
      for (int v : mesh.triangles[t]) c.labels.push_back(p.label[v]);
    std::sort(c.labels.begin(), c.labels.end());
    c.labels.erase(std::unique(c.labels.begin(), c.labels.end()), c.labels.end());
    c.cycle = cyclic_order(s, mesh, p.label, c.triangles);
    p.corners.push_back(std::move(c));
  }
  return p;
}

NerveResult nerve_complex(const VoronoiPartition& partition, const EpsilonNet& net,
                          const NerveOptions& options) {
  NerveResult r;
  const int n = static_cast<int>(net.size());
  std::vector<Point> verts;
  for (const auto& c : net.centers) verts.push_back(Point(c));
  const std::set<Edge> adjacency(partition.adjacency.begin(), partition.adjacency.end());
  auto adjacent = [&](int a, int b) { return adjacency.count({std::min(a, b), std::max(a, b)}) > 0; };

  std::vector<std::vector<int>> tris;
  for (const auto& corner : partition.corners) {
    const auto& cyc = corner.cycle;
    const int k = static_cast<int>(cyc.size());
    if (k == 3) {
      tris.push_back(cyc);
      continue;
    }
    // Fan from the apex whose diagonals are most often real cell adjacencies.
    int apex = 0, best = -1;
    for (int a = 0; a < k; ++a) {
      int score = 0;
      for (int j = 2; j < k - 1; ++j) score += adjacent(cyc[a], cyc[(a + j) % k]);
      if (score > best) {
        best = score;
        apex = a;
      }
    }
    for (int i = 1; i + 1 < k; ++i)
      tris.push_back({cyc[apex], cyc[(apex + i) % k], cyc[(apex + i + 1) % k]});
    ++r.fanned_corners;
  }

  auto fail = [&](std::string why, std::vector<int> witness) {
    r.ok = false;
    r.failure = std::move(why);
    r.witness = std::move(witness);
    return r;
  };
  if (tris.empty()) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return fail("no corner where three cells meet", all);
  }
  std::set<std::vector<int>> seen;
  for (const auto& t : tris) {
    std::vector<int> key = t;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) return fail("duplicate triangle", key);
  }

  r.complex = make_complex(2, verts, tris);
  const std::vector<int> hint = r.complex.orientation;
  r.validation = validate_closed_pseudomanifold(r.complex, options.allow_boundary);
  r.euler = r.validation.euler;
  if (!r.validation.valid()) {
    std::vector<int> w = flatten(r.validation.bad_facets);
    w.insert(w.end(), r.validation.bad_vertices.begin(), r.validation.bad_vertices.end());
    std::string why = !r.validation.facets_ok ? "edge not in exactly two triangles"
                      : !r.validation.links_ok ? "vertex link is not a single cycle"
                                               : "nerve is disconnected";
    return fail(why, w);
  }
  if (!partition.cells_connected()) {
    std::vector<int> w;
    for (int k = 0; k < n; ++k)
      if (partition.components[k] != 1) w.push_back(k);
    return fail("disconnected Voronoi cell", w);
  }
  auto orient = consistent_orientation(r.complex);
  if (!orient) return fail("nerve is not orientable", {});
  std::size_t agree = 0;
  for (std::size_t i = 0; i < hint.size(); ++i) agree += (*orient)[i] == hint[i];
  if (2 * agree < hint.size())
    for (int& o : *orient) o = -o;
  r.complex.orientation = *orient;
  if (options.expected_euler && r.euler != *options.expected_euler)
    return fail("Euler characteristic " + std::to_string(r.euler) + ", expected " +
                    std::to_string(*options.expected_euler),
                {static_cast<int>(r.euler)});

  std::vector<char> used(n, 0);
  for (const auto& t : r.complex.simplices)
    for (int v : t) used[v] = 1;
  std::vector<int> unused;
  for (int k = 0; k < n; ++k)
    if (!used[k]) unused.push_back(k);
  if (!unused.empty() && !options.allow_boundary) return fail("center in no triangle", unused);
  r.dropped_centers = unused;
  if (!unused.empty()) {
    std::vector<int> index(n, -1);
    std::vector<Point> kept;
    for (int k = 0; k < n; ++k)
      if (used[k]) {
        index[k] = static_cast<int>(kept.size());
        kept.push_back(r.complex.vertices[k]);
        r.vertex_centers.push_back(k);
      }
    r.complex.vertices = std::move(kept);
    for (auto& t : r.complex.simplices)
      for (int& v : t) v = index[v];
  } else {
    r.vertex_centers.resize(n);
    std::iota(r.vertex_centers.begin(), r.vertex_centers.end(), 0);
  }

  std::set<Edge> nerve_edges;
  for (const auto& e : faces(r.complex, 1))
    nerve_edges.emplace(r.vertex_centers[e[0]], r.vertex_centers[e[1]]);
  for (const auto& e : adjacency) r.unused_adjacencies += nerve_edges.count(e) == 0;
  r.ok = true;
  return r;
}

SimplicialComplex realize_coordinates(const SimplicialComplex& complex, const ChartedSurface& s) {
  if (complex.dim != 2) throw ContractError("realize_coordinates: expected a 2-complex");
  if (!s.embedded() && s.kind != SurfaceKind::flat_torus)
    throw ContractError("realize_coordinates: custom metrics have no Euclidean realization");
  for (std::size_t i = 0; i < complex.size(); ++i)
    if (permutation_sign(complex.simplices[i]) == 0)
      throw ContractError("realize_coordinates: simplex " + std::to_string(i) +
                          " has a repeated vertex");
  SimplicialComplex out = complex;
  out.realized.clear();
  if (s.embedded()) {
    for (std::size_t v = 0; v < complex.vertices.size(); ++v) {
      const Vec2 c = chart_of(complex.vertices[v]);
      out.vertices[v] = Point(embed(s, c[0], c[1]));
    }
  } else {
    const double tol = 1e-9 * std::max(s.width_u(), s.width_v());
    for (std::size_t i = 0; i < complex.size(); ++i) {
      const auto& t = complex.simplices[i];
      const Vec2 base = chart_of(complex.vertices[t[0]]);
      std::vector<Point> pts;
      for (int v : t) pts.push_back(Point(base + chart_difference(s, base, chart_of(complex.vertices[v]))));
      for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = a + 1; b < t.size(); ++b) {
          const Vec2 want = chart_difference(s, chart_of(complex.vertices[t[a]]),
                                             chart_of(complex.vertices[t[b]]));
          if ((Vec2(pts[b] - pts[a]) - want).norm() > tol)
            throw ContractError("realize_coordinates: simplex " + std::to_string(i) +
                                " does not unwrap consistently");
        }
      out.realized.push_back(std::move(pts));
    }
  }

  std::size_t agree = 0;
  if (out.orientation.empty()) out.orientation.assign(out.size(), 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto pts = out.simplex_points(i);
    const double diam = simplex_diameter(pts);
    if (!(simplex_volume(pts) > 1e-12 * diam * diam))
      throw ContractError("realize_coordinates: realized simplex " + std::to_string(i) +
                          " is degenerate");
    agree += normal_sign(s, pts, chart_of(complex.vertices[complex.simplices[i][0]])) *
                 out.orientation[i] > 0;
  }
  if (2 * agree < out.size())
    for (int& o : out.orientation) o = -o;
  return out;
}

PipelineResult fat_triangulation_pipeline(const ChartedSurface& s, const PipelineConfig& config) {
  validate_pipeline_config(config);
  PipelineResult r;
  Timer timer(r.timings);
  r.est = pipeline_estimates(s, config);
  r.eps_auto = !config.eps;
  double eps = r.eps_requested = choose_eps(config, r.est);
  timer.lap("estimate");

  const NerveOptions nopt = nerve_options(s);
  std::optional<Accepted> accepted;
  BackgroundMesh mesh;
  for (int level = 0; level <= config.max_shrinks && !accepted; ++level) {
    const double h = config.h ? *config.h : eps / 20;
    if (level == 0 || !config.h) mesh = build_background_mesh(s, h);
    timer.lap("mesh");
    EpsilonNet net;
    try {
      net = farthest_point_net(s, mesh, eps, config.seed);
    } catch (const ResolutionError& e) {
      throw PipelineError("net", e.what(), {}, r.trace);
    }
    r.net_report = verify_net(net, mesh, r.est);
    timer.lap("net");
    if (!r.net_report.ok()) {
      const auto& nr = r.net_report;
      std::vector<int> w;
      std::string why;
      if (!nr.covering_ok()) why = "covering radius exceeds eps", w = {nr.covering_witness};
      else if (!nr.separation_ok())
        why = "centers closer than eps", w = {nr.separation_pair.first, nr.separation_pair.second};
      else if (!nr.packing_ok()) why = "net larger than the packing bound", w = {static_cast<int>(nr.n0)};
      else why = "pattern degree exceeds the degree bound", w = {nr.max_degree_center};
      r.trace.push_back({eps, mesh.h, net.size(), false, "net", why, w});
      throw PipelineError("net", why, w, r.trace);
    }
    accepted = try_level(s, mesh, net, config.seed, level, nopt, r.trace);
    timer.lap("nerve");
    if (!accepted) eps *= 2.0 / 3.0;
  }
  if (!accepted) {
    const auto& last = r.trace.back();
    throw PipelineError("nerve", last.failure + " after " + std::to_string(config.max_shrinks) +
                                     " shrinks", last.witness, r.trace);
  }
  r.eps = accepted->net.eps;
  r.h = mesh.h;
  r.net = std::move(accepted->net);
  r.nerve = std::move(accepted->nerve);

  try {
    r.realized = realize_coordinates(r.nerve.complex, s);
  } catch (const ContractError& e) {
    throw PipelineError("realize", e.what(), {}, r.trace);
  }
  r.edge_distortion = edge_distortion(s, r.nerve.complex);
  timer.lap("realize");

  ThickenOptions topt;
  topt.budget = config.thicken_budget;
  topt.phi_target = config.phi_target;
  topt.max_move = config.max_move ? *config.max_move : r.eps / 5;
  topt.seed = config.seed;
  r.thickening = thicken(r.realized, topt);
  timer.lap("thicken");

  r.subdivided = barycentric_subdivision(r.thickening.complex);
  r.even = check_even_incidence(r.subdivided);
  if (!r.even.ok) throw PipelineError("even_incidence", "odd incidence after subdivision",
                                      flatten(r.even.offending), r.trace);
  r.coloring = chessboard_coloring(r.subdivided);
  if (!r.coloring.ok)
    throw PipelineError("coloring", "no chessboard coloring", r.coloring.odd_cycle, r.trace);
  r.subdivided.colors = r.coloring.colors;
  r.final_thickness = thickness_report(r.subdivided, config.phi0);
  timer.lap("subdivide");
  return r;
}

ExhaustionReport exhaustion_demo(const ChartedSurface& s, const Vec2& base,
                                 const std::vector<double>& radii, const PipelineConfig& config) {
  validate_pipeline_config(config);
  if (radii.empty()) throw ConfigError("exhaustion needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw ConfigError("radii must be positive and strictly increasing");
  ExhaustionReport rep;
  const GeometryEstimates est = pipeline_estimates(s, config);
  rep.eps = choose_eps(config, est);
  rep.h = config.h ? *config.h : rep.eps / 20;
  const BackgroundMesh mesh = build_background_mesh(s, rep.h);
  rep.total = mesh.size();
  const auto d = distance_field(mesh, {mesh.nearest_vertex(s, base)}).dist;
  NerveOptions nopt;
  nopt.allow_boundary = true;
  nopt.expected_euler = 1;

  std::vector<char> prev(mesh.size(), 0), uni(mesh.size(), 0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    ExhaustionPiece piece;
    piece.radius = radii[i];
    std::vector<char> keep(mesh.size(), 0);
    for (std::size_t v = 0; v < mesh.size(); ++v) {
      keep[v] = d[v] <= radii[i];
      piece.vertices += keep[v];
      if (prev[v] && !keep[v]) piece.nested = false;
      uni[v] |= keep[v];
    }
    rep.nested = rep.nested && piece.nested;
    if (i > 0) rep.pieces.back().collar = piece.vertices - rep.pieces.back().vertices;
    prev = keep;

    const auto [sub, ids] = submesh(mesh, keep);
    double eps = rep.eps;
    std::vector<RetryAttempt> trace;
    std::optional<Accepted> acc;
    for (int level = 0; level <= config.max_shrinks && !acc && eps > 3 * sub.h; ++level) {
      const EpsilonNet net = farthest_point_net(s, sub, eps, config.seed);
      acc = try_level(s, sub, net, config.seed, level, nopt, trace);
      if (!acc) eps *= 2.0 / 3.0;
    }
    if (acc) {
      piece.ok = true;
      piece.eps = acc->net.eps;
      piece.n0 = acc->net.size();
      piece.dropped = acc->nerve.dropped_centers.size();
      piece.triangles = acc->nerve.complex.size();
      piece.euler = acc->nerve.euler;
      for (const auto& [facet, incident] : facet_incidence(acc->nerve.complex))
        piece.boundary_edges += incident.size() == 1;
      piece.phi_min = thickness_report(realize_coordinates(acc->nerve.complex, s)).phi_min;
    } else {
      piece.failure = trace.empty() ? "eps below mesh resolution" : trace.back().failure;
      piece.eps = eps;
    }
    piece.trace = std::move(trace);
    rep.pieces.push_back(piece);
  }
  rep.covered = static_cast<std::size_t>(std::count(uni.begin(), uni.end(), 1));
  return rep;
}

}  // namespace fatlas
