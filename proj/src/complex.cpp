#include "fatlas/complex.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

namespace fatlas {

std::size_t SimplicialComplex::ambient_dim() const {
  if (!realized.empty() && !realized.front().empty()) return realized.front().front().size();
  return vertices.empty() ? 0 : vertices.front().size();
}

std::vector<Point> SimplicialComplex::simplex_points(std::size_t i) const {
  if (!realized.empty()) return realized[i];
  std::vector<Point> pts;
  pts.reserve(simplices[i].size());
  for (int v : simplices[i]) pts.push_back(vertices[v]);
  return pts;
}

Simplex SimplicialComplex::oriented(std::size_t i) const {
  Simplex s = simplices[i];
  if (!orientation.empty() && orientation[i] < 0 && s.size() >= 2) std::swap(s[0], s[1]);
  return s;
}

int permutation_sign(std::vector<int> tuple) {
  int inversions = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = i + 1; j < tuple.size(); ++j) {
      if (tuple[i] == tuple[j]) return 0;
      if (tuple[i] > tuple[j]) ++inversions;
    }
  return inversions % 2 == 0 ? 1 : -1;
}

SimplicialComplex make_complex(int dim, std::vector<Point> vertices,
                               const std::vector<std::vector<int>>& ordered_simplices) {
  SimplicialComplex c;
  c.dim = dim;
  c.vertices = std::move(vertices);
  for (const auto& s : ordered_simplices) {
    if (static_cast<int>(s.size()) != dim + 1)
      throw ContractError("make_complex: simplex with wrong vertex count");
    for (int v : s)
      if (v < 0 || static_cast<std::size_t>(v) >= c.vertices.size())
        throw ContractError("make_complex: vertex index out of range");
    Simplex sorted = s;
    std::sort(sorted.begin(), sorted.end());
    c.simplices.push_back(sorted);
    c.orientation.push_back(permutation_sign(s) >= 0 ? 1 : -1);
  }
  return c;
}

std::vector<Simplex> faces(const SimplicialComplex& complex, int k) {
  std::set<Simplex> out;
  const int n = complex.dim;
  if (k < 0 || k > n) return {};
  std::vector<bool> pick(n + 1, false);
  std::fill(pick.begin(), pick.begin() + k + 1, true);
  for (const auto& s : complex.simplices) {
    std::vector<bool> sel = pick;
    do {
      Simplex f;
      for (int i = 0; i <= n; ++i)
        if (sel[i]) f.push_back(s[i]);
      out.insert(std::move(f));
    } while (std::prev_permutation(sel.begin(), sel.end()));
  }
  return {out.begin(), out.end()};
}

std::map<Simplex, std::vector<int>> facet_incidence(const SimplicialComplex& complex) {
  std::map<Simplex, std::vector<int>> inc;
  for (std::size_t i = 0; i < complex.simplices.size(); ++i) {
    const auto& s = complex.simplices[i];
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex f;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != drop) f.push_back(s[j]);
      inc[f].push_back(static_cast<int>(i));
    }
  }
  return inc;
}

long euler_characteristic(const SimplicialComplex& complex) {
  long chi = 0;
  for (int k = 0; k <= complex.dim; ++k) {
    const long fk = static_cast<long>(faces(complex, k).size());
    chi += (k % 2 == 0) ? fk : -fk;
  }
  return chi;
}

namespace {

// Position of the vertex of s that is not in facet f.
int dropped_position(const Simplex& s, const Simplex& f) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!std::binary_search(f.begin(), f.end(), s[i])) return static_cast<int>(i);
  return -1;
}

struct DualGraph {
  // neighbor simplex and the shared facet, for facets with exactly two cofaces
  std::vector<std::vector<std::pair<int, Simplex>>> adj;
};

DualGraph dual_graph(const SimplicialComplex& complex) {
  DualGraph g;
  g.adj.resize(complex.simplices.size());
  for (const auto& [facet, cofaces] : facet_incidence(complex)) {
    if (cofaces.size() != 2) continue;
    g.adj[cofaces[0]].emplace_back(cofaces[1], facet);
    g.adj[cofaces[1]].emplace_back(cofaces[0], facet);
  }
  return g;
}

}  // namespace

std::optional<std::vector<int>> consistent_orientation(const SimplicialComplex& complex) {
  const std::size_t m = complex.simplices.size();
  for (const auto& [facet, cofaces] : facet_incidence(complex))
    if (cofaces.size() > 2) return std::nullopt;
  const DualGraph g = dual_graph(complex);
  std::vector<int> orient(m, 0);
  for (std::size_t root = 0; root < m; ++root) {
    if (orient[root] != 0) continue;
    orient[root] = complex.orientation.empty() ? 1 : complex.orientation[root];
    std::queue<int> queue;
    queue.push(static_cast<int>(root));
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop();
      for (const auto& [t, facet] : g.adj[s]) {
        const int ps = dropped_position(complex.simplices[s], facet);
        const int pt = dropped_position(complex.simplices[t], facet);
        const int want = -orient[s] * (((ps + pt) % 2 == 0) ? 1 : -1);
        if (orient[t] == 0) {
          orient[t] = want;
          queue.push(t);
        } else if (orient[t] != want) {
          return std::nullopt;
        }
      }
    }
  }
  return orient;
}

PseudomanifoldReport validate_closed_pseudomanifold(const SimplicialComplex& complex,
                                                    bool allow_boundary) {
  PseudomanifoldReport r;
  for (int k = 0; k <= complex.dim; ++k)
    r.face_counts.push_back(static_cast<long>(faces(complex, k).size()));
  for (int k = 0; k <= complex.dim; ++k) r.euler += (k % 2 == 0) ? r.face_counts[k] : -r.face_counts[k];
  if (complex.simplices.empty()) return r;

  r.facets_ok = true;
  for (const auto& [facet, cofaces] : facet_incidence(complex)) {
    const bool boundary = cofaces.size() == 1;
    if (boundary) r.has_boundary = true;
    if (cofaces.size() == 2 || (boundary && allow_boundary)) continue;
    r.facets_ok = false;
    r.bad_facets.push_back(facet);
  }

  const DualGraph g = dual_graph(complex);
  std::vector<char> seen(complex.simplices.size(), 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop();
    for (const auto& [t, facet] : g.adj[s])
      if (!seen[t]) {
        seen[t] = 1;
        ++reached;
        queue.push(t);
      }
  }
  r.connected = reached == complex.simplices.size();
  r.orientable = r.facets_ok && consistent_orientation(complex).has_value();

  r.links_ok = true;
  if (complex.dim == 2) {
    // Link of each vertex: the opposite edges of its incident triangles must
    // form one cycle (or one path when boundary is allowed).
    std::map<int, std::vector<std::pair<int, int>>> links;
    for (const auto& s : complex.simplices)
      for (int i = 0; i < 3; ++i) links[s[i]].emplace_back(s[(i + 1) % 3], s[(i + 2) % 3]);
    for (const auto& [v, edges] : links) {
      std::map<int, std::vector<int>> adj;
      for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
      int odd = 0;
      bool bad = false;
      for (const auto& [w, nb] : adj) {
        if (nb.size() == 1) ++odd;
        else if (nb.size() != 2) bad = true;
      }
      if (odd != 0 && !(allow_boundary && odd == 2)) bad = true;
      // connectivity of the link
      std::set<int> visited;
      std::vector<int> stack{adj.begin()->first};
      while (!stack.empty()) {
        const int w = stack.back();
        stack.pop_back();
        if (!visited.insert(w).second) continue;
        for (int x : adj[w]) stack.push_back(x);
      }
      if (visited.size() != adj.size()) bad = true;
      if (bad) {
        r.links_ok = false;
        r.bad_vertices.push_back(v);
      }
    }
  }
  return r;
}

EvenIncidenceReport check_even_incidence(const SimplicialComplex& complex) {
  EvenIncidenceReport r;
  if (complex.dim < 2) return r;
  std::map<Simplex, int> count;
  const int n = complex.dim;
  std::vector<bool> pick(n + 1, false);
  std::fill(pick.begin(), pick.begin() + n - 1, true);
  for (const auto& s : complex.simplices) {
    std::vector<bool> sel = pick;
    do {
      Simplex f;
      for (int i = 0; i <= n; ++i)
        if (sel[i]) f.push_back(s[i]);
      ++count[f];
    } while (std::prev_permutation(sel.begin(), sel.end()));
  }
  for (const auto& [face, c] : count)
    if (c % 2 != 0) {
      r.ok = false;
      r.offending.push_back(face);
      r.counts.push_back(c);
    }
  return r;
}

SimplicialComplex barycentric_subdivision(const SimplicialComplex& complex) {
  const int n = complex.dim;
  SimplicialComplex out;
  out.dim = n;

  std::optional<std::vector<int>> orient;
  if (!complex.orientation.empty() && consistent_orientation(complex) == complex.orientation)
    orient = complex.orientation;
  else
    orient = consistent_orientation(complex);

  std::map<Simplex, int> barycenter_id;
  const bool realized = !complex.realized.empty();

  for (std::size_t si = 0; si < complex.simplices.size(); ++si) {
    const Simplex& s = complex.simplices[si];
    const std::vector<Point> pts = complex.simplex_points(si);
    std::vector<int> perm(n + 1);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<int> flag_vertices;
      std::vector<Point> flag_points;
      std::vector<int> positions;
      for (int k = 0; k <= n; ++k) {
        positions.push_back(perm[k]);
        Simplex face;
        Point bary = Point::Zero(pts.front().size());
        for (int p : positions) {
          face.push_back(s[p]);
          bary += pts[p];
        }
        bary /= static_cast<double>(positions.size());
        std::sort(face.begin(), face.end());
        auto [it, inserted] = barycenter_id.emplace(face, static_cast<int>(out.vertices.size()));
        if (inserted) {
          out.vertices.push_back(bary);
          out.vertex_types.push_back(k);
        }
        flag_vertices.push_back(it->second);
        flag_points.push_back(bary);
      }
      // Child in type order has orientation sign(perm) relative to the parent.
      const int parity = permutation_sign(perm);
      std::vector<int> order(n + 1);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return flag_vertices[a] < flag_vertices[b]; });
      Simplex child;
      std::vector<Point> child_pts;
      for (int o : order) {
        child.push_back(flag_vertices[o]);
        child_pts.push_back(flag_points[o]);
      }
      out.simplices.push_back(child);
      if (realized) out.realized.push_back(std::move(child_pts));
      if (orient) {
        const int global = (*orient)[si] * parity;
        out.orientation.push_back(global * permutation_sign(flag_vertices));
        out.colors.push_back(global);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

namespace {

ColoringResult propagate_coloring(const SimplicialComplex& complex) {
  ColoringResult r;
  r.method = "propagation";
  const std::size_t m = complex.simplices.size();
  const DualGraph g = dual_graph(complex);
  std::vector<int> color(m, 0), parent(m, -1), depth(m, 0);
  for (std::size_t root = 0; root < m; ++root) {
    if (color[root] != 0) continue;
    color[root] = 1;
    std::queue<int> queue;
    queue.push(static_cast<int>(root));
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop();
      for (const auto& [t, facet] : g.adj[s]) {
        if (color[t] == 0) {
          color[t] = -color[s];
          parent[t] = s;
          depth[t] = depth[s] + 1;
          queue.push(t);
        } else if (color[t] == color[s]) {
          // Odd cycle: tree paths from s and t to their common ancestor.
          std::vector<int> left{s}, right{t};
          int a = s, b = t;
          while (depth[a] > depth[b]) left.push_back(a = parent[a]);
          while (depth[b] > depth[a]) right.push_back(b = parent[b]);
          while (a != b) {
            left.push_back(a = parent[a]);
            right.push_back(b = parent[b]);
          }
          right.pop_back();
          r.odd_cycle = left;
          r.odd_cycle.insert(r.odd_cycle.end(), right.rbegin(), right.rend());
          return r;
        }
      }
    }
  }
  r.ok = true;
  r.colors = std::move(color);
  return r;
}

}  // namespace

ColoringResult chessboard_coloring(const SimplicialComplex& complex) {
  ColoringResult propagated = propagate_coloring(complex);
  const bool flagged = complex.vertex_types.size() == complex.vertices.size() &&
                       complex.orientation.size() == complex.simplices.size() &&
                       !complex.simplices.empty();
  if (!flagged || !propagated.ok) return propagated;

  ColoringResult r;
  r.method = "flag-parity";
  r.colors.resize(complex.simplices.size());
  for (std::size_t i = 0; i < complex.simplices.size(); ++i) {
    std::vector<int> by_type = complex.simplices[i];
    std::sort(by_type.begin(), by_type.end(), [&](int a, int b) {
      return complex.vertex_types[a] < complex.vertex_types[b];
    });
    r.colors[i] = complex.orientation[i] * permutation_sign(by_type);
  }
  // Cross-check: on a connected complex both proper colorings agree up to one
  // global swap.
  const int rel = r.colors[0] * propagated.colors[0];
  for (std::size_t i = 0; i < r.colors.size(); ++i)
    if (r.colors[i] * propagated.colors[i] != rel) {
      for (const auto& [facet, cofaces] : facet_incidence(complex))
        if (cofaces.size() == 2 && r.colors[cofaces[0]] == r.colors[cofaces[1]]) {
          r.odd_cycle = {cofaces[0], cofaces[1]};
          return r;
        }
      break;
    }
  r.ok = true;
  return r;
}

std::optional<std::vector<int>> vertex_labeling(const SimplicialComplex& complex) {
  const int n = complex.dim;
  auto check = [&](const std::vector<int>& labels) {
    for (const auto& s : complex.simplices) {
      std::vector<int> seen(n + 1, 0);
      for (int v : s) {
        if (labels[v] < 0 || labels[v] > n || seen[labels[v]]++) return false;
      }
    }
    return true;
  };
  if (complex.vertex_types.size() == complex.vertices.size()) {
    if (check(complex.vertex_types)) return complex.vertex_types;
    return std::nullopt;
  }
  std::vector<int> labels(complex.vertices.size(), -1);
  const DualGraph g = dual_graph(complex);
  std::vector<char> done(complex.simplices.size(), 0);
  for (std::size_t root = 0; root < complex.simplices.size(); ++root) {
    if (done[root]) continue;
    const Simplex& s0 = complex.simplices[root];
    bool fresh = std::all_of(s0.begin(), s0.end(), [&](int v) { return labels[v] < 0; });
    if (!fresh) return std::nullopt;  // components sharing only low-dim faces
    for (int i = 0; i <= n; ++i) labels[s0[i]] = i;
    done[root] = 1;
    std::queue<int> queue;
    queue.push(static_cast<int>(root));
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop();
      for (const auto& [t, facet] : g.adj[s]) {
        std::vector<char> used(n + 1, 0);
        for (int v : facet) used[labels[v]] = 1;
        const int missing = static_cast<int>(std::find(used.begin(), used.end(), 0) - used.begin());
        const int apex = complex.simplices[t][dropped_position(complex.simplices[t], facet)];
        if (labels[apex] < 0) labels[apex] = missing;
        else if (labels[apex] != missing) return std::nullopt;
        if (!done[t]) {
          done[t] = 1;
          queue.push(t);
        }
      }
    }
  }
  if (!check(labels)) return std::nullopt;
  return labels;
}

}  // namespace fatlas
