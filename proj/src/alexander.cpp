#include "fatlas/alexander.hpp"

#include <algorithm>

namespace fatlas {

namespace {

Point model_point(const AlexanderMap& f, std::size_t i, const Point& bary) {
  Point x = Point::Zero(f.model.n);
  const auto& labels = f.parts[i].labels;
  for (std::size_t k = 0; k < labels.size(); ++k) x += bary[k] * f.model.vertices[labels[k]];
  return x;
}

Point ambient_point(const AlexanderMap& f, std::size_t i, const Point& bary) {
  const auto& pts = f.points[i];
  Point p = Point::Zero(pts.front().size());
  for (std::size_t k = 0; k < pts.size(); ++k) p += bary[k] * pts[k];
  return p;
}

PointDilatation from_jacobian(const Eigen::MatrixXd& J) {
  PointDilatation d;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  d.norm = svd.singularValues()(0);
  d.J = J.determinant();
  d.K = outer_dilatation(J);
  return d;
}

// Random point on a facet shared by two simplices, as barycentric coordinates
// of each incident simplex (sorted vertex order), plus the missing vertex.
struct FacetSample {
  Point bary[2];
  int opposite[2];
};

FacetSample sample_facet(const SimplicialComplex& c, const Simplex& facet,
                         const std::vector<int>& incident, Rng& rng) {
  const Point w = random_barycentric(rng, static_cast<int>(facet.size()) - 1);
  FacetSample s;
  for (int side = 0; side < 2; ++side) {
    const auto& simplex = c.simplices[incident[side]];
    s.bary[side] = Point::Zero(simplex.size());
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      const auto it = std::find(facet.begin(), facet.end(), simplex[k]);
      if (it == facet.end()) s.opposite[side] = static_cast<int>(k);
      else s.bary[side][k] = w[it - facet.begin()];
    }
  }
  return s;
}

std::vector<std::pair<Simplex, std::vector<int>>> shared_facets(const SimplicialComplex& c) {
  std::vector<std::pair<Simplex, std::vector<int>>> out;
  for (auto& [facet, incident] : facet_incidence(c))
    if (incident.size() == 2) out.emplace_back(facet, incident);
  return out;
}

}  // namespace

double ModelTarget::gauge(const Point& x) const {
  double m = -kInf;
  for (const auto& nrm : normals) m = std::max(m, (x - center).dot(nrm));
  return m / inradius;
}

double ModelTarget::boundary_distance(const Point& x) const {
  double d = kInf;
  for (const auto& nrm : normals) d = std::min(d, inradius - (x - center).dot(nrm));
  return d;
}

ModelTarget model_target(int n) {
  if (n < 1) throw ContractError("model_target: dimension must be positive");
  ModelTarget m;
  m.n = n;
  m.vertices = regular_simplex(n);
  m.center = Point::Zero(n);
  for (const auto& q : m.vertices) m.normals.push_back(-q.normalized());
  m.inradius = (m.vertices[1] - m.center).dot(m.normals[0]);
  return m;
}

ModelPoint radial_fold(const ModelTarget& m, const Point& x) {
  const double mu = m.gauge(x);
  if (!(mu > 0)) return {Point::Constant(m.n, kInf), true};
  return {m.center + (x - m.center) / (mu * mu), false};
}

Point to_sphere(const ModelPoint& p) {
  const auto n = p.x.size();
  Point out = Point::Zero(n + 1);
  if (p.infinite) {
    out[n] = 1;
    return out;
  }
  const double r2 = p.x.squaredNorm();
  out.head(n) = 2 * p.x / (r2 + 1);
  out[n] = (r2 - 1) / (r2 + 1);
  return out;
}

AffineMap affine_to_model(std::span<const Point> tau, std::span<const Point> target) {
  if (tau.size() != target.size() || tau.size() < 2)
    throw ContractError("affine_to_model: vertex counts differ");
  const auto n = static_cast<Eigen::Index>(tau.size() - 1);
  if (target.front().size() != n) throw ContractError("affine_to_model: target dimension");
  AffineMap m{simplex_frame(tau), {}, target.front()};
  Eigen::MatrixXd Y(n, n), Q(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Y.col(j) = m.frame.to_local(tau[j + 1]);
    Q.col(j) = target[j + 1] - target[0];
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(Y);
  if (!lu.isInvertible()) throw ContractError("affine_to_model: degenerate simplex");
  m.A = Q * lu.inverse();
  return m;
}

double outer_dilatation(const Eigen::MatrixXd& A) {
  const double det = A.determinant();
  if (!(det > 0)) return kInf;
  const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
  return std::pow(smax, static_cast<double>(A.rows())) / det;
}

AlexanderMap assemble_qm_map(const SimplicialComplex& complex) {
  if (complex.size() == 0) throw ContractError("assemble_qm_map: empty complex");
  if (complex.colors.size() != complex.size())
    throw ContractError("assemble_qm_map: complex is not colored");
  const auto labels = vertex_labeling(complex);
  if (!labels) throw ContractError("assemble_qm_map: no vertex labeling");
  AlexanderMap f;
  f.model = model_target(complex.dim);

  // Orientation type of each simplex's label order, relative to the model.
  std::vector<int> type(complex.size());
  int agree = 0;
  for (std::size_t i = 0; i < complex.size(); ++i) {
    std::vector<int> seq;
    for (int v : complex.oriented(i)) seq.push_back((*labels)[v]);
    type[i] = permutation_sign(seq);
    agree += type[i] * complex.colors[i];
  }
  if (agree == -static_cast<int>(complex.size()) && complex.dim >= 2) {
    std::swap(f.model.vertices[1], f.model.vertices[2]);
    std::swap(f.model.normals[1], f.model.normals[2]);
    f.swapped = true;
    for (int& t : type) t = -t;
  } else if (agree != static_cast<int>(complex.size())) {
    for (std::size_t i = 0; i < complex.size(); ++i)
      if (type[i] * complex.colors[i] != type[0] * complex.colors[0])
        throw ContractError("assemble_qm_map: coloring disagrees with label orientation at simplex " +
                            std::to_string(i));
  }

  f.parts.resize(complex.size());
  f.points.resize(complex.size());
  for (std::size_t i = 0; i < complex.size(); ++i) {
    auto& part = f.parts[i];
    const auto& sorted = complex.simplices[i];
    f.points[i] = complex.simplex_points(i);
    for (int v : sorted) part.labels.push_back((*labels)[v]);
    part.folded = complex.colors[i] < 0;
    part.oriented = complex.oriented(i);
    std::vector<Point> src, dst;
    for (int v : part.oriented) {
      const auto k = std::find(sorted.begin(), sorted.end(), v) - sorted.begin();
      src.push_back(f.points[i][k]);
      dst.push_back(f.model.vertices[(*labels)[v]]);
    }
    part.affine = affine_to_model(src, dst);
    part.diameter = simplex_diameter(f.points[i]);
    if ((part.affine.A.determinant() > 0) != (type[i] > 0))
      throw ContractError("assemble_qm_map: orientation mismatch at simplex " + std::to_string(i));
  }
  return f;
}

ModelPoint evaluate(const AlexanderMap& f, std::size_t simplex, const Point& bary) {
  const Point x = model_point(f, simplex, bary);
  // Boundary points of the simplex land on the model boundary, which the fold fixes.
  if (!f.parts[simplex].folded || (bary.array() <= 0).any()) return {x, false};
  return radial_fold(f.model, x);
}

PointDilatation dilatation_fd(const AlexanderMap& f, std::size_t simplex, const Point& bary) {
  const auto& part = f.parts[simplex];
  const Point y = part.affine.frame.to_local(ambient_point(f, simplex, bary));
  const double step = 1e-6 * part.diameter;
  const auto n = y.size();
  auto F = [&](const Point& z) {
    const Point x = part.affine(z);
    return part.folded ? radial_fold(f.model, x).x : x;
  };
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Point e = Point::Zero(n);
    e[j] = step;
    J.col(j) = (F(y + e) - F(y - e)) / (2 * step);
  }
  return from_jacobian(J);
}

PointDilatation dilatation_at(const AlexanderMap& f, std::size_t simplex, const Point& bary) {
  const Point x = model_point(f, simplex, bary);
  const double tol = 1e-3;  // model diameter is 1
  if ((x - f.model.center).norm() < tol || f.model.boundary_distance(x) < tol) {
    PointDilatation d;
    d.rejected = true;
    return d;
  }
  if (!f.parts[simplex].folded) return from_jacobian(f.parts[simplex].affine.A);
  return dilatation_fd(f, simplex, bary);
}

Point random_barycentric(Rng& rng, int n) {
  Point w(n + 1);
  for (int k = 0; k <= n; ++k) w[k] = -std::log(1.0 - rng.uniform());
  return w / w.sum();
}

DilatationReport dilatation_report(const AlexanderMap& f, std::size_t samples_per_simplex,
                                   std::uint64_t seed) {
  if (samples_per_simplex == 0) throw ContractError("dilatation_report: empty sample budget");
  const std::size_t m = f.size();
  std::vector<std::vector<PointDilatation>> acc(m);
  std::vector<std::size_t> rejected(m, 0);
  parallel_for(m, [&](std::size_t i) {
    Rng rng(seed * 0x100000001B3ull + i);
    const int n = f.model.n;
    for (std::size_t tries = 0; acc[i].size() < samples_per_simplex && tries < 100 * samples_per_simplex; ++tries) {
      const auto d = dilatation_at(f, i, random_barycentric(rng, n));
      if (d.rejected) ++rejected[i];
      else acc[i].push_back(d);
    }
  });
  DilatationReport r;
  r.simplex_max.assign(m, 0.0);
  r.simplex_q99.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    r.rejected += rejected[i];
    r.samples += acc[i].size();
    if (acc[i].empty()) continue;
    std::vector<double> ks;
    for (const auto& d : acc[i]) {
      ks.push_back(d.K);
      r.min_J = std::min(r.min_J, d.J);
    }
    std::sort(ks.begin(), ks.end());
    r.simplex_max[i] = ks.back();
    const auto q = static_cast<std::size_t>(std::ceil(0.99 * ks.size())) - 1;
    r.simplex_q99[i] = ks[std::min(q, ks.size() - 1)];
    if (r.simplex_max[i] > r.global_K) {
      r.global_K = r.simplex_max[i];
      r.worst_simplex = i;
    }
  }
  const double n = f.model.n;
  for (const auto& samples : acc)
    for (const auto& d : samples)
      if (!(d.J > 0) || !(std::pow(d.norm, n) <= r.global_K * d.J * (1 + 1e-12))) ++r.violations;
  return r;
}

FaceConsistency face_consistency(const AlexanderMap& f, const SimplicialComplex& complex,
                                 std::size_t points, std::uint64_t seed) {
  FaceConsistency r;
  const auto facets = shared_facets(complex);
  if (facets.empty()) return r;
  Rng rng(seed);
  for (std::size_t p = 0; p < points; ++p) {
    const auto& [facet, incident] = facets[rng.index(facets.size())];
    const FacetSample s = sample_facet(complex, facet, incident, rng);
    Point img[2];
    for (int side = 0; side < 2; ++side) {
      const Point x = model_point(f, incident[side], s.bary[side]);
      img[side] = f.parts[incident[side]].folded ? radial_fold(f.model, x).x : x;
    }
    const double err = (img[0] - img[1]).norm();
    ++r.points;
    if (err > r.max_error || r.worst_face.empty()) {
      r.max_error = std::max(r.max_error, err);
      r.worst_face = facet;
    }
  }
  return r;
}

std::vector<Simplex> branching_set(const SimplicialComplex& complex) {
  if (complex.dim < 2) return {};
  return faces(complex, complex.dim - 2);
}

InjectivityReport local_injectivity(const AlexanderMap& f, const SimplicialComplex& complex,
                                    std::size_t points, std::uint64_t seed) {
  InjectivityReport r;
  const auto facets = shared_facets(complex);
  if (facets.empty()) return r;
  Rng rng(seed);
  for (std::size_t p = 0; p < points; ++p) {
    const auto& [facet, incident] = facets[rng.index(facets.size())];
    const FacetSample s = sample_facet(complex, facet, incident, rng);
    // Step small against the distance to the facet's own boundary.
    double wmin = kInf;
    for (Eigen::Index k = 0; k < s.bary[0].size(); ++k)
      if (k != s.opposite[0]) wmin = std::min(wmin, s.bary[0][k]);
    const double delta = 1e-3 * wmin;
    double side_value[2];
    bool bad = false;
    for (int side = 0; side < 2; ++side) {
      const auto& part = f.parts[incident[side]];
      const int missing = part.labels[s.opposite[side]];
      Point bary = (1 - delta) * s.bary[side];
      bary[s.opposite[side]] += delta;
      const ModelPoint z = evaluate(f, incident[side], bary);
      if (z.infinite) bad = true;
      side_value[side] = (z.x - f.model.center).dot(f.model.normals[missing]) - f.model.inradius;
    }
    // Both sides must see the same model facet.
    if (f.parts[incident[0]].labels[s.opposite[0]] != f.parts[incident[1]].labels[s.opposite[1]])
      bad = true;
    ++r.checked;
    if (bad || !(side_value[0] * side_value[1] < 0)) {
      ++r.failures;
      if (r.witness.empty()) r.witness = facet;
    }
  }
  return r;
}

}  // namespace fatlas
