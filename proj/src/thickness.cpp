#include "fatlas/thickness.hpp"

#include "fatlas/simplex.hpp"

#include <algorithm>
#include <numeric>

namespace fatlas {

ThicknessReport thickness_report(const SimplicialComplex& complex, double phi0, int buckets) {
  if (complex.simplices.empty()) throw ContractError("thickness_report: empty complex");
  if (buckets < 1) throw ContractError("thickness_report: need at least one bucket");
  ThicknessReport r;
  r.threshold = phi0;
  r.phi.resize(complex.size());
  parallel_for(complex.size(), [&](std::size_t i) {
    const auto pts = complex.simplex_points(i);
    r.phi[i] = thickness(pts);
  });
  r.argmin = static_cast<std::size_t>(std::min_element(r.phi.begin(), r.phi.end()) - r.phi.begin());
  r.phi_min = r.phi[r.argmin];

  const double top = regular_simplex_thickness(complex.dim);
  r.histogram.resize(buckets);
  for (int b = 0; b < buckets; ++b) {
    r.histogram[b].lo = top * b / buckets;
    r.histogram[b].hi = top * (b + 1) / buckets;
  }
  for (std::size_t i = 0; i < r.phi.size(); ++i) {
    const int b = std::clamp(static_cast<int>(r.phi[i] / top * buckets), 0, buckets - 1);
    ++r.histogram[b].count;
    if (r.phi[i] < phi0) r.below_threshold.push_back(i);
  }
  return r;
}

bool same_orientation(std::span<const Point> original, std::span<const Point> moved) {
  SimplexFrame frame;
  try {
    frame = simplex_frame(original);
  } catch (const ContractError&) {
    return true;  // degenerate before the move: no sign to preserve
  }
  const auto k = static_cast<Eigen::Index>(original.size()) - 1;
  Eigen::MatrixXd local(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    local.col(j) = frame.basis.transpose() * (moved[j + 1] - moved[0]);
  return local.determinant() > 0.0;
}

ThickenResult thicken(const SimplicialComplex& complex, const ThickenOptions& options) {
  ThickenResult result;
  result.complex = complex;
  result.before = thickness_report(complex);
  result.after = result.before;
  result.reached_target = result.before.phi_min >= options.phi_target;
  if (options.budget == 0 || result.reached_target) return result;

  const std::size_t m = complex.size();
  const std::size_t nv = complex.vertices.size();
  std::vector<std::vector<Point>> pts(m);
  for (std::size_t i = 0; i < m; ++i) pts[i] = complex.simplex_points(i);
  const auto ambient = static_cast<Eigen::Index>(pts.front().front().size());

  std::vector<std::vector<std::pair<int, int>>> incident(nv);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < complex.simplices[i].size(); ++p)
      incident[complex.simplices[i][p]].emplace_back(static_cast<int>(i), static_cast<int>(p));

  std::vector<double> phi = result.before.phi;
  auto local_min = [&](std::size_t v) {
    double lo = 1.0;
    for (auto [s, p] : incident[v]) lo = std::min(lo, phi[s]);
    return lo;
  };

  std::vector<double> radius(nv, 0.5 * options.max_move);
  std::vector<Point> disp(nv, Point::Zero(ambient));
  const double min_radius = 1e-9 * options.max_move;
  Rng rng(options.seed);

  std::vector<std::size_t> order(nv);
  std::vector<double> objective(nv);
  std::vector<std::vector<Point>> trial;
  std::vector<double> trial_phi;

  while (result.proposals < options.budget) {
    if (*std::min_element(phi.begin(), phi.end()) >= options.phi_target) {
      result.reached_target = true;
      break;
    }
    for (std::size_t v = 0; v < nv; ++v) objective[v] = incident[v].empty() ? 1.0 : local_min(v);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return objective[a] < objective[b]; });

    bool active = false;
    for (std::size_t v : order) {
      if (result.proposals >= options.budget) break;
      if (incident[v].empty() || objective[v] >= options.phi_target || radius[v] < min_radius)
        continue;
      active = true;
      ++result.proposals;

      Point step(ambient);
      for (Eigen::Index d = 0; d < ambient; ++d) step[d] = rng.normal();
      const double len = step.norm();
      if (len == 0.0) continue;
      step *= radius[v] * std::pow(rng.uniform(), 1.0 / ambient) / len;
      Point total = disp[v] + step;
      if (total.norm() > options.max_move) total *= options.max_move / total.norm();
      step = total - disp[v];

      const double old_local = local_min(v);
      trial.clear();
      trial_phi.clear();
      bool oriented = true;
      double new_local = 1.0;
      for (auto [s, p] : incident[v]) {
        std::vector<Point> moved = pts[s];
        moved[p] += step;
        if (!same_orientation(pts[s], moved)) {
          oriented = false;
          break;
        }
        trial_phi.push_back(thickness(moved));
        new_local = std::min(new_local, trial_phi.back());
        trial.push_back(std::move(moved));
      }
      if (oriented && new_local > old_local) {
        for (std::size_t t = 0; t < incident[v].size(); ++t) {
          const int s = incident[v][t].first;
          pts[s] = std::move(trial[t]);
          phi[s] = trial_phi[t];
        }
        disp[v] = total;
        ++result.accepted;
        result.min_history.push_back(*std::min_element(phi.begin(), phi.end()));
      } else {
        radius[v] *= 0.5;
      }
    }
    if (!active) break;
  }

  for (std::size_t v = 0; v < nv; ++v)
    if (result.complex.vertices[v].size() == ambient) result.complex.vertices[v] += disp[v];
  if (!complex.realized.empty()) result.complex.realized = pts;
  result.after = thickness_report(result.complex);
  result.reached_target = result.after.phi_min >= options.phi_target;
  return result;
}

}  // namespace fatlas
