#include "fatlas/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fatlas {

namespace {

Json opt_number(const std::optional<double>& x) { return x ? Json(*x) : Json("auto"); }

Json inputs_json(const RunConfig& c) {
  const auto& p = c.pipeline;
  Json j = {{"surface", c.surface_json.is_null() ? Json() : c.surface_json},
            {"eps", opt_number(p.eps)},
            {"safety", p.safety},
            {"h", opt_number(p.h)},
            {"seed", p.seed},
            {"thicken", {{"budget", p.thicken_budget}, {"phi_target", p.phi_target},
                         {"max_move", p.max_move ? Json(*p.max_move) : Json("auto")}}},
            {"phi0", p.phi0}};
  if (c.mesh) j["mesh"] = c.mesh->filename().string();
  return j;
}

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void stamp(Json& report, const CommandOptions& o, const std::vector<StageTiming>& timings = {}) {
  if (!o.timestamp) return;
  Json t = Json::object();
  for (const auto& s : timings) t[s.stage] = s.seconds;
  report["metrics"]["timings"] = t;
  report["metrics"]["generated_at"] = now_utc();
}

void keep(Json* slot, const Json& report) {
  if (slot) *slot = report;
}

void require_surface(const RunConfig& c) {
  if (c.surface_json.is_null()) throw ConfigError("config needs a 'surface'");
}

void require_seed(const RunConfig& c) {
  if (!c.has_seed) throw ConfigError("a seed is required (config 'seed' or --seed)");
}

std::string csv_of(const std::vector<HistogramBucket>& buckets) {
  std::ostringstream ss;
  write_histogram_csv(ss, buckets);
  return ss.str();
}

Json trace_json(const std::vector<RetryAttempt>& trace) {
  Json t = Json::array();
  for (const auto& a : trace) t.push_back(to_json(a));
  return t;
}

std::string stage_log(const std::vector<RetryAttempt>& trace, const std::vector<StageTiming>& timings,
                      bool timestamp) {
  std::ostringstream ss;
  ss << std::setprecision(10);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& a = trace[i];
    ss << "attempt " << i << " eps=" << a.eps << " h=" << a.h << " n0=" << a.n0
       << " perturbed=" << (a.perturbed ? 1 : 0) << " stage=" << a.stage << " "
       << (a.failure.empty() ? "accepted" : "failed: " + a.failure) << '\n';
  }
  if (timestamp)
    for (const auto& t : timings) ss << "time " << t.stage << ' ' << t.seconds << "s\n";
  return ss.str();
}

Json pipeline_metrics(const PipelineResult& r) {
  const auto pm = validate_closed_pseudomanifold(r.nerve.complex, r.nerve.validation.has_boundary);
  Json m = {{"eps", r.eps},
            {"eps_requested", r.eps_requested},
            {"eps_auto", r.eps_auto},
            {"h", r.h},
            {"estimates", to_json(r.est)},
            {"net", to_json(r.net_report)},
            {"nerve", {{"vertices", r.nerve.complex.vertices.size()},
                       {"triangles", r.nerve.complex.size()},
                       {"face_counts", pm.face_counts},
                       {"euler", r.nerve.euler},
                       {"closed", !pm.has_boundary},
                       {"dropped_centers", r.nerve.dropped_centers.size()},
                       {"fanned_corners", r.nerve.fanned_corners}}},
            {"edge_distortion", r.edge_distortion},
            {"thickening", {{"phi_min_before", r.thickening.before.phi_min},
                            {"phi_min_after", r.thickening.after.phi_min},
                            {"proposals", r.thickening.proposals},
                            {"accepted", r.thickening.accepted},
                            {"reached_target", r.thickening.reached_target}}},
            {"subdivided", {{"vertices", r.subdivided.vertices.size()},
                            {"triangles", r.subdivided.size()},
                            {"euler", euler_characteristic(r.subdivided)}}},
            {"even_incidence", r.even.ok},
            {"coloring", {{"ok", r.coloring.ok}, {"method", r.coloring.method}}},
            {"thickness", to_json(r.final_thickness)},
            {"attempts", r.trace.size()}};
  return m;
}

std::size_t per_simplex_budget(const RunConfig& c, std::size_t simplices) {
  if (c.samples_per_simplex) return *c.samples_per_simplex;
  if (simplices == 0) return 0;
  return (c.samples + simplices - 1) / simplices;
}

std::vector<HistogramBucket> k_histogram(const std::vector<double>& ks, int buckets = 10) {
  std::vector<HistogramBucket> out;
  if (ks.empty()) return out;
  const double hi = *std::max_element(ks.begin(), ks.end());
  const double lo = 1.0, width = std::max(hi - lo, 1e-12) / buckets;
  for (int b = 0; b < buckets; ++b) out.push_back({lo + b * width, lo + (b + 1) * width, 0});
  for (double k : ks) {
    const int b = std::clamp(static_cast<int>((k - lo) / width), 0, buckets - 1);
    ++out[b].count;
  }
  return out;
}

}  // namespace

int cmd_triangulate(const RunConfig& c, const CommandOptions& o, Json* slot) {
  require_surface(c);
  require_seed(c);
  PipelineResult r;
  try {
    r = fat_triangulation_pipeline(c.surface, c.pipeline);
  } catch (const PipelineError& e) {
    Json report = make_report("triangulate", inputs_json(c),
                              {{"ok", false}, {"failed_stage", e.stage}, {"failure", e.what()},
                               {"attempts", e.trace.size()}},
                              {{"witness", e.witness}, {"retry_trace", trace_json(e.trace)}});
    stamp(report, o);
    write_json(c.out / "triangulate.json", report);
    write_text(c.out / "stage_log.txt", stage_log(e.trace, {}, false) + "error " + e.what() + "\n");
    *o.log << "triangulate: " << e.what() << '\n';
    keep(slot, report);
    return kExitFailure;
  }
  Json metrics = pipeline_metrics(r);
  metrics["ok"] = true;
  Json report = make_report("triangulate", inputs_json(c), metrics,
                            {{"retry_trace", trace_json(r.trace)},
                             {"thinnest_simplex", r.final_thickness.argmin},
                             {"below_phi0", r.final_thickness.below_threshold},
                             {"dropped_centers", r.nerve.dropped_centers}});
  stamp(report, o, r.timings);
  save_mesh(c.out / "mesh.off", r.subdivided);
  save_mesh(c.out / "mesh.obj", r.subdivided);
  save_mesh(c.out / "nerve.off", r.thickening.complex);
  write_json(c.out / "net.json", net_to_json(r.net));
  write_text(c.out / "thickness.csv", csv_of(r.final_thickness.histogram));
  write_text(c.out / "stage_log.txt", stage_log(r.trace, r.timings, o.timestamp));
  write_json(c.out / "triangulate.json", report);
  *o.log << "triangulate: eps " << r.eps << ", " << r.net.size() << " centers, chi "
         << r.nerve.euler << ", phi_min " << r.final_thickness.phi_min << '\n';
  keep(slot, report);
  return kExitOk;
}

int cmd_qmmap(const RunConfig& c, const CommandOptions& o, Json* slot) {
  if (c.samples_per_simplex && *c.samples_per_simplex == 0) throw ConfigError("sample budget is 0");
  if (!c.samples_per_simplex && c.samples == 0) throw ConfigError("sample budget is 0");
  SimplicialComplex complex;
  Json inputs = inputs_json(c);
  if (c.mesh) {
    try {
      complex = load_mesh(*c.mesh);
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
    inputs["source"] = "mesh";
  } else {
    require_surface(c);
    require_seed(c);
    PipelineResult r;
    try {
      r = fat_triangulation_pipeline(c.surface, c.pipeline);
    } catch (const PipelineError& e) {
      Json report = make_report("qmmap", inputs, {{"ok", false}, {"failed_stage", e.stage}, {"failure", e.what()}},
                                {{"witness", e.witness}, {"retry_trace", trace_json(e.trace)}});
      stamp(report, o);
      write_json(c.out / "qmmap.json", report);
      *o.log << "qmmap: " << e.what() << '\n';
      keep(slot, report);
      return kExitFailure;
    }
    complex = r.subdivided;
    save_mesh(c.out / "mesh.off", complex);
    inputs["source"] = "pipeline";
  }

  auto fail = [&](const std::string& why, Json witnesses) {
    Json report = make_report("qmmap", inputs, {{"ok", false}, {"failure", why}}, std::move(witnesses));
    stamp(report, o);
    write_json(c.out / "qmmap.json", report);
    *o.log << "qmmap: " << why << '\n';
    keep(slot, report);
    return kExitFailure;
  };

  const EvenIncidenceReport even = check_even_incidence(complex);
  if (!even.ok) {
    *o.log << "qmmap: odd incidence at " << even.offending.size() << " faces:";
    for (const auto& f : even.offending) {
      *o.log << " (";
      for (std::size_t k = 0; k < f.size(); ++k) *o.log << (k ? "," : "") << f[k];
      *o.log << ")";
    }
    *o.log << '\n';
    return fail("even-incidence failure", {{"offending_faces", even.offending}, {"counts", even.counts}});
  }
  if (complex.colors.size() != complex.size()) {
    const ColoringResult col = chessboard_coloring(complex);
    if (!col.ok) return fail("no chessboard coloring", {{"odd_cycle", col.odd_cycle}});
    complex.colors = col.colors;
  }
  AlexanderMap f;
  try {
    f = assemble_qm_map(complex);
  } catch (const ContractError& e) {
    return fail(e.what(), Json::object());
  }
  const std::size_t per = per_simplex_budget(c, f.size());
  const DilatationReport d = dilatation_report(f, per, c.pipeline.seed);
  const FaceConsistency fc = face_consistency(f, complex, c.face_points, c.pipeline.seed + 1);
  const InjectivityReport inj = local_injectivity(f, complex, c.face_points, c.pipeline.seed + 2);
  const ThicknessReport th = thickness_report(complex, c.pipeline.phi0);

  Json metrics = {{"ok", d.quasiregular()},
                  {"simplices", complex.size()},
                  {"samples_per_simplex", per},
                  {"dilatation", to_json(d)},
                  {"face_consistency", {{"points", fc.points}, {"max_error", fc.max_error}}},
                  {"local_injectivity", {{"checked", inj.checked}, {"failures", inj.failures}}},
                  {"branching_set", branching_set(complex).size()},
                  {"model_swapped", f.swapped},
                  {"phi_min", th.phi_min}};
  Json report = make_report("qmmap", inputs, metrics,
                            {{"worst_simplex", d.worst_simplex},
                             {"worst_face", fc.worst_face},
                             {"injectivity_witness", inj.witness}});
  stamp(report, o);
  write_json(c.out / "qmmap.json", report);
  write_text(c.out / "dilatation.csv", csv_of(k_histogram(d.simplex_max)));
  *o.log << "qmmap: " << d.samples << " samples, global K " << d.global_K << ", violations "
         << d.violations << '\n';
  keep(slot, report);
  return d.quasiregular() ? kExitOk : kExitFailure;
}

int cmd_bounds(const RunConfig& c, const CommandOptions& o, Json* slot) {
  require_surface(c);
  const GeometryEstimates est = pipeline_estimates(c.surface, c.pipeline);
  double eps = 0;
  if (c.pipeline.eps) {
    eps = *c.pipeline.eps;
  } else {
    if (!(est.convrad_low > 0)) throw ConfigError("eps = auto needs an injectivity radius bound and none applies");
    eps = est.convrad_low * c.pipeline.safety;
  }
  const double k = est.k_low;
  Json metrics = {{"estimates", to_json(est)},
                  {"eps", eps},
                  {"eps_auto", !c.pipeline.eps},
                  {"V_k", {{"k", k},
                           {"half_eps", comparison_volume(k, eps / 2)},
                           {"five_half_eps", comparison_volume(k, 2.5 * eps)},
                           {"diameter", comparison_volume(k, est.D_up)}}},
                  {"packing_bound", packing_bound(est, eps)},
                  {"degree_bound", degree_bound(est, eps)},
                  {"injrad_low", est.injrad_low},
                  {"injrad_route", est.injrad.route},
                  {"injrad_certified", est.injrad.certified},
                  {"convrad_low", est.convrad_low}};
  Json report = make_report("bounds", inputs_json(c), metrics, Json::object());
  stamp(report, o);
  write_json(c.out / "bounds.json", report);
  *o.out << report.dump(2) << '\n';
  keep(slot, report);
  return kExitOk;
}

int cmd_verify(const RunConfig& c, const CommandOptions& o, Json* slot) {
  if (!c.mesh) throw ConfigError("verify needs a mesh (config 'mesh' or --mesh)");
  SimplicialComplex complex;
  try {
    complex = load_mesh(*c.mesh);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  const double phi0 = c.pipeline.phi0;
  const ThicknessReport th = thickness_report(complex, phi0);
  const PseudomanifoldReport pm = validate_closed_pseudomanifold(complex, true);
  const EvenIncidenceReport even = check_even_incidence(complex);
  const ColoringResult col = chessboard_coloring(complex);
  const bool thick = th.phi_min >= phi0;
  Json metrics = {{"ok", thick},
                  {"phi0", phi0},
                  {"thickness", to_json(th)},
                  {"pseudomanifold", {{"valid", pm.valid()},
                                      {"has_boundary", pm.has_boundary},
                                      {"orientable", pm.orientable},
                                      {"euler", pm.euler}}},
                  {"even_incidence", even.ok},
                  {"coloring", col.ok}};
  Json report = make_report("verify", inputs_json(c), metrics,
                            {{"below_phi0", th.below_threshold},
                             {"thinnest_simplex", th.argmin},
                             {"odd_faces", even.offending},
                             {"odd_cycle", col.odd_cycle}});
  stamp(report, o);
  write_json(c.out / "verify.json", report);
  write_text(c.out / "thickness.csv", csv_of(th.histogram));
  *o.log << "verify: phi_min " << th.phi_min << (thick ? " >= " : " < ") << phi0 << '\n';
  keep(slot, report);
  return thick ? kExitOk : kExitBelowThreshold;
}

int cmd_exhaust(const RunConfig& c, const CommandOptions& o, Json* slot) {
  require_surface(c);
  require_seed(c);
  const ExhaustionReport r = exhaustion_demo(c.surface, c.base, c.radii, c.pipeline);
  Json pieces = Json::array();
  bool ok = r.nested;
  for (const auto& p : r.pieces) {
    ok = ok && p.ok;
    pieces.push_back({{"radius", p.radius},
                      {"vertices", p.vertices},
                      {"collar", p.collar},
                      {"nested", p.nested},
                      {"ok", p.ok},
                      {"failure", p.failure},
                      {"eps", p.eps},
                      {"n0", p.n0},
                      {"dropped", p.dropped},
                      {"triangles", p.triangles},
                      {"boundary_edges", p.boundary_edges},
                      {"euler", p.euler},
                      {"phi_min", p.phi_min}});
  }
  Json inputs = inputs_json(c);
  inputs["radii"] = c.radii;
  inputs["base"] = {c.base[0], c.base[1]};
  Json report = make_report("exhaust", inputs,
                            {{"ok", ok},
                             {"eps", r.eps},
                             {"h", r.h},
                             {"nested", r.nested},
                             {"covered", r.covered},
                             {"total", r.total},
                             {"pieces", pieces}},
                            Json::object());
  stamp(report, o);
  write_json(c.out / "exhaust.json", report);
  *o.log << "exhaust: " << r.pieces.size() << " pieces, covered " << r.covered << "/" << r.total << '\n';
  keep(slot, report);
  return ok ? kExitOk : kExitFailure;
}

namespace {

template <class F>
int guarded(const CommandOptions& o, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    *o.log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Json::exception& e) {
    *o.log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    *o.log << "io error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    *o.log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int run_command(const std::string& name, const RunConfig& config, const CommandOptions& options, Json* report) {
  return guarded(options, [&] {
    if (name == "triangulate") return cmd_triangulate(config, options, report);
    if (name == "qmmap") return cmd_qmmap(config, options, report);
    if (name == "bounds") return cmd_bounds(config, options, report);
    if (name == "verify") return cmd_verify(config, options, report);
    if (name == "exhaust") return cmd_exhaust(config, options, report);
    throw ConfigError("unknown command '" + name + "'");
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Thick triangulations and Alexander maps of surfaces", "fatlas"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides o;
  bool no_timestamp = false;
  std::uint64_t seed = 0;
  std::string eps, out, mesh;
  double phi0 = 0;

  const std::vector<std::string> names{"triangulate", "qmmap", "bounds", "verify", "exhaust"};
  const std::vector<std::string> help{"run the thick triangulation pipeline",
                                      "assemble the Alexander map and measure dilatation",
                                      "print geometry estimates and net bounds",
                                      "check the thickness of an OFF/OBJ mesh",
                                      "triangulate nested geodesic balls of a non-compact surface"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* s = app.add_subcommand(names[i], help[i]);
    s->add_option("--config", config_path, "JSON run configuration")->required();
    s->add_option("--seed", seed, "random seed");
    s->add_option("--eps", eps, "net scale or auto");
    s->add_option("--out", out, "output directory");
    s->add_option("--mesh", mesh, "input mesh (qmmap, verify)");
    s->add_option("--phi0", phi0, "thickness threshold");
    s->add_flag("--no-timestamp", no_timestamp, "omit timings and wall-clock time from reports");
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  std::size_t which = 0;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) which = i;
  CLI::App* s = subs[which];
  if (s->count("--seed")) o.seed = seed;
  if (s->count("--eps")) o.eps = eps;
  if (s->count("--out")) o.out = out;
  if (s->count("--mesh")) o.mesh = mesh;
  if (s->count("--phi0")) o.phi0 = phi0;

  CommandOptions opts;
  opts.timestamp = !no_timestamp;
  return guarded(opts, [&] { return run_command(names[which], load_run_config(config_path, o), opts); });
}

}  // namespace fatlas
