#include "fatlas/io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace fatlas {

namespace {

Vec3 lift(const Point& p) {
  Vec3 v = Vec3::Zero();
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(3, p.size()); ++k) v[k] = p[k];
  return v;
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

void add_polygon(MeshExport& m, const std::vector<int>& poly, std::size_t line) {
  if (poly.size() < 3) throw IoError("face with fewer than 3 vertices at line " + std::to_string(line));
  for (int v : poly)
    if (v < 0 || static_cast<std::size_t>(v) >= m.vertices.size())
      throw IoError("face index out of range at line " + std::to_string(line));
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) m.faces.push_back({poly[0], poly[k], poly[k + 1]});
}

// Applies "# seam v s" records; returns false for other comments.
bool parse_seam(const std::string& line, std::vector<std::pair<int, int>>& seams) {
  std::istringstream ss(line);
  std::string hash, word;
  int v = 0, s = 0;
  if (!(ss >> hash >> word) || hash != "#" || word != "seam") return false;
  if (!(ss >> v >> s)) throw IoError("malformed seam record: " + line);
  seams.emplace_back(v, s);
  return true;
}

void finish_seams(MeshExport& m, const std::vector<std::pair<int, int>>& seams) {
  m.source.resize(m.vertices.size());
  m.seam.assign(m.vertices.size(), false);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) m.source[i] = static_cast<int>(i);
  for (auto [v, s] : seams) {
    if (v < 0 || s < 0 || static_cast<std::size_t>(v) >= m.vertices.size() ||
        static_cast<std::size_t>(s) >= m.vertices.size())
      throw IoError("seam record out of range");
    m.source[v] = s;
    m.seam[v] = true;
  }
}

std::string next_data_line(std::istream& in, std::size_t& line_no,
                           std::vector<std::pair<int, int>>& seams) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      parse_seam(line.substr(first), seams);
      continue;
    }
    return line;
  }
  throw IoError("unexpected end of OFF data after line " + std::to_string(line_no));
}

// Seam copies point at the first exported copy of the same vertex.
void write_seams(std::ostream& out, const MeshExport& mesh) {
  std::map<int, std::size_t> first;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (v >= mesh.seam.size() || !mesh.seam[v]) continue;
    const auto it = first.emplace(mesh.source[v], v).first;
    out << "# seam " << v << ' ' << it->second << '\n';
  }
}

}  // namespace

MeshExport export_mesh(const SimplicialComplex& complex) {
  if (complex.dim != 2) throw IoError("mesh export needs a 2-complex");
  MeshExport m;
  if (complex.realized.empty()) {
    for (const auto& p : complex.vertices) m.vertices.push_back(lift(p));
    m.source.resize(m.vertices.size());
    for (std::size_t i = 0; i < m.source.size(); ++i) m.source[i] = static_cast<int>(i);
    m.seam.assign(m.vertices.size(), false);
    for (std::size_t i = 0; i < complex.size(); ++i) {
      const Simplex o = complex.oriented(i);
      m.faces.push_back({o[0], o[1], o[2]});
    }
    return m;
  }
  // One exported vertex per (complex vertex, unwrapped position).
  std::map<std::pair<int, std::array<double, 3>>, int> ids;
  std::vector<int> copies(complex.vertices.size(), 0);
  for (std::size_t i = 0; i < complex.size(); ++i) {
    const auto& sorted = complex.simplices[i];
    const Simplex o = complex.oriented(i);
    std::array<int, 3> face{};
    for (int k = 0; k < 3; ++k) {
      const auto pos = std::find(sorted.begin(), sorted.end(), o[k]) - sorted.begin();
      const Vec3 p = lift(complex.realized[i][pos]);
      const auto key = std::make_pair(o[k], std::array<double, 3>{p[0], p[1], p[2]});
      auto it = ids.find(key);
      if (it == ids.end()) {
        it = ids.emplace(key, static_cast<int>(m.vertices.size())).first;
        m.vertices.push_back(p);
        m.source.push_back(o[k]);
        ++copies[o[k]];
      }
      face[k] = it->second;
    }
    m.faces.push_back(face);
  }
  m.seam.resize(m.vertices.size());
  for (std::size_t v = 0; v < m.vertices.size(); ++v) m.seam[v] = copies[m.source[v]] > 1;
  return m;
}

SimplicialComplex import_mesh(const MeshExport& mesh) {
  const bool has_seams = std::any_of(mesh.seam.begin(), mesh.seam.end(), [](bool b) { return b; });
  std::vector<std::vector<int>> faces;
  if (!has_seams) {
    std::vector<Point> pts(mesh.vertices.begin(), mesh.vertices.end());
    for (const auto& f : mesh.faces) faces.push_back({f[0], f[1], f[2]});
    return make_complex(2, std::move(pts), faces);
  }
  // Merge copies by source; vertices keep the first copy's position.
  std::map<int, int> merged;
  std::vector<int> to_merged(mesh.vertices.size());
  std::vector<Point> pts;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const int src = mesh.source.empty() ? static_cast<int>(v) : mesh.source[v];
    auto it = merged.find(src);
    if (it == merged.end()) {
      it = merged.emplace(src, static_cast<int>(pts.size())).first;
      pts.push_back(mesh.vertices[v]);
    }
    to_merged[v] = it->second;
  }
  for (const auto& f : mesh.faces) faces.push_back({to_merged[f[0]], to_merged[f[1]], to_merged[f[2]]});
  SimplicialComplex c = make_complex(2, std::move(pts), faces);
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    std::vector<std::pair<int, Point>> corner;
    for (int k = 0; k < 3; ++k) corner.emplace_back(faces[i][k], mesh.vertices[mesh.faces[i][k]]);
    std::sort(corner.begin(), corner.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Point> r;
    for (auto& [v, p] : corner) r.push_back(p);
    c.realized.push_back(std::move(r));
  }
  return c;
}

void write_off(std::ostream& out, const MeshExport& mesh) {
  out << "OFF\n";
  write_seams(out, mesh);
  out << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void write_obj(std::ostream& out, const MeshExport& mesh) {
  write_seams(out, mesh);
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices) out << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

MeshExport read_off(std::istream& in) {
  MeshExport m;
  std::vector<std::pair<int, int>> seams;
  std::size_t line_no = 0;
  std::string header = next_data_line(in, line_no, seams);
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic.rfind("OFF", 0) != 0) throw IoError("missing OFF header");
  if (magic != "OFF") throw IoError("unsupported OFF variant: " + magic);
  long nv = -1, nf = -1, ne = 0;
  if (!(hs >> nv)) {
    std::istringstream cs(next_data_line(in, line_no, seams));
    cs >> nv >> nf >> ne;
  } else {
    hs >> nf >> ne;
  }
  if (nv < 0 || nf < 0) throw IoError("bad OFF counts at line " + std::to_string(line_no));
  for (long i = 0; i < nv; ++i) {
    std::istringstream vs(next_data_line(in, line_no, seams));
    Vec3 p;
    if (!(vs >> p[0] >> p[1] >> p[2])) throw IoError("bad vertex at line " + std::to_string(line_no));
    m.vertices.push_back(p);
  }
  for (long i = 0; i < nf; ++i) {
    std::istringstream fs(next_data_line(in, line_no, seams));
    int k = 0;
    if (!(fs >> k) || k < 0) throw IoError("bad face at line " + std::to_string(line_no));
    std::vector<int> poly(k);
    for (int& v : poly)
      if (!(fs >> v)) throw IoError("short face at line " + std::to_string(line_no));
    add_polygon(m, poly, line_no);
  }
  finish_seams(m, seams);
  return m;
}

MeshExport read_obj(std::istream& in) {
  MeshExport m;
  std::vector<std::pair<int, int>> seams;
  std::vector<std::vector<int>> polys;
  std::vector<std::size_t> poly_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      parse_seam(line.substr(first), seams);
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) throw IoError("bad vertex at line " + std::to_string(line_no));
      m.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        int idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoi(head, &used);
          if (used != head.size()) throw std::invalid_argument(head);
        } catch (const std::exception&) {
          throw IoError("bad face index at line " + std::to_string(line_no));
        }
        if (idx == 0) throw IoError("face index 0 at line " + std::to_string(line_no));
        poly.push_back(idx > 0 ? idx - 1 : static_cast<int>(m.vertices.size()) + idx);
      }
      polys.push_back(std::move(poly));
      poly_lines.push_back(line_no);
    }
  }
  for (std::size_t i = 0; i < polys.size(); ++i) add_polygon(m, polys[i], poly_lines[i]);
  finish_seams(m, seams);
  return m;
}

void save_mesh(const std::filesystem::path& path, const SimplicialComplex& complex) {
  const std::string ext = lower_ext(path);
  if (ext != ".off" && ext != ".obj") throw IoError("unknown mesh extension: " + path.string());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const MeshExport m = export_mesh(complex);
  if (ext == ".off") write_off(out, m);
  else write_obj(out, m);
}

SimplicialComplex load_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  MeshExport m;
  if (ext == ".off") m = read_off(in);
  else if (ext == ".obj") m = read_obj(in);
  else throw IoError("unknown mesh extension: " + path.string());
  if (m.faces.empty()) throw IoError("no faces in " + path.string());
  try {
    return import_mesh(m);
  } catch (const ContractError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Json net_to_json(const EpsilonNet& net) {
  Json centers = Json::array(), pattern = Json::array();
  for (const auto& c : net.centers) centers.push_back({c[0], c[1]});
  for (const auto& [k, l] : net.pattern) pattern.push_back({k, l});
  return {{"eps", net.eps},         {"seed", net.seed},     {"surface", net.surface},
          {"vertices", net.vertices}, {"centers", centers}, {"pattern", pattern}};
}

EpsilonNet net_from_json(const Json& j) {
  EpsilonNet net;
  try {
    net.eps = j.at("eps").get<double>();
    net.seed = j.at("seed").get<std::uint64_t>();
    net.surface = j.value("surface", std::string());
    net.vertices = j.at("vertices").get<std::vector<int>>();
    for (const auto& c : j.at("centers")) net.centers.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    for (const auto& e : j.at("pattern")) net.pattern.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  } catch (const Json::exception& e) {
    throw IoError(std::string("net JSON: ") + e.what());
  }
  if (net.centers.size() != net.vertices.size()) throw IoError("net JSON: centers and vertices differ in size");
  return net;
}

Json make_report(const std::string& stage, Json inputs, Json metrics, Json witnesses) {
  return {{"stage", stage},
          {"inputs", std::move(inputs)},
          {"metrics", std::move(metrics)},
          {"witnesses", std::move(witnesses)}};
}

Json to_json(const GeometryEstimates& e) {
  return {{"k_low", e.k_low},
          {"K_up", e.K_up},
          {"k_min_sampled", e.k_min_sampled},
          {"k_max_sampled", e.k_max_sampled},
          {"fd_error", e.fd_error},
          {"D_up", e.D_up},
          {"v_low", e.v_low},
          {"loop_half", e.loop_half},
          {"injrad_low", e.injrad_low},
          {"injrad_route", e.injrad.route},
          {"injrad_certified", e.injrad.certified},
          {"convrad_low", e.convrad_low}};
}

Json to_json(const NetReport& r) {
  return {{"eps", r.eps},
          {"n0", r.n0},
          {"covering_radius", r.covering_radius},
          {"min_separation", r.min_separation},
          {"packing_bound", r.packing_bound},
          {"max_degree", r.max_degree},
          {"degree_bound", r.degree_bound},
          {"max_neighbourhood", r.max_neighbourhood},
          {"covering_ok", r.covering_ok()},
          {"separation_ok", r.separation_ok()},
          {"packing_ok", r.packing_ok()},
          {"degree_ok", r.degree_ok()}};
}

Json to_json(const HistogramBucket& b) { return {{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}}; }

Json to_json(const ThicknessReport& r) {
  Json hist = Json::array();
  for (const auto& b : r.histogram) hist.push_back(to_json(b));
  return {{"simplices", r.phi.size()},
          {"phi_min", r.phi_min},
          {"argmin", r.argmin},
          {"threshold", r.threshold},
          {"below_threshold", r.below_threshold.size()},
          {"histogram", hist}};
}

Json to_json(const RetryAttempt& a) {
  return {{"eps", a.eps},     {"h", a.h},           {"n0", a.n0},          {"perturbed", a.perturbed},
          {"stage", a.stage}, {"failure", a.failure}, {"witness", a.witness}};
}

Json to_json(const DilatationReport& r) {
  return {{"global_K", r.global_K},     {"samples", r.samples},
          {"rejected", r.rejected},     {"min_J", r.min_J},
          {"violations", r.violations}, {"worst_simplex", r.worst_simplex},
          {"quasiregular", r.quasiregular()}, {"simplex_max", r.simplex_max},
          {"simplex_q99", r.simplex_q99}};
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBucket>& buckets) {
  out << "bucket_lo,bucket_hi,count\n" << std::setprecision(17);
  for (const auto& b : buckets) out << b.lo << ',' << b.hi << ',' << b.count << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace fatlas
