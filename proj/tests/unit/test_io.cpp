#include "fatlas/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"

using namespace fatlas;

namespace {

// n x n grid on the unit flat torus, each triangle unwrapped next to its
// lowest corner so that seam triangles reach past 1.
SimplicialComplex grid_torus(int n) {
  std::vector<Point> v;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v.push_back(Vec2(double(i) / n, double(j) / n));
  auto id = [n](int i, int j) { return ((i % n) * n) + (j % n); };
  std::vector<std::vector<int>> tris;
  std::vector<std::vector<Vec2>> unwrapped;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 a(double(i) / n, double(j) / n), dx(1.0 / n, 0), dy(0, 1.0 / n);
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      unwrapped.push_back({a, a + dx, a + dx + dy});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      unwrapped.push_back({a, a + dx + dy, a + dy});
    }
  SimplicialComplex c = make_complex(2, v, tris);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    std::vector<std::pair<int, Point>> corner;
    for (int k = 0; k < 3; ++k) corner.emplace_back(tris[t][k], unwrapped[t][k]);
    std::sort(corner.begin(), corner.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Point> r;
    for (auto& [vid, p] : corner) r.push_back(p);
    c.realized.push_back(r);
  }
  return c;
}

SimplicialComplex perturbed_octahedron(Rng& rng) {
  SimplicialComplex c = fixtures::octahedron();
  for (auto& p : c.vertices)
    for (Eigen::Index k = 0; k < p.size(); ++k) p[k] += rng.uniform(-0.2, 0.2);
  return c;
}

std::vector<std::array<int, 3>> oriented_faces(const SimplicialComplex& c) {
  std::vector<std::array<int, 3>> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Simplex o = c.oriented(i);
    out.push_back({o[0], o[1], o[2]});
  }
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fatlas_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool same_cycle(const std::array<int, 3>& a, const std::array<int, 3>& b) {
  for (int r = 0; r < 3; ++r)
    if (a[0] == b[r] && a[1] == b[(r + 1) % 3] && a[2] == b[(r + 2) % 3]) return true;
  return false;
}

}  // namespace

TEST(MeshIo, OffRoundTripIsExact) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SimplicialComplex c = perturbed_octahedron(rng);
    std::stringstream ss;
    write_off(ss, export_mesh(c));
    const SimplicialComplex back = import_mesh(read_off(ss));
    ASSERT_EQ(back.vertices.size(), c.vertices.size());
    for (std::size_t v = 0; v < c.vertices.size(); ++v) EXPECT_EQ(back.vertices[v], c.vertices[v]);
    const auto fa = oriented_faces(c), fb = oriented_faces(back);
    ASSERT_EQ(fa.size(), fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_TRUE(same_cycle(fa[i], fb[i]));
  }
}

TEST(MeshIo, ObjRoundTripIsExact) {
  Rng rng(4);
  const SimplicialComplex c = perturbed_octahedron(rng);
  std::stringstream ss;
  write_obj(ss, export_mesh(c));
  const SimplicialComplex back = import_mesh(read_obj(ss));
  for (std::size_t v = 0; v < c.vertices.size(); ++v) EXPECT_EQ(back.vertices[v], c.vertices[v]);
  const auto fa = oriented_faces(c), fb = oriented_faces(back);
  for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_TRUE(same_cycle(fa[i], fb[i]));
}

TEST(MeshIo, OffAcceptsCommentsInlineCountsAndPolygons) {
  std::istringstream in(
      "# header comment\nOFF 5 2 0\n\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n# middle\n0.5 0.5 1\n4 0 1 2 3\n3 0 1 4\n");
  const MeshExport m = read_off(in);
  EXPECT_EQ(m.vertices.size(), 5u);
  ASSERT_EQ(m.faces.size(), 3u);  // the quad is fanned
  EXPECT_EQ(m.faces[0], (std::array<int, 3>{0, 1, 2}));
  EXPECT_EQ(m.faces[1], (std::array<int, 3>{0, 2, 3}));
}

TEST(MeshIo, ObjFaceTokensAndNegativeIndices) {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2//1 3\nf -3 -2 -1\n");
  const MeshExport m = read_obj(in);
  ASSERT_EQ(m.faces.size(), 2u);
  EXPECT_EQ(m.faces[0], m.faces[1]);
  EXPECT_EQ(m.faces[1], (std::array<int, 3>{0, 1, 2}));
}

TEST(MeshIo, MalformedInputThrows) {
  const std::vector<std::string> bad_off{
      "",                                  // empty
      "PLY\n",                             // wrong magic
      "OFF\n3 1 0\n0 0 0\n1 0 0\n",        // truncated vertices
      "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n",  // index out of range
      "OFF\n3 1 0\n0 0 0\n1 0 0\n0 x 0\n3 0 1 2\n",  // non-numeric
      "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n",    // two-vertex face
  };
  for (const auto& text : bad_off) {
    std::istringstream in(text);
    EXPECT_THROW(read_off(in), IoError) << text;
  }
  for (const std::string text : {"v 0 0 0\nf 1 2 3\n", "v 0 0\n", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 a 3\n",
                                 "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_obj(in), IoError) << text;
  }
}

TEST(MeshIo, FlatTorusExportDuplicatesSeamVertices) {
  const int n = 4;
  const SimplicialComplex c = grid_torus(n);
  const MeshExport m = export_mesh(c);
  // Vertices on the two seams get one extra copy each, the corner three.
  EXPECT_EQ(m.vertices.size(), static_cast<std::size_t>((n + 1) * (n + 1)));
  std::size_t seam = 0;
  for (bool b : m.seam) seam += b;
  EXPECT_EQ(seam, static_cast<std::size_t>(4 + 2 * 2 * (n - 1)));  // corner 4 copies + 2 per seam vertex

  std::stringstream ss;
  write_off(ss, m);
  const SimplicialComplex back = import_mesh(read_off(ss));
  EXPECT_EQ(back.vertices.size(), c.vertices.size());
  EXPECT_EQ(euler_characteristic(back), 0);
  const auto rep = validate_closed_pseudomanifold(back);
  EXPECT_TRUE(rep.valid());
  EXPECT_FALSE(rep.has_boundary);
  // Realized (unwrapped) triangles survive the round trip.
  ASSERT_EQ(back.realized.size(), back.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto pts = back.simplex_points(i);
    EXPECT_NEAR(simplex_volume(pts), 0.5 / (n * n), 1e-12);
  }
}

TEST(MeshIo, SaveAndLoadByExtension) {
  const auto dir = temp_dir("ext");
  const SimplicialComplex c = fixtures::octahedron();
  for (const std::string name : {"a.off", "b.OBJ"}) {
    save_mesh(dir / name, c);
    const SimplicialComplex back = load_mesh(dir / name);
    EXPECT_EQ(back.size(), c.size());
  }
  EXPECT_THROW(save_mesh(dir / "c.ply", c), IoError);
  EXPECT_THROW(load_mesh(dir / "missing.off"), IoError);
  std::ofstream(dir / "empty.off") << "OFF\n0 0 0\n";
  EXPECT_THROW(load_mesh(dir / "empty.off"), IoError);
}

TEST(NetJson, RoundTrip) {
  EpsilonNet net;
  net.eps = 0.25;
  net.seed = 1234567890123ull;
  net.surface = "flat_torus";
  net.vertices = {3, 17, 40};
  net.centers = {Vec2(0.1, 0.2), Vec2(0.3, 1.0 / 3), Vec2(0.9, 0.7)};
  net.pattern = {{0, 1}, {1, 2}};
  const Json j = Json::parse(net_to_json(net).dump());
  const EpsilonNet back = net_from_json(j);
  EXPECT_EQ(back.eps, net.eps);
  EXPECT_EQ(back.seed, net.seed);
  EXPECT_EQ(back.surface, net.surface);
  EXPECT_EQ(back.vertices, net.vertices);
  EXPECT_EQ(back.pattern, net.pattern);
  for (std::size_t i = 0; i < net.size(); ++i) EXPECT_EQ(back.centers[i], net.centers[i]);
  Json broken = j;
  broken.erase("centers");
  EXPECT_THROW(net_from_json(broken), IoError);
}

TEST(Reports, SchemaAndCsv) {
  const Json r = make_report("verify", {{"a", 1}}, {{"b", 2}}, {{"c", 3}});
  std::vector<std::string> keys;
  for (const auto& [k, v] : r.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"inputs", "metrics", "stage", "witnesses"}));
  std::ostringstream ss;
  write_histogram_csv(ss, {{0, 0.5, 3}, {0.5, 1, 0}});
  EXPECT_EQ(ss.str(), "bucket_lo,bucket_hi,count\n0,0.5,3\n0.5,1,0\n");
}
