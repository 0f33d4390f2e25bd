#include "fatlas/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace fatlas;

namespace {

const std::filesystem::path kData = FATLAS_TEST_DATA;

// Numbers agree to 1e-9 (relative), everything else exactly.
void expect_close(const Json& want, const Json& got, const std::string& path) {
  if (want.is_number() && got.is_number()) {
    const double a = want.get<double>(), b = got.get<double>();
    EXPECT_LE(std::abs(a - b), 1e-9 * std::max(1.0, std::abs(a))) << path;
    return;
  }
  ASSERT_EQ(want.type(), got.type()) << path;
  if (want.is_object()) {
    ASSERT_EQ(want.size(), got.size()) << path;
    for (const auto& [k, v] : want.items()) {
      ASSERT_TRUE(got.contains(k)) << path << "." << k;
      expect_close(v, got.at(k), path + "." + k);
    }
  } else if (want.is_array()) {
    ASSERT_EQ(want.size(), got.size()) << path;
    for (std::size_t i = 0; i < want.size(); ++i) expect_close(want[i], got[i], path + "[" + std::to_string(i) + "]");
  } else {
    EXPECT_EQ(want, got) << path;
  }
}

}  // namespace

class GoldenSphere : public ::testing::TestWithParam<int> {};

TEST_P(GoldenSphere, TriangulateReportMatches) {
  const int seed = GetParam();
  Overrides o;
  o.seed = seed;
  o.out = std::filesystem::temp_directory_path() / ("fatlas_golden_" + std::to_string(seed));
  const RunConfig c = load_run_config(kData / "sphere.json", o);
  std::ostringstream sink;
  CommandOptions opts;
  opts.timestamp = false;
  opts.log = &sink;
  Json report;
  ASSERT_EQ(cmd_triangulate(c, opts, &report), kExitOk);
  const Json golden = read_json(kData / "golden" / ("sphere_seed" + std::to_string(seed) + ".json"));
  expect_close(golden, report, "report");
}

INSTANTIATE_TEST_SUITE_P(Seeds, GoldenSphere, ::testing::Values(0, 1, 2));
