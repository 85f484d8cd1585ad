#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "symtest/report_json.hpp"
#include "test_support.hpp"

namespace symtest {
namespace {

BootstrapConfig small_config() {
  BootstrapConfig cfg;
  cfg.B = 10;
  cfg.nu = 20;
  cfg.nc = 10;
  return cfg;
}

// Positions of the quoted keys in order of appearance.
std::vector<std::size_t> key_positions(const std::string& s,
                                       const std::vector<std::string>& keys) {
  std::vector<std::size_t> pos;
  for (const auto& k : keys) pos.push_back(s.find("\"" + k + "\":"));
  return pos;
}

TEST(ReportJson, SphericalKeyOrder) {
  const TestReport r = test_spherical(testing::gaussian_matrix(30, 3, 1), small_config());
  const std::string s = to_json(r);
  const std::vector<std::string> keys{"test",   "n",        "d",       "statistic",
                                      "quantile", "p_value", "reject",  "argmax",
                                      "config", "zero_norm_count", "radial_tail_index",
                                      "warnings", "boot_stats"};
  const auto pos = key_positions(s, keys);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    ASSERT_NE(pos[i], std::string::npos) << keys[i];
    if (i) EXPECT_LT(pos[i - 1], pos[i]) << keys[i];
  }
  EXPECT_NE(s.find("\"test\": \"spherical\""), std::string::npos);
  EXPECT_EQ(s.find("wall_time"), std::string::npos);
  EXPECT_EQ(s.back(), '\n');
}

TEST(ReportJson, EllipticalFields) {
  const EllipticalReport r = test_elliptical(testing::gaussian_matrix(30, 3, 2), small_config());
  const std::string s = to_json(r);
  EXPECT_NE(s.find("\"test\": \"elliptical\""), std::string::npos);
  for (const char* k : {"mean", "cov", "condition_number", "max_abs_mean", "max_cov_deviation",
                        "mardia_kurtosis"}) {
    EXPECT_NE(s.find(std::string("\"") + k + "\":"), std::string::npos) << k;
  }
}

TEST(ReportJson, TimingOnlyWhenRequested) {
  TestReport r;
  r.wall_time = 1.5;
  JsonOptions opts;
  EXPECT_EQ(to_json(r, opts).find("wall_time"), std::string::npos);
  opts.include_timing = true;
  EXPECT_NE(to_json(r, opts).find("\"wall_time\": 1.5"), std::string::npos);
}

TEST(ReportJson, ByteIdenticalReruns) {
  const auto x = testing::gaussian_matrix(40, 3, 3);
  EXPECT_EQ(to_json(test_spherical(x, small_config())), to_json(test_spherical(x, small_config())));
  EXPECT_EQ(to_json(test_elliptical(x, small_config())),
            to_json(test_elliptical(x, small_config())));
}

TEST(ReportJson, NumbersRoundTripAndNonFiniteIsNull) {
  TestReport r;
  r.statistic = 0.1 + 0.2;
  r.radial_tail_index = std::numeric_limits<double>::quiet_NaN();
  const std::string s = to_json(r);
  const auto at = s.find("\"statistic\": ") + 13;
  EXPECT_EQ(std::stod(s.substr(at)), 0.1 + 0.2);
  EXPECT_NE(s.find("\"radial_tail_index\": null"), std::string::npos);
}

TEST(ReportJson, CompactAndEscaped) {
  TestReport r;
  r.warnings = {"a \"quoted\"\nline"};
  JsonOptions opts;
  opts.pretty = false;
  const std::string s = to_json(r, opts);
  EXPECT_EQ(s.find('\n'), s.size() - 1);
  EXPECT_NE(s.find(R"("a \"quoted\"\nline")"), std::string::npos);
}

TEST(ReportJson, EnumNames) {
  EXPECT_EQ(to_string(Pairing::FullProduct), "full_product");
  EXPECT_EQ(to_string(GridMode::Shared), "shared");
  EXPECT_EQ(to_string(ThresholdMode::ExactSupremum), "exact_supremum");
}

}  // namespace
}  // namespace symtest
