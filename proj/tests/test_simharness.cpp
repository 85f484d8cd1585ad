#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "symtest/simharness.hpp"

namespace symtest {
namespace {

ExperimentSpec quick_spec(const char* dist, std::size_t reps, std::uint64_t seed = 1) {
  SuiteDefaults d = SuiteDefaults::fast();
  d.cfg.B = 30;
  d.cfg.nu = 60;
  d.cfg.nc = 40;
  d.reps = reps;
  d.n = 60;
  ExperimentSpec s = parse_experiment_line(dist, d);
  s.cfg.master_seed = seed;
  return s;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(TestKindNames, RoundTrip) {
  EXPECT_EQ(parse_test_kind(to_string(TestKind::Spherical)), TestKind::Spherical);
  EXPECT_EQ(parse_test_kind(to_string(TestKind::Elliptical)), TestKind::Elliptical);
  EXPECT_THROW(parse_test_kind("ellipsoidal"), InvalidSpec);
}

TEST(RunExperiment, SingleForcedRejection) {
  ExperimentSpec s = quick_spec("ncg:mu1=2,d=3", 1);
  s.n = 100;
  const ExperimentResult r = run_experiment(s);
  EXPECT_EQ(r.reps_completed, 1u);
  EXPECT_EQ(r.rejections, 1u);
  EXPECT_EQ(r.rejection_rate, 1.0);
  EXPECT_EQ(r.std_error, 0.0);
}

TEST(RunExperiment, CountsAndStandardError) {
  RunOptions opts;
  opts.keep_p_values = true;
  const ExperimentResult r = run_experiment(quick_spec("gauss:rho=0.4,d=3", 40), opts);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_EQ(r.reps_completed, 40u);
  EXPECT_EQ(r.p_values.size(), 40u);
  const double count = r.rejection_rate * 40.0;
  EXPECT_EQ(count, std::round(count));
  EXPECT_EQ(static_cast<std::size_t>(std::round(count)), r.rejections);
  EXPECT_DOUBLE_EQ(r.std_error, std::sqrt(r.rejection_rate * (1 - r.rejection_rate) / 40.0));
  EXPECT_GE(r.wall_time, 0.0);
}

TEST(RunExperiment, ScheduleDeterminism) {
  const ExperimentSpec s = quick_spec("kotz:N=2,r=1,s=0.5,d=3", 24, 9);
  std::string first_log;
  std::string first_csv;
  for (int t : {1, 4, 16}) {
    std::ostringstream log;
    RunOptions opts;
    opts.threads = t;
    opts.keep_p_values = true;
    opts.replicate_log = &log;
    const ExperimentResult r = run_experiment(s, opts);
    std::ostringstream csv;
    write_csv(csv, {r});
    if (t == 1) {
      first_log = log.str();
      first_csv = csv.str();
    } else {
      EXPECT_EQ(log.str(), first_log) << t;
      EXPECT_EQ(csv.str(), first_csv) << t;
    }
  }
  EXPECT_EQ(count_lines(first_log), 24u);
  EXPECT_EQ(first_log.rfind("{\"replicate\":0,", 0), 0u);
}

TEST(RunExperiment, ReplicateFailuresAbort) {
  // n = 3 in d = 3 is below the elliptical minimum for every replicate.
  ExperimentSpec s = quick_spec("gauss:rho=0,d=3 test=elliptical", 5);
  s.n = 3;
  EXPECT_THROW(run_experiment(s), ExperimentAborted);
}

TEST(RunExperiment, EllipticalRuns) {
  const ExperimentResult r = run_experiment(quick_spec("mix2 test=elliptical", 10));
  EXPECT_EQ(r.reps_completed, 10u);
  EXPECT_GE(r.rejection_rate, 0.0);
  EXPECT_LE(r.rejection_rate, 1.0);
}

TEST(RunSuite, EmptySuiteHeaderOnly) {
  std::ostringstream out;
  write_csv(out, run_suite({}));
  EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
}

TEST(RunSuite, OrderPreservedAndProgress) {
  std::ostringstream progress;
  RunOptions opts;
  opts.progress = &progress;
  const auto results =
      run_suite({quick_spec("gauss:rho=0,d=3", 4), quick_spec("cube:d=2", 3)}, opts);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].spec.distribution.to_string(), "gauss:rho=0,d=3");
  EXPECT_EQ(results[1].spec.distribution.dim, 2u);
  std::ostringstream out;
  write_csv(out, results);
  const std::string csv = out.str();
  EXPECT_EQ(count_lines(csv), 3u);
  EXPECT_LT(csv.find("\"gauss:rho=0,d=3\",3,60,spherical,4,30,60,40,10,0.050000000000000003,"),
            csv.find("\"cube:d=2\",2,60,spherical,3,"));
  EXPECT_EQ(count_lines(progress.str()), 2u);
  EXPECT_NE(progress.str().find("[2/2] cube:d=2"), std::string::npos);
}

TEST(RunSuite, CsvPathErrorNamesPath) {
  const std::filesystem::path bad = "/nonexistent-dir/results.csv";
  try {
    write_csv(bad, {});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

TEST(ParseSuite, LinesCommentsAndDefaults) {
  std::istringstream in(
      "# level check\n"
      "\n"
      "gauss:rho=0,d=3 n=200 reps=50 test=spherical\n"
      "  kotz:N=2,r=1,s=0.5,d=6 test=elliptical B=20 Nu=30 Nc=10 c0=4 alpha=0.1 seed=7 "
      "pairing=full_product grid=shared # trailing\n");
  const auto specs = parse_suite(in, SuiteDefaults::standard());
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].n, 200u);
  EXPECT_EQ(specs[0].reps, 50u);
  EXPECT_EQ(specs[0].cfg.nu, 1000u);
  EXPECT_EQ(specs[0].cfg.nc, 500u);
  EXPECT_EQ(specs[1].test, TestKind::Elliptical);
  EXPECT_EQ(specs[1].n, 100u);
  EXPECT_EQ(specs[1].reps, 500u);
  EXPECT_EQ(specs[1].cfg.B, 20u);
  EXPECT_EQ(specs[1].cfg.c0, 4.0);
  EXPECT_EQ(specs[1].cfg.alpha, 0.1);
  EXPECT_EQ(specs[1].cfg.master_seed, 7u);
  EXPECT_EQ(specs[1].cfg.pairing, Pairing::FullProduct);
  EXPECT_EQ(specs[1].cfg.grid_mode, GridMode::Shared);
}

TEST(ParseSuite, FastDefaults) {
  const auto s = parse_experiment_line("cube:d=3", SuiteDefaults::fast());
  EXPECT_EQ(s.reps, 200u);
  EXPECT_EQ(s.cfg.nu, 200u);
  EXPECT_EQ(s.cfg.nc, 100u);
}

TEST(ParseSuite, ErrorsCarryLineNumbers) {
  for (const char* bad : {"gauss:rho=0,d=3 n=abc", "gauss:rho=0,d=3 bogus=1",
                          "gauss:rho=0,d=3 n=10 n=20", "nosuchlaw:d=3", "gauss:rho=0,d=3 reps=0",
                          "gauss:rho=0,d=3 alpha=1.5", "gauss:rho=0,d=3 plain"}) {
    std::istringstream in(std::string("# header\n\ncube:d=3\n") + bad + "\n");
    try {
      parse_suite(in, SuiteDefaults::standard());
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 4u) << bad;
      EXPECT_EQ(std::string(e.what()).rfind("line 4: ", 0), 0u) << e.what();
    }
  }
}

TEST(ReferenceRate, PublishedValues) {
  auto spec = parse_experiment_line("gauss:rho=0,d=3 n=100", SuiteDefaults::standard());
  EXPECT_EQ(reference_rate(spec), 0.053);
  spec = parse_experiment_line("mix2 n=100 test=elliptical", SuiteDefaults::standard());
  EXPECT_EQ(reference_rate(spec), 0.922);
  spec = parse_experiment_line("kotz:N=2,r=1,s=0.5,d=6 test=elliptical",
                               SuiteDefaults::standard());
  EXPECT_EQ(reference_rate(spec), 0.069);
  spec = parse_experiment_line("mix2 n=100", SuiteDefaults::standard());
  EXPECT_FALSE(reference_rate(spec).has_value());
  spec = parse_experiment_line("gauss:rho=0,d=3 n=150", SuiteDefaults::standard());
  EXPECT_FALSE(reference_rate(spec).has_value());
}

TEST(PowerOrdering, StrongerCorrelationNotLessPowerful) {
  auto make = [](const char* dist) {
    ExperimentSpec s = parse_experiment_line(dist, SuiteDefaults::fast());
    s.reps = 100;
    s.cfg.master_seed = 21;
    return s;
  };
  const auto low = run_experiment(make("gauss:rho=0.4,d=3"));
  const auto high = run_experiment(make("gauss:rho=0.6,d=3"));
  const double se = std::sqrt(low.std_error * low.std_error + high.std_error * high.std_error);
  EXPECT_GE(high.rejection_rate, low.rejection_rate - 2.0 * se)
      << high.rejection_rate << " vs " << low.rejection_rate;
}

// Null experiment G d=3 n=100 rerun with 20 seeds at 500 replicates: the
// rate lies within three binomial standard errors of alpha in at least 19.
TEST(BinomialConsistency, NullRatesNearAlpha) {
  const double alpha = 0.05;
  const std::size_t reps = 500;
  const double band = 3.0 * std::sqrt(alpha * (1 - alpha) / reps);
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ExperimentSpec s = parse_experiment_line("gauss:rho=0,d=3", SuiteDefaults::fast());
    s.reps = reps;
    s.cfg.master_seed = 1000 + seed;
    const double rate = run_experiment(s).rejection_rate;
    if (std::abs(rate - alpha) <= band) ++inside;
    std::cout << "[ info ] seed " << s.cfg.master_seed << ": rate " << rate << '\n';
  }
  EXPECT_GE(inside, 19);
}

}  // namespace
}  // namespace symtest
