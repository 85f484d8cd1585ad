#pragma once

// Monte Carlo level/power experiments: draw `reps` samples from a
// distribution, run a test on each and report the rejection frequency.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symtest/errors.hpp"
#include "symtest/samplers.hpp"
#include "symtest/spherical_test.hpp"

namespace symtest {

enum class TestKind { Spherical, Elliptical };

std::string_view to_string(TestKind k);
TestKind parse_test_kind(std::string_view text);

struct ExperimentSpec {
  DistributionSpec distribution;
  std::size_t n = 100;
  std::size_t reps = 500;
  TestKind test = TestKind::Spherical;
  BootstrapConfig cfg;

  void validate() const;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::size_t rejections = 0;
  std::size_t failures = 0;
  std::size_t reps_completed = 0;
  // rejections / reps_completed
  double rejection_rate = 0.0;
  double std_error = 0.0;
  std::vector<double> p_values;  // empty unless RunOptions::keep_p_values
  std::vector<std::string> failure_messages;
  double wall_time = 0.0;
};

struct RunOptions {
  // Worker threads for the replicate loop (<= 0: OpenMP default).
  int threads = 0;
  bool keep_p_values = false;
  // One JSON object per replicate, written in replicate order.
  std::ostream* replicate_log = nullptr;
  std::ostream* progress = nullptr;
};

// Thrown when more than 1% of the replicates of an experiment fail.
class ExperimentAborted : public Error {
 public:
  using Error::Error;
};

/// Replicate r draws its data from the Data stream of (seed, r) and runs the
/// test with replicate key r, so results do not depend on the schedule.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const RunOptions& opts = {});

std::vector<ExperimentResult> run_suite(const std::vector<ExperimentSpec>& specs,
                                        const RunOptions& opts = {});

inline constexpr std::string_view kCsvHeader =
    "distribution,d,n,test,reps,B,Nu,Nc,c0,alpha,rejection_rate,std_error,seed";

void write_csv(std::ostream& out, const std::vector<ExperimentResult>& results);
// Throws Error naming `path` when it cannot be written.
void write_csv(const std::filesystem::path& path,
               const std::vector<ExperimentResult>& results);

/// Defaults for fields a suite line leaves out.
struct SuiteDefaults {
  std::size_t n = 100;
  std::size_t reps = 500;
  TestKind test = TestKind::Spherical;
  BootstrapConfig cfg;

  static SuiteDefaults standard();
  // Coarser grid and fewer replicates for quick runs: Nu=200, Nc=100,
  // reps=200.
  static SuiteDefaults fast();
};

/// One experiment per non-blank line: a distribution spec followed by
/// whitespace-separated key=value fields (n, reps, test, B, Nu, Nc, c0,
/// alpha, seed, pairing, grid). '#' starts a comment.
std::vector<ExperimentSpec> parse_suite(std::istream& in,
                                        const SuiteDefaults& defaults);
ExperimentSpec parse_experiment_line(std::string_view line,
                                     const SuiteDefaults& defaults,
                                     std::size_t line_number = 1);

/// Rejection rate of the published bootstrap test for this setting, when the
/// simulation study reports one.
std::optional<double> reference_rate(const ExperimentSpec& spec);

}  // namespace symtest
