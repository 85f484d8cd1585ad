#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "symtest/simharness.hpp"
#include "symtest/spherical_test.hpp"

namespace symtest::cli {

enum class Subcommand { Test, Simulate, Sample };
enum class OutputFormat { Csv, Json };

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kInputError = 2;
inline constexpr int kDegenerate = 3;

struct CliConfig {
  Subcommand subcommand = Subcommand::Test;
  // test: data CSV; simulate: suite file.
  std::string input;
  // Empty: standard output.
  std::string output;
  // simulate: JSON-lines log of every replicate.
  std::string log;
  BootstrapConfig cfg;
  TestKind test = TestKind::Spherical;
  // sample: distribution text plus n.
  std::string distribution;
  std::size_t n = 100;
  std::optional<OutputFormat> format;
  bool fast = false;
  bool timing = false;
  // simulate: overrides the reps of every suite line.
  std::optional<std::size_t> reps;
};

/// Parses argv (including the program name). Flags are validated here, so a
/// returned config is ready to run. Throws InvalidSpec on bad combinations;
/// help and CLI syntax errors are reported through `exit_code`.
std::optional<CliConfig> parse_args(int argc, const char* const* argv,
                                    std::ostream& out, std::ostream& err,
                                    int& exit_code);

int cmd_test(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_sample(const CliConfig& config, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symtest::cli
