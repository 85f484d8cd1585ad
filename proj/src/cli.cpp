#include "symtest/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "json_writer.hpp"
#include "symtest/csv.hpp"
#include "symtest/elliptical_test.hpp"
#include "symtest/errors.hpp"
#include "symtest/report_json.hpp"
#include "symtest/samplers.hpp"

namespace symtest::cli {

namespace {

constexpr std::size_t kFastNu = 200;
constexpr std::size_t kFastNc = 100;

int threads_from_env() {
  const char* env = std::getenv("SYMTEST_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t pos = 0;
    const int t = std::stoi(env, &pos);
    if (pos != std::string(env).size() || t < 0) throw std::invalid_argument(env);
    return t;
  } catch (const std::exception&) {
    throw InvalidSpec(std::string("SYMTEST_THREADS is not a thread count: '") + env +
                      "'");
  }
}

// Writes `text` to --out when given, else to `out`.
void emit(const CliConfig& config, std::ostream& out, const std::string& text) {
  if (config.output.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(config.output, std::ios::binary);
  if (!f) throw Error("cannot open '" + config.output + "' for writing");
  f << text;
  f.flush();
  if (!f) throw Error("write to '" + config.output + "' failed");
}

// Maps library exceptions to exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SingularCovariance& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const EigenFailure& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const ExperimentAborted& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

std::string test_csv_summary(const TestReport& t, std::string_view kind) {
  std::ostringstream s;
  s << "test,n,d,statistic,quantile,p_value,reject\n"
    << kind << ',' << t.n << ',' << t.d << ',' << json::number(t.statistic) << ','
    << json::number(t.quantile) << ',' << json::number(t.p_value) << ','
    << (t.reject ? "true" : "false") << '\n';
  return s.str();
}

std::string results_json(const std::vector<ExperimentResult>& results, bool timing) {
  json::Writer w;
  w.begin_array();
  for (const ExperimentResult& r : results) {
    w.begin_object();
    w.key("distribution").value(r.spec.distribution.to_string());
    w.key("d").value(r.spec.distribution.dim);
    w.key("n").value(r.spec.n);
    w.key("test").value(to_string(r.spec.test));
    w.key("reps").value(r.spec.reps);
    w.key("B").value(r.spec.cfg.B);
    w.key("Nu").value(r.spec.cfg.nu);
    w.key("Nc").value(r.spec.cfg.nc);
    w.key("c0").value(r.spec.cfg.c0);
    w.key("alpha").value(r.spec.cfg.alpha);
    w.key("seed").value(static_cast<unsigned long long>(r.spec.cfg.master_seed));
    w.key("rejections").value(r.rejections);
    w.key("reps_completed").value(r.reps_completed);
    w.key("failures").value(r.failures);
    w.key("rejection_rate").value(r.rejection_rate);
    w.key("std_error").value(r.std_error);
    if (const auto ref = reference_rate(r.spec)) w.key("published_rate").value(*ref);
    if (timing) w.key("wall_time").value(r.wall_time);
    w.end_object();
  }
  w.end_array();
  return w.str() + "\n";
}

}  // namespace

std::optional<CliConfig> parse_args(int argc, const char* const* argv,
                                    std::ostream& out, std::ostream& err,
                                    int& exit_code) {
  CliConfig c;
  c.cfg.threads = threads_from_env();

  CLI::App app{"Tests of spherical and elliptical symmetry", "symtest"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "symtest 1.0.0");

  std::string format;
  std::string test_kind = "spherical";
  std::vector<std::string> sample_tokens;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.cfg.master_seed, "Master seed")->capture_default_str();
    sub->add_option("--threads", c.cfg.threads,
                    "Worker threads (0: all; default from SYMTEST_THREADS)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out,-o", c.output, "Output file (default: stdout)");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_bootstrap = [&](CLI::App* sub) {
    sub->add_option("--alpha", c.cfg.alpha, "Test level")->capture_default_str();
    sub->add_option("--B", c.cfg.B, "Bootstrap replicates")->capture_default_str();
    sub->add_option("--Nu", c.cfg.nu, "Direction pairs")->capture_default_str();
    sub->add_option("--Nc", c.cfg.nc, "Threshold grid intervals")->capture_default_str();
    sub->add_option("--c0", c.cfg.c0, "Threshold grid half-width")->capture_default_str();
    sub->add_flag("--full-product", "Use every (u_k, v_l) combination of directions");
    sub->add_flag("--shared-grid", "Reuse the observed directions in every bootstrap replicate");
    sub->add_flag("--exact-threshold", "Take the supremum over all thresholds");
    sub->add_flag("--fast", c.fast, "Coarse grid (Nu=200, Nc=100; simulate: reps=200)");
    sub->add_flag("--timing", c.timing, "Include wall times in the output");
  };

  CLI::App* test = app.add_subcommand("test", "Test a data set read from CSV");
  test->add_option("input", c.input, "Data CSV (n rows, d columns)")->required();
  test->add_option("--test", test_kind, "Null hypothesis")
      ->check(CLI::IsMember({"spherical", "elliptical"}))
      ->capture_default_str();
  add_common(test);
  add_bootstrap(test);

  CLI::App* sim = app.add_subcommand("simulate", "Run a Monte Carlo suite");
  sim->add_option("suite", c.input, "Suite file, one experiment per line")->required();
  sim->add_option("--test", test_kind, "Default test for lines without test=")
      ->check(CLI::IsMember({"spherical", "elliptical"}));
  sim->add_option("--n", c.n, "Default sample size for lines without n=");
  sim->add_option("--reps", c.reps, "Replicates per experiment (overrides the suite)");
  sim->add_option("--log", c.log, "JSON-lines log of every replicate");
  add_common(sim);
  add_bootstrap(sim);

  CLI::App* sample = app.add_subcommand("sample", "Draw a sample from a distribution");
  sample->add_option("spec", sample_tokens,
                     "Distribution spec followed by optional n=, d=, seed= fields")
      ->required();
  sample->add_option("--n", c.n, "Sample size")->capture_default_str();
  add_common(sample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    exit_code = app.exit(e, out, err);
    if (exit_code != 0) exit_code = kInputError;
    return std::nullopt;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == test) c.subcommand = Subcommand::Test;
  if (chosen == sim) c.subcommand = Subcommand::Simulate;
  if (chosen == sample) c.subcommand = Subcommand::Sample;

  if (!format.empty()) c.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  c.test = parse_test_kind(test_kind);

  if (c.subcommand != Subcommand::Sample) {
    if (chosen->count("--full-product")) c.cfg.pairing = Pairing::FullProduct;
    if (chosen->count("--shared-grid")) c.cfg.grid_mode = GridMode::Shared;
    if (chosen->count("--exact-threshold")) c.cfg.thresholds = ThresholdMode::ExactSupremum;
    if (c.fast) {
      if (!chosen->count("--Nu")) c.cfg.nu = kFastNu;
      if (!chosen->count("--Nc")) c.cfg.nc = kFastNc;
    }
    c.cfg.validate();
    if (c.reps && *c.reps < 1) throw InvalidSpec("--reps must be at least 1");
  } else {
    std::string spec = sample_tokens.front();
    for (std::size_t i = 1; i < sample_tokens.size(); ++i) {
      const std::string& tok = sample_tokens[i];
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw InvalidSpec("expected key=value, got '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      const std::string value = tok.substr(eq + 1);
      try {
        std::size_t pos = 0;
        if (key == "n") {
          c.n = std::stoull(value, &pos);
        } else if (key == "seed") {
          c.cfg.master_seed = std::stoull(value, &pos);
        } else if (key == "d") {
          spec += (spec.find(':') == std::string::npos ? ":d=" : ",d=") + value;
          pos = value.size();
        } else {
          throw InvalidSpec("unknown field '" + key + "'");
        }
        if (pos != value.size()) throw std::invalid_argument(value);
      } catch (const std::logic_error&) {
        throw InvalidSpec("bad value for " + key + ": '" + value + "'");
      }
    }
    if (c.n < 1) throw InvalidSpec("n must be at least 1");
    DistributionSpec::parse(spec);
    c.distribution = spec;
  }
  exit_code = kOk;
  return c;
}

int cmd_test(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SampleMatrix x = [&] {
      try {
        return read_matrix_csv(config.input);
      } catch (const ParseError& e) {
        throw Error(config.input + ": " + e.what());
      }
    }();
    const JsonOptions jopts{config.timing, true};
    const OutputFormat fmt = config.format.value_or(OutputFormat::Json);
    std::string text;
    const TestReport* t = nullptr;
    EllipticalReport er;
    TestReport sr;
    if (config.test == TestKind::Spherical) {
      sr = test_spherical(x, config.cfg);
      t = &sr;
      text = fmt == OutputFormat::Json ? to_json(sr, jopts) : test_csv_summary(sr, "spherical");
    } else {
      er = test_elliptical(x, config.cfg);
      t = &er.test;
      text = fmt == OutputFormat::Json ? to_json(er, jopts)
                                       : test_csv_summary(er.test, "elliptical");
    }
    for (const std::string& w : t->warnings) err << "warning: " << w << '\n';
    emit(config, out, text);
    return kOk;
  });
}

int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SuiteDefaults defaults = config.fast ? SuiteDefaults::fast() : SuiteDefaults::standard();
    const std::size_t fast_reps = defaults.reps;
    defaults.cfg = config.cfg;
    defaults.cfg.threads = 0;
    defaults.test = config.test;
    defaults.n = config.n;
    defaults.reps = config.reps.value_or(fast_reps);

    std::ifstream in(config.input);
    if (!in) throw Error("cannot open '" + config.input + "'");
    std::vector<ExperimentSpec> specs;
    try {
      specs = parse_suite(in, defaults);
    } catch (const ParseError& e) {
      throw Error(config.input + ": " + e.what());
    }
    if (config.reps) {
      for (ExperimentSpec& s : specs) s.reps = *config.reps;
    }

    std::ofstream log;
    RunOptions opts;
    opts.threads = config.cfg.threads;
    opts.progress = &err;
    if (!config.log.empty()) {
      log.open(config.log, std::ios::binary);
      if (!log) throw Error("cannot open '" + config.log + "' for writing");
      opts.replicate_log = &log;
    }
    const std::vector<ExperimentResult> results = run_suite(specs, opts);
    if (log.is_open()) {
      log.flush();
      if (!log) throw Error("write to '" + config.log + "' failed");
    }

    if (config.format.value_or(OutputFormat::Csv) == OutputFormat::Json) {
      emit(config, out, results_json(results, config.timing));
    } else {
      std::ostringstream s;
      write_csv(s, results);
      emit(config, out, s.str());
    }
    return kOk;
  });
}

int cmd_sample(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DistributionSpec spec = DistributionSpec::parse(config.distribution);
    RngStream rng(config.cfg.master_seed, {0, 0, Purpose::Data});
    const SampleMatrix x = sample_distribution(spec, config.n, rng);
    if (config.format.value_or(OutputFormat::Csv) == OutputFormat::Json) {
      json::Writer w;
      w.begin_array();
      for (std::size_t i = 0; i < x.rows(); ++i) w.array(x.row(i));
      w.end_array();
      emit(config, out, w.str() + "\n");
    } else {
      std::ostringstream s;
      write_matrix_csv(s, x);
      emit(config, out, s.str());
    }
    return kOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  int code = kOk;
  std::optional<CliConfig> config;
  try {
    config = parse_args(argc, argv, out, err, code);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  if (!config) return code;
  switch (config->subcommand) {
    case Subcommand::Test: return cmd_test(*config, out, err);
    case Subcommand::Simulate: return cmd_simulate(*config, out, err);
    case Subcommand::Sample: return cmd_sample(*config, out, err);
  }
  return kFailure;
}

}  // namespace symtest::cli
