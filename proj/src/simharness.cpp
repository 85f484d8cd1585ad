#include "symtest/simharness.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json_writer.hpp"
#include "symtest/elliptical_test.hpp"
#include "symtest/errors.hpp"
#include "symtest/report_json.hpp"

namespace symtest {

std::string_view to_string(TestKind k) {
  return k == TestKind::Spherical ? "spherical" : "elliptical";
}

TestKind parse_test_kind(std::string_view text) {
  if (text == "spherical") return TestKind::Spherical;
  if (text == "elliptical") return TestKind::Elliptical;
  throw InvalidSpec("unknown test kind '" + std::string(text) +
                    "' (expected spherical or elliptical)");
}

void ExperimentSpec::validate() const {
  distribution.validate();
  cfg.validate();
  if (reps < 1) throw InvalidSpec("reps must be >= 1");
  if (n < 1) throw InvalidSpec("n must be >= 1");
}

namespace {

struct ReplicateOutcome {
  bool ok = false;
  bool reject = false;
  double statistic = 0.0;
  double quantile = 0.0;
  double p_value = 1.0;
  std::string error;
};

ReplicateOutcome run_replicate(const ExperimentSpec& spec, std::uint64_t r) {
  ReplicateOutcome out;
  try {
    RngStream rng(spec.cfg.master_seed, {r, 0, Purpose::Data});
    const SampleMatrix x = sample_distribution(spec.distribution, spec.n, rng);
    BootstrapConfig cfg = spec.cfg;
    cfg.threads = 1;
    const TestReport t = spec.test == TestKind::Spherical
                             ? test_spherical(x, cfg, r)
                             : test_elliptical(x, cfg, r).test;
    out.ok = true;
    out.reject = t.reject;
    out.statistic = t.statistic;
    out.quantile = t.quantile;
    out.p_value = t.p_value;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

std::string log_line(std::uint64_t r, const ReplicateOutcome& o) {
  json::Writer w(false);
  w.begin_object();
  w.key("replicate").value(static_cast<unsigned long long>(r));
  if (o.ok) {
    w.key("statistic").value(o.statistic);
    w.key("quantile").value(o.quantile);
    w.key("p_value").value(o.p_value);
    w.key("reject").value(o.reject);
  } else {
    w.key("error").value(o.error);
  }
  w.end_object();
  return w.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

  std::vector<ReplicateOutcome> outcomes(spec.reps);
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (long rr = 0; rr < static_cast<long>(spec.reps); ++rr) {
    outcomes[rr] = run_replicate(spec, static_cast<std::uint64_t>(rr));
  }

  ExperimentResult res;
  res.spec = spec;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const ReplicateOutcome& o = outcomes[r];
    if (opts.replicate_log) *opts.replicate_log << log_line(r, o) << '\n';
    if (!o.ok) {
      ++res.failures;
      res.failure_messages.push_back("replicate " + std::to_string(r) + ": " + o.error);
      continue;
    }
    ++res.reps_completed;
    if (o.reject) ++res.rejections;
    if (opts.keep_p_values) res.p_values.push_back(o.p_value);
  }
  if (res.failures * 100 > spec.reps) {
    throw ExperimentAborted(spec.distribution.to_string() + ": " +
                            std::to_string(res.failures) + " of " +
                            std::to_string(spec.reps) + " replicates failed; first: " +
                            res.failure_messages.front());
  }
  if (res.reps_completed > 0) {
    const double m = static_cast<double>(res.reps_completed);
    res.rejection_rate = static_cast<double>(res.rejections) / m;
    res.std_error = std::sqrt(res.rejection_rate * (1.0 - res.rejection_rate) / m);
  }
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<ExperimentResult> run_suite(const std::vector<ExperimentSpec>& specs,
                                        const RunOptions& opts) {
  std::vector<ExperimentResult> results;
  results.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    results.push_back(run_experiment(specs[i], opts));
    if (opts.progress) {
      const ExperimentResult& r = results.back();
      std::ostream& p = *opts.progress;
      p << '[' << (i + 1) << '/' << specs.size() << "] "
        << r.spec.distribution.to_string() << " n=" << r.spec.n << ' '
        << to_string(r.spec.test) << ": rate " << r.rejection_rate << " (se "
        << r.std_error << ')';
      if (const auto ref = reference_rate(r.spec)) {
        p << ", published " << *ref;
      }
      if (r.failures > 0) p << ", " << r.failures << " failed";
      p << '\n';
    }
  }
  return results;
}

void write_csv(std::ostream& out, const std::vector<ExperimentResult>& results) {
  out << kCsvHeader << '\n';
  for (const ExperimentResult& r : results) {
    const ExperimentSpec& s = r.spec;
    out << '"' << s.distribution.to_string() << "\"," << s.distribution.dim << ','
        << s.n << ',' << to_string(s.test) << ',' << s.reps << ',' << s.cfg.B << ','
        << s.cfg.nu << ',' << s.cfg.nc << ',' << json::number(s.cfg.c0) << ','
        << json::number(s.cfg.alpha) << ',' << json::number(r.rejection_rate) << ','
        << json::number(r.std_error) << ',' << s.cfg.master_seed << '\n';
  }
}

void write_csv(const std::filesystem::path& path,
               const std::vector<ExperimentResult>& results) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  write_csv(f, results);
  f.flush();
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

SuiteDefaults SuiteDefaults::standard() { return SuiteDefaults{}; }

SuiteDefaults SuiteDefaults::fast() {
  SuiteDefaults s;
  s.reps = 200;
  s.cfg.nu = 200;
  s.cfg.nc = 100;
  return s;
}

namespace {

template <class T>
T parse_unsigned(std::string_view key, std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw InvalidSpec("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
    throw InvalidSpec("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

ExperimentSpec parse_experiment_line(std::string_view line,
                                     const SuiteDefaults& defaults,
                                     std::size_t line_number) {
  try {
    std::istringstream in{std::string(line)};
    std::string token;
    if (!(in >> token)) throw InvalidSpec("empty experiment line");
    ExperimentSpec spec;
    spec.distribution = DistributionSpec::parse(token);
    spec.n = defaults.n;
    spec.reps = defaults.reps;
    spec.test = defaults.test;
    spec.cfg = defaults.cfg;
    std::vector<std::string> seen;
    while (in >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw InvalidSpec("expected key=value, got '" + token + "'");
      }
      const std::string key = token.substr(0, eq);
      const std::string_view v = std::string_view(token).substr(eq + 1);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
        throw InvalidSpec("duplicate key '" + key + "'");
      }
      seen.push_back(key);
      if (key == "n") spec.n = parse_unsigned<std::size_t>(key, v);
      else if (key == "reps") spec.reps = parse_unsigned<std::size_t>(key, v);
      else if (key == "test") spec.test = parse_test_kind(v);
      else if (key == "B") spec.cfg.B = parse_unsigned<std::size_t>(key, v);
      else if (key == "Nu") spec.cfg.nu = parse_unsigned<std::size_t>(key, v);
      else if (key == "Nc") spec.cfg.nc = parse_unsigned<std::size_t>(key, v);
      else if (key == "c0") spec.cfg.c0 = parse_real(key, v);
      else if (key == "alpha") spec.cfg.alpha = parse_real(key, v);
      else if (key == "seed") spec.cfg.master_seed = parse_unsigned<std::uint64_t>(key, v);
      else if (key == "pairing") {
        if (v == "paired") spec.cfg.pairing = Pairing::Paired;
        else if (v == "full_product") spec.cfg.pairing = Pairing::FullProduct;
        else throw InvalidSpec("pairing must be paired or full_product");
      } else if (key == "grid") {
        if (v == "fresh") spec.cfg.grid_mode = GridMode::Fresh;
        else if (v == "shared") spec.cfg.grid_mode = GridMode::Shared;
        else throw InvalidSpec("grid must be fresh or shared");
      } else {
        throw InvalidSpec("unknown key '" + key + "'");
      }
    }
    spec.validate();
    return spec;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(line_number, e.what());
  }
}

std::vector<ExperimentSpec> parse_suite(std::istream& in, const SuiteDefaults& defaults) {
  std::vector<ExperimentSpec> specs;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    specs.push_back(parse_experiment_line(line, defaults, number));
  }
  return specs;
}

namespace {

struct Reference {
  const char* distribution;
  TestKind test;
  std::size_t n;
  double rate;
};

// Rejection rates of the bootstrap test reported in the simulation study.
constexpr TestKind S = TestKind::Spherical;
constexpr TestKind E = TestKind::Elliptical;
constexpr Reference kReferences[] = {
    // Level of the spherical test.
    {"gauss:rho=0,d=3", S, 100, 0.053}, {"gauss:rho=0,d=6", S, 100, 0.057},
    {"gauss:rho=0,d=10", S, 100, 0.05}, {"gauss:rho=0,d=3", S, 200, 0.063},
    {"gauss:rho=0,d=6", S, 200, 0.056}, {"gauss:rho=0,d=10", S, 200, 0.067},
    {"cauchy:d=3", S, 100, 0.003}, {"cauchy:d=6", S, 100, 0.008},
    {"cauchy:d=10", S, 100, 0.009}, {"cauchy:d=3", S, 200, 0.015},
    {"cauchy:d=6", S, 200, 0.008}, {"cauchy:d=10", S, 200, 0.005},
    {"mvt:df=5,d=3", S, 100, 0.048}, {"mvt:df=5,d=6", S, 100, 0.047},
    {"mvt:df=5,d=10", S, 100, 0.052}, {"mvt:df=5,d=3", S, 200, 0.055},
    {"mvt:df=5,d=6", S, 200, 0.045}, {"mvt:df=5,d=10", S, 200, 0.047},
    {"kotz:N=2,r=1,s=0.5,d=3", S, 100, 0.065}, {"kotz:N=2,r=1,s=0.5,d=6", S, 100, 0.062},
    {"kotz:N=2,r=1,s=0.5,d=10", S, 100, 0.051}, {"kotz:N=2,r=1,s=0.5,d=3", S, 200, 0.063},
    {"kotz:N=2,r=1,s=0.5,d=6", S, 200, 0.064}, {"kotz:N=2,r=1,s=0.5,d=10", S, 200, 0.063},
    {"pvii:N=10,m=2,d=3", S, 100, 0.061}, {"pvii:N=10,m=2,d=6", S, 100, 0.054},
    {"pvii:N=10,m=2,d=10", S, 100, 0.059}, {"pvii:N=10,m=2,d=3", S, 200, 0.058},
    {"pvii:N=10,m=2,d=6", S, 200, 0.062}, {"pvii:N=10,m=2,d=10", S, 200, 0.062},
    // Power of the spherical test.
    {"gauss:rho=0.4,d=3", S, 100, 0.772}, {"gauss:rho=0.4,d=6", S, 100, 0.986},
    {"gauss:rho=0.4,d=10", S, 100, 0.998}, {"gauss:rho=0.4,d=3", S, 200, 0.991},
    {"gauss:rho=0.4,d=6", S, 200, 1}, {"gauss:rho=0.4,d=10", S, 200, 1},
    {"gauss:rho=0.6,d=3", S, 100, 1}, {"gauss:rho=0.6,d=6", S, 100, 1},
    {"gauss:rho=0.6,d=10", S, 100, 1}, {"gauss:rho=0.6,d=3", S, 200, 1},
    {"gauss:rho=0.6,d=6", S, 200, 1}, {"gauss:rho=0.6,d=10", S, 200, 1},
    {"mg:mu1=1,d=3", S, 100, 0.34}, {"mg:mu1=1,d=6", S, 100, 0.191},
    {"mg:mu1=1,d=10", S, 100, 0.096}, {"mg:mu1=1,d=3", S, 200, 0.761},
    {"mg:mu1=1,d=6", S, 200, 0.481}, {"mg:mu1=1,d=10", S, 200, 0.191},
    {"mg:mu1=1.5,d=3", S, 100, 0.976}, {"mg:mu1=1.5,d=6", S, 100, 0.883},
    {"mg:mu1=1.5,d=10", S, 100, 0.574}, {"mg:mu1=1.5,d=3", S, 200, 1},
    {"mg:mu1=1.5,d=6", S, 200, 1}, {"mg:mu1=1.5,d=10", S, 200, 0.975},
    {"ncg:mu1=1,d=3", S, 100, 1}, {"ncg:mu1=1,d=6", S, 100, 1},
    {"ncg:mu1=1,d=10", S, 100, 1}, {"ncg:mu1=1,d=3", S, 200, 1},
    {"ncg:mu1=1,d=6", S, 200, 1}, {"ncg:mu1=1,d=10", S, 200, 1},
    {"ncg:mu1=2,d=3", S, 100, 1}, {"ncg:mu1=2,d=6", S, 100, 1},
    {"ncg:mu1=2,d=10", S, 100, 1}, {"ncg:mu1=2,d=3", S, 200, 1},
    {"ncg:mu1=2,d=6", S, 200, 1}, {"ncg:mu1=2,d=10", S, 200, 1},
    {"metat:df=5,d=3", S, 100, 0.053}, {"metat:df=5,d=6", S, 100, 0.07},
    {"metat:df=5,d=10", S, 100, 0.051}, {"metat:df=5,d=3", S, 200, 0.068},
    {"metat:df=5,d=6", S, 200, 0.042}, {"metat:df=5,d=10", S, 200, 0.053},
    {"cube:d=3", S, 100, 0.086}, {"cube:d=6", S, 100, 0.067},
    {"cube:d=10", S, 100, 0.057}, {"cube:d=3", S, 200, 0.102},
    {"cube:d=6", S, 200, 0.063}, {"cube:d=10", S, 200, 0.05},
    {"exp3", S, 100, 1}, {"exp3", S, 200, 1},
    {"tri3", S, 100, 1}, {"tri3", S, 200, 1},
    // Level of the elliptical test.
    {"gauss:rho=0,d=3", E, 100, 0.061}, {"gauss:rho=0,d=6", E, 100, 0.058},
    {"gauss:rho=0,d=10", E, 100, 0.068}, {"gauss:rho=0,d=3", E, 200, 0.066},
    {"gauss:rho=0,d=6", E, 200, 0.069}, {"gauss:rho=0,d=10", E, 200, 0.063},
    {"gauss:rho=0.4,d=3", E, 100, 0.065}, {"gauss:rho=0.4,d=6", E, 100, 0.057},
    {"gauss:rho=0.4,d=10", E, 100, 0.069}, {"gauss:rho=0.4,d=3", E, 200, 0.051},
    {"gauss:rho=0.4,d=6", E, 200, 0.054}, {"gauss:rho=0.4,d=10", E, 200, 0.064},
    {"gauss:rho=0.6,d=3", E, 100, 0.065}, {"gauss:rho=0.6,d=6", E, 100, 0.052},
    {"gauss:rho=0.6,d=10", E, 100, 0.071}, {"gauss:rho=0.6,d=3", E, 200, 0.067},
    {"gauss:rho=0.6,d=6", E, 200, 0.053}, {"gauss:rho=0.6,d=10", E, 200, 0.082},
    {"kotz:N=2,r=1,s=0.5,d=3", E, 100, 0.068}, {"kotz:N=2,r=1,s=0.5,d=6", E, 100, 0.069},
    {"kotz:N=2,r=1,s=0.5,d=10", E, 100, 0.056}, {"kotz:N=2,r=1,s=0.5,d=3", E, 200, 0.068},
    {"kotz:N=2,r=1,s=0.5,d=6", E, 200, 0.07}, {"kotz:N=2,r=1,s=0.5,d=10", E, 200, 0.063},
    // Power of the elliptical test, d = 2.
    {"mix2", E, 50, 0.575}, {"mix2", E, 100, 0.922}, {"mix2", E, 200, 0.999},
    {"gammanormal:d=2", E, 50, 0.316}, {"gammanormal:d=2", E, 100, 0.591},
    {"gammanormal:d=2", E, 200, 0.928},
    {"unitcube:d=2", E, 50, 0.204}, {"unitcube:d=2", E, 100, 0.410},
    {"unitcube:d=2", E, 200, 0.756},
    {"burr:beta=0.5,d=2", E, 50, 0.521}, {"burr:beta=0.5,d=2", E, 100, 0.910},
    {"burr:beta=0.5,d=2", E, 200, 1},
    {"sectorA", E, 50, 0.977}, {"sectorA", E, 100, 1}, {"sectorA", E, 200, 1},
    // Power of the elliptical test, d = 3.
    {"mix3", E, 100, 1}, {"mix3", E, 200, 1},
    {"gammanormal:d=3", E, 100, 0.551}, {"gammanormal:d=3", E, 200, 0.932},
    {"unitcube:d=3", E, 100, 0.399}, {"unitcube:d=3", E, 200, 0.797},
    {"burr:beta=0.5,d=3", E, 100, 0.938}, {"burr:beta=0.5,d=3", E, 200, 1},
};

}  // namespace

std::optional<double> reference_rate(const ExperimentSpec& spec) {
  for (const Reference& ref : kReferences) {
    if (ref.test != spec.test || ref.n != spec.n) continue;
    if (DistributionSpec::parse(ref.distribution) == spec.distribution) return ref.rate;
  }
  return std::nullopt;
}

}  // namespace symtest
