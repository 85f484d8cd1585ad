#include "symtest/report_json.hpp"

#include "json_writer.hpp"

namespace symtest {

std::string_view to_string(Pairing p) {
  return p == Pairing::Paired ? "paired" : "full_product";
}

std::string_view to_string(GridMode m) {
  return m == GridMode::Fresh ? "fresh" : "shared";
}

std::string_view to_string(ThresholdMode m) {
  return m == ThresholdMode::Grid ? "grid" : "exact_supremum";
}

namespace {

void write_config(json::Writer& w, const BootstrapConfig& c) {
  w.key("config").begin_object();
  w.key("B").value(c.B);
  w.key("Nu").value(c.nu);
  w.key("Nc").value(c.nc);
  w.key("c0").value(c.c0);
  w.key("alpha").value(c.alpha);
  w.key("seed").value(static_cast<unsigned long long>(c.master_seed));
  w.key("pairing").value(to_string(c.pairing));
  w.key("grid_mode").value(to_string(c.grid_mode));
  w.key("thresholds").value(to_string(c.thresholds));
  w.end_object();
}

// Fields shared by both report kinds, in their fixed order.
void write_test_fields(json::Writer& w, const TestReport& r, std::string_view kind,
                       const JsonOptions& opts) {
  w.key("test").value(kind);
  w.key("n").value(r.n);
  w.key("d").value(r.d);
  w.key("statistic").value(r.statistic);
  w.key("quantile").value(r.quantile);
  w.key("p_value").value(r.p_value);
  w.key("reject").value(r.reject);
  w.key("argmax").begin_object();
  w.key("pair").value(r.argmax.k);
  w.key("threshold_index").value(r.argmax.j);
  w.end_object();
  write_config(w, r.config);
  w.key("zero_norm_count").value(r.zero_norm_count);
  w.key("radial_tail_index").value(r.radial_tail_index);
  w.key("warnings").array(r.warnings);
  if (opts.include_timing) w.key("wall_time").value(r.wall_time);
  w.key("boot_stats").array(r.boot_stats);
}

}  // namespace

std::string to_json(const TestReport& report, const JsonOptions& opts) {
  json::Writer w(opts.pretty);
  w.begin_object();
  write_test_fields(w, report, "spherical", opts);
  w.end_object();
  return w.str() + "\n";
}

std::string to_json(const EllipticalReport& report, const JsonOptions& opts) {
  json::Writer w(opts.pretty);
  w.begin_object();
  write_test_fields(w, report.test, "elliptical", opts);
  w.key("mean").array(report.mean);
  w.key("cov").begin_array();
  const std::size_t d = report.cov.dim();
  for (std::size_t i = 0; i < d; ++i) {
    w.array(std::span<const double>(report.cov.data().data() + i * d, d));
  }
  w.end_array();
  w.key("condition_number").value(report.condition_number);
  w.key("max_abs_mean").value(report.max_abs_mean);
  w.key("max_cov_deviation").value(report.max_cov_deviation);
  w.key("mardia_kurtosis").value(report.mardia_kurtosis);
  w.end_object();
  return w.str() + "\n";
}

}  // namespace symtest
