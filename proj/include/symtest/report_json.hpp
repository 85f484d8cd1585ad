#pragma once

#include <string>
#include <string_view>

#include "symtest/elliptical_test.hpp"
#include "symtest/spherical_test.hpp"

namespace symtest {

struct JsonOptions {
  // wall_time differs between runs; it is left out unless asked for so that
  // reruns with the same seed are byte-identical.
  bool include_timing = false;
  bool pretty = true;
};

std::string to_json(const TestReport& report, const JsonOptions& opts = {});
std::string to_json(const EllipticalReport& report, const JsonOptions& opts = {});

std::string_view to_string(Pairing p);
std::string_view to_string(GridMode m);
std::string_view to_string(ThresholdMode m);

}  // namespace symtest
