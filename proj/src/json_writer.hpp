#pragma once

// Minimal streaming JSON emitter with a fixed number format: every double is
// printed with 17 significant digits so that values round-trip exactly and
// output is byte-stable.

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symtest::json {

inline std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

class Writer {
 public:
  explicit Writer(bool pretty = true) : pretty_(pretty) {}

  Writer& begin_object() { return open('{'); }
  Writer& end_object() { return close('}'); }
  Writer& begin_array() { return open('['); }
  Writer& end_array() { return close(']'); }

  Writer& key(std::string_view k) {
    separator();
    out_ += json::quoted(k);
    out_ += pretty_ ? ": " : ":";
    pending_value_ = true;
    return *this;
  }

  Writer& value(double v) { return raw(number(v)); }
  Writer& value(bool v) { return raw(v ? "true" : "false"); }
  Writer& value(std::size_t v) { return raw(std::to_string(v)); }
  Writer& value(unsigned long long v) { return raw(std::to_string(v)); }
  Writer& value(int v) { return raw(std::to_string(v)); }
  Writer& value(std::string_view v) { return raw(json::quoted(v)); }
  Writer& value(const char* v) { return raw(json::quoted(v)); }

  Writer& array(std::span<const double> values) {
    // Numeric arrays stay on one line even in pretty mode.
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += pretty_ ? ", " : ",";
      s += number(values[i]);
    }
    return raw(s + "]");
  }

  Writer& array(const std::vector<std::string>& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += pretty_ ? ", " : ",";
      s += json::quoted(values[i]);
    }
    return raw(s + "]");
  }

  const std::string& str() const { return out_; }

 private:
  Writer& open(char c) {
    separator();
    out_ += c;
    first_.push_back(true);
    return *this;
  }

  Writer& close(char c) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) newline();
    out_ += c;
    return *this;
  }

  Writer& raw(std::string_view s) {
    separator();
    out_ += s;
    return *this;
  }

  void separator() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (first_.empty()) return;
    if (!first_.back()) out_ += ',';
    first_.back() = false;
    newline();
  }

  void newline() {
    if (!pretty_) return;
    out_ += '\n';
    out_.append(2 * first_.size(), ' ');
  }

  bool pretty_;
  bool pending_value_ = false;
  std::vector<bool> first_;
  std::string out_;
};

}  // namespace symtest::json
