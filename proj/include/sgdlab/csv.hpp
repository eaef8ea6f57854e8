#pragma once

#include <concepts>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace sgdlab {

/// Deterministic CSV output: comma separated, '\n' line endings, doubles in
/// round-trip "%.17g" form, booleans as true/false.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> columns) {
    bool first = true;
    for (auto c : columns) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((write_separator(first), write_field(fields)), ...);
    out_ << '\n';
  }

  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  void write_separator(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }

  void write_field(bool v) { out_ << (v ? "true" : "false"); }
  void write_field(double v) { out_ << format(v); }
  void write_field(std::string_view v) { out_ << v; }
  void write_field(const std::string& v) { out_ << v; }
  void write_field(const char* v) { out_ << v; }
  template <std::integral I>
    requires(!std::same_as<I, bool>)
  void write_field(I v) {
    out_ << std::to_string(v);
  }

  std::ostream& out_;
};

}  // namespace sgdlab
