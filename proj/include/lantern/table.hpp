#pragma once
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace lantern {

// %.17g: shortest formatting that round-trips IEEE doubles, fixed for
// byte-identical output across runs.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// RFC-4180-style rows: comma separated, CRLF terminated, header row first.
// Every value written here is numeric or a plain token, so no quoting.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  CsvWriter& field(std::string_view s) { return field(std::string(s)); }
  CsvWriter& field(const char* s) { return field(std::string(s)); }
  CsvWriter& field(double v) { return field(fmt17(v)); }
  CsvWriter& field(long long v) { return field(std::to_string(v)); }
  CsvWriter& field(int v) { return field(std::to_string(v)); }
  CsvWriter& empty() { return field(std::string()); }

  void endrow() {
    out_ << "\r\n";
    first_ = true;
  }

  void row(std::initializer_list<std::string_view> cells) {
    for (auto c : cells) field(c);
    endrow();
  }

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace lantern
