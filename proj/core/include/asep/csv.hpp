#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace asep {

// Shortest round-trip representation; "nan"/"inf" for non-finite values.
std::string format_double(double x);

// RFC-4180 writer: fields containing comma, quote or newline are quoted, quotes doubled.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

 private:
  std::ostream& os_;
};

std::string csv_escape(std::string_view field);

}  // namespace asep
