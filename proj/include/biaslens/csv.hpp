#pragma once

// RFC 4180 CSV writing and byte-stable numeric formatting for reports:
// 6 significant digits, "inf"/"-inf" for infinities.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "biaslens/types.hpp"

namespace biaslens {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string csv_escape(const std::string& field) {
  bool needs_quote = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quote) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
    append_row(header_);
  }

  void append_row(const std::vector<std::string>& fields) {
    if (fields.size() != header_.size())
      throw Error("csv row has " + std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(header_.size()));
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) body_ += ',';
      body_ += csv_escape(fields[i]);
    }
    body_ += "\r\n";
  }

  const std::string& str() const { return body_; }

 private:
  std::vector<std::string> header_;
  std::string body_;
};

}  // namespace biaslens
