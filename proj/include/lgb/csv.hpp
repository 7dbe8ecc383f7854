#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lgb/errors.hpp"

namespace lgb {

/// Strict CSV: comma separated, no quoting, no escapes, no embedded commas.
/// Input files here are machine-written; anything irregular is a real error
/// and should fail loudly rather than be guessed at.
namespace csv {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

/// Reads all rows. Every row must have the same column count as the first.
inline std::vector<std::vector<std::string>> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t width = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    auto fields = split_line(line);
    if (rows.empty()) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(width) +
                            " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

inline void write_file(const std::string& path,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path);
}

/// Integer field parse that rejects junk like "12x" or empty strings.
inline std::int64_t to_int(const std::string& s, const std::string& context) {
  if (s.empty()) throw ValidationError(context + ": empty numeric field");
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError(context + ": not an integer: '" + s + "'");
  }
  if (pos != s.size())
    throw ValidationError(context + ": not an integer: '" + s + "'");
  return v;
}

}  // namespace csv
}  // namespace lgb
