// core/src/tsv.cc

// Copyright 2026  The sreval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "sreval/tsv.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sreval/common.h"

namespace sreval {

bool TsvReader::Next(std::vector<std::string_view> *fields) {
  if (!std::getline(is_, line_)) return false;
  ++line_no_;
  if (line_.find('\r') != std::string::npos)
    throw ParseError("carriage return found; files must use LF line endings",
                     line_no_);
  SplitOn(line_, '\t', fields);
  return true;
}

void SplitOn(std::string_view s, char sep, std::vector<std::string_view> *out) {
  out->clear();
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out->push_back(s.substr(start));
      return;
    }
    out->push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

NumberStatus ParseDouble(std::string_view tok, double *out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return NumberStatus::kInvalid;
  const char *first = tok.data(), *last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  if (ec == std::errc::result_out_of_range) return NumberStatus::kOutOfRange;
  if (ec != std::errc() || ptr != last) return NumberStatus::kInvalid;
  return NumberStatus::kOk;
}

bool ParseUnsigned(std::string_view tok, unsigned long long *out) {
  if (tok.empty()) return false;
  const char *last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), last, *out);
  return ec == std::errc() && ptr == last;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string FormatFixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string ReadFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace sreval
