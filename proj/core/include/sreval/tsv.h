// sreval/tsv.h

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

#ifndef SREVAL_TSV_H_
#define SREVAL_TSV_H_

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace sreval {

/// Line-oriented reader for the tab-separated formats. Lines must end in LF;
/// a carriage return anywhere is a ParseError.
class TsvReader {
 public:
  explicit TsvReader(std::istream &is) : is_(is) {}

  /// Reads the next line and splits it on tabs. The views stay valid until
  /// the following call. Returns false at end of input.
  bool Next(std::vector<std::string_view> *fields);

  /// 1-based number of the line most recently returned.
  std::size_t line() const { return line_no_; }

 private:
  std::istream &is_;
  std::string line_;
  std::size_t line_no_ = 0;
};

void SplitOn(std::string_view s, char sep, std::vector<std::string_view> *out);

enum class NumberStatus { kOk, kInvalid, kOutOfRange };

/// Parses a complete decimal or scientific-notation real. Accepts an optional
/// leading '+'. Tokens such as "nan" and "inf" parse as kOk with a
/// non-finite value; the caller decides whether those are allowed.
NumberStatus ParseDouble(std::string_view tok, double *out);

bool ParseUnsigned(std::string_view tok, unsigned long long *out);

/// Shortest text that reads back to the same double.
std::string FormatDouble(double v);

/// Fixed notation with `digits` decimals, for human-readable tables.
std::string FormatFixed(double v, int digits);

/// Opens `path` for reading; throws ParseError if it cannot be opened.
std::string ReadFile(const std::string &path);

}  // namespace sreval

#endif  // SREVAL_TSV_H_
