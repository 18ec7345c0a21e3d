// sreval/common.h

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

#ifndef SREVAL_COMMON_H_
#define SREVAL_COMMON_H_

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sreval {

enum class Source { kCmn2 = 0, kMls = 1 };
enum class Gender { kMale = 0, kFemale = 1 };
enum class Label { kTarget = 0, kNontarget = 1 };
enum class Subset { kProgress = 0, kTest = 1 };
enum class PhoneMatch { kSame = 0, kDifferent = 1, kUnknown = 2 };

inline constexpr std::array<Source, 2> kAllSources = {Source::kCmn2,
                                                      Source::kMls};
inline constexpr std::array<Subset, 2> kAllSubsets = {Subset::kProgress,
                                                      Subset::kTest};

// File tokens. These are the exact strings used in every TSV format.
std::string_view ToToken(Source s);
std::string_view ToToken(Gender g);
std::string_view ToToken(Label l);
std::string_view ToToken(Subset s);
std::string_view ToToken(PhoneMatch p);

// Each returns false on an unknown token.
bool FromToken(std::string_view tok, Source *out);
bool FromToken(std::string_view tok, Gender *out);
bool FromToken(std::string_view tok, Label *out);
bool FromToken(std::string_view tok, Subset *out);
bool FromToken(std::string_view tok, PhoneMatch *out);

/// The partition a trial is scored in: data source x gender x number of
/// enrollment segments. There are four cells per source.
struct ConditionCell {
  Source source = Source::kCmn2;
  Gender gender = Gender::kMale;
  int n_enroll = 1;  // 1 or 3

  /// Dense index in [0, kNumCells): source-major, then gender, then n_enroll.
  std::size_t Index() const {
    return static_cast<std::size_t>(source) * 4 +
           static_cast<std::size_t>(gender) * 2 + (n_enroll == 3 ? 1 : 0);
  }
  static ConditionCell FromIndex(std::size_t index);
  std::string Name() const;  // e.g. "cmn2/male/3"

  friend bool operator==(const ConditionCell &, const ConditionCell &) =
      default;
};

inline constexpr std::size_t kNumCells = 8;
inline constexpr std::size_t kCellsPerSource = 4;

// Exception hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. line() is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given data (empty class or empty cell).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra failure: rank deficiency, non positive definite matrix.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sreval

#endif  // SREVAL_COMMON_H_
