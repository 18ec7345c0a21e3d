// core/src/common.cc

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

#include "sreval/common.h"

namespace sreval {

std::string_view ToToken(Source s) {
  return s == Source::kCmn2 ? "cmn2" : "mls";
}
std::string_view ToToken(Gender g) {
  return g == Gender::kMale ? "male" : "female";
}
std::string_view ToToken(Label l) {
  return l == Label::kTarget ? "target" : "nontarget";
}
std::string_view ToToken(Subset s) {
  return s == Subset::kProgress ? "progress" : "test";
}
std::string_view ToToken(PhoneMatch p) {
  switch (p) {
    case PhoneMatch::kSame: return "same";
    case PhoneMatch::kDifferent: return "different";
    case PhoneMatch::kUnknown: return "unknown";
  }
  return "unknown";
}

bool FromToken(std::string_view tok, Source *out) {
  if (tok == "cmn2") { *out = Source::kCmn2; return true; }
  if (tok == "mls") { *out = Source::kMls; return true; }
  return false;
}
bool FromToken(std::string_view tok, Gender *out) {
  if (tok == "male") { *out = Gender::kMale; return true; }
  if (tok == "female") { *out = Gender::kFemale; return true; }
  return false;
}
bool FromToken(std::string_view tok, Label *out) {
  if (tok == "target") { *out = Label::kTarget; return true; }
  if (tok == "nontarget") { *out = Label::kNontarget; return true; }
  return false;
}
bool FromToken(std::string_view tok, Subset *out) {
  if (tok == "progress") { *out = Subset::kProgress; return true; }
  if (tok == "test") { *out = Subset::kTest; return true; }
  return false;
}
bool FromToken(std::string_view tok, PhoneMatch *out) {
  if (tok == "same") { *out = PhoneMatch::kSame; return true; }
  if (tok == "different") { *out = PhoneMatch::kDifferent; return true; }
  if (tok == "unknown") { *out = PhoneMatch::kUnknown; return true; }
  return false;
}

ConditionCell ConditionCell::FromIndex(std::size_t index) {
  ConditionCell c;
  c.source = static_cast<Source>(index / 4);
  c.gender = static_cast<Gender>((index / 2) % 2);
  c.n_enroll = (index % 2) ? 3 : 1;
  return c;
}

std::string ConditionCell::Name() const {
  std::string out(ToToken(source));
  out += '/';
  out += ToToken(gender);
  out += '/';
  out += std::to_string(n_enroll);
  return out;
}

ParseError::ParseError(const std::string &what, std::size_t line)
    : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
      line_(line) {}

}  // namespace sreval
