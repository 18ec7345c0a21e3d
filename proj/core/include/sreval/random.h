// sreval/random.h

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

#ifndef SREVAL_RANDOM_H_
#define SREVAL_RANDOM_H_

#include <cstdint>
#include <random>

namespace sreval {

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the distributions below are written
/// out here because the std:: distributions are implementation-defined and
/// would make outputs differ between standard libraries.
class Rng {
 public:
  static constexpr const char *kGeneratorName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, index), e.g. one per bootstrap resample.
  static Rng ForStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t NextU64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double Uniform();
  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);
  /// Standard normal via the Box-Muller transform.
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive stream seeds.
std::uint64_t Mix64(std::uint64_t x);

}  // namespace sreval

#endif  // SREVAL_RANDOM_H_
