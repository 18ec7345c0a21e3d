// sreval/det.h

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

#ifndef SREVAL_DET_H_
#define SREVAL_DET_H_

#include <ostream>
#include <span>
#include <vector>

#include "sreval/metrics.h"

namespace sreval {

/// Inverse of the standard normal CDF. Throws Error unless 0 < p < 1.
double Probit(double p);

/// Standard normal CDF.
double NormalCdf(double x);

struct DetPoint {
  double theta = 0.0;
  double p_fa = 0.0;
  double p_miss = 0.0;
  double probit_fa = 0.0;    // of p_fa clamped to [1/2n, 1-1/2n]
  double probit_miss = 0.0;  // likewise, n = number of trials in the class
};

struct DetMarker {
  double theta = 0.0;
  double p_fa = 0.0;
  double p_miss = 0.0;
  double c_norm = 0.0;
};

/// DET step curve: one point per candidate threshold, ordered by increasing
/// threshold, so p_fa falls from 1 to 0 while p_miss rises from 0 to 1.
struct DetCurve {
  std::vector<DetPoint> points;
  DetMarker actual;   // at theta = ln(beta)
  DetMarker minimum;  // at the minimizing threshold
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

DetCurve DetPoints(std::span<const WeightedGroup> groups,
                   const CostParams &params);
DetCurve DetPoints(std::span<const ScoredTrial> trials, const CostParams &params);

struct ContourPoint {
  double p_fa = 0.0;
  double p_miss = 0.0;
};

/// Points with p_miss + beta * p_fa == cost inside the unit square, evenly
/// spaced in p_fa. Empty if the line misses the square.
std::vector<ContourPoint> EquiCostContour(double cost, const CostParams &params,
                                          std::size_t n_points);

/// TSV with header theta, p_fa, p_miss, probit_fa, probit_miss.
void WriteDetTsv(const DetCurve &curve, std::ostream &os);

/// Resamples the curve at fixed false-alarm probabilities (probit-spaced
/// between 1e-4 and 1-1e-4), taking the lowest p_miss reachable at each.
/// The result no longer reveals which threshold step belongs to which trial.
std::vector<ContourPoint> ResampleDet(const DetCurve &curve,
                                      std::size_t n_points);

}  // namespace sreval

#endif  // SREVAL_DET_H_
