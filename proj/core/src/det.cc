// core/src/det.cc

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

#include "sreval/det.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sreval/tsv.h"

namespace sreval {

namespace {

// Acklam's rational approximation for the lower region, relative error
// about 1.2e-9 before refinement.
double ProbitLowerApprox(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double ClampedProbit(double p, std::size_t n) {
  const double lo = 1.0 / (2.0 * static_cast<double>(n));
  return Probit(std::clamp(p, lo, 1.0 - lo));
}

}  // namespace

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double Probit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("probit is defined only on (0, 1)");
  if (p == 0.5) return 0.0;
  // Work in the lower half, where 1 - p is exact for p >= 0.5 and the CDF
  // can be evaluated through erfc without cancellation.
  if (p > 0.5) return -Probit(1.0 - p);
  double x = ProbitLowerApprox(p);
  // One Halley step on Phi(x) - p.
  const double e = NormalCdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

DetCurve DetPoints(std::span<const WeightedGroup> groups,
                   const CostParams &params) {
  DetCurve curve;
  for (const auto &g : groups)
    for (const ScoredTrial &t : g.trials) (t.is_target ? curve.n_target : curve.n_nontarget)++;
  const auto sweep = SweepThresholds(groups, params);
  curve.points.reserve(sweep.size());
  const OperatingPoint *best = nullptr;
  for (const OperatingPoint &p : sweep) {
    curve.points.push_back({p.theta, p.p_fa, p.p_miss,
                            ClampedProbit(p.p_fa, curve.n_nontarget),
                            ClampedProbit(p.p_miss, curve.n_target)});
    if (best == nullptr || p.c_norm < best->c_norm) best = &p;
  }
  curve.minimum = {best->theta, best->p_fa, best->p_miss, best->c_norm};
  const OperatingPoint a = RatesAt(groups, params, params.theta_actual());
  curve.actual = {a.theta, a.p_fa, a.p_miss, a.c_norm};
  return curve;
}

DetCurve DetPoints(std::span<const ScoredTrial> trials,
                   const CostParams &params) {
  const WeightedGroup g{trials, 1.0, "trials"};
  return DetPoints(std::span<const WeightedGroup>(&g, 1), params);
}

std::vector<ContourPoint> EquiCostContour(double cost, const CostParams &params,
                                          std::size_t n_points) {
  if (!(cost > 0.0)) throw Error("equi-cost contour needs a positive cost");
  const double beta = params.beta();
  const double lo = std::max(0.0, (cost - 1.0) / beta);
  const double hi = std::min(1.0, cost / beta);
  std::vector<ContourPoint> out;
  if (lo > hi || n_points == 0) return out;
  out.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t =
        n_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double p_fa = lo + (hi - lo) * t;
    const double p_miss = std::clamp(cost - beta * p_fa, 0.0, 1.0);
    out.push_back({p_fa, p_miss});
  }
  return out;
}

void WriteDetTsv(const DetCurve &curve, std::ostream &os) {
  os << "theta\tp_fa\tp_miss\tprobit_fa\tprobit_miss\n";
  for (const DetPoint &p : curve.points)
    os << FormatDouble(p.theta) << '\t' << FormatDouble(p.p_fa) << '\t'
       << FormatDouble(p.p_miss) << '\t' << FormatDouble(p.probit_fa) << '\t'
       << FormatDouble(p.probit_miss) << '\n';
}

std::vector<ContourPoint> ResampleDet(const DetCurve &curve,
                                      std::size_t n_points) {
  std::vector<ContourPoint> out;
  if (curve.points.empty() || n_points < 2) return out;
  const double z_lo = Probit(1e-4), z_hi = Probit(1.0 - 1e-4);
  out.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double z = z_lo + (z_hi - z_lo) * static_cast<double>(k) /
                                static_cast<double>(n_points - 1);
    const double target = NormalCdf(z);
    // Points run from p_fa = 1 down to 0 with p_miss rising; the first point
    // whose p_fa is within budget has the lowest miss rate.
    auto it = std::find_if(curve.points.begin(), curve.points.end(),
                           [target](const DetPoint &p) { return p.p_fa <= target; });
    out.push_back({target, it->p_miss});
  }
  return out;
}

}  // namespace sreval
