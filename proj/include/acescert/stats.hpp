// Copyright 2026 The acescert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Statistical primitives shared by every certification routine: the
// standard normal CDF and quantile, the one-sided Clopper-Pearson lower
// bound, binomial upper-tail p-values, softmax and normalized entropy.
//
// All functions are pure and safe to call concurrently.

#ifndef ACESCERT_STATS_HPP_
#define ACESCERT_STATS_HPP_

#include <span>
#include <vector>

#include "acescert/types.hpp"

namespace acescert {

// Confidence level strictly inside (0, 1).
class Confidence {
 public:
  explicit Confidence(double level);

  double level() const { return level_; }
  // 1 - level.
  double alpha() const { return alpha_; }

 private:
  double level_;
  double alpha_;
};

// Phi(x). Throws InvalidArgument for non-finite x.
double std_normal_cdf(double x);

// Phi^-1(p) for p in (0, 1). Rational approximation followed by one Newton
// step on Phi. Throws DomainError at p = 0 or p = 1 and InvalidArgument
// outside [0, 1] or for NaN.
double std_normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Largest p such that P[Binomial(n, p) >= k] <= 1 - conf, i.e. the
// (1 - conf) quantile of Beta(k, n - k + 1). Exact closed forms at k = 0
// (returns 0) and k = n (returns (1 - conf)^(1/n)); otherwise the Beta CDF is
// inverted to an absolute tolerance well below 1e-10.
double clopper_pearson_lower(Count k, Count n, Confidence conf);

// P[Binomial(n, p) >= k]. Exact term summation for n <= 10000, incomplete
// beta above.
double binom_p_value(Count k, Count n, double p);

// Numerically stable softmax. Requires at least two finite logits.
std::vector<double> softmax(std::span<const double> logits);

// -sum p_i log_m p_i with m = dist.size(), so the result lies in [0, 1].
// Probabilities below 1e-300 contribute nothing.
double normalized_entropy(std::span<const double> dist);

// Convenience: normalized_entropy(softmax(logits)) without validating the
// intermediate distribution twice.
double logits_entropy(std::span<const double> logits);

}  // namespace acescert

#endif  // ACESCERT_STATS_HPP_
