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

// Randomized smoothing for a single base classifier: the certified radius
// and the Monte Carlo Certify / Predict procedures.

#ifndef ACESCERT_SMOOTHING_HPP_
#define ACESCERT_SMOOTHING_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "acescert/oracles.hpp"
#include "acescert/types.hpp"

namespace acescert {

struct CertificationConfig {
  Count n0 = 100;
  Count n = 100000;
  double alpha = 0.001;
  NoiseConfig noise{0.25};
  Seed base_seed = 0;

  // Throws InvalidArgument unless n0, n >= 1 and 0 < alpha < 1.
  void validate() const;
};

// Certified(cls, radius) when `predicted` is set; abstain otherwise.
struct SmoothedVerdict {
  std::optional<ClassId> predicted;
  double radius = 0.0;
  // Clopper-Pearson bound on the candidate class (0 if never computed).
  double p_lower = 0.0;

  bool abstained() const { return !predicted.has_value(); }
  friend bool operator==(const SmoothedVerdict&, const SmoothedVerdict&) = default;
};

struct PredictVerdict {
  std::optional<ClassId> predicted;
  double p_value = 1.0;

  bool abstained() const { return !predicted.has_value(); }
  friend bool operator==(const PredictVerdict&, const PredictVerdict&) = default;
};

// sigma * Phi^-1(p_lower). DomainError unless 1/2 < p_lower < 1.
double certified_radius(double p_lower, const NoiseConfig& noise);

// sigma/2 * (Phi^-1(pA) - Phi^-1(pB)). DomainError unless pA >= pB with both
// in (0, 1).
double certified_radius_two_sided(double pa_lower, double pb_upper,
                                  const NoiseConfig& noise);

// Index of the largest count, lowest index on ties.
ClassId top_class(std::span<const Count> counts);

// The two largest counts' indices (distinct), lowest index on ties.
std::pair<ClassId, ClassId> top_two_classes(std::span<const Count> counts);

// Certify given the candidate class and its estimation-phase count.
SmoothedVerdict rs_certify_counts(ClassId candidate, Count candidate_count, Count n,
                                  double alpha, const NoiseConfig& noise);

SmoothedVerdict rs_certify(const DrawSource& source, const CertificationConfig& cfg);
SmoothedVerdict rs_certify(const ClassifierOracle& oracle, Point x,
                           const CertificationConfig& cfg, std::uint32_t sample_index = 0);

// Predict on a tally: p-value of the top count against the runner-up.
PredictVerdict rs_predict_counts(std::span<const Count> counts, double alpha);

PredictVerdict rs_predict(const ClassifierOracle& oracle, Point x, Count n, double alpha,
                          const NoiseConfig& noise, Seed seed,
                          std::uint32_t sample_index = 0);

}  // namespace acescert

#endif  // ACESCERT_SMOOTHING_HPP_
