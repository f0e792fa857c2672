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

// Empirical soundness check: repeat certification on a fixture whose
// smoothed (or composed) decision and maximal robust radius are known in
// closed form, and count how often a certificate overstates either.

#ifndef ACESCERT_COVERAGE_HPP_
#define ACESCERT_COVERAGE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "acescert/smoothing.hpp"
#include "acescert/types.hpp"

namespace acescert {

enum class CoverageKind : std::uint8_t { kRandomizedSmoothing, kAces };

// Certification model is the linear two-class fixture with logits
// (-s/T, s/T), s = w.x + b. For kAces the selector is the entropy rule at
// `theta` and the core model is a constant returning `core_class`.
struct CoverageFixture {
  CoverageKind kind = CoverageKind::kRandomizedSmoothing;
  std::vector<double> weight{3.0, 4.0};
  double bias = -1.0;
  double temperature = 1.0;
  std::vector<double> point{0.72, 0.96};
  double theta = 0.5;
  ClassId core_class = 0;

  void validate() const;
};

struct GroundTruth {
  ClassId decided = 0;
  // Distance from the point to the nearest input where the decision flips.
  double max_radius = 0.0;
};

// Smallest |s| whose normalized softmax entropy is <= theta.
double entropy_score_threshold(double theta, double temperature);

// P[entropy rule selects the certification model] when the noisy score is
// N(score, score_sigma^2).
double selection_probability(double score, double threshold, double score_sigma);

GroundTruth rs_ground_truth(const CoverageFixture& fixture, const NoiseConfig& noise);
GroundTruth aces_ground_truth(const CoverageFixture& fixture, const NoiseConfig& noise);

struct CoverageReport {
  Count trials = 0;
  Count violations = 0;
  Count abstentions = 0;
  // violations / trials
  double violation_fraction = 0.0;
  double alpha = 0.0;
  GroundTruth truth;
};

// Trial i draws noise with sample_index i under cfg.base_seed.
CoverageReport run_coverage_experiment(const CoverageFixture& fixture, Count trials,
                                       const CertificationConfig& cfg,
                                       unsigned parallelism = 1);

// {trials, violations, violation_fraction, alpha, ...} plus the full fixture
// and certification config.
std::string coverage_report_json(const CoverageReport& report, const CoverageFixture& fixture,
                                 const CertificationConfig& cfg);

}  // namespace acescert

#endif  // ACESCERT_COVERAGE_HPP_
