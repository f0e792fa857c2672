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

#include "acescert/smoothing.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "acescert/errors.hpp"
#include "acescert/stats.hpp"

namespace acescert {

void CertificationConfig::validate() const {
  if (n0 == 0) throw InvalidArgument("n0 must be >= 1");
  if (n == 0) throw InvalidArgument("n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

double certified_radius(double p_lower, const NoiseConfig& noise) {
  if (!(p_lower > 0.5 && p_lower < 1.0)) {
    throw DomainError("certified_radius: p_lower must lie in (1/2, 1), got " +
                      std::to_string(p_lower));
  }
  return noise.sigma() * std_normal_quantile(p_lower);
}

double certified_radius_two_sided(double pa_lower, double pb_upper,
                                  const NoiseConfig& noise) {
  if (!(pa_lower > 0.0 && pa_lower < 1.0 && pb_upper > 0.0 && pb_upper < 1.0)) {
    throw DomainError("certified_radius_two_sided: bounds must lie in (0, 1)");
  }
  if (pa_lower < pb_upper) {
    throw DomainError("certified_radius_two_sided: pA lower bound below pB upper bound");
  }
  if (pa_lower == pb_upper) return 0.0;
  // The quantile is antisymmetric only up to rounding, so complementary
  // bounds go through the one-sided formula.
  if (pb_upper == 1.0 - pa_lower && pa_lower > 0.5) {
    return certified_radius(pa_lower, noise);
  }
  return 0.5 * noise.sigma() *
         (std_normal_quantile(pa_lower) - std_normal_quantile(pb_upper));
}

ClassId top_class(std::span<const Count> counts) {
  if (counts.empty()) throw InvalidArgument("top_class: empty counts");
  ClassId best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = static_cast<ClassId>(c);
  }
  return best;
}

std::pair<ClassId, ClassId> top_two_classes(std::span<const Count> counts) {
  if (counts.size() < 2) throw InvalidArgument("top_two_classes: need >= 2 classes");
  const ClassId first = top_class(counts);
  ClassId second = first == 0 ? 1 : 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (c != first && counts[c] > counts[second]) second = static_cast<ClassId>(c);
  }
  return {first, second};
}

SmoothedVerdict rs_certify_counts(ClassId candidate, Count candidate_count, Count n,
                                  double alpha, const NoiseConfig& noise) {
  SmoothedVerdict verdict;
  verdict.p_lower = clopper_pearson_lower(candidate_count, n, Confidence(1.0 - alpha));
  if (verdict.p_lower > 0.5) {
    verdict.predicted = candidate;
    verdict.radius = certified_radius(verdict.p_lower, noise);
  }
  return verdict;
}

SmoothedVerdict rs_certify(const DrawSource& source, const CertificationConfig& cfg) {
  cfg.validate();
  const std::size_t m = source.num_classes();
  const ClassId candidate =
      top_class(tally(source.draws(Phase::kSelection, cfg.n0), m));
  const std::vector<Count> counts = tally(source.draws(Phase::kEstimation, cfg.n), m);
  return rs_certify_counts(candidate, counts[candidate], cfg.n, cfg.alpha, cfg.noise);
}

SmoothedVerdict rs_certify(const ClassifierOracle& oracle, Point x,
                           const CertificationConfig& cfg, std::uint32_t sample_index) {
  const OracleDrawSource source(oracle, {x.begin(), x.end()}, cfg.noise, cfg.base_seed,
                                sample_index);
  return rs_certify(source, cfg);
}

PredictVerdict rs_predict_counts(std::span<const Count> counts, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const auto [a, b] = top_two_classes(counts);
  PredictVerdict verdict;
  verdict.p_value = binom_p_value(counts[a], counts[a] + counts[b], 0.5);
  if (verdict.p_value <= alpha) verdict.predicted = a;
  return verdict;
}

PredictVerdict rs_predict(const ClassifierOracle& oracle, Point x, Count n, double alpha,
                          const NoiseConfig& noise, Seed seed, std::uint32_t sample_index) {
  if (n < 2) throw InvalidArgument("rs_predict: n must be >= 2");
  const NoiseStream stream{seed, sample_index, Phase::kPrediction, 0};
  return rs_predict_counts(sample_with_noise(oracle, x, n, noise, stream).counts, alpha);
}

}  // namespace acescert
