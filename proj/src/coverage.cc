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

#include "acescert/coverage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "acescert/aces.hpp"
#include "acescert/errors.hpp"
#include "acescert/oracles.hpp"
#include "acescert/parallel.hpp"
#include "acescert/stats.hpp"
#include "json.hpp"

namespace acescert {
namespace {

constexpr std::uint32_t kMaxTrials = std::numeric_limits<std::uint32_t>::max();

double binary_entropy_at(double score, double temperature) {
  const std::array<double, 2> z{-score / temperature, score / temperature};
  return logits_entropy(z);
}

double fixture_score(const CoverageFixture& f) {
  double s = f.bias;
  for (std::size_t i = 0; i < f.weight.size(); ++i) s += f.weight[i] * f.point[i];
  return s;
}

double norm_of(const std::vector<double>& w) {
  double sq = 0.0;
  for (double v : w) sq += v * v;
  return std::sqrt(sq);
}

struct TrialOutcome {
  bool abstained = true;
  bool violation = false;
};

}  // namespace

void CoverageFixture::validate() const {
  if (weight.empty()) throw InvalidArgument("fixture weight is empty");
  if (weight.size() != point.size()) {
    throw InvalidArgument("fixture point and weight dimensions differ");
  }
  if (!(norm_of(weight) > 0.0) || !std::isfinite(norm_of(weight))) {
    throw InvalidArgument("fixture weight must be finite and non-zero");
  }
  for (double v : point) {
    if (!std::isfinite(v)) throw InvalidArgument("fixture point must be finite");
  }
  if (!std::isfinite(bias)) throw InvalidArgument("fixture bias must be finite");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("fixture temperature must be positive");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0, 1]");
  if (core_class > 1) throw InvalidArgument("core_class must be 0 or 1");
}

double entropy_score_threshold(double theta, double temperature) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0, 1]");
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  if (binary_entropy_at(0.0, temperature) <= theta) return 0.0;
  double lo = 0.0;
  double hi = temperature;
  while (binary_entropy_at(hi, temperature) > theta) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (binary_entropy_at(mid, temperature) <= theta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double selection_probability(double score, double threshold, double score_sigma) {
  if (threshold <= 0.0) return 1.0;
  return std_normal_cdf((score - threshold) / score_sigma) +
         std_normal_cdf((-score - threshold) / score_sigma);
}

GroundTruth rs_ground_truth(const CoverageFixture& fixture, const NoiseConfig& noise) {
  fixture.validate();
  LinearSyntheticClassifier clf(fixture.weight, fixture.bias, fixture.temperature);
  const double s = fixture_score(fixture);
  if (s == 0.0) throw DomainError("fixture point lies on the decision boundary");
  return GroundTruth{s > 0.0 ? ClassId{1} : ClassId{0},
                     true_max_radius(clf, fixture.point, noise)};
}

GroundTruth aces_ground_truth(const CoverageFixture& fixture, const NoiseConfig& noise) {
  fixture.validate();
  const double wn = norm_of(fixture.weight);
  const double score_sigma = noise.sigma() * wn;
  const double t = entropy_score_threshold(fixture.theta, fixture.temperature);

  // Selection probability is even in s and increasing in |s|. Find the
  // switch point s* where it crosses 1/2; selected iff |s| > s*.
  double s_star = 0.0;
  const bool selected_everywhere = selection_probability(0.0, t, score_sigma) > 0.5;
  if (!selected_everywhere) {
    double lo = 0.0;
    double hi = t + 10.0 * score_sigma;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (selection_probability(mid, t, score_sigma) > 0.5) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    s_star = 0.5 * (lo + hi);
  }

  auto decide = [&](double s) -> ClassId {
    const bool selected = selected_everywhere || std::abs(s) > s_star;
    if (selected) return s > 0.0 ? 1 : 0;
    return fixture.core_class;
  };

  std::vector<double> breaks{0.0};
  if (!selected_everywhere && s_star > 0.0) {
    breaks = {-s_star, 0.0, s_star};
  }
  const double s = fixture_score(fixture);
  for (double b : breaks) {
    if (s == b) throw DomainError("fixture point lies on a decision breakpoint");
  }
  const ClassId here = decide(s);

  // Each region between breakpoints has constant output; probe midpoints
  // (or one unit beyond the outermost points) to find the flips.
  double left = -std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double b = breaks[i];
    const double below = i == 0 ? b - 1.0 : 0.5 * (breaks[i - 1] + b);
    const double above = i + 1 == breaks.size() ? b + 1.0 : 0.5 * (b + breaks[i + 1]);
    if (decide(below) == decide(above)) continue;
    if (b < s) left = std::max(left, b);
    if (b > s) right = std::min(right, b);
  }
  const double dist = std::min(s - left, right - s);
  return GroundTruth{here, dist / wn};
}

CoverageReport run_coverage_experiment(const CoverageFixture& fixture, Count trials,
                                       const CertificationConfig& cfg,
                                       unsigned parallelism) {
  if (trials == 0) throw InvalidArgument("trials must be positive");
  if (trials > kMaxTrials) throw InvalidArgument("too many trials");
  cfg.validate();
  fixture.validate();

  const bool aces = fixture.kind == CoverageKind::kAces;
  const GroundTruth truth =
      aces ? aces_ground_truth(fixture, cfg.noise) : rs_ground_truth(fixture, cfg.noise);
  const LinearSyntheticClassifier clf(fixture.weight, fixture.bias, fixture.temperature);
  const SelectionMechanism mech = EntropyThreshold{fixture.theta};

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_for(outcomes.size(), resolve_parallelism(parallelism), [&](std::size_t i) {
    const OracleDrawSource source(clf, fixture.point, cfg.noise, cfg.base_seed,
                                  static_cast<std::uint32_t>(i));
    std::optional<ClassId> decided;
    double radius = 0.0;
    if (aces) {
      const AcesVerdict v = aces_certify(source, fixture.core_class, cfg, mech);
      decided = v.decided;
      radius = v.radius;
    } else {
      const SmoothedVerdict v = rs_certify(source, cfg);
      decided = v.predicted;
      radius = v.radius;
    }
    TrialOutcome& out = outcomes[i];
    out.abstained = !decided.has_value();
    out.violation = decided.has_value() && (*decided != truth.decided || radius > truth.max_radius);
  });

  CoverageReport report;
  report.trials = trials;
  report.alpha = cfg.alpha;
  report.truth = truth;
  for (const TrialOutcome& o : outcomes) {
    if (o.abstained) ++report.abstentions;
    if (o.violation) ++report.violations;
  }
  report.violation_fraction =
      static_cast<double>(report.violations) / static_cast<double>(report.trials);
  return report;
}

std::string coverage_report_json(const CoverageReport& report, const CoverageFixture& fixture,
                                 const CertificationConfig& cfg) {
  nlohmann::ordered_json j;
  j["trials"] = report.trials;
  j["violations"] = report.violations;
  j["violation_fraction"] = report.violation_fraction;
  j["alpha"] = report.alpha;
  j["abstentions"] = report.abstentions;
  j["ground_truth"] = {{"class", report.truth.decided},
                       {"max_radius", report.truth.max_radius}};
  j["fixture"] = {
      {"kind", fixture.kind == CoverageKind::kAces ? "aces" : "rs"},
      {"weight", fixture.weight},
      {"bias", fixture.bias},
      {"temperature", fixture.temperature},
      {"point", fixture.point},
      {"theta", fixture.theta},
      {"core_class", fixture.core_class},
  };
  j["config"] = {{"n0", cfg.n0},
                 {"n", cfg.n},
                 {"alpha", cfg.alpha},
                 {"sigma", cfg.noise.sigma()},
                 {"seed", cfg.base_seed}};
  return j.dump(2) + "\n";
}

}  // namespace acescert
