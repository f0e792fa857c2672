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

#include "acescert/aces.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "acescert/errors.hpp"
#include "acescert/parallel.hpp"
#include "acescert/stats.hpp"

namespace acescert {
namespace {

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument("theta must lie in [0, 1], got " + std::to_string(theta));
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

// Number of classes implied by a draw sequence; trailing unseen classes have
// zero counts and cannot change any argmax.
std::size_t implied_classes(std::span<const DrawRecord> a, std::span<const DrawRecord> b = {}) {
  ClassId highest = 1;
  for (const DrawRecord& d : a) highest = std::max(highest, d.cert_class);
  for (const DrawRecord& d : b) highest = std::max(highest, d.cert_class);
  return static_cast<std::size_t>(highest) + 1;
}

SelectionCounts count_selection_bits(std::span<const DrawRecord> draws) {
  SelectionCounts counts;
  for (const DrawRecord& d : draws) {
    if (d.cert_class > 1) throw InvalidArgument("binary selector returned a non-binary class");
    if (d.cert_class == 1) {
      ++counts.cert;
    } else {
      ++counts.core;
    }
  }
  return counts;
}

SelectionCounts selection_counts(const SelectionMechanism& mech,
                                 std::span<const DrawRecord> cert_draws, Phase phase) {
  if (const auto* entropy = std::get_if<EntropyThreshold>(&mech)) {
    return selection_counts_from_draws(cert_draws, entropy->theta);
  }
  const auto& binary = std::get<BinaryOracle>(mech);
  if (!binary.selector) throw InvalidArgument("binary selection oracle is null");
  return count_selection_bits(binary.selector->draws(phase, cert_draws.size()));
}

// Branch logic shared by the direct and sweep paths, so both produce the same
// bits from the same bounds.
AcesVerdict decide(std::uint8_t s_hat, double p_select, double p_cert, ClassId candidate,
                   ClassId core_class, const NoiseConfig& noise) {
  AcesVerdict v;
  v.selected = s_hat;
  v.p_lower_select = p_select;
  v.p_lower_cert = p_cert;
  if (v.selection_certified()) v.selection_radius = certified_radius(p_select, noise);

  const double p = std::min(p_cert, p_select);
  if (s_hat == 1 && p > 0.5) {
    v.decided = candidate;
    v.radius = certified_radius(p, noise);
    v.branch = AcesBranch::kCertifiedSelection;
  } else if (s_hat == 0 && p_select >= 0.5) {
    v.decided = core_class;
    v.branch = AcesBranch::kCoreSelection;
  } else if (candidate == core_class && p_cert >= 0.5) {
    v.decided = candidate;
    v.branch = AcesBranch::kAgreement;
  } else {
    v.branch = AcesBranch::kAbstained;
  }
  return v;
}

std::uint8_t estimate_selection(SelectionCounts counts) {
  return counts.core > counts.cert ? 0 : 1;
}

void check_sweep_inputs(std::span<const SampleDraws> samples,
                        std::span<const ClassId> core_classes,
                        std::span<const double> thetas) {
  if (samples.size() != core_classes.size()) {
    throw InvalidArgument("one core class per sample required");
  }
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    check_theta(thetas[i]);
    if (i > 0 && thetas[i] < thetas[i - 1]) {
      throw InvalidArgument("thetas must be sorted ascending");
    }
  }
}

std::vector<double> sorted_entropies(std::span<const DrawRecord> draws) {
  std::vector<double> out;
  out.reserve(draws.size());
  for (const DrawRecord& d : draws) out.push_back(d.entropy);
  std::sort(out.begin(), out.end());
  return out;
}

Count count_at_most(const std::vector<double>& sorted, double theta) {
  return static_cast<Count>(std::upper_bound(sorted.begin(), sorted.end(), theta) -
                            sorted.begin());
}

}  // namespace

std::string_view branch_name(AcesBranch branch) {
  switch (branch) {
    case AcesBranch::kCertifiedSelection: return "certified_selection";
    case AcesBranch::kCoreSelection: return "core_selection";
    case AcesBranch::kAgreement: return "agreement";
    case AcesBranch::kAbstained: return "abstained";
  }
  return "unknown";
}

std::string_view branch_name(PredictBranch branch) {
  switch (branch) {
    case PredictBranch::kCertification: return "certification";
    case PredictBranch::kCore: return "core";
    case PredictBranch::kAgreement: return "agreement";
    case PredictBranch::kAbstained: return "abstained";
  }
  return "unknown";
}

bool entropy_select(double entropy, double theta) {
  check_theta(theta);
  if (std::isnan(entropy)) throw InvalidArgument("entropy is NaN");
  return entropy <= theta;
}

SelectionCounts selection_counts_from_draws(std::span<const DrawRecord> draws,
                                            double theta) {
  SelectionCounts counts;
  for (const DrawRecord& d : draws) {
    if (entropy_select(d.entropy, theta)) {
      ++counts.cert;
    } else {
      ++counts.core;
    }
  }
  return counts;
}

AcesVerdict aces_decide(const AcesStatistics& stats, ClassId core_class, double alpha,
                        const NoiseConfig& noise) {
  check_alpha(alpha);
  if (stats.n == 0) throw InvalidArgument("n must be >= 1");
  if (stats.estimation_phase.core + stats.estimation_phase.cert != stats.n) {
    throw InvalidArgument("selection counts do not sum to n");
  }
  if (stats.candidate_count > stats.n) throw InvalidArgument("candidate count exceeds n");
  const std::uint8_t s_hat = estimate_selection(stats.selection_phase);
  const Confidence conf(1.0 - alpha / 2.0);
  const double p_select = clopper_pearson_lower(stats.estimation_phase[s_hat], stats.n, conf);
  const double p_cert = clopper_pearson_lower(stats.candidate_count, stats.n, conf);
  return decide(s_hat, p_select, p_cert, stats.candidate, core_class, noise);
}

AcesVerdict aces_certify(const SampleDraws& draws, ClassId core_class,
                         const CertificationConfig& cfg, const SelectionMechanism& mech) {
  cfg.validate();
  if (draws.selection.size() != cfg.n0 || draws.estimation.size() != cfg.n) {
    throw InvalidArgument("draw lengths (" + std::to_string(draws.selection.size()) + ", " +
                          std::to_string(draws.estimation.size()) +
                          ") do not match configuration (" + std::to_string(cfg.n0) +
                          ", " + std::to_string(cfg.n) + ")");
  }
  const std::size_t m = implied_classes(draws.selection, draws.estimation);
  AcesStatistics stats;
  stats.selection_phase = selection_counts(mech, draws.selection, Phase::kSelection);
  stats.estimation_phase = selection_counts(mech, draws.estimation, Phase::kEstimation);
  stats.candidate = top_class(tally(draws.selection, m));
  stats.candidate_count = tally(draws.estimation, m)[stats.candidate];
  stats.n = cfg.n;
  return aces_decide(stats, core_class, cfg.alpha, cfg.noise);
}

AcesVerdict aces_certify(const DrawSource& cert, ClassId core_class,
                         const CertificationConfig& cfg, const SelectionMechanism& mech) {
  cfg.validate();
  SampleDraws draws{cert.draws(Phase::kSelection, cfg.n0),
                    cert.draws(Phase::kEstimation, cfg.n)};
  return aces_certify(draws, core_class, cfg, mech);
}

AcesPrediction aces_predict_counts(SelectionCounts selection,
                                   std::span<const Count> cert_counts, ClassId core_class,
                                   Count n, double alpha, PredictMode mode) {
  check_alpha(alpha);
  if (n < 2) throw InvalidArgument("aces_predict: n must be >= 2");
  if (selection.core + selection.cert != n) {
    throw InvalidArgument("selection counts do not sum to n");
  }
  const auto [a, b] = top_two_classes(cert_counts);
  const double half_alpha = alpha / 2.0;
  const double rho_a = binom_p_value(cert_counts[a], cert_counts[a] + cert_counts[b], 0.5);
  const Count n0 = selection.core;
  const Count n1 = selection.cert;

  AcesPrediction out;
  if (n1 > n0 && binom_p_value(n1, n, 0.5) <= half_alpha && rho_a <= half_alpha) {
    out.predicted = a;
    out.branch = PredictBranch::kCertification;
    return out;
  }
  const bool core_majority = n0 > n1;
  const bool core_significant = binom_p_value(n0, n, 0.5) <= half_alpha;
  const bool route_to_core = mode == PredictMode::kAsPrinted
                                 ? (core_majority || core_significant)
                                 : (core_majority && core_significant);
  if (route_to_core) {
    out.predicted = core_class;
    out.branch = PredictBranch::kCore;
  } else if (a == core_class && rho_a <= half_alpha) {
    out.predicted = a;
    out.branch = PredictBranch::kAgreement;
  }
  return out;
}

AcesPrediction aces_predict(std::span<const DrawRecord> draws, ClassId core_class, Count n,
                            double alpha, const SelectionMechanism& mech, PredictMode mode) {
  if (draws.size() != n) throw InvalidArgument("aces_predict: draw count does not match n");
  const SelectionCounts selection = selection_counts(mech, draws, Phase::kEstimation);
  return aces_predict_counts(selection, tally(draws, implied_classes(draws)), core_class, n,
                             alpha, mode);
}

AcesPrediction aces_predict(const DrawSource& cert, ClassId core_class, Count n,
                            double alpha, const SelectionMechanism& mech, PredictMode mode) {
  if (n < 2) throw InvalidArgument("aces_predict: n must be >= 2");
  const std::vector<DrawRecord> draws = cert.draws(Phase::kPrediction, n);
  const SelectionCounts selection = selection_counts(mech, draws, Phase::kPrediction);
  return aces_predict_counts(selection, tally(draws, cert.num_classes()), core_class, n,
                             alpha, mode);
}

std::vector<std::uint8_t> generate_selection_labels(std::span<const Count> correct_counts,
                                                    Count n, double eta) {
  if (n == 0) throw InvalidArgument("n must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  std::vector<std::uint8_t> labels;
  labels.reserve(correct_counts.size());
  for (Count c : correct_counts) {
    if (c > n) throw InvalidArgument("correct count exceeds n");
    labels.push_back(static_cast<double>(c) / static_cast<double>(n) >= eta ? 1 : 0);
  }
  return labels;
}

VerdictMatrix sweep_thresholds(std::span<const SampleDraws> samples,
                               std::span<const ClassId> core_classes,
                               const CertificationConfig& cfg,
                               std::span<const double> thetas, unsigned parallelism) {
  cfg.validate();
  check_sweep_inputs(samples, core_classes, thetas);
  VerdictMatrix out(samples.size());
  const Confidence conf(1.0 - cfg.alpha / 2.0);

  parallel_for(samples.size(), parallelism, [&](std::size_t i) {
    const SampleDraws& draws = samples[i];
    if (draws.selection.size() != cfg.n0 || draws.estimation.size() != cfg.n) {
      throw InvalidArgument("sample " + std::to_string(i) +
                            ": draw lengths do not match configuration");
    }
    const std::size_t m = implied_classes(draws.selection, draws.estimation);
    const ClassId candidate = top_class(tally(draws.selection, m));
    const double p_cert =
        clopper_pearson_lower(tally(draws.estimation, m)[candidate], cfg.n, conf);
    const std::vector<double> phase0 = sorted_entropies(draws.selection);
    const std::vector<double> phase1 = sorted_entropies(draws.estimation);
    std::unordered_map<Count, double> p_select_by_count;

    std::vector<AcesVerdict>& row = out[i];
    row.reserve(thetas.size());
    for (double theta : thetas) {
      const Count sel0 = count_at_most(phase0, theta);
      const Count sel1 = count_at_most(phase1, theta);
      const std::uint8_t s_hat = estimate_selection({cfg.n0 - sel0, sel0});
      const Count k = s_hat == 1 ? sel1 : cfg.n - sel1;
      auto it = p_select_by_count.find(k);
      if (it == p_select_by_count.end()) {
        it = p_select_by_count.emplace(k, clopper_pearson_lower(k, cfg.n, conf)).first;
      }
      row.push_back(decide(s_hat, it->second, p_cert, candidate, core_classes[i], cfg.noise));
    }
  });
  return out;
}

PredictionMatrix sweep_predictions(std::span<const SampleDraws> samples,
                                   std::span<const ClassId> core_classes, double alpha,
                                   std::span<const double> thetas, PredictMode mode,
                                   unsigned parallelism) {
  check_alpha(alpha);
  check_sweep_inputs(samples, core_classes, thetas);
  PredictionMatrix out(samples.size());
  parallel_for(samples.size(), parallelism, [&](std::size_t i) {
    const std::vector<DrawRecord>& draws = samples[i].estimation;
    const Count n = draws.size();
    const std::vector<Count> counts = tally(draws, implied_classes(draws));
    const std::vector<double> entropies = sorted_entropies(draws);
    std::vector<AcesPrediction>& row = out[i];
    row.reserve(thetas.size());
    for (double theta : thetas) {
      const Count selected = count_at_most(entropies, theta);
      row.push_back(aces_predict_counts({n - selected, selected}, counts, core_classes[i], n,
                                        alpha, mode));
    }
  });
  return out;
}

}  // namespace acescert
