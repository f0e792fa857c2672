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

// The compositional ACES classifier under randomized smoothing.
//
// A smoothed selection model routes each input either to a smoothed
// certification model or to a deterministic, unsmoothed core model. The
// entropy mechanism selects the certification model for a noisy draw iff the
// normalized entropy of its softmax output is at most theta. Because the
// per-draw entropies are stored, every theta can be evaluated from the same
// draws without re-running any model.

#ifndef ACESCERT_ACES_HPP_
#define ACESCERT_ACES_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "acescert/oracles.hpp"
#include "acescert/smoothing.hpp"
#include "acescert/types.hpp"

namespace acescert {

struct EntropyThreshold {
  double theta = 0.5;
};

// A separately sampled binary selection model. Its draw records carry the
// selection bit (0 = core, 1 = certification model) in `cert_class`.
struct BinaryOracle {
  std::shared_ptr<const DrawSource> selector;
};

using SelectionMechanism = std::variant<EntropyThreshold, BinaryOracle>;

// Draws routed to the core model (index 0) and to the certification model
// (index 1).
struct SelectionCounts {
  Count core = 0;
  Count cert = 0;

  Count operator[](int s) const { return s == 0 ? core : cert; }
  friend bool operator==(const SelectionCounts&, const SelectionCounts&) = default;
};

enum class AcesBranch : std::uint8_t {
  kCertifiedSelection,  // certification model certifiably selected; R > 0
  kCoreSelection,       // core model certifiably selected; R = 0
  kAgreement,           // selection uncertain, both models agree; R = 0
  kAbstained,
};

std::string_view branch_name(AcesBranch branch);

struct AcesVerdict {
  std::optional<ClassId> decided;
  double radius = 0.0;
  AcesBranch branch = AcesBranch::kAbstained;
  // Estimated selection s-hat from the n0 draws.
  std::uint8_t selected = 0;
  double p_lower_cert = 0.0;
  double p_lower_select = 0.0;
  // sigma * Phi^-1(p_lower_select) when s-hat = 1 and p_lower_select > 1/2,
  // else 0: how far the routing to the certification model is certified.
  double selection_radius = 0.0;

  bool abstained() const { return !decided.has_value(); }
  bool selection_certified() const { return selected == 1 && p_lower_select > 0.5; }
  friend bool operator==(const AcesVerdict&, const AcesVerdict&) = default;
};

// Inputs to the certification decision, all derivable from draw records.
struct AcesStatistics {
  SelectionCounts selection_phase;   // counts_S^0 over n0 draws
  SelectionCounts estimation_phase;  // counts_S over n draws
  ClassId candidate = 0;             // top class over the n0 draws
  Count candidate_count = 0;         // counts_C[candidate] over the n draws
  Count n = 0;
};

// Predict's second branch as printed uses a disjunction; kStrict uses the
// conjunction instead.
enum class PredictMode : std::uint8_t { kAsPrinted, kStrict };

enum class PredictBranch : std::uint8_t { kCertification, kCore, kAgreement, kAbstained };

std::string_view branch_name(PredictBranch branch);

struct AcesPrediction {
  std::optional<ClassId> predicted;
  PredictBranch branch = PredictBranch::kAbstained;

  bool abstained() const { return !predicted.has_value(); }
  friend bool operator==(const AcesPrediction&, const AcesPrediction&) = default;
};

// 1 (certification model) iff entropy <= theta.
bool entropy_select(double entropy, double theta);

SelectionCounts selection_counts_from_draws(std::span<const DrawRecord> draws,
                                            double theta);

// Four-branch certification decision. Both Clopper-Pearson bounds use
// confidence 1 - alpha/2 so the joint statement holds at 1 - alpha.
AcesVerdict aces_decide(const AcesStatistics& stats, ClassId core_class, double alpha,
                        const NoiseConfig& noise);

AcesVerdict aces_certify(const SampleDraws& draws, ClassId core_class,
                         const CertificationConfig& cfg, const SelectionMechanism& mech);

// Samples the certification model from `cert` (and the selector, for
// BinaryOracle) and certifies.
AcesVerdict aces_certify(const DrawSource& cert, ClassId core_class,
                         const CertificationConfig& cfg, const SelectionMechanism& mech);

AcesPrediction aces_predict_counts(SelectionCounts selection,
                                   std::span<const Count> cert_counts, ClassId core_class,
                                   Count n, double alpha,
                                   PredictMode mode = PredictMode::kAsPrinted);

// Predict from estimation-phase draws. A BinaryOracle selector is queried for
// its estimation-phase draws.
AcesPrediction aces_predict(std::span<const DrawRecord> draws, ClassId core_class,
                            Count n, double alpha, const SelectionMechanism& mech,
                            PredictMode mode = PredictMode::kAsPrinted);

// Predict with fresh prediction-phase draws from `cert` (and the selector).
AcesPrediction aces_predict(const DrawSource& cert, ClassId core_class, Count n,
                            double alpha, const SelectionMechanism& mech,
                            PredictMode mode = PredictMode::kAsPrinted);

// label_i = 1 iff correct_counts[i] / n >= eta.
std::vector<std::uint8_t> generate_selection_labels(std::span<const Count> correct_counts,
                                                    Count n, double eta);

// result[sample][theta_index]
using VerdictMatrix = std::vector<std::vector<AcesVerdict>>;
using PredictionMatrix = std::vector<std::vector<AcesPrediction>>;

// Entropy-threshold certification at every theta, re-deriving selection
// counts from stored entropies. The candidate class and its bound are
// computed once per sample. Output is identical to calling aces_certify per
// theta. `thetas` must be ascending within [0, 1].
VerdictMatrix sweep_thresholds(std::span<const SampleDraws> samples,
                               std::span<const ClassId> core_classes,
                               const CertificationConfig& cfg,
                               std::span<const double> thetas, unsigned parallelism = 1);

// Same idea for Predict over each sample's estimation-phase draws.
PredictionMatrix sweep_predictions(std::span<const SampleDraws> samples,
                                   std::span<const ClassId> core_classes, double alpha,
                                   std::span<const double> thetas,
                                   PredictMode mode = PredictMode::kAsPrinted,
                                   unsigned parallelism = 1);

}  // namespace acescert

#endif  // ACESCERT_ACES_HPP_
