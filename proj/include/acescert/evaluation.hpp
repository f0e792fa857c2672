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

// Evaluation metrics and the theta-sweep table: natural accuracy (NAC),
// average certified radius (ACR), certified accuracy at radius r and
// certified selection rate at radius r.

#ifndef ACESCERT_EVALUATION_HPP_
#define ACESCERT_EVALUATION_HPP_

#include <span>
#include <string>
#include <vector>

#include "acescert/aces.hpp"
#include "acescert/record_store.hpp"
#include "acescert/smoothing.hpp"

namespace acescert {

// Ascending, non-negative radii.
class RadiusGrid {
 public:
  explicit RadiusGrid(std::vector<double> radii);
  // {0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5}
  static RadiusGrid standard();

  const std::vector<double>& radii() const { return radii_; }
  std::size_t size() const { return radii_.size(); }

 private:
  std::vector<double> radii_;
};

struct EvaluationRow {
  double theta = 0.0;
  double nac = 0.0;
  double acr = 0.0;
  std::vector<double> certified_accuracy;  // one per grid radius
  std::vector<double> selection_rate;      // one per grid radius
};

// Mean of R_i * 1[decided_i == label_i]. Abstentions contribute 0.
double average_certified_radius(std::span<const AcesVerdict> verdicts,
                                std::span<const ClassId> labels);
double average_certified_radius(std::span<const SmoothedVerdict> verdicts,
                                std::span<const ClassId> labels);

// Fraction with decided == label and R >= r, per grid radius.
std::vector<double> certified_accuracy_at(std::span<const AcesVerdict> verdicts,
                                          std::span<const ClassId> labels,
                                          const RadiusGrid& grid);
std::vector<double> certified_accuracy_at(std::span<const SmoothedVerdict> verdicts,
                                          std::span<const ClassId> labels,
                                          const RadiusGrid& grid);

// Fraction whose routing to the certification model is certified with
// selection radius >= r.
std::vector<double> certified_selection_rate_at(std::span<const AcesVerdict> verdicts,
                                                const RadiusGrid& grid);

// Fraction predicted correctly; abstentions count as wrong.
double natural_accuracy(std::span<const AcesPrediction> predictions,
                        std::span<const ClassId> labels);
double natural_accuracy(std::span<const PredictVerdict> predictions,
                        std::span<const ClassId> labels);

struct SweepOptions {
  double alpha = 0.001;
  std::vector<double> thetas;
  RadiusGrid grid = RadiusGrid::standard();
  PredictMode predict_mode = PredictMode::kAsPrinted;
  unsigned parallelism = 1;
};

// One row per theta. Certification uses the dataset's n0/n draws; NAC runs
// Predict on each sample's estimation-phase draws.
std::vector<EvaluationRow> build_sweep_table(const Dataset& dataset, const SweepOptions& options);

// Column order: theta, nac, acr, ca_<r>..., sr_<r>..., then the same
// quantities at full precision (nac_raw, acr_raw, ca_raw_<r>..., sr_raw_<r>...).
// Percentages carry one decimal and ACR three, as in published tables.
std::string format_sweep_csv(std::span<const EvaluationRow> rows, const RadiusGrid& grid);

}  // namespace acescert

#endif  // ACESCERT_EVALUATION_HPP_
