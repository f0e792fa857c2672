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

#include "acescert/evaluation.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "acescert/errors.hpp"
#include "acescert/text.hpp"

namespace acescert {
namespace {

template <typename Verdict>
void check_inputs(std::span<const Verdict> verdicts, std::span<const ClassId> labels) {
  if (verdicts.empty()) throw InvalidArgument("metrics need at least one verdict");
  if (verdicts.size() != labels.size()) {
    throw InvalidArgument("verdict and label counts differ");
  }
}

std::optional<ClassId> decision_of(const AcesVerdict& v) { return v.decided; }
std::optional<ClassId> decision_of(const SmoothedVerdict& v) { return v.predicted; }

template <typename Verdict>
double acr_impl(std::span<const Verdict> verdicts, std::span<const ClassId> labels) {
  check_inputs(verdicts, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (decision_of(verdicts[i]) == labels[i]) total += verdicts[i].radius;
  }
  return total / static_cast<double>(verdicts.size());
}

template <typename Verdict>
std::vector<double> certified_accuracy_impl(std::span<const Verdict> verdicts,
                                            std::span<const ClassId> labels,
                                            const RadiusGrid& grid) {
  check_inputs(verdicts, labels);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double r : grid.radii()) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      if (decision_of(verdicts[i]) == labels[i] && verdicts[i].radius >= r) ++hits;
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(verdicts.size()));
  }
  return out;
}

template <typename Prediction>
double nac_impl(std::span<const Prediction> predictions, std::span<const ClassId> labels) {
  check_inputs(predictions, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].predicted == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

std::string radius_label(double r) {
  const std::string fixed = format_fixed(r, 2);
  const std::string shortest = format_shortest(r);
  return shortest.size() > fixed.size() ? shortest : fixed;
}

}  // namespace

RadiusGrid::RadiusGrid(std::vector<double> radii) : radii_(std::move(radii)) {
  if (radii_.empty()) throw InvalidArgument("radius grid is empty");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] >= 0.0) || !std::isfinite(radii_[i])) {
      throw InvalidArgument("radii must be finite and non-negative");
    }
    if (i > 0 && radii_[i] <= radii_[i - 1]) {
      throw InvalidArgument("radii must be strictly ascending");
    }
  }
}

RadiusGrid RadiusGrid::standard() {
  return RadiusGrid({0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5});
}

double average_certified_radius(std::span<const AcesVerdict> verdicts,
                                std::span<const ClassId> labels) {
  return acr_impl(verdicts, labels);
}

double average_certified_radius(std::span<const SmoothedVerdict> verdicts,
                                std::span<const ClassId> labels) {
  return acr_impl(verdicts, labels);
}

std::vector<double> certified_accuracy_at(std::span<const AcesVerdict> verdicts,
                                          std::span<const ClassId> labels,
                                          const RadiusGrid& grid) {
  return certified_accuracy_impl(verdicts, labels, grid);
}

std::vector<double> certified_accuracy_at(std::span<const SmoothedVerdict> verdicts,
                                          std::span<const ClassId> labels,
                                          const RadiusGrid& grid) {
  return certified_accuracy_impl(verdicts, labels, grid);
}

std::vector<double> certified_selection_rate_at(std::span<const AcesVerdict> verdicts,
                                                const RadiusGrid& grid) {
  if (verdicts.empty()) throw InvalidArgument("metrics need at least one verdict");
  std::vector<double> out;
  out.reserve(grid.size());
  for (double r : grid.radii()) {
    std::size_t hits = 0;
    for (const AcesVerdict& v : verdicts) {
      if (v.selection_certified() && v.selection_radius >= r) ++hits;
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(verdicts.size()));
  }
  return out;
}

double natural_accuracy(std::span<const AcesPrediction> predictions,
                        std::span<const ClassId> labels) {
  return nac_impl(predictions, labels);
}

double natural_accuracy(std::span<const PredictVerdict> predictions,
                        std::span<const ClassId> labels) {
  return nac_impl(predictions, labels);
}

std::vector<EvaluationRow> build_sweep_table(const Dataset& dataset,
                                             const SweepOptions& options) {
  if (options.thetas.empty()) throw InvalidArgument("sweep needs at least one theta");
  const DatasetManifest& m = dataset.manifest;
  CertificationConfig cfg{m.n0, m.n, options.alpha, NoiseConfig(m.sigma), m.base_seed};

  std::vector<SampleDraws> draws;
  std::vector<ClassId> core;
  std::vector<ClassId> labels;
  draws.reserve(dataset.samples.size());
  for (const SampleRecord& s : dataset.samples) {
    draws.push_back(s.draws);
    core.push_back(s.header.core_prediction);
    labels.push_back(s.header.label);
  }
  const VerdictMatrix verdicts =
      sweep_thresholds(draws, core, cfg, options.thetas, options.parallelism);
  const PredictionMatrix predictions = sweep_predictions(
      draws, core, options.alpha, options.thetas, options.predict_mode, options.parallelism);

  std::vector<EvaluationRow> rows;
  rows.reserve(options.thetas.size());
  std::vector<AcesVerdict> column;
  std::vector<AcesPrediction> prediction_column;
  for (std::size_t t = 0; t < options.thetas.size(); ++t) {
    column.clear();
    prediction_column.clear();
    for (std::size_t i = 0; i < draws.size(); ++i) {
      column.push_back(verdicts[i][t]);
      prediction_column.push_back(predictions[i][t]);
    }
    EvaluationRow row;
    row.theta = options.thetas[t];
    row.nac = natural_accuracy(prediction_column, labels);
    row.acr = average_certified_radius(column, labels);
    row.certified_accuracy = certified_accuracy_at(column, labels, options.grid);
    row.selection_rate = certified_selection_rate_at(column, options.grid);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_sweep_csv(std::span<const EvaluationRow> rows, const RadiusGrid& grid) {
  std::string out = "theta,nac,acr";
  for (double r : grid.radii()) out += ",ca_" + radius_label(r);
  for (double r : grid.radii()) out += ",sr_" + radius_label(r);
  out += ",nac_raw,acr_raw";
  for (double r : grid.radii()) out += ",ca_raw_" + radius_label(r);
  for (double r : grid.radii()) out += ",sr_raw_" + radius_label(r);
  out += '\n';
  for (const EvaluationRow& row : rows) {
    if (row.certified_accuracy.size() != grid.size() || row.selection_rate.size() != grid.size()) {
      throw InvalidArgument("row does not match the radius grid");
    }
    out += format_shortest(row.theta);
    out += ',' + format_fixed(100.0 * row.nac, 1);
    out += ',' + format_fixed(row.acr, 3);
    for (double v : row.certified_accuracy) out += ',' + format_fixed(100.0 * v, 1);
    for (double v : row.selection_rate) out += ',' + format_fixed(100.0 * v, 1);
    out += ',' + format_double(row.nac);
    out += ',' + format_double(row.acr);
    for (double v : row.certified_accuracy) out += ',' + format_double(v);
    for (double v : row.selection_rate) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace acescert
