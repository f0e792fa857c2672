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

// Base classifiers evaluated under Gaussian input noise.
//
// ClassifierOracle is the pointwise interface (logits and argmax at a given
// input). DrawSource is what the certification algorithms consume: the
// per-phase draw records for one input. Live oracles produce them by
// sampling noise; ReplayClassifier serves them from recorded model outputs.

#ifndef ACESCERT_ORACLES_HPP_
#define ACESCERT_ORACLES_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "acescert/philox.hpp"
#include "acescert/types.hpp"

namespace acescert {

struct Dataset;

// Isotropic Gaussian noise N(0, sigma^2 I).
class NoiseConfig {
 public:
  explicit NoiseConfig(double sigma);
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

class ClassifierOracle {
 public:
  virtual ~ClassifierOracle() = default;

  virtual std::size_t num_classes() const = 0;

  // Writes num_classes() logits for input x into `out`.
  virtual void logits(Point x, std::span<double> out) const = 0;

  // Argmax of the logits, lowest index on ties.
  virtual ClassId classify(Point x) const;

  std::vector<double> logits(Point x) const;
};

// Always predicts one class with fixed logits, regardless of input.
class ConstantClassifier : public ClassifierOracle {
 public:
  // Logits are `margin` for `cls` and 0 elsewhere.
  ConstantClassifier(std::size_t num_classes, ClassId cls, double margin = 5.0);

  std::size_t num_classes() const override { return num_classes_; }
  using ClassifierOracle::logits;
  void logits(Point x, std::span<double> out) const override;
  ClassId classify(Point) const override { return cls_; }

 private:
  std::size_t num_classes_;
  ClassId cls_;
  double margin_;
};

// Binary linear fixture with a closed-form smoothed probability. With
// score s = w.x + b, classify(x) = 1 iff s >= 0 and the logits are
// (-s/T, s/T), so the normalized entropy falls monotonically with |s|.
class LinearSyntheticClassifier : public ClassifierOracle {
 public:
  LinearSyntheticClassifier(std::vector<double> weight, double bias,
                            double temperature = 1.0);

  std::size_t num_classes() const override { return 2; }
  using ClassifierOracle::logits;
  void logits(Point x, std::span<double> out) const override;
  ClassId classify(Point x) const override;

  double score(Point x) const;
  double weight_norm() const { return weight_norm_; }
  const std::vector<double>& weight() const { return weight_; }
  double bias() const { return bias_; }
  double temperature() const { return temperature_; }
  std::size_t input_dim() const { return weight_.size(); }

 private:
  std::vector<double> weight_;
  double bias_;
  double temperature_;
  double weight_norm_;
};

// Multiclass one-vs-rest composition of linear scorers: logit_i =
// (w_i.x + b_i) / T. No closed-form smoothed behaviour is claimed.
class OneVsRestClassifier : public ClassifierOracle {
 public:
  OneVsRestClassifier(std::vector<std::vector<double>> weights,
                      std::vector<double> biases, double temperature = 1.0);

  std::size_t num_classes() const override { return biases_.size(); }
  using ClassifierOracle::logits;
  void logits(Point x, std::span<double> out) const override;

 private:
  std::vector<std::vector<double>> weights_;
  std::vector<double> biases_;
  double temperature_;
};

struct SampleResult {
  std::vector<Count> counts;      // per-class tallies, sum = n
  std::vector<DrawRecord> draws;  // one record per noise draw, in draw order
};

// Draws n noisy copies x + eps_i, eps_i ~ N(0, sigma^2 I), from `stream` and
// records class and normalized entropy for each.
SampleResult sample_with_noise(const ClassifierOracle& oracle, Point x, Count n,
                               const NoiseConfig& noise, const NoiseStream& stream);

// Class tallies over a draw sequence. Throws InvalidArgument for a class id
// outside [0, num_classes).
std::vector<Count> tally(std::span<const DrawRecord> draws, std::size_t num_classes);

// Exact Phi((w.x + b) / (sigma ||w||)): the smoothed probability of class 1.
double true_smoothed_prob(const LinearSyntheticClassifier& clf, Point x,
                          const NoiseConfig& noise);

// l2 distance from x to the decision hyperplane. Throws DomainError when x is
// exactly on it.
double true_max_radius(const LinearSyntheticClassifier& clf, Point x,
                       const NoiseConfig& noise);

// Recorded per-draw outputs of a real model, one entry per sample.
class ReplayClassifier {
 public:
  ReplayClassifier(std::size_t num_classes, Count n0, Count n,
                   std::vector<SampleDraws> samples);
  static ReplayClassifier from_dataset(const Dataset& dataset);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_samples() const { return samples_.size(); }
  Count n0() const { return n0_; }
  Count n() const { return n_; }
  const SampleDraws& sample(std::size_t sample_id) const;

 private:
  std::size_t num_classes_;
  Count n0_;
  Count n_;
  std::vector<SampleDraws> samples_;
};

// Returns the stored draws of `phase` verbatim. `n` must equal the recorded
// length; replay cannot serve the prediction phase.
SampleResult sample_with_noise(const ReplayClassifier& replay, std::size_t sample_id,
                               Phase phase, Count n);

// The per-input draw stream consumed by the certification algorithms.
class DrawSource {
 public:
  virtual ~DrawSource() = default;
  virtual std::size_t num_classes() const = 0;
  virtual std::vector<DrawRecord> draws(Phase phase, Count n) const = 0;
};

// Samples a live oracle at a fixed input. The oracle must outlive the source.
class OracleDrawSource : public DrawSource {
 public:
  OracleDrawSource(const ClassifierOracle& oracle, std::vector<double> x,
                   NoiseConfig noise, Seed base_seed, std::uint32_t sample_index,
                   std::uint8_t model_stream = 0);

  std::size_t num_classes() const override { return oracle_->num_classes(); }
  std::vector<DrawRecord> draws(Phase phase, Count n) const override;

 private:
  const ClassifierOracle* oracle_;
  std::vector<double> x_;
  NoiseConfig noise_;
  Seed base_seed_;
  std::uint32_t sample_index_;
  std::uint8_t model_stream_;
};

// Serves one sample of a ReplayClassifier. The replay must outlive the source.
class ReplayDrawSource : public DrawSource {
 public:
  ReplayDrawSource(const ReplayClassifier& replay, std::size_t sample_id);

  std::size_t num_classes() const override { return replay_->num_classes(); }
  std::vector<DrawRecord> draws(Phase phase, Count n) const override;

 private:
  const ReplayClassifier* replay_;
  std::size_t sample_id_;
};

// Serves pre-materialized draws for one input.
class InMemoryDrawSource : public DrawSource {
 public:
  InMemoryDrawSource(std::size_t num_classes, SampleDraws draws);

  std::size_t num_classes() const override { return num_classes_; }
  std::vector<DrawRecord> draws(Phase phase, Count n) const override;

 private:
  std::size_t num_classes_;
  SampleDraws draws_;
};

}  // namespace acescert

#endif  // ACESCERT_ORACLES_HPP_
