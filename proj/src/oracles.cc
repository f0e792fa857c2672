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

#include "acescert/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "acescert/errors.hpp"
#include "acescert/record_store.hpp"
#include "acescert/stats.hpp"

namespace acescert {
namespace {

constexpr Count kMaxDrawsPerPhase = std::numeric_limits<std::uint32_t>::max();

double dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

void check_dim(Point x, std::size_t dim) {
  if (x.size() != dim) {
    throw InvalidArgument("input has dimension " + std::to_string(x.size()) +
                          ", classifier expects " + std::to_string(dim));
  }
}

}  // namespace

NoiseConfig::NoiseConfig(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("noise sigma must be positive and finite");
  }
}

ClassId ClassifierOracle::classify(Point x) const {
  const std::vector<double> values = logits(x);
  return static_cast<ClassId>(std::max_element(values.begin(), values.end()) -
                              values.begin());
}

std::vector<double> ClassifierOracle::logits(Point x) const {
  std::vector<double> out(num_classes());
  logits(x, out);
  return out;
}

ConstantClassifier::ConstantClassifier(std::size_t num_classes, ClassId cls,
                                       double margin)
    : num_classes_(num_classes), cls_(cls), margin_(margin) {
  if (num_classes < 2) throw InvalidArgument("need at least two classes");
  if (cls >= num_classes) throw InvalidArgument("constant class out of range");
  if (!(margin > 0.0) || !std::isfinite(margin)) {
    throw InvalidArgument("constant classifier margin must be positive");
  }
}

void ConstantClassifier::logits(Point, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[cls_] = margin_;
}

LinearSyntheticClassifier::LinearSyntheticClassifier(std::vector<double> weight,
                                                     double bias, double temperature)
    : weight_(std::move(weight)), bias_(bias), temperature_(temperature) {
  if (weight_.empty()) throw InvalidArgument("weight vector is empty");
  for (double w : weight_) {
    if (!std::isfinite(w)) throw InvalidArgument("non-finite weight");
  }
  if (!std::isfinite(bias_)) throw InvalidArgument("non-finite bias");
  if (!(temperature_ > 0.0) || !std::isfinite(temperature_)) {
    throw InvalidArgument("temperature must be positive");
  }
  weight_norm_ = std::sqrt(dot(weight_, weight_));
  if (weight_norm_ == 0.0) throw InvalidArgument("weight vector is zero");
}

double LinearSyntheticClassifier::score(Point x) const {
  check_dim(x, weight_.size());
  return dot(weight_, x) + bias_;
}

void LinearSyntheticClassifier::logits(Point x, std::span<double> out) const {
  const double s = score(x) / temperature_;
  out[0] = -s;
  out[1] = s;
}

// The logits tie at s = 0; the fixture resolves that point to class 1.
ClassId LinearSyntheticClassifier::classify(Point x) const {
  return score(x) >= 0.0 ? 1 : 0;
}

OneVsRestClassifier::OneVsRestClassifier(std::vector<std::vector<double>> weights,
                                         std::vector<double> biases,
                                         double temperature)
    : weights_(std::move(weights)), biases_(std::move(biases)), temperature_(temperature) {
  if (biases_.size() < 2 || weights_.size() != biases_.size()) {
    throw InvalidArgument("one-vs-rest needs one weight vector and bias per class (>= 2)");
  }
  for (const auto& w : weights_) {
    if (w.size() != weights_.front().size() || w.empty()) {
      throw InvalidArgument("one-vs-rest weight vectors differ in dimension");
    }
  }
  if (!(temperature_ > 0.0)) throw InvalidArgument("temperature must be positive");
}

void OneVsRestClassifier::logits(Point x, std::span<double> out) const {
  check_dim(x, weights_.front().size());
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    out[c] = (dot(weights_[c], x) + biases_[c]) / temperature_;
  }
}

SampleResult sample_with_noise(const ClassifierOracle& oracle, Point x, Count n,
                               const NoiseConfig& noise, const NoiseStream& stream) {
  if (n == 0) throw InvalidArgument("sample_with_noise: n must be >= 1");
  if (n > kMaxDrawsPerPhase) throw InvalidArgument("sample_with_noise: n too large");
  const std::size_t m = oracle.num_classes();
  SampleResult result;
  result.counts.assign(m, 0);
  result.draws.reserve(n);
  std::vector<double> eps(x.size());
  std::vector<double> noisy(x.size());
  std::vector<double> logit_buf(m);
  for (Count i = 0; i < n; ++i) {
    gaussian_block(stream, static_cast<std::uint32_t>(i), eps);
    for (std::size_t j = 0; j < x.size(); ++j) noisy[j] = x[j] + noise.sigma() * eps[j];
    oracle.logits(noisy, logit_buf);
    const ClassId cls = oracle.classify(noisy);
    if (cls >= m) throw InternalError("oracle returned class out of range");
    ++result.counts[cls];
    result.draws.push_back({cls, logits_entropy(logit_buf)});
  }
  return result;
}

std::vector<Count> tally(std::span<const DrawRecord> draws, std::size_t num_classes) {
  std::vector<Count> counts(num_classes, 0);
  for (const DrawRecord& d : draws) {
    if (d.cert_class >= num_classes) {
      throw InvalidArgument("draw class " + std::to_string(d.cert_class) +
                            " out of range");
    }
    ++counts[d.cert_class];
  }
  return counts;
}

double true_smoothed_prob(const LinearSyntheticClassifier& clf, Point x,
                          const NoiseConfig& noise) {
  return std_normal_cdf(clf.score(x) / (noise.sigma() * clf.weight_norm()));
}

double true_max_radius(const LinearSyntheticClassifier& clf, Point x, const NoiseConfig&) {
  const double s = clf.score(x);
  if (s == 0.0) throw DomainError("point lies on the decision boundary");
  return std::fabs(s) / clf.weight_norm();
}

ReplayClassifier::ReplayClassifier(std::size_t num_classes, Count n0, Count n,
                                   std::vector<SampleDraws> samples)
    : num_classes_(num_classes), n0_(n0), n_(n), samples_(std::move(samples)) {
  if (num_classes_ < 2) throw InvalidArgument("replay needs at least two classes");
  for (const SampleDraws& s : samples_) {
    if (s.selection.size() != n0_ || s.estimation.size() != n_) {
      throw InvalidArgument("replay draw sequence length does not match n0/n");
    }
    for (const auto* phase : {&s.selection, &s.estimation}) {
      for (const DrawRecord& d : *phase) {
        if (d.cert_class >= num_classes_) {
          throw InvalidArgument("replay draw class out of range");
        }
      }
    }
  }
}

ReplayClassifier ReplayClassifier::from_dataset(const Dataset& dataset) {
  std::vector<SampleDraws> samples;
  samples.reserve(dataset.samples.size());
  for (const SampleRecord& record : dataset.samples) samples.push_back(record.draws);
  return ReplayClassifier(dataset.manifest.num_classes, dataset.manifest.n0,
                          dataset.manifest.n, std::move(samples));
}

const SampleDraws& ReplayClassifier::sample(std::size_t sample_id) const {
  if (sample_id >= samples_.size()) throw InvalidArgument("replay sample id out of range");
  return samples_[sample_id];
}

SampleResult sample_with_noise(const ReplayClassifier& replay, std::size_t sample_id,
                               Phase phase, Count n) {
  const SampleDraws& stored = replay.sample(sample_id);
  const std::vector<DrawRecord>* draws = nullptr;
  switch (phase) {
    case Phase::kSelection: draws = &stored.selection; break;
    case Phase::kEstimation: draws = &stored.estimation; break;
    case Phase::kPrediction:
      throw InvalidArgument("replay datasets carry no prediction-phase draws");
  }
  if (draws->size() != n) {
    throw InvalidArgument("requested " + std::to_string(n) + " draws, replay holds " +
                          std::to_string(draws->size()));
  }
  SampleResult result;
  result.counts = tally(*draws, replay.num_classes());
  result.draws = *draws;
  return result;
}

OracleDrawSource::OracleDrawSource(const ClassifierOracle& oracle, std::vector<double> x,
                                   NoiseConfig noise, Seed base_seed,
                                   std::uint32_t sample_index, std::uint8_t model_stream)
    : oracle_(&oracle),
      x_(std::move(x)),
      noise_(noise),
      base_seed_(base_seed),
      sample_index_(sample_index),
      model_stream_(model_stream) {}

std::vector<DrawRecord> OracleDrawSource::draws(Phase phase, Count n) const {
  const NoiseStream stream{base_seed_, sample_index_, phase, model_stream_};
  return sample_with_noise(*oracle_, x_, n, noise_, stream).draws;
}

ReplayDrawSource::ReplayDrawSource(const ReplayClassifier& replay, std::size_t sample_id)
    : replay_(&replay), sample_id_(sample_id) {
  replay.sample(sample_id);  // range check
}

std::vector<DrawRecord> ReplayDrawSource::draws(Phase phase, Count n) const {
  return sample_with_noise(*replay_, sample_id_, phase, n).draws;
}

InMemoryDrawSource::InMemoryDrawSource(std::size_t num_classes, SampleDraws draws)
    : num_classes_(num_classes), draws_(std::move(draws)) {}

std::vector<DrawRecord> InMemoryDrawSource::draws(Phase phase, Count n) const {
  const std::vector<DrawRecord>& stored =
      phase == Phase::kSelection ? draws_.selection : draws_.estimation;
  if (phase == Phase::kPrediction) {
    throw InvalidArgument("in-memory draws carry no prediction phase");
  }
  if (stored.size() != n) throw InvalidArgument("draw count mismatch");
  return stored;
}

}  // namespace acescert
