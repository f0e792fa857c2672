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

#include "acescert/commands.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "acescert/errors.hpp"
#include "acescert/oracles.hpp"
#include "acescert/parallel.hpp"
#include "acescert/philox.hpp"
#include "acescert/smoothing.hpp"
#include "acescert/text.hpp"

namespace acescert {
namespace {

namespace fs = std::filesystem;

// Streams reserved for fixture placement and core-model noise so they never
// collide with the certification model's stream 0.
constexpr std::uint8_t kPlacementStream = 200;
constexpr std::uint8_t kCoreStream = 201;

constexpr std::string_view kCertifyHeader = "sample_id,branch,class,radius,p_lower_A,p_lower_S\n";

CertificationConfig config_for(const Dataset& dataset, double alpha) {
  const DatasetManifest& m = dataset.manifest;
  CertificationConfig cfg{m.n0, m.n, alpha, NoiseConfig(m.sigma), m.base_seed};
  cfg.validate();
  return cfg;
}

std::string certify_row(std::size_t id, std::string_view branch,
                        const std::optional<ClassId>& decided, double radius, double p_a,
                        std::optional<double> p_s) {
  std::string row = std::to_string(id);
  row += ',';
  row += branch;
  row += ',';
  if (decided) row += std::to_string(*decided);
  row += ',' + format_double(radius);
  row += ',' + format_double(p_a);
  row += ',';
  if (p_s) row += format_double(*p_s);
  row += '\n';
  return row;
}

}  // namespace

void SyntheticOptions::validate() const {
  if (weight.empty()) throw InvalidArgument("weight is empty");
  double sq = 0.0;
  for (double v : weight) {
    if (!std::isfinite(v)) throw InvalidArgument("weight must be finite");
    sq += v * v;
  }
  if (!(sq > 0.0)) throw InvalidArgument("weight must be non-zero");
  if (!std::isfinite(bias)) throw InvalidArgument("bias must be finite");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("temperature must be positive");
  }
  for (const auto& p : points) {
    if (p.size() != weight.size()) {
      throw InvalidArgument("sample position dimension differs from weight dimension");
    }
    for (double v : p) {
      if (!std::isfinite(v)) throw InvalidArgument("sample positions must be finite");
    }
  }
  if (points.empty() && !(spread >= 0.0 && std::isfinite(spread))) {
    throw InvalidArgument("spread must be finite and non-negative");
  }
  const Count count = points.empty() ? num_samples : points.size();
  if (count > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("too many samples");
  }
  if (!(core_accuracy >= 0.0 && core_accuracy <= 1.0)) {
    throw InvalidArgument("core_accuracy must lie in [0, 1]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  if (n0 == 0 || n == 0) throw InvalidArgument("n0 and n must be positive");
  if (n0 > std::numeric_limits<std::uint32_t>::max() ||
      n > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("draw counts exceed 2^32 - 1");
  }
}

SyntheticResult make_synthetic_dataset(const SyntheticOptions& options) {
  options.validate();
  const LinearSyntheticClassifier clf(options.weight, options.bias, options.temperature);
  const NoiseConfig noise(options.sigma);
  const double wn = clf.weight_norm();

  std::vector<std::vector<double>> points = options.points;
  if (points.empty()) {
    points.reserve(options.num_samples);
    for (Count i = 0; i < options.num_samples; ++i) {
      const NoiseStream stream{options.seed, static_cast<std::uint32_t>(i), Phase::kSelection,
                               kPlacementStream};
      const double d = options.spread * (2.0 * uniform_at(stream, 0, 0) - 1.0);
      // x = (d - b/|w|) w/|w| gives w.x + b = d |w|.
      std::vector<double> x(options.weight.size());
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = (d - options.bias / wn) * options.weight[k] / wn;
      }
      points.push_back(std::move(x));
    }
  }

  SyntheticResult result;
  DatasetManifest& m = result.dataset.manifest;
  m.num_classes = 2;
  m.sigma = options.sigma;
  m.n0 = options.n0;
  m.n = options.n;
  m.base_seed = options.seed;
  m.num_samples = points.size();
  m.source = options.source;
  result.dataset.samples.resize(points.size());
  result.truth.resize(points.size());

  parallel_for(points.size(), resolve_parallelism(options.parallelism), [&](std::size_t i) {
    const auto idx = static_cast<std::uint32_t>(i);
    const std::vector<double>& x = points[i];
    const double s = clf.score(x);
    SampleRecord& rec = result.dataset.samples[i];
    rec.header.sample_id = i;
    rec.header.label = s >= 0.0 ? 1 : 0;
    const NoiseStream core_stream{options.seed, idx, Phase::kSelection, kCoreStream};
    const bool core_correct = uniform_at(core_stream, 0, 0) < options.core_accuracy;
    rec.header.core_prediction = core_correct ? rec.header.label : 1 - rec.header.label;
    rec.draws.selection =
        sample_with_noise(clf, x, options.n0, noise, {options.seed, idx, Phase::kSelection, 0})
            .draws;
    rec.draws.estimation =
        sample_with_noise(clf, x, options.n, noise, {options.seed, idx, Phase::kEstimation, 0})
            .draws;

    SyntheticTruth& t = result.truth[i];
    t.sample_id = i;
    t.signed_distance = s / wn;
    t.true_smoothed_prob = true_smoothed_prob(clf, x, noise);
    t.true_max_radius = std::abs(s) / wn;
  });
  return result;
}

std::string format_ground_truth_csv(const std::vector<SyntheticTruth>& truth) {
  std::string out = "sample_id,signed_distance,true_smoothed_prob,true_max_radius\n";
  for (const SyntheticTruth& t : truth) {
    out += std::to_string(t.sample_id);
    out += ',' + format_double(t.signed_distance);
    out += ',' + format_double(t.true_smoothed_prob);
    out += ',' + format_double(t.true_max_radius);
    out += '\n';
  }
  return out;
}

void cmd_gen_synthetic(const SyntheticOptions& options, const fs::path& out_dir) {
  const SyntheticResult result = make_synthetic_dataset(options);
  write_dataset(result.dataset, out_dir);
  write_text_file(out_dir / "ground_truth.csv", format_ground_truth_csv(result.truth));
}

std::string certify_csv(const Dataset& dataset, const CertifyOptions& options) {
  validate_dataset(dataset);
  const CertificationConfig cfg = config_for(dataset, options.alpha);
  const ReplayClassifier replay = ReplayClassifier::from_dataset(dataset);
  const SelectionMechanism mech = EntropyThreshold{options.theta};
  if (!options.rs_only && !(options.theta >= 0.0 && options.theta <= 1.0)) {
    throw InvalidArgument("theta must lie in [0, 1]");
  }

  std::vector<std::string> rows(dataset.samples.size());
  parallel_for(rows.size(), resolve_parallelism(options.parallelism), [&](std::size_t i) {
    const ReplayDrawSource source(replay, i);
    if (options.rs_only) {
      const SmoothedVerdict v = rs_certify(source, cfg);
      rows[i] = certify_row(i, v.abstained() ? "abstained" : "certified", v.predicted, v.radius,
                            v.p_lower, std::nullopt);
    } else {
      const AcesVerdict v =
          aces_certify(source, dataset.samples[i].header.core_prediction, cfg, mech);
      rows[i] = certify_row(i, branch_name(v.branch), v.decided, v.radius, v.p_lower_cert,
                            v.p_lower_select);
    }
  });

  std::string out(kCertifyHeader);
  for (const std::string& r : rows) out += r;
  return out;
}

std::string cmd_certify(const fs::path& in_dir, const CertifyOptions& options) {
  return certify_csv(read_dataset(in_dir), options);
}

std::string cmd_sweep(const fs::path& in_dir, const SweepOptions& options) {
  const Dataset dataset = read_dataset(in_dir);
  return format_sweep_csv(build_sweep_table(dataset, options), options.grid);
}

}  // namespace acescert
