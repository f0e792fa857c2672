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

// End-to-end commands: synthetic dataset generation, per-sample
// certification, theta sweeps and coverage runs. Each is a pure function of
// its options, its input files and the seed.

#ifndef ACESCERT_COMMANDS_HPP_
#define ACESCERT_COMMANDS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "acescert/aces.hpp"
#include "acescert/evaluation.hpp"
#include "acescert/record_store.hpp"
#include "acescert/types.hpp"

namespace acescert {

struct SyntheticOptions {
  std::vector<double> weight{1.0};
  double bias = 0.0;
  double temperature = 1.0;
  // Explicit sample positions. When empty, `num_samples` points are placed
  // along the weight direction with signed distance uniform in
  // [-spread, spread].
  std::vector<std::vector<double>> points;
  Count num_samples = 10;
  double spread = 2.0;
  // Probability that the recorded core prediction equals the label.
  double core_accuracy = 0.9;
  double sigma = 0.25;
  Count n0 = 100;
  Count n = 1000;
  Seed seed = 0;
  std::string source = "synthetic-linear";
  unsigned parallelism = 1;

  void validate() const;
};

struct SyntheticTruth {
  std::size_t sample_id = 0;
  double signed_distance = 0.0;
  double true_smoothed_prob = 0.0;
  double true_max_radius = 0.0;
};

struct SyntheticResult {
  Dataset dataset;
  std::vector<SyntheticTruth> truth;
};

SyntheticResult make_synthetic_dataset(const SyntheticOptions& options);

std::string format_ground_truth_csv(const std::vector<SyntheticTruth>& truth);

// Writes the dataset plus ground_truth.csv into `out_dir`.
void cmd_gen_synthetic(const SyntheticOptions& options, const std::filesystem::path& out_dir);

struct CertifyOptions {
  double alpha = 0.001;
  double theta = 0.5;
  // Plain randomized smoothing on the certification draws; no selection.
  bool rs_only = false;
  unsigned parallelism = 1;
};

// Header: sample_id,branch,class,radius,p_lower_A,p_lower_S. The class is
// empty on abstention; p_lower_S is empty in rs_only mode.
std::string certify_csv(const Dataset& dataset, const CertifyOptions& options);
std::string cmd_certify(const std::filesystem::path& in_dir, const CertifyOptions& options);

std::string cmd_sweep(const std::filesystem::path& in_dir, const SweepOptions& options);

}  // namespace acescert

#endif  // ACESCERT_COMMANDS_HPP_
