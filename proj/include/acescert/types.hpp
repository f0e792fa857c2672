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

#ifndef ACESCERT_TYPES_HPP_
#define ACESCERT_TYPES_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace acescert {

using ClassId = std::uint32_t;
using Count = std::uint64_t;
using Seed = std::uint64_t;

// A point in input space.
using Point = std::span<const double>;

// Sampling phases. Each phase owns a disjoint noise stream so that the
// selection round never shares draws with the estimation round.
enum class Phase : std::uint8_t {
  kSelection = 0,   // n0 draws that pick the candidate class
  kEstimation = 1,  // n draws that feed the confidence bound
  kPrediction = 2,  // separate budget for Predict
};

// Outcome of one noisy forward pass: the certification model's argmax class
// and the base-m normalized entropy of its softmax output.
struct DrawRecord {
  ClassId cert_class = 0;
  double entropy = 0.0;

  friend bool operator==(const DrawRecord&, const DrawRecord&) = default;
};

// All recorded draws for one input, split by phase.
struct SampleDraws {
  std::vector<DrawRecord> selection;   // length n0
  std::vector<DrawRecord> estimation;  // length n

  friend bool operator==(const SampleDraws&, const SampleDraws&) = default;
};

}  // namespace acescert

#endif  // ACESCERT_TYPES_HPP_
