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

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). Every noise variate is a pure function of
// its coordinates, so sampling can be split across threads in any order and
// still reproduce bit-identical draws.

#ifndef ACESCERT_PHILOX_HPP_
#define ACESCERT_PHILOX_HPP_

#include <array>
#include <cstdint>

#include "acescert/types.hpp"

namespace acescert {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Identifies one independent noise stream: all draws made for one input in
// one phase by one sampled model.
struct NoiseStream {
  Seed base_seed = 0;
  std::uint32_t sample_index = 0;
  Phase phase = Phase::kSelection;
  // Distinguishes models sampled at the same input, e.g. a separate
  // selection network.
  std::uint8_t model_stream = 0;
};

// Fills `out` with independent N(0, 1) variates for draw `draw_index` of
// `stream`, one per input dimension. Uniforms come from the top 53 bits of
// each 64-bit Philox half-block and are mapped through the normal quantile.
void gaussian_block(const NoiseStream& stream, std::uint32_t draw_index,
                    std::span<double> out);

// Uniform in the open interval (0, 1) at coordinate `index` of `stream`.
double uniform_at(const NoiseStream& stream, std::uint32_t draw_index,
                  std::uint32_t index);

}  // namespace acescert

#endif  // ACESCERT_PHILOX_HPP_
