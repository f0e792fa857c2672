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

#include "acescert/philox.hpp"

#include "acescert/stats.hpp"

namespace acescert {
namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53u;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline PhiloxCounter round(const PhiloxCounter& ctr, const PhiloxKey& key) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMultiplier0, ctr[0], hi0, lo0);
  mulhilo(kMultiplier1, ctr[2], hi1, lo1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

PhiloxKey key_of(Seed seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Counter layout: {draw, block, sample, phase | model << 8}.
PhiloxCounter counter_of(const NoiseStream& stream, std::uint32_t draw_index,
                         std::uint32_t block) {
  return {draw_index, block, stream.sample_index,
          static_cast<std::uint32_t>(stream.phase) |
              (static_cast<std::uint32_t>(stream.model_stream) << 8)};
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) {
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

void gaussian_block(const NoiseStream& stream, std::uint32_t draw_index,
                    std::span<double> out) {
  const PhiloxKey key = key_of(stream.base_seed);
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const PhiloxCounter r =
        philox4x32_10(counter_of(stream, draw_index, static_cast<std::uint32_t>(i / 2)), key);
    out[i] = std_normal_quantile(to_open_unit(r[0], r[1]));
    if (i + 1 < out.size()) out[i + 1] = std_normal_quantile(to_open_unit(r[2], r[3]));
  }
}

double uniform_at(const NoiseStream& stream, std::uint32_t draw_index,
                  std::uint32_t index) {
  const PhiloxCounter r =
      philox4x32_10(counter_of(stream, draw_index, index / 2), key_of(stream.base_seed));
  return index % 2 == 0 ? to_open_unit(r[0], r[1]) : to_open_unit(r[2], r[3]);
}

}  // namespace acescert
