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

// On-disk dataset of recorded noise draws: the boundary between this engine
// and any external model.
//
// Layout of a dataset directory:
//   manifest.json  format_version, num_classes, sigma, n0, n, base_seed,
//                  num_samples, source
//   samples.csv    sample_id,label,core_prediction
//   draws.csv      sample_id,phase,draw_index,cert_class,entropy
// UTF-8, LF line endings, '.' decimal separator. Entropies are written with
// 17 significant digits so they round-trip exactly.

#ifndef ACESCERT_RECORD_STORE_HPP_
#define ACESCERT_RECORD_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "acescert/text.hpp"
#include "acescert/types.hpp"

namespace acescert {

inline constexpr int kDatasetFormatVersion = 1;

struct DatasetManifest {
  int format_version = kDatasetFormatVersion;
  std::uint32_t num_classes = 2;
  double sigma = 0.25;
  Count n0 = 1;
  Count n = 1;
  Seed base_seed = 0;
  Count num_samples = 0;
  std::string source;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct SampleHeader {
  std::uint64_t sample_id = 0;
  ClassId label = 0;
  ClassId core_prediction = 0;

  friend bool operator==(const SampleHeader&, const SampleHeader&) = default;
};

struct SampleRecord {
  SampleHeader header;
  SampleDraws draws;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// Samples are kept ordered by sample_id, which is dense from 0.
struct Dataset {
  DatasetManifest manifest;
  std::vector<SampleRecord> samples;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Checks every dataset invariant; throws ValidationError naming the field.
void validate_dataset(const Dataset& dataset);

// Throws InvalidArgument if the dataset is invalid, IoError on write failure.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Writes through a sibling temporary and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

// Throws IoError, ParseError (with line number) or ValidationError.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace acescert

#endif  // ACESCERT_RECORD_STORE_HPP_
