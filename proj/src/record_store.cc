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

#include "acescert/record_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "acescert/errors.hpp"
#include "json.hpp"

namespace acescert {
namespace {

namespace fs = std::filesystem;

constexpr Count kMaxDraws = 0xffffffffull;

constexpr std::string_view kManifestFile = "manifest.json";
constexpr std::string_view kSamplesFile = "samples.csv";
constexpr std::string_view kDrawsFile = "draws.csv";
constexpr std::string_view kSamplesHeader = "sample_id,label,core_prediction";
constexpr std::string_view kDrawsHeader = "sample_id,phase,draw_index,cert_class,entropy";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return std::move(buffer).str();
}

// Iterates the lines of a CSV file, tracking 1-based line numbers.
class CsvReader {
 public:
  CsvReader(std::string name, std::string text) : name_(std::move(name)), text_(std::move(text)) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string::npos) end = text_.size();
    line = std::string_view(text_).substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_;
    return true;
  }

  void expect_header(std::string_view header) {
    std::string_view line;
    if (!next(line)) fail("missing header line");
    if (line != header) fail("expected header '" + std::string(header) + "'");
  }

  // Splits the current line into exactly `count` comma-separated fields.
  void split(std::string_view line, std::size_t count, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (out.size() != count) {
      fail("expected " + std::to_string(count) + " fields, found " + std::to_string(out.size()));
    }
  }

  std::uint64_t parse_uint(std::string_view field, std::string_view what) {
    std::uint64_t value = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      fail("malformed " + std::string(what) + " '" + std::string(field) + "'");
    }
    return value;
  }

  double parse_real(std::string_view field, std::string_view what) {
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      fail("malformed " + std::string(what) + " '" + std::string(field) + "'");
    }
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(name_, line_, what); }

  std::string where() const { return name_ + ":" + std::to_string(line_); }

 private:
  std::string name_;
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

// Out-of-range ids are reported by range validation, so clamping keeps them
// out of range rather than letting them wrap into range.
ClassId saturate_class(std::uint64_t v) {
  return static_cast<ClassId>(std::min<std::uint64_t>(v, std::numeric_limits<ClassId>::max()));
}

void validate_manifest(const DatasetManifest& m) {
  if (m.format_version != kDatasetFormatVersion) {
    throw ValidationError("format_version",
                          "unsupported format version " + std::to_string(m.format_version));
  }
  if (m.num_classes < 2) throw ValidationError("num_classes", "must be >= 2");
  if (!(m.sigma > 0.0) || !std::isfinite(m.sigma)) {
    throw ValidationError("sigma", "must be positive and finite");
  }
  if (m.n0 == 0) throw ValidationError("n0", "must be >= 1");
  if (m.n == 0) throw ValidationError("n", "must be >= 1");
  if (m.n0 > kMaxDraws) throw ValidationError("n0", "exceeds 2^32 - 1");
  if (m.n > kMaxDraws) throw ValidationError("n", "exceeds 2^32 - 1");
}

void validate_draw(const DrawRecord& d, std::uint32_t num_classes, const std::string& where) {
  if (d.cert_class >= num_classes) {
    throw ValidationError("cert_class", where + ": class " + std::to_string(d.cert_class) +
                                            " outside [0, " + std::to_string(num_classes) + ")");
  }
  if (!(d.entropy >= 0.0 && d.entropy <= 1.0)) {
    throw ValidationError("entropy", where + ": entropy " + format_double(d.entropy) +
                                         " outside [0, 1]");
  }
}

template <typename T>
T required(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(key, "missing from manifest");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(key, std::string("wrong type in manifest: ") + e.what());
  }
}

DatasetManifest read_manifest(const fs::path& path) {
  const std::string text = slurp(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(
                                     std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError(path.filename().string(), line, e.what());
  }
  if (!doc.is_object()) throw ParseError(path.filename().string(), 1, "manifest is not an object");
  for (const char* key : {"num_classes", "n0", "n", "base_seed", "num_samples", "format_version"}) {
    if (doc.contains(key) && !doc.at(key).is_number_unsigned()) {
      throw ValidationError(key, "must be a non-negative integer");
    }
  }
  DatasetManifest m;
  m.format_version = required<int>(doc, "format_version");
  m.num_classes = required<std::uint32_t>(doc, "num_classes");
  m.sigma = required<double>(doc, "sigma");
  m.n0 = required<Count>(doc, "n0");
  m.n = required<Count>(doc, "n");
  m.base_seed = required<Seed>(doc, "base_seed");
  m.num_samples = required<Count>(doc, "num_samples");
  m.source = required<std::string>(doc, "source");
  validate_manifest(m);
  return m;
}

}  // namespace

void validate_dataset(const Dataset& dataset) {
  const DatasetManifest& m = dataset.manifest;
  validate_manifest(m);
  if (m.num_samples != dataset.samples.size()) {
    throw ValidationError("num_samples", "manifest declares " + std::to_string(m.num_samples) +
                                             " samples, dataset holds " +
                                             std::to_string(dataset.samples.size()));
  }
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const SampleRecord& s = dataset.samples[i];
    const std::string where = "sample " + std::to_string(i);
    if (s.header.sample_id != i) {
      throw ValidationError("sample_id", where + ": ids must be dense and ordered from 0");
    }
    if (s.header.label >= m.num_classes) throw ValidationError("label", where + ": out of range");
    if (s.header.core_prediction >= m.num_classes) {
      throw ValidationError("core_prediction", where + ": out of range");
    }
    if (s.draws.selection.size() != m.n0 || s.draws.estimation.size() != m.n) {
      throw ValidationError("draws", where + ": has (" +
                                         std::to_string(s.draws.selection.size()) + ", " +
                                         std::to_string(s.draws.estimation.size()) +
                                         ") draws, expected (" + std::to_string(m.n0) + ", " +
                                         std::to_string(m.n) + ")");
    }
    for (const DrawRecord& d : s.draws.selection) validate_draw(d, m.num_classes, where);
    for (const DrawRecord& d : s.draws.estimation) validate_draw(d, m.num_classes, where);
  }
}

void write_text_file(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

void write_dataset(const Dataset& dataset, const fs::path& dir) {
  try {
    validate_dataset(dataset);
  } catch (const ValidationError& e) {
    throw InvalidArgument(std::string("refusing to write dataset: ") + e.what());
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const DatasetManifest& m = dataset.manifest;
  nlohmann::ordered_json manifest;
  manifest["format_version"] = m.format_version;
  manifest["num_classes"] = m.num_classes;
  manifest["sigma"] = m.sigma;
  manifest["n0"] = m.n0;
  manifest["n"] = m.n;
  manifest["base_seed"] = m.base_seed;
  manifest["num_samples"] = m.num_samples;
  manifest["source"] = m.source;
  write_text_file(dir / kManifestFile, manifest.dump(2) + "\n");

  std::string samples(kSamplesHeader);
  samples += '\n';
  for (const SampleRecord& s : dataset.samples) {
    samples += std::to_string(s.header.sample_id) + ',' + std::to_string(s.header.label) + ',' +
               std::to_string(s.header.core_prediction) + '\n';
  }
  write_text_file(dir / kSamplesFile, samples);

  std::string draws(kDrawsHeader);
  draws += '\n';
  for (const SampleRecord& s : dataset.samples) {
    const std::string id = std::to_string(s.header.sample_id);
    const auto emit = [&](char phase, const std::vector<DrawRecord>& records) {
      for (std::size_t i = 0; i < records.size(); ++i) {
        draws += id;
        draws += ',';
        draws += phase;
        draws += ',';
        draws += std::to_string(i);
        draws += ',';
        draws += std::to_string(records[i].cert_class);
        draws += ',';
        draws += format_double(records[i].entropy);
        draws += '\n';
      }
    };
    emit('0', s.draws.selection);
    emit('1', s.draws.estimation);
  }
  write_text_file(dir / kDrawsFile, draws);
}

Dataset read_dataset(const fs::path& dir) {
  Dataset dataset;
  dataset.manifest = read_manifest(dir / kManifestFile);
  const DatasetManifest& m = dataset.manifest;

  std::vector<std::string_view> fields;
  std::string_view line;

  CsvReader samples(std::string(kSamplesFile), slurp(dir / kSamplesFile));
  samples.expect_header(kSamplesHeader);
  std::vector<bool> seen_sample;
  std::vector<SampleHeader> headers;
  while (samples.next(line)) {
    if (line.empty()) {
      std::string_view rest;
      if (samples.next(rest)) samples.fail("empty line");
      break;
    }
    samples.split(line, 3, fields);
    SampleHeader h;
    h.sample_id = samples.parse_uint(fields[0], "sample_id");
    h.label = saturate_class(samples.parse_uint(fields[1], "label"));
    h.core_prediction = saturate_class(samples.parse_uint(fields[2], "core_prediction"));
    if (h.sample_id >= m.num_samples) {
      throw ValidationError("sample_id", samples.where() + ": id " + std::to_string(h.sample_id) +
                                             " not below num_samples " +
                                             std::to_string(m.num_samples));
    }
    if (h.label >= m.num_classes) throw ValidationError("label", samples.where() + ": out of range");
    if (h.core_prediction >= m.num_classes) {
      throw ValidationError("core_prediction", samples.where() + ": out of range");
    }
    headers.push_back(h);
  }
  if (headers.size() != m.num_samples) {
    throw ValidationError("num_samples", "manifest declares " + std::to_string(m.num_samples) +
                                             " samples, samples.csv has " +
                                             std::to_string(headers.size()));
  }
  // Every draw is one line, so a file with fewer lines cannot be complete;
  // checking first keeps a corrupt manifest from driving huge allocations.
  std::string draws_text = slurp(dir / kDrawsFile);
  const auto lines = static_cast<Count>(std::count(draws_text.begin(), draws_text.end(), '\n'));
  const Count per_sample = m.n0 + m.n;
  if (m.num_samples != 0 && per_sample > lines / m.num_samples) {
    throw ValidationError("draws", "draws.csv has " + std::to_string(lines) +
                                       " lines, too few for " + std::to_string(m.num_samples) +
                                       " samples of " + std::to_string(per_sample) + " draws");
  }

  dataset.samples.resize(headers.size());
  seen_sample.assign(headers.size(), false);
  for (const SampleHeader& h : headers) {
    if (seen_sample[h.sample_id]) {
      throw ValidationError("sample_id", "duplicate sample id " + std::to_string(h.sample_id));
    }
    seen_sample[h.sample_id] = true;
    dataset.samples[h.sample_id].header = h;
    dataset.samples[h.sample_id].draws.selection.resize(m.n0);
    dataset.samples[h.sample_id].draws.estimation.resize(m.n);
  }

  CsvReader draws(std::string(kDrawsFile), std::move(draws_text));
  draws.expect_header(kDrawsHeader);
  std::vector<std::vector<bool>> filled(headers.size() * 2);
  for (std::size_t i = 0; i < headers.size(); ++i) {
    filled[2 * i].assign(m.n0, false);
    filled[2 * i + 1].assign(m.n, false);
  }
  while (draws.next(line)) {
    if (line.empty()) {
      std::string_view rest;
      if (draws.next(rest)) draws.fail("empty line");
      break;
    }
    draws.split(line, 5, fields);
    const std::uint64_t id = draws.parse_uint(fields[0], "sample_id");
    const std::uint64_t phase = draws.parse_uint(fields[1], "phase");
    const std::uint64_t index = draws.parse_uint(fields[2], "draw_index");
    const std::uint64_t cls = draws.parse_uint(fields[3], "cert_class");
    const double entropy = draws.parse_real(fields[4], "entropy");
    if (id >= headers.size()) {
      throw ValidationError("sample_id", draws.where() + ": unknown sample " + std::to_string(id));
    }
    if (phase > 1) throw ValidationError("phase", draws.where() + ": phase must be 0 or 1");
    const Count length = phase == 0 ? m.n0 : m.n;
    if (index >= length) {
      throw ValidationError("draw_index", draws.where() + ": index " + std::to_string(index) +
                                              " exceeds phase length " + std::to_string(length));
    }
    std::vector<bool>& slots = filled[2 * id + phase];
    if (slots[index]) throw ValidationError("draw_index", draws.where() + ": duplicate draw");
    slots[index] = true;
    DrawRecord record{saturate_class(cls), entropy};
    validate_draw(record, m.num_classes, draws.where());
    SampleDraws& target = dataset.samples[id].draws;
    (phase == 0 ? target.selection : target.estimation)[index] = record;
  }
  for (std::size_t i = 0; i < filled.size(); ++i) {
    const auto present = static_cast<Count>(std::count(filled[i].begin(), filled[i].end(), true));
    if (present != filled[i].size()) {
      throw ValidationError("draws", "sample " + std::to_string(i / 2) + " phase " +
                                         std::to_string(i % 2) + " has " + std::to_string(present) +
                                         " of " + std::to_string(filled[i].size()) + " draws");
    }
  }
  return dataset;
}

}  // namespace acescert
