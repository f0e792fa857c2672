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

#include "acescert/acescert.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <iterator>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "acescert/coverage.hpp"
#include "acescert/commands.hpp"
#include "acescert/errors.hpp"
#include "acescert/evaluation.hpp"
#include "acescert/record_store.hpp"
#include "acescert/smoothing.hpp"
#include "acescert/stats.hpp"

struct acescert_dataset {
  acescert::Dataset data;
};

namespace {

thread_local std::string last_error;

template <typename Fn>
acescert_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return ACESCERT_OK;
  } catch (const acescert::InvalidArgument& e) {
    last_error = e.what();
    return ACESCERT_INVALID_ARGUMENT;
  } catch (const acescert::DomainError& e) {
    last_error = e.what();
    return ACESCERT_DOMAIN_ERROR;
  } catch (const acescert::ParseError& e) {
    last_error = e.what();
    return ACESCERT_PARSE_ERROR;
  } catch (const acescert::ValidationError& e) {
    last_error = e.what();
    return ACESCERT_VALIDATION_ERROR;
  } catch (const acescert::IoError& e) {
    last_error = e.what();
    return ACESCERT_IO_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ACESCERT_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ACESCERT_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown failure";
    return ACESCERT_INTERNAL_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw acescert::InvalidArgument(std::string(what) + " is null");
}

char* to_c_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

const double kDefaultThetas[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
const double kRsWeight[] = {3.0, 4.0};
const double kRsPoint[] = {0.72, 0.96};
const double kAcesWeight[] = {1.0};
const double kAcesPoint[] = {1.6};
const double kUnitWeight[] = {1.0};

}  // namespace

extern "C" {

const char* acescert_version(void) { return ACESCERT_VERSION_STRING; }

const char* acescert_status_name(acescert_status status) {
  switch (status) {
    case ACESCERT_OK: return "ok";
    case ACESCERT_INVALID_ARGUMENT: return "invalid argument";
    case ACESCERT_DOMAIN_ERROR: return "domain error";
    case ACESCERT_PARSE_ERROR: return "parse error";
    case ACESCERT_VALIDATION_ERROR: return "validation error";
    case ACESCERT_IO_ERROR: return "i/o error";
    case ACESCERT_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* acescert_last_error(void) { return last_error.c_str(); }

void acescert_string_free(char* s) { std::free(s); }

acescert_status acescert_normal_cdf(double x, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = acescert::std_normal_cdf(x);
  });
}

acescert_status acescert_normal_quantile(double p, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = acescert::std_normal_quantile(p);
  });
}

acescert_status acescert_clopper_pearson_lower(uint64_t k, uint64_t n, double confidence,
                                               double* out) {
  return guarded([&] {
    require(out, "out");
    *out = acescert::clopper_pearson_lower(k, n, acescert::Confidence(confidence));
  });
}

acescert_status acescert_binom_p_value(uint64_t k, uint64_t n, double p, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = acescert::binom_p_value(k, n, p);
  });
}

acescert_status acescert_normalized_entropy(const double* probs, size_t m, double* out) {
  return guarded([&] {
    require(out, "out");
    if (m > 0) require(probs, "probs");
    *out = acescert::normalized_entropy(std::span<const double>(probs, m));
  });
}

acescert_status acescert_certified_radius(double p_lower, double sigma, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = acescert::certified_radius(p_lower, acescert::NoiseConfig(sigma));
  });
}

acescert_status acescert_certified_radius_two_sided(double pa_lower, double pb_upper,
                                                    double sigma, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = acescert::certified_radius_two_sided(pa_lower, pb_upper,
                                                acescert::NoiseConfig(sigma));
  });
}

acescert_status acescert_dataset_open(const char* dir, acescert_dataset** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    auto handle = std::make_unique<acescert_dataset>();
    handle->data = acescert::read_dataset(dir);
    *out = handle.release();
  });
}

void acescert_dataset_close(acescert_dataset* dataset) { delete dataset; }

acescert_status acescert_dataset_info_get(const acescert_dataset* dataset,
                                          acescert_dataset_info* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    const acescert::DatasetManifest& m = dataset->data.manifest;
    out->num_classes = m.num_classes;
    out->sigma = m.sigma;
    out->n0 = m.n0;
    out->n = m.n;
    out->base_seed = m.base_seed;
    out->num_samples = m.num_samples;
  });
}

void acescert_certify_options_init(acescert_certify_options* options) {
  if (options == nullptr) return;
  options->alpha = 0.001;
  options->theta = 0.5;
  options->rs_only = 0;
  options->parallelism = 0;
}

acescert_status acescert_certify(const acescert_dataset* dataset,
                                 const acescert_certify_options* options, char** out_csv) {
  return guarded([&] {
    require(dataset, "dataset");
    require(options, "options");
    require(out_csv, "out_csv");
    acescert::CertifyOptions opts;
    opts.alpha = options->alpha;
    opts.theta = options->theta;
    opts.rs_only = options->rs_only != 0;
    opts.parallelism = options->parallelism;
    *out_csv = to_c_string(acescert::certify_csv(dataset->data, opts));
  });
}

void acescert_sweep_options_init(acescert_sweep_options* options) {
  if (options == nullptr) return;
  options->alpha = 0.001;
  options->thetas = nullptr;
  options->num_thetas = 0;
  options->radii = nullptr;
  options->num_radii = 0;
  options->strict_predict = 0;
  options->parallelism = 0;
}

acescert_status acescert_sweep(const acescert_dataset* dataset,
                               const acescert_sweep_options* options, char** out_csv) {
  return guarded([&] {
    require(dataset, "dataset");
    require(options, "options");
    require(out_csv, "out_csv");
    acescert::SweepOptions opts;
    opts.alpha = options->alpha;
    if (options->thetas != nullptr) {
      opts.thetas.assign(options->thetas, options->thetas + options->num_thetas);
    } else {
      opts.thetas.assign(std::begin(kDefaultThetas), std::end(kDefaultThetas));
    }
    if (options->radii != nullptr) {
      opts.grid = acescert::RadiusGrid(
          std::vector<double>(options->radii, options->radii + options->num_radii));
    }
    opts.predict_mode = options->strict_predict != 0 ? acescert::PredictMode::kStrict
                                                     : acescert::PredictMode::kAsPrinted;
    opts.parallelism = options->parallelism;
    const auto rows = acescert::build_sweep_table(dataset->data, opts);
    *out_csv = to_c_string(acescert::format_sweep_csv(rows, opts.grid));
  });
}

void acescert_synthetic_options_init(acescert_synthetic_options* options) {
  if (options == nullptr) return;
  const acescert::SyntheticOptions d;
  options->weight = kUnitWeight;
  options->dim = 1;
  options->bias = d.bias;
  options->temperature = d.temperature;
  options->points = nullptr;
  options->num_points = 0;
  options->num_samples = d.num_samples;
  options->spread = d.spread;
  options->core_accuracy = d.core_accuracy;
  options->sigma = d.sigma;
  options->n0 = d.n0;
  options->n = d.n;
  options->seed = d.seed;
  options->parallelism = 0;
}

acescert_status acescert_gen_synthetic(const acescert_synthetic_options* options,
                                       const char* out_dir) {
  return guarded([&] {
    require(options, "options");
    require(out_dir, "out_dir");
    require(options->weight, "weight");
    acescert::SyntheticOptions opts;
    opts.weight.assign(options->weight, options->weight + options->dim);
    opts.bias = options->bias;
    opts.temperature = options->temperature;
    if (options->points != nullptr) {
      for (size_t i = 0; i < options->num_points; ++i) {
        const double* row = options->points + i * options->dim;
        opts.points.emplace_back(row, row + options->dim);
      }
    }
    opts.num_samples = options->num_samples;
    opts.spread = options->spread;
    opts.core_accuracy = options->core_accuracy;
    opts.sigma = options->sigma;
    opts.n0 = options->n0;
    opts.n = options->n;
    opts.seed = options->seed;
    opts.parallelism = options->parallelism;
    acescert::cmd_gen_synthetic(opts, out_dir);
  });
}

void acescert_coverage_options_init(acescert_coverage_options* options) {
  if (options == nullptr) return;
  options->kind = ACESCERT_COVERAGE_RS;
  options->weight = kRsWeight;
  options->point = kRsPoint;
  options->dim = 2;
  options->bias = -1.0;
  options->temperature = 1.0;
  options->theta = 0.5;
  options->core_class = 0;
  options->trials = 10000;
  options->n0 = 100;
  options->n = 1000;
  options->alpha = 0.01;
  options->sigma = 1.0;
  options->seed = 0;
  options->parallelism = 0;
}

void acescert_coverage_options_init_aces(acescert_coverage_options* options) {
  if (options == nullptr) return;
  acescert_coverage_options_init(options);
  options->kind = ACESCERT_COVERAGE_ACES;
  options->weight = kAcesWeight;
  options->point = kAcesPoint;
  options->dim = 1;
  options->bias = 0.0;
  options->sigma = 0.5;
}

acescert_status acescert_coverage(const acescert_coverage_options* options, char** out_json) {
  return guarded([&] {
    require(options, "options");
    require(out_json, "out_json");
    require(options->weight, "weight");
    require(options->point, "point");
    if (options->kind != ACESCERT_COVERAGE_RS && options->kind != ACESCERT_COVERAGE_ACES) {
      throw acescert::InvalidArgument("unknown coverage kind");
    }
    acescert::CoverageFixture fixture;
    fixture.kind = options->kind == ACESCERT_COVERAGE_ACES ? acescert::CoverageKind::kAces
                                                           : acescert::CoverageKind::kRandomizedSmoothing;
    fixture.weight.assign(options->weight, options->weight + options->dim);
    fixture.point.assign(options->point, options->point + options->dim);
    fixture.bias = options->bias;
    fixture.temperature = options->temperature;
    fixture.theta = options->theta;
    fixture.core_class = options->core_class;
    const acescert::CertificationConfig cfg{options->n0, options->n, options->alpha,
                                            acescert::NoiseConfig(options->sigma),
                                            options->seed};
    const acescert::CoverageReport report =
        acescert::run_coverage_experiment(fixture, options->trials, cfg, options->parallelism);
    *out_json = to_c_string(acescert::coverage_report_json(report, fixture, cfg));
  });
}

acescert_status acescert_write_text_file(const char* path, const char* contents) {
  return guarded([&] {
    require(path, "path");
    require(contents, "contents");
    acescert::write_text_file(path, contents);
  });
}

}  // extern "C"
