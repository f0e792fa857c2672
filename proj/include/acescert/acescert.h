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

// C interface to acescert. All functions are thread-safe. Failures return a
// non-zero status; acescert_last_error() then describes the failure on the
// calling thread until the next call. Strings returned through `char**`
// out-parameters are owned by the caller and released with
// acescert_string_free().

#ifndef ACESCERT_ACESCERT_H_
#define ACESCERT_ACESCERT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ACESCERT_BUILDING_LIBRARY)
#define ACESCERT_API __attribute__((visibility("default")))
#else
#define ACESCERT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum acescert_status {
  ACESCERT_OK = 0,
  ACESCERT_INVALID_ARGUMENT = 1,
  ACESCERT_DOMAIN_ERROR = 2,
  ACESCERT_PARSE_ERROR = 3,
  ACESCERT_VALIDATION_ERROR = 4,
  ACESCERT_IO_ERROR = 5,
  ACESCERT_INTERNAL_ERROR = 6,
} acescert_status;

ACESCERT_API const char* acescert_version(void);
ACESCERT_API const char* acescert_status_name(acescert_status status);
ACESCERT_API const char* acescert_last_error(void);
ACESCERT_API void acescert_string_free(char* s);

// Statistical kernels.
ACESCERT_API acescert_status acescert_normal_cdf(double x, double* out);
ACESCERT_API acescert_status acescert_normal_quantile(double p, double* out);
ACESCERT_API acescert_status acescert_clopper_pearson_lower(uint64_t k, uint64_t n,
                                                            double confidence, double* out);
ACESCERT_API acescert_status acescert_binom_p_value(uint64_t k, uint64_t n, double p,
                                                    double* out);
ACESCERT_API acescert_status acescert_normalized_entropy(const double* probs, size_t m,
                                                         double* out);
ACESCERT_API acescert_status acescert_certified_radius(double p_lower, double sigma,
                                                       double* out);
ACESCERT_API acescert_status acescert_certified_radius_two_sided(double pa_lower,
                                                                 double pb_upper,
                                                                 double sigma, double* out);

// Recorded datasets.
typedef struct acescert_dataset acescert_dataset;

typedef struct acescert_dataset_info {
  uint32_t num_classes;
  double sigma;
  uint64_t n0;
  uint64_t n;
  uint64_t base_seed;
  uint64_t num_samples;
} acescert_dataset_info;

ACESCERT_API acescert_status acescert_dataset_open(const char* dir, acescert_dataset** out);
ACESCERT_API void acescert_dataset_close(acescert_dataset* dataset);
ACESCERT_API acescert_status acescert_dataset_info_get(const acescert_dataset* dataset,
                                                       acescert_dataset_info* out);

// A parallelism of 0 means one worker per hardware thread. Output never
// depends on it.
typedef struct acescert_certify_options {
  double alpha;
  double theta;
  int rs_only;
  unsigned parallelism;
} acescert_certify_options;

ACESCERT_API void acescert_certify_options_init(acescert_certify_options* options);
ACESCERT_API acescert_status acescert_certify(const acescert_dataset* dataset,
                                              const acescert_certify_options* options,
                                              char** out_csv);

// NULL thetas select {0, 0.1, ..., 1}; NULL radii select
// {0, 0.25, ..., 1.5}.
typedef struct acescert_sweep_options {
  double alpha;
  const double* thetas;
  size_t num_thetas;
  const double* radii;
  size_t num_radii;
  int strict_predict;
  unsigned parallelism;
} acescert_sweep_options;

ACESCERT_API void acescert_sweep_options_init(acescert_sweep_options* options);
ACESCERT_API acescert_status acescert_sweep(const acescert_dataset* dataset,
                                            const acescert_sweep_options* options,
                                            char** out_csv);

// Linear fixture dataset generation. `points` is row-major with
// num_points rows of `dim` values; when NULL, num_samples positions are
// spread along the weight direction.
typedef struct acescert_synthetic_options {
  const double* weight;
  size_t dim;
  double bias;
  double temperature;
  const double* points;
  size_t num_points;
  uint64_t num_samples;
  double spread;
  double core_accuracy;
  double sigma;
  uint64_t n0;
  uint64_t n;
  uint64_t seed;
  unsigned parallelism;
} acescert_synthetic_options;

ACESCERT_API void acescert_synthetic_options_init(acescert_synthetic_options* options);
ACESCERT_API acescert_status acescert_gen_synthetic(const acescert_synthetic_options* options,
                                                    const char* out_dir);

typedef enum acescert_coverage_kind {
  ACESCERT_COVERAGE_RS = 0,
  ACESCERT_COVERAGE_ACES = 1,
} acescert_coverage_kind;

typedef struct acescert_coverage_options {
  acescert_coverage_kind kind;
  const double* weight;
  const double* point;
  size_t dim;
  double bias;
  double temperature;
  double theta;
  uint32_t core_class;
  uint64_t trials;
  uint64_t n0;
  uint64_t n;
  double alpha;
  double sigma;
  uint64_t seed;
  unsigned parallelism;
} acescert_coverage_options;

// Defaults to the RS fixture w = (3, 4), b = -1, x = (0.72, 0.96) with
// sigma = 1, n = 1000, alpha = 0.01 and 10000 trials.
ACESCERT_API void acescert_coverage_options_init(acescert_coverage_options* options);
// Same settings with the ACES fixture w = (1), b = 0, x = (1.6), sigma = 0.5,
// theta = 0.5, core class 0.
ACESCERT_API void acescert_coverage_options_init_aces(acescert_coverage_options* options);
ACESCERT_API acescert_status acescert_coverage(const acescert_coverage_options* options,
                                               char** out_json);

// Writes `contents` to `path` through a temporary file and rename.
ACESCERT_API acescert_status acescert_write_text_file(const char* path, const char* contents);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // ACESCERT_ACESCERT_H_
