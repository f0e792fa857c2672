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

// acescert command-line tool. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acescert/acescert.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

class CommandFailed {
 public:
  explicit CommandFailed(int code) : code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(acescert_status status) {
  switch (status) {
    case ACESCERT_OK: return kExitOk;
    case ACESCERT_IO_ERROR: return kExitIo;
    case ACESCERT_INTERNAL_ERROR: return kExitInternal;
    default: return kExitValidation;
  }
}

void check(acescert_status status) {
  if (status == ACESCERT_OK) return;
  std::cerr << "acescert: " << acescert_status_name(status) << ": " << acescert_last_error()
            << "\n";
  throw CommandFailed(exit_code_for(status));
}

[[noreturn]] void usage_error(const std::string& what) {
  std::cerr << "acescert: " << what << "\n";
  throw CommandFailed(kExitValidation);
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    usage_error("not a number: '" + text + "'");
  }
  if (used != text.size()) usage_error("not a number: '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) usage_error("empty list");
  return out;
}

// Each entry is a value or an inclusive range start:stop:step.
std::vector<double> expand_thetas(const std::vector<std::string>& specs) {
  std::vector<double> out;
  for (const std::string& spec : specs) {
    const auto first = spec.find(':');
    if (first == std::string::npos) {
      out.push_back(parse_number(spec));
      continue;
    }
    const auto second = spec.find(':', first + 1);
    if (second == std::string::npos) usage_error("theta range must be start:stop:step");
    const double start = parse_number(spec.substr(0, first));
    const double stop = parse_number(spec.substr(first + 1, second - first - 1));
    const double step = parse_number(spec.substr(second + 1));
    if (!(step > 0.0) || !(stop >= start)) usage_error("bad theta range '" + spec + "'");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1000000) usage_error("theta range too long");
    for (long i = 0; i < count; ++i) {
      out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
  }
  return out;
}

void emit(const std::string& out_path, const char* text) {
  if (out_path.empty()) {
    std::fputs(text, stdout);
    std::fflush(stdout);
    return;
  }
  check(acescert_write_text_file(out_path.c_str(), text));
}

void require_distinct(const std::string& in_dir, const std::string& out_path) {
  if (out_path.empty()) return;
  std::error_code ec;
  const fs::path in = fs::weakly_canonical(in_dir, ec);
  const fs::path out = fs::weakly_canonical(out_path, ec);
  if (in == out) usage_error("--in and --out must differ");
  if (out.parent_path() == in) {
    const std::string name = out.filename().string();
    if (name == "manifest.json" || name == "samples.csv" || name == "draws.csv") {
      usage_error("--out would overwrite a dataset file");
    }
  }
}

class Dataset {
 public:
  explicit Dataset(const std::string& dir) { check(acescert_dataset_open(dir.c_str(), &handle_)); }
  ~Dataset() { acescert_dataset_close(handle_); }
  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;
  const acescert_dataset* get() const { return handle_; }

 private:
  acescert_dataset* handle_ = nullptr;
};

class OwnedString {
 public:
  OwnedString() = default;
  ~OwnedString() { acescert_string_free(s_); }
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  char** out() { return &s_; }
  const char* get() const { return s_; }

 private:
  char* s_ = nullptr;
};

struct GenArgs {
  std::string out;
  std::vector<double> w{1.0};
  double b = 0.0;
  double temperature = 1.0;
  std::vector<std::string> x;
  uint64_t num_samples = 10;
  double spread = 2.0;
  double core_accuracy = 0.9;
  double sigma = 0.25;
  uint64_t n0 = 100;
  uint64_t n = 1000;
  uint64_t seed = 0;
  unsigned parallelism = 0;
};

struct CertifyArgs {
  std::string in;
  std::string out;
  double alpha = 0.001;
  std::vector<std::string> theta;
  bool rs = false;
  unsigned parallelism = 0;
};

struct SweepArgs {
  std::string in;
  std::string out;
  double alpha = 0.001;
  std::vector<std::string> theta{"0:1:0.1"};
  std::vector<double> radii{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  bool strict_predict = false;
  unsigned parallelism = 0;
};

struct CoverageArgs {
  std::string out;
  std::string fixture = "rs";
  std::vector<double> w;
  std::optional<double> b;
  double temperature = 1.0;
  std::string x;
  std::optional<double> sigma;
  double theta = 0.5;
  uint32_t core_class = 0;
  uint64_t trials = 10000;
  uint64_t n0 = 100;
  uint64_t n = 1000;
  double alpha = 0.01;
  uint64_t seed = 0;
  unsigned parallelism = 0;
};

void run_gen(const GenArgs& a) {
  acescert_synthetic_options opts;
  acescert_synthetic_options_init(&opts);
  std::vector<double> points;
  for (const std::string& spec : a.x) {
    const std::vector<double> p = parse_list(spec);
    if (p.size() != a.w.size()) usage_error("--x dimension must match --w");
    points.insert(points.end(), p.begin(), p.end());
  }
  opts.weight = a.w.data();
  opts.dim = a.w.size();
  opts.bias = a.b;
  opts.temperature = a.temperature;
  if (!a.x.empty()) {
    opts.points = points.data();
    opts.num_points = a.x.size();
  }
  opts.num_samples = a.num_samples;
  opts.spread = a.spread;
  opts.core_accuracy = a.core_accuracy;
  opts.sigma = a.sigma;
  opts.n0 = a.n0;
  opts.n = a.n;
  opts.seed = a.seed;
  opts.parallelism = a.parallelism;
  check(acescert_gen_synthetic(&opts, a.out.c_str()));
}

void run_certify(const CertifyArgs& a) {
  require_distinct(a.in, a.out);
  acescert_certify_options opts;
  acescert_certify_options_init(&opts);
  opts.alpha = a.alpha;
  opts.rs_only = a.rs ? 1 : 0;
  opts.parallelism = a.parallelism;
  if (!a.rs) {
    const std::vector<double> thetas = expand_thetas(a.theta);
    if (thetas.size() != 1) usage_error("certify takes exactly one --theta (or --rs)");
    opts.theta = thetas.front();
  } else if (!a.theta.empty()) {
    usage_error("--theta and --rs are mutually exclusive");
  }
  Dataset dataset(a.in);
  OwnedString csv;
  check(acescert_certify(dataset.get(), &opts, csv.out()));
  emit(a.out, csv.get());
}

void run_sweep(const SweepArgs& a) {
  require_distinct(a.in, a.out);
  const std::vector<double> thetas = expand_thetas(a.theta);
  acescert_sweep_options opts;
  acescert_sweep_options_init(&opts);
  opts.alpha = a.alpha;
  opts.thetas = thetas.data();
  opts.num_thetas = thetas.size();
  opts.radii = a.radii.data();
  opts.num_radii = a.radii.size();
  opts.strict_predict = a.strict_predict ? 1 : 0;
  opts.parallelism = a.parallelism;
  Dataset dataset(a.in);
  OwnedString csv;
  check(acescert_sweep(dataset.get(), &opts, csv.out()));
  emit(a.out, csv.get());
}

void run_coverage(const CoverageArgs& a) {
  acescert_coverage_options opts;
  if (a.fixture == "rs") {
    acescert_coverage_options_init(&opts);
  } else if (a.fixture == "aces") {
    acescert_coverage_options_init_aces(&opts);
  } else {
    usage_error("--fixture must be rs or aces");
  }
  std::vector<double> point;
  if (!a.w.empty() || !a.x.empty()) {
    if (a.w.empty() || a.x.empty()) usage_error("--w and --x must be given together");
    point = parse_list(a.x);
    if (point.size() != a.w.size()) usage_error("--x dimension must match --w");
    opts.weight = a.w.data();
    opts.point = point.data();
    opts.dim = a.w.size();
  }
  if (a.b) opts.bias = *a.b;
  if (a.sigma) opts.sigma = *a.sigma;
  opts.temperature = a.temperature;
  opts.theta = a.theta;
  opts.core_class = a.core_class;
  opts.trials = a.trials;
  opts.n0 = a.n0;
  opts.n = a.n;
  opts.alpha = a.alpha;
  opts.seed = a.seed;
  opts.parallelism = a.parallelism;
  OwnedString json;
  check(acescert_coverage(&opts, json.out()));
  emit(a.out, json.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified selective prediction with randomized smoothing"};
  app.set_version_flag("--version", std::string(acescert_version()));
  app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Sample the linear fixture into a dataset");
  gen_cmd->add_option("--out", gen.out, "Output dataset directory")->required();
  gen_cmd->add_option("--w", gen.w, "Weight vector, comma separated")->delimiter(',');
  gen_cmd->add_option("--b", gen.b, "Bias");
  gen_cmd->add_option("--temperature", gen.temperature, "Logit temperature");
  gen_cmd->add_option("--x", gen.x, "Sample position, comma separated; repeatable");
  gen_cmd->add_option("--num-samples", gen.num_samples, "Generated positions when --x is absent");
  gen_cmd->add_option("--spread", gen.spread, "Signed distances drawn from [-spread, spread]");
  gen_cmd->add_option("--core-accuracy", gen.core_accuracy, "Core model accuracy");
  gen_cmd->add_option("--sigma", gen.sigma, "Noise level");
  gen_cmd->add_option("--n0", gen.n0, "Selection draws per sample");
  gen_cmd->add_option("--n", gen.n, "Estimation draws per sample");
  gen_cmd->add_option("--seed", gen.seed, "Base seed");
  gen_cmd->add_option("--parallelism", gen.parallelism, "Worker threads, 0 = all cores");

  CertifyArgs cert;
  auto* cert_cmd = app.add_subcommand("certify", "Certify every sample of a dataset");
  cert_cmd->add_option("--in", cert.in, "Dataset directory")->required();
  cert_cmd->add_option("--out", cert.out, "Output CSV (stdout when omitted)");
  cert_cmd->add_option("--alpha", cert.alpha, "Failure probability");
  cert_cmd->add_option("--theta", cert.theta, "Entropy threshold");
  cert_cmd->add_flag("--rs", cert.rs, "Plain randomized smoothing, no selection");
  cert_cmd->add_option("--parallelism", cert.parallelism, "Worker threads, 0 = all cores");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Metric table over a theta grid");
  sweep_cmd->add_option("--in", sweep.in, "Dataset directory")->required();
  sweep_cmd->add_option("--out", sweep.out, "Output CSV (stdout when omitted)");
  sweep_cmd->add_option("--alpha", sweep.alpha, "Failure probability");
  sweep_cmd->add_option("--theta", sweep.theta, "Threshold or start:stop:step; repeatable")
      ->capture_default_str();
  sweep_cmd->add_option("--radii", sweep.radii, "Radius grid, comma separated")
      ->delimiter(',');
  sweep_cmd->add_flag("--strict-predict", sweep.strict_predict,
                      "Require both conditions in the core branch of Predict");
  sweep_cmd->add_option("--parallelism", sweep.parallelism, "Worker threads, 0 = all cores");

  CoverageArgs cov;
  auto* cov_cmd = app.add_subcommand("coverage", "Empirical soundness check on a fixture");
  cov_cmd->add_option("--fixture", cov.fixture, "rs or aces")->capture_default_str();
  cov_cmd->add_option("--out", cov.out, "Output JSON (stdout when omitted)");
  cov_cmd->add_option("--w", cov.w, "Weight vector, comma separated")->delimiter(',');
  cov_cmd->add_option("--b", cov.b, "Bias");
  cov_cmd->add_option("--temperature", cov.temperature, "Logit temperature");
  cov_cmd->add_option("--x", cov.x, "Input point, comma separated");
  cov_cmd->add_option("--sigma", cov.sigma, "Noise level");
  cov_cmd->add_option("--theta", cov.theta, "Entropy threshold (aces fixture)");
  cov_cmd->add_option("--core-class", cov.core_class, "Core model output (aces fixture)");
  cov_cmd->add_option("--trials", cov.trials, "Independent certifications");
  cov_cmd->add_option("--n0", cov.n0, "Selection draws");
  cov_cmd->add_option("--n", cov.n, "Estimation draws");
  cov_cmd->add_option("--alpha", cov.alpha, "Failure probability");
  cov_cmd->add_option("--seed", cov.seed, "Base seed");
  cov_cmd->add_option("--parallelism", cov.parallelism, "Worker threads, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen_cmd) run_gen(gen);
    if (*cert_cmd) run_certify(cert);
    if (*sweep_cmd) run_sweep(sweep);
    if (*cov_cmd) run_coverage(cov);
  } catch (const CommandFailed& e) {
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "acescert: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
