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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "acescert/aces.hpp"
#include "acescert/commands.hpp"
#include "acescert/coverage.hpp"
#include "acescert/evaluation.hpp"
#include "acescert/oracles.hpp"
#include "acescert/record_store.hpp"
#include "acescert/smoothing.hpp"
#include "acescert/stats.hpp"
#include "support/brute_force.hpp"

namespace acescert {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

bool same_bits(const AcesVerdict& a, const AcesVerdict& b) {
  return a == b && std::bit_cast<std::uint64_t>(a.radius) == std::bit_cast<std::uint64_t>(b.radius) &&
         std::bit_cast<std::uint64_t>(a.p_lower_cert) ==
             std::bit_cast<std::uint64_t>(b.p_lower_cert) &&
         std::bit_cast<std::uint64_t>(a.p_lower_select) ==
             std::bit_cast<std::uint64_t>(b.p_lower_select) &&
         std::bit_cast<std::uint64_t>(a.selection_radius) ==
             std::bit_cast<std::uint64_t>(b.selection_radius);
}

// Draws with a skewed class distribution and class-correlated entropy.
SampleDraws random_draws(std::mt19937_64& rng, Count n0, Count n, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double skew = u(rng);
  const double spread = u(rng);
  auto one = [&] {
    const ClassId c = u(rng) < skew ? 0 : static_cast<ClassId>(rng() % m);
    return DrawRecord{c, std::min(1.0, spread * u(rng) + (c == 0 ? 0.0 : 0.3 * u(rng)))};
  };
  SampleDraws d;
  for (Count i = 0; i < n0; ++i) d.selection.push_back(one());
  for (Count i = 0; i < n; ++i) d.estimation.push_back(one());
  return d;
}

Outcome kernels() {
  const auto start = Clock::now();
  double worst_cp = 0.0;
  for (double conf : {0.95, 0.999, 0.9995}) {
    for (Count n = 1; n <= 200; ++n) {
      for (Count k = 0; k <= n; ++k) {
        const double lib = clopper_pearson_lower(k, n, Confidence(conf));
        worst_cp = std::max(worst_cp, std::abs(lib - testing::bisect_cp_lower(k, n, conf)));
      }
    }
  }
  double worst_binom = 0.0;
  for (Count n = 1; n <= 30; ++n) {
    for (Count k = 0; k <= n; ++k) {
      const double exact = testing::half_survival_exact(k, n);
      worst_binom = std::max(worst_binom, std::abs(binom_p_value(k, n, 0.5) - exact) / exact);
    }
  }
  const double elapsed = seconds_since(start);
  return {worst_cp <= 1e-9 && worst_binom <= 1e-13 && elapsed < 60.0,
          fmt("max |CP - bisection| = %.2e over 60900 cases, max binom rel err = %.2e, %.1f s",
              worst_cp, worst_binom, elapsed)};
}

Outcome radius_formula() {
  const double two = certified_radius_two_sided(std_normal_cdf(1.0), std_normal_cdf(-1.0),
                                                NoiseConfig(1.0));
  const double one = certified_radius(std_normal_cdf(1.0), NoiseConfig(0.5));
  return {std::abs(two - 1.0) <= 1e-9 && std::abs(one - 0.5) <= 1e-9,
          fmt("two-sided = %.15f, one-sided = %.15f", two, one)};
}

Outcome coverage(CoverageKind kind) {
  CoverageFixture f;
  double sigma = 1.0;
  if (kind == CoverageKind::kAces) {
    f.kind = kind;
    f.weight = {1.0};
    f.bias = 0.0;
    f.point = {1.6};
    f.theta = 0.5;
    f.core_class = 0;
    sigma = 0.5;
  }
  const CertificationConfig cfg{100, 1000, 0.01, NoiseConfig(sigma), 2026};
  const auto start = Clock::now();
  const CoverageReport r = run_coverage_experiment(f, 10000, cfg, 1);
  const double elapsed = seconds_since(start);
  return {r.violation_fraction <= 0.015 && elapsed < 300.0,
          fmt("violations %.0f / 10000 = %.4f (bound 0.015), truth radius %.4f, %.1f s",
              static_cast<double>(r.violations), r.violation_fraction, r.truth.max_radius,
              elapsed)};
}

Outcome theta_one_degeneracy() {
  std::vector<SampleDraws> samples;
  std::vector<std::size_t> classes;
  std::vector<ClassId> cores;
  SyntheticOptions opts;
  opts.num_samples = 200;
  opts.n0 = 100;
  opts.n = 1000;
  opts.sigma = 0.5;
  opts.seed = 5;
  for (const SampleRecord& s : make_synthetic_dataset(opts).dataset.samples) {
    samples.push_back(s.draws);
    classes.push_back(2);
    cores.push_back(s.header.core_prediction);
  }
  std::mt19937_64 rng(55);
  for (int i = 0; i < 600; ++i) {
    const std::size_t m = 2 + rng() % 4;
    samples.push_back(random_draws(rng, 100, 1000, m));
    classes.push_back(m);
    cores.push_back(static_cast<ClassId>(rng() % m));
  }
  std::size_t mutual = 0;
  std::size_t agree = 0;
  std::size_t tighter = 0;
  for (double alpha : {0.001, 0.01}) {
    const CertificationConfig cfg{100, 1000, alpha, NoiseConfig(0.5), 0};
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const AcesVerdict a = aces_certify(samples[i], cores[i], cfg, EntropyThreshold{1.0});
      const SmoothedVerdict r = rs_certify(InMemoryDrawSource(classes[i], samples[i]), cfg);
      if (a.decided && r.predicted) {
        ++mutual;
        if (*a.decided == *r.predicted) ++agree;
      }
      if (a.radius <= r.radius) ++tighter;
    }
  }
  const std::size_t total = 2 * samples.size();
  return {mutual > 0 && agree == mutual && tighter == total,
          fmt("class agreement %.0f / %.0f mutually decided, radius <= rs on %.0f / %.0f",
              static_cast<double>(agree), static_cast<double>(mutual),
              static_cast<double>(tighter), static_cast<double>(total))};
}

Outcome sweep_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(606);
  std::normal_distribution<double> z(0.0, 1.0);
  SyntheticOptions opts;
  opts.weight.assign(16, 0.0);
  for (double& w : opts.weight) w = z(rng);
  opts.bias = 0.3;
  opts.temperature = 2.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(16);
    for (double& v : x) v = 0.4 * z(rng);
    opts.points.push_back(x);
  }
  opts.n0 = 100;
  opts.n = 1000;
  opts.sigma = 0.5;
  opts.seed = 31;
  const SyntheticResult data = make_synthetic_dataset(opts);
  std::vector<SampleDraws> samples;
  std::vector<ClassId> cores;
  for (const SampleRecord& s : data.dataset.samples) {
    samples.push_back(s.draws);
    cores.push_back(s.header.core_prediction);
  }
  std::vector<double> thetas;
  for (int t = 0; t <= 100; ++t) thetas.push_back(t / 100.0);
  const CertificationConfig cfg{100, 1000, 0.001, NoiseConfig(0.5), opts.seed};

  const auto sweep_start = Clock::now();
  const VerdictMatrix swept = sweep_thresholds(samples, cores, cfg, thetas, 1);
  const double t_sweep = seconds_since(sweep_start);

  std::size_t identical = 0;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (same_bits(swept[i][t], aces_certify(samples[i], cores[i], cfg,
                                              EntropyThreshold{thetas[t]}))) {
        ++identical;
      }
    }
  }

  const LinearSyntheticClassifier clf(opts.weight, opts.bias, opts.temperature);
  std::size_t resampled_identical = 0;
  const auto resample_start = Clock::now();
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const OracleDrawSource source(clf, opts.points[i], cfg.noise, cfg.base_seed,
                                    static_cast<std::uint32_t>(i));
      const AcesVerdict v = aces_certify(source, cores[i], cfg, EntropyThreshold{thetas[t]});
      if (same_bits(v, swept[i][t])) ++resampled_identical;
    }
  }
  const double t_resample = seconds_since(resample_start);
  const double speedup = t_resample / std::max(t_sweep, 1e-9);
  const double elapsed = seconds_since(start);
  const double cells = static_cast<double>(thetas.size() * samples.size());
  return {identical == thetas.size() * samples.size() && speedup >= 20.0 && elapsed < 120.0,
          fmt("%.0f / %.0f cells bit-identical, sweep %.4f s vs resampling %.2f s", identical,
              cells, t_sweep, t_resample) +
              fmt(" (%.0fx), resampled verdicts identical in %.0f cells, %.1f s", speedup,
                  static_cast<double>(resampled_identical), elapsed)};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(707);
  std::vector<SampleDraws> samples;
  std::vector<ClassId> cores;
  std::vector<ClassId> labels;
  for (int i = 0; i < 1000; ++i) {
    samples.push_back(random_draws(rng, 20, 200, 3));
    cores.push_back(static_cast<ClassId>(rng() % 3));
    labels.push_back(rng() % 4 == 0 ? static_cast<ClassId>(rng() % 3) : 0);
  }
  std::vector<double> thetas;
  for (int t = 0; t <= 20; ++t) thetas.push_back(t / 20.0);
  std::vector<double> radii;
  for (int r = 0; r <= 30; ++r) radii.push_back(r * 0.05);
  const RadiusGrid grid(radii);
  const CertificationConfig cfg{20, 200, 0.01, NoiseConfig(0.5), 0};
  const VerdictMatrix vm = sweep_thresholds(samples, cores, cfg, thetas);
  const PredictionMatrix pm = sweep_predictions(samples, cores, 0.01, thetas);

  std::size_t mismatches = 0;
  std::size_t order_violations = 0;
  std::vector<double> previous_sr;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    std::vector<AcesVerdict> v;
    std::vector<AcesPrediction> p;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      v.push_back(vm[i][t]);
      p.push_back(pm[i][t]);
    }
    double radius_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].decided && *v[i].decided == labels[i]) radius_sum += v[i].radius;
      if (p[i].predicted && *p[i].predicted == labels[i]) ++correct;
    }
    if (average_certified_radius(v, labels) != radius_sum / 1000.0) ++mismatches;
    if (natural_accuracy(p, labels) != static_cast<double>(correct) / 1000.0) ++mismatches;
    const std::vector<double> ca = certified_accuracy_at(v, labels, grid);
    const std::vector<double> sr = certified_selection_rate_at(v, grid);
    for (std::size_t r = 0; r < radii.size(); ++r) {
      std::size_t hits = 0;
      std::size_t sel = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].decided && *v[i].decided == labels[i] && v[i].radius >= radii[r]) ++hits;
        if (v[i].selected == 1 && v[i].p_lower_select > 0.5 &&
            v[i].selection_radius >= radii[r]) {
          ++sel;
        }
      }
      if (ca[r] != static_cast<double>(hits) / 1000.0) ++mismatches;
      if (sr[r] != static_cast<double>(sel) / 1000.0) ++mismatches;
      if (r > 0 && (ca[r] > ca[r - 1] || sr[r] > sr[r - 1])) ++order_violations;
      if (!previous_sr.empty() && sr[r] < previous_sr[r]) ++order_violations;
    }
    previous_sr = sr;
  }
  return {mismatches == 0 && order_violations == 0,
          fmt("%.0f metric mismatches, %.0f monotonicity violations over 21 thetas x 31 radii",
              static_cast<double>(mismatches), static_cast<double>(order_violations))};
}

Outcome traces() {
  const CertificationConfig cfg{100, 1000, 0.001, NoiseConfig(1.0), 0};
  const double p_all = testing::bisect_cp_lower(1000, 1000, 0.9995);
  const double p_half = testing::bisect_cp_lower(500, 1000, 0.9995);
  int ok = 0;
  std::string failed;
  auto check = [&](bool cond, const char* name) {
    if (cond) {
      ++ok;
    } else {
      failed += std::string(" ") + name;
    }
  };
  auto repeat = [](DrawRecord d, std::size_t times) { return std::vector<DrawRecord>(times, d); };
  auto concat = [](std::vector<DrawRecord> a, const std::vector<DrawRecord>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };

  const AcesVerdict core = aces_certify({repeat({1, 1.0}, 100), repeat({1, 1.0}, 1000)}, 0, cfg,
                                        EntropyThreshold{0.5});
  check(core.branch == AcesBranch::kCoreSelection && core.decided == ClassId{0} &&
            core.radius == 0.0 && std::abs(core.p_lower_select - p_all) <= 1e-9,
        "certify-core");

  const AcesVerdict cert = aces_certify({repeat({2, 0.0}, 100), repeat({2, 0.0}, 1000)}, 0, cfg,
                                        EntropyThreshold{0.5});
  check(cert.branch == AcesBranch::kCertifiedSelection && cert.decided == ClassId{2} &&
            std::abs(cert.radius - testing::bisect_normal_quantile(p_all)) <= 1e-9,
        "certify-selection");

  const SampleDraws split{concat(repeat({1, 0.2}, 50), repeat({1, 0.8}, 50)),
                          concat(repeat({1, 0.2}, 500), repeat({1, 0.8}, 500))};
  const AcesVerdict agree = aces_certify(split, 1, cfg, EntropyThreshold{0.5});
  check(agree.branch == AcesBranch::kAgreement && agree.decided == ClassId{1} &&
            agree.radius == 0.0 && std::abs(agree.p_lower_select - p_half) <= 1e-9 &&
            p_half < 0.5,
        "certify-agreement");

  const EntropyThreshold mech{0.5};
  const AcesPrediction p_cert = aces_predict(repeat({2, 0.0}, 1000), 0, 1000, 0.001, mech);
  check(p_cert.branch == PredictBranch::kCertification && p_cert.predicted == ClassId{2},
        "predict-certification");
  const AcesPrediction p_core = aces_predict(repeat({1, 1.0}, 1000), 0, 1000, 0.001, mech);
  check(p_core.branch == PredictBranch::kCore && p_core.predicted == ClassId{0}, "predict-core");
  const AcesPrediction p_agree =
      aces_predict(concat(repeat({0, 1.0}, 490), repeat({0, 0.0}, 510)), 0, 1000, 0.001, mech);
  check(p_agree.branch == PredictBranch::kAgreement && p_agree.predicted == ClassId{0},
        "predict-agreement");
  const AcesPrediction p_abstain =
      aces_predict(concat(repeat({0, 1.0}, 490), repeat({1, 0.0}, 510)), 0, 1000, 0.001, mech);
  check(p_abstain.branch == PredictBranch::kAbstained && !p_abstain.predicted,
        "predict-abstain");

  return {ok == 7, fmt("%.0f / 7 trace fixtures exact", ok) + failed};
}

Outcome determinism() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() /
                                    ("acescert-acceptance-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  SyntheticOptions opts;
  opts.num_samples = 60;
  opts.n0 = 50;
  opts.n = 500;
  opts.sigma = 0.5;
  opts.seed = 99;
  opts.parallelism = 4;
  cmd_gen_synthetic(opts, dir);

  std::vector<std::string> certs;
  std::vector<std::string> sweeps;
  for (unsigned workers : {1u, 1u, 4u, 4u}) {
    CertifyOptions c;
    c.theta = 0.4;
    c.parallelism = workers;
    certs.push_back(cmd_certify(dir, c));
    c.rs_only = true;
    certs.push_back(cmd_certify(dir, c));
    SweepOptions s;
    for (int t = 0; t <= 20; ++t) s.thetas.push_back(t / 20.0);
    s.parallelism = workers;
    sweeps.push_back(cmd_sweep(dir, s));
  }
  std::filesystem::remove_all(dir);
  bool same = true;
  for (std::size_t i = 0; i < 4; ++i) {
    same = same && certs[2 * i] == certs[0] && certs[2 * i + 1] == certs[1] &&
           sweeps[i] == sweeps[0];
  }
  return {same && !certs[0].empty() && !sweeps[0].empty(),
          std::string("certify (aces, rs) and sweep outputs over 2 runs x parallelism {1, 4}: ") +
              (same ? "byte-identical" : "differ")};
}

}  // namespace
}  // namespace acescert

int main() {
  using acescert::Outcome;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "statistical kernels vs brute force", acescert::kernels},
      {2, "radius closed forms", acescert::radius_formula},
      {3, "RS soundness coverage", [] { return acescert::coverage(acescert::CoverageKind::kRandomizedSmoothing); }},
      {4, "ACES soundness coverage", [] { return acescert::coverage(acescert::CoverageKind::kAces); }},
      {5, "theta = 1 degeneracy", acescert::theta_one_degeneracy},
      {6, "sweep equivalence and speed", acescert::sweep_equivalence},
      {7, "metric oracle equivalence", acescert::metric_oracle},
      {8, "algorithm trace fixtures", acescert::traces},
      {9, "determinism", acescert::determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
