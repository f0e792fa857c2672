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

#include "acescert/stats.hpp"

#include <math.h>  // lgamma_r

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "acescert/errors.hpp"

namespace acescert {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Highest n for which binomial coefficients and the per-term products stay
// exactly representable in a double.
constexpr Count kDirectSumMaxN = 50;
constexpr Count kExactSumMaxN = 10000;

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Wichura, Algorithm AS 241 (PPND16). Relative accuracy about 1e-16.
double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

// I_x(a, b) with the log normalizer computed once, so repeated evaluations at
// fixed (a, b) during root finding only pay for the continued fraction.
class IncompleteBeta {
 public:
  IncompleteBeta(double a, double b)
      : a_(a), b_(b), log_beta_(log_gamma(a) + log_gamma(b) - log_gamma(a + b)) {}

  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = a_ * std::log(x) + b_ * std::log1p(-x) - log_beta_;
    if (x < (a_ + 1.0) / (a_ + b_ + 2.0)) {
      return std::exp(log_front) * continued_fraction(a_, b_, x) / a_;
    }
    return 1.0 - std::exp(log_front) * continued_fraction(b_, a_, 1.0 - x) / b_;
  }

  // Beta(a, b) density at x in (0, 1).
  double pdf(double x) const {
    return std::exp((a_ - 1.0) * std::log(x) + (b_ - 1.0) * std::log1p(-x) -
                    log_beta_);
  }

 private:
  // Modified Lentz evaluation of the standard continued fraction for I_x.
  static double continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    constexpr int kMaxIterations = 1000000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
      const double m2 = 2.0 * m;
      double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::fabs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::fabs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      const double delta = d * c;
      h *= delta;
      if (std::fabs(delta - 1.0) <= 4.0 * kEps) return h;
    }
    throw InternalError("incomplete beta continued fraction did not converge");
  }

  double a_;
  double b_;
  double log_beta_;
};

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(name) + " must lie in [0, 1], got " +
                          std::to_string(p));
  }
}

// Shared by softmax() and logits_entropy() so both produce identical bits.
template <typename Sink>
void softmax_into(std::span<const double> logits, Sink&& sink) {
  if (logits.size() < 2) {
    throw InvalidArgument("softmax needs at least two logits");
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double v : logits) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite logit");
    max_logit = std::max(max_logit, v);
  }
  double total = 0.0;
  for (double v : logits) total += std::exp(v - max_logit);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    sink(i, std::exp(logits[i] - max_logit) / total);
  }
}

class EntropyAccumulator {
 public:
  explicit EntropyAccumulator(std::size_t m) : m_(m) {}
  void add(double p) {
    if (p >= 1e-300) sum_ -= p * std::log(p);
  }
  double result() const {
    return std::clamp(sum_ / std::log(static_cast<double>(m_)), 0.0, 1.0);
  }

 private:
  std::size_t m_;
  double sum_ = 0.0;
};

}  // namespace

Confidence::Confidence(double level) : level_(level), alpha_(1.0 - level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidArgument("confidence level must lie in (0, 1), got " +
                          std::to_string(level));
  }
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("std_normal_cdf: non-finite input");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw InvalidArgument("std_normal_quantile: p must lie in (0, 1), got " +
                          std::to_string(p));
  }
  if (p == 0.0 || p == 1.0) {
    throw DomainError("std_normal_quantile: p = " + std::to_string(p) +
                      " has no finite quantile");
  }
  double x = ppnd16(p);
  // One Newton step on Phi(x) - p. Above the median the residual is formed
  // from upper tails, where 1 - p is exact.
  const double residual =
      p < 0.5 ? std_normal_cdf(x) - p : (1.0 - p) - 0.5 * std::erfc(x * kInvSqrt2);
  const double density = std_normal_pdf(x);
  if (density > 0.0) x -= residual / density;
  return x;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("incomplete beta: shape parameters must be positive");
  }
  check_probability(x, "incomplete beta argument");
  return IncompleteBeta(a, b).cdf(x);
}

double clopper_pearson_lower(Count k, Count n, Confidence conf) {
  if (n == 0) throw InvalidArgument("clopper_pearson_lower: n must be >= 1");
  if (k > n) throw InvalidArgument("clopper_pearson_lower: k exceeds n");
  if (k == 0) return 0.0;
  const double alpha = conf.alpha();
  if (k == n) return std::pow(alpha, 1.0 / static_cast<double>(n));

  // Solve I_p(k, n - k + 1) = alpha. The left side is P[Bin(n, p) >= k] and
  // increases in p, so a bracket is maintained while Newton steps converge.
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const IncompleteBeta beta(kd, nd - kd + 1.0);
  double lo = 0.0;
  double hi = 1.0;
  const double phat = kd / nd;
  double p = phat - ppnd16(conf.level()) * std::sqrt(phat * (1.0 - phat) / nd);
  if (!(p > lo && p < hi)) p = 0.5 * phat;
  for (int iter = 0; iter < 300; ++iter) {
    const double f = beta.cdf(p) - alpha;
    if (f > 0.0) {
      hi = p;
    } else {
      lo = p;
    }
    if (f == 0.0 || hi - lo <= 1e-15) break;
    const double density = beta.pdf(p);
    double next = density > 0.0 ? p - f / density : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - p);
    p = next;
    if (step <= 1e-14 * std::max(p, 1e-3)) break;
  }
  return p;
}

double binom_p_value(Count k, Count n, double p) {
  if (k > n) throw InvalidArgument("binom_p_value: k exceeds n");
  check_probability(p, "binom_p_value success probability");
  if (k == 0) return 1.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  if (n <= kDirectSumMaxN) {
    // Exact integer coefficients; with p = 1/2 every term and the sum are
    // exactly representable.
    double coefficient = 1.0;  // C(n, 0)
    for (Count j = 0; j < k; ++j) {
      coefficient = coefficient * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    double total = 0.0;
    for (Count j = k; j <= n; ++j) {
      total += coefficient * std::pow(p, static_cast<double>(j)) *
               std::pow(1.0 - p, static_cast<double>(n - j));
      coefficient = coefficient * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return std::min(total, 1.0);
  }

  if (n <= kExactSumMaxN) {
    // Term-by-term summation walking away from the mode, so terms shrink and
    // the loop can stop once they no longer register. Below the mode the
    // lower tail is summed and complemented.
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    const double mode = std::floor((nd + 1.0) * p);
    const double ratio = p / (1.0 - p);
    const auto log_pmf = [&](double j) {
      return log_gamma(nd + 1.0) - log_gamma(j + 1.0) - log_gamma(nd - j + 1.0) +
             j * std::log(p) + (nd - j) * std::log1p(-p);
    };
    if (kd > mode) {
      double term = std::exp(log_pmf(kd));
      double total = 0.0;
      for (Count j = k; j <= n && term > 0.0; ++j) {
        total += term;
        if (term <= total * 1e-18) break;
        term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * ratio;
      }
      return std::min(total, 1.0);
    }
    double term = std::exp(log_pmf(kd - 1.0));
    double lower = 0.0;
    for (Count j = k - 1;; --j) {
      lower += term;
      if (j == 0 || term <= lower * 1e-18 || term == 0.0) break;
      term *= static_cast<double>(j) / static_cast<double>(n - j + 1) / ratio;
    }
    return std::clamp(1.0 - lower, 0.0, 1.0);
  }

  const double kd = static_cast<double>(k);
  return IncompleteBeta(kd, static_cast<double>(n) - kd + 1.0).cdf(p);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  softmax_into(logits, [&](std::size_t i, double v) { out[i] = v; });
  return out;
}

double normalized_entropy(std::span<const double> dist) {
  if (dist.size() < 2) {
    throw InvalidArgument("normalized_entropy needs at least two classes");
  }
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("normalized_entropy: probability outside [0, 1]");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw InvalidArgument("normalized_entropy: probabilities do not sum to 1");
  }
  EntropyAccumulator acc(dist.size());
  for (double p : dist) acc.add(p);
  return acc.result();
}

double logits_entropy(std::span<const double> logits) {
  EntropyAccumulator acc(logits.size());
  softmax_into(logits, [&](std::size_t, double v) { acc.add(v); });
  return acc.result();
}

}  // namespace acescert
