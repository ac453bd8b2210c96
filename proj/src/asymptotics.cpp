#include "freehaus/asymptotics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "freehaus/philox.hpp"
#include "freehaus/summation.hpp"

namespace freehaus {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640561764;

// B_2, B_4, ..., B_20.
constexpr std::array<double, 10> kBernoulliEven = {
    1.0 / 6.0,         -1.0 / 30.0,          1.0 / 42.0,    -1.0 / 30.0,       5.0 / 66.0,
    -691.0 / 2730.0,   7.0 / 6.0,            -3617.0 / 510.0, 43867.0 / 798.0, -174611.0 / 330.0};

constexpr int kSeriesTerms = 64;

// zeta(s) - 1 for s = 2..kSeriesTerms, by a short direct sum plus an
// Euler-Maclaurin tail.
std::array<double, kSeriesTerms + 1> zeta_minus_one_table() {
  std::array<double, kSeriesTerms + 1> out{};
  constexpr int n_direct = 16;
  for (int s = 2; s <= kSeriesTerms; ++s) {
    double sum = 0.0;
    for (int n = n_direct - 1; n >= 2; --n) sum += std::pow(static_cast<double>(n), -s);
    const double N = n_direct;
    double tail = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
    double rising = s;  // s (s+1) ... (s+2j-2)
    double factorial = 2.0;  // (2j)!
    for (int j = 1; j <= 8; ++j) {
      tail += kBernoulliEven[j - 1] / factorial * rising * std::pow(N, -s - 2.0 * j + 1.0);
      rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
      factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    out[s] = sum + tail;
  }
  return out;
}

// sum_{k>=2} (-1)^k (zeta(k) - 1) z^k / k for |z| <= 1/2.
double zeta_series(double z) {
  static const auto table = zeta_minus_one_table();
  double term_power = z * z;
  double sum = 0.0;
  for (int k = 2; k <= kSeriesTerms; ++k) {
    const double term = table[k] * term_power / k;
    sum += (k % 2 == 0) ? term : -term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    term_power *= z;
  }
  return sum;
}

// log Gamma(2 + z), |z| <= 1/2.
double log_gamma_two_plus(double z) { return z * (1.0 - kEulerGamma) + zeta_series(z); }

// log Gamma(1 + z), |z| <= 1/2.
double log_gamma_one_plus(double z) { return log_gamma_two_plus(z) - std::log1p(z); }

double stirling(double x) {
  double sum = (x - 0.5) * std::log(x) - x + kHalfLog2Pi;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double p = inv;
  for (int n = 1; n <= 10; ++n) {
    const double term = kBernoulliEven[n - 1] / (2.0 * n * (2.0 * n - 1.0)) * p;
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    p *= inv2;
  }
  return sum;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive, got " + std::to_string(x));
  if (std::isinf(x)) return x;
  if (x < 0.5) return log_gamma_one_plus(x) - std::log(x);
  if (x < 1.5) return log_gamma_one_plus(x - 1.0);
  if (x < 2.5) return log_gamma_two_plus(x - 2.0);
  if (x < 15.0) {
    double product = 1.0;
    double y = x;
    while (y >= 2.5) {
      y -= 1.0;
      product *= y;
    }
    return log_gamma_two_plus(y - 2.0) + std::log(product);
  }
  return stirling(x);
}

double log_factorial(long n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n < 2) return 0.0;
  return log_gamma(static_cast<double>(n) + 1.0);
}

double selberg_log(long k) {
  if (k < 1) throw std::domain_error("selberg_log: k must be positive");
  CompensatedSum sum;
  for (long j = 1; j <= k; ++j) {
    const double jd = static_cast<double>(j);
    sum += log_gamma(jd + 1.0);
    sum += 2.0 * log_gamma(jd);
    sum += -log_gamma(static_cast<double>(k) + jd);
  }
  return sum.value();
}

GammaSeries gamma_ratio_limit_series(std::span<const long> ks) {
  if (ks.empty()) throw std::invalid_argument("gamma_ratio_limit_series: ks must be nonempty");
  GammaSeries out;
  out.limit = -2.0 * std::numbers::ln2;
  out.gaps_decreasing = true;
  for (long k : ks) {
    const double kd = static_cast<double>(k);
    const double v = selberg_log(k) / (kd * kd);
    out.ks.push_back(k);
    out.normalized_values.push_back(v);
    out.gaps.push_back(std::fabs(v - out.limit));
    if (out.gaps.size() > 1 && !(out.gaps.back() < out.gaps[out.gaps.size() - 2])) out.gaps_decreasing = false;
  }
  return out;
}

double log_ball_volume(long k) {
  if (k < 1) throw std::domain_error("log_ball_volume: k must be positive");
  const double kd = static_cast<double>(k);
  const double n = kd * kd;
  return 0.5 * n * std::log(std::numbers::pi * kd) - log_gamma(0.5 * n + 1.0);
}

double log_mehta_constant(long k) {
  if (k < 1) throw std::domain_error("log_mehta_constant: k must be positive");
  CompensatedSum sum;
  const double kd = static_cast<double>(k);
  sum += 0.5 * kd * (kd - 1.0) * std::log(std::numbers::pi);
  for (long j = 2; j <= k; ++j) sum += -log_factorial(j);
  return sum.value();
}

double mehta_log_density(std::span<const double> eigenvalues) {
  const std::size_t k = eigenvalues.size();
  if (k == 0) throw std::invalid_argument("mehta_log_density: need at least one eigenvalue");
  for (std::size_t i = 1; i < k; ++i) {
    if (eigenvalues[i] < eigenvalues[i - 1]) {
      throw std::invalid_argument("mehta_log_density: eigenvalues must be sorted ascending");
    }
  }
  for (std::size_t i = 1; i < k; ++i) {
    if (eigenvalues[i] == eigenvalues[i - 1]) return -std::numeric_limits<double>::infinity();
  }
  CompensatedSum sum;
  sum += log_mehta_constant(static_cast<long>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) sum += 2.0 * std::log(eigenvalues[j] - eigenvalues[i]);
  }
  return sum.value();
}

SelbergMonteCarlo selberg_mc_check(long k, double eps, std::uint64_t samples, std::uint64_t seed) {
  if (k < 1 || k > 6) throw std::invalid_argument("selberg_mc_check: k must lie in [1, 6]");
  if (!(eps > 0.0)) throw std::invalid_argument("selberg_mc_check: eps must be positive");
  if (samples < 2) throw std::invalid_argument("selberg_mc_check: need at least two samples");

  SelbergMonteCarlo out{k, eps, samples, seed};
  const double kd = static_cast<double>(k);
  const double box = std::pow(2.0 * eps, kd);
  out.closed_form = std::exp(kd * kd * std::log(2.0 * eps) + selberg_log(k));

  // Stream id = k, so runs for different k never share random blocks.
  const Philox4x32 gen(seed);
  const std::uint64_t blocks_per_sample = static_cast<std::uint64_t>((k + 1) / 2);
  std::array<double, 6> t{};
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t n = 0; n < samples; ++n) {
    for (std::uint64_t b = 0; b < blocks_per_sample; ++b) {
      const auto u = gen.uniform_pair(static_cast<std::uint64_t>(k), n * blocks_per_sample + b);
      t[2 * b] = eps * (2.0 * u[0] - 1.0);
      if (2 * b + 1 < t.size()) t[2 * b + 1] = eps * (2.0 * u[1] - 1.0);
    }
    double f = 1.0;
    for (long i = 0; i < k; ++i) {
      for (long j = i + 1; j < k; ++j) {
        const double d = t[i] - t[j];
        f *= d * d;
      }
    }
    // Welford update.
    const double delta = f - mean;
    mean += delta / static_cast<double>(n + 1);
    m2 += delta * (f - mean);
  }
  const double variance = m2 / static_cast<double>(samples - 1);
  out.mc_estimate = box * mean;
  out.std_error = box * std::sqrt(variance / static_cast<double>(samples));
  const double diff = out.mc_estimate - out.closed_form;
  if (out.std_error > 0.0) {
    out.z_score = diff / out.std_error;
  } else {
    out.z_score = std::fabs(diff) <= 1e-14 * std::fabs(out.closed_form) ? 0.0 : std::copysign(INFINITY, diff);
  }
  return out;
}

}  // namespace freehaus
