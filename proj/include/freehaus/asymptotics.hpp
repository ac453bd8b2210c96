#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace freehaus {

// log Gamma(x) for x > 0, relative error ~1e-15. Throws std::domain_error for
// x <= 0 or NaN.
double log_gamma(double x);

// log n!
double log_factorial(long n);

// log prod_{j=1}^k Gamma(j+1) Gamma(j)^2 / Gamma(k+j), the Selberg integral
// int_{[0,1]^k} prod_{i<j} (t_i - t_j)^2 dt.
double selberg_log(long k);

// Normalized Gamma-product sequence k^-2 * selberg_log(k) and its limit.
struct GammaSeries {
  std::vector<long> ks;
  std::vector<double> normalized_values;
  double limit = 0.0;
  // |value + log 4| per k.
  std::vector<double> gaps;
  bool gaps_decreasing = false;
};

GammaSeries gamma_ratio_limit_series(std::span<const long> ks);

// log of the Lebesgue measure of the ball of radius sqrt(k) in R^{k^2}.
double log_ball_volume(long k);

// log D_k with D_k = pi^{k(k-1)/2} / prod_{j=1}^k j!.
double log_mehta_constant(long k);

// log(D_k * prod_{i<j} (t_i - t_j)^2) for ascending eigenvalues; -inf when two
// coincide. Throws std::invalid_argument for unsorted input.
double mehta_log_density(std::span<const double> eigenvalues);

struct SelbergMonteCarlo {
  long k = 0;
  double eps = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double mc_estimate = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
  double z_score = 0.0;
};

// Monte Carlo estimate of int_{[-eps,eps]^k} prod_{i<j} (t_i - t_j)^2 dt
// against (2 eps)^{k^2} exp(selberg_log(k)). Requires 1 <= k <= 6.
SelbergMonteCarlo selberg_mc_check(long k, double eps, std::uint64_t samples, std::uint64_t seed);

}  // namespace freehaus
