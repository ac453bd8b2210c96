#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "freehaus/log_energy.hpp"
#include "freehaus/spectral_measure.hpp"

namespace freehaus {

// Largest matrix size the series drivers accept by default.
inline constexpr long kDefaultKCap = 5000;

enum class MicrostateKind { A, B };

const char* to_string(MicrostateKind kind);

struct AtomMultiplicity {
  double location = 0.0;
  double weight = 0.0;
  long multiplicity = 0;
};

// Spectrum of a diagonal microstate matrix, ascending.
struct DiagonalMicrostate {
  MicrostateKind kind = MicrostateKind::A;
  long k = 0;
  std::vector<double> eigenvalues;
  // Atoms in decreasing weight order with their multiplicities.
  std::vector<AtomMultiplicity> atom_multiplicities;
  // A: [ck]. B: quantiles kept after removing R_k.
  long quantile_count = 0;
  // A only.
  long zero_count = 0;
  // B only.
  long n_k = 0;
  long r_count = 0;
  long filler_count = 0;
  // Fillers are filler_base + j / filler_count, j = 1..filler_count.
  double filler_base = 0.0;
};

// Quantiles lambda_1..lambda_[ck], then r_i repeated [c_i k] times, then zeros.
DiagonalMicrostate build_A(const SpectralMeasure& measure, long k);

// r_1 repeated [c_1 k] - floor(sqrt k) times, r_j repeated [c_j k] times for
// 2 <= j <= N_k, quantiles lambda_2..lambda_{[ck]-1} minus the two nearest to
// each atom, and fillers above b + 3. Throws InvalidMeasure without atoms or
// when k is too small.
DiagonalMicrostate build_B(const SpectralMeasure& measure, long k);

struct PairPartition {
  long k = 0;
  std::int64_t s_count = 0;
  std::int64_t w_count = 0;
};

PairPartition pair_partition(const DiagonalMicrostate& microstate);

struct CountingCheck {
  bool holds = false;
  double alpha = 0.0;
  // 2 #S_k + k  and  (1 - alpha) k^2.
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

CountingCheck sk_counting_check(const SpectralMeasure& measure, const DiagonalMicrostate& microstate);

enum class SeriesRelation { converges_to, eventually_at_least };

const char* to_string(SeriesRelation relation);

struct SeriesTarget {
  std::string label;
  double value = 0.0;
  std::string formula;
  // value_k - target per k.
  std::vector<double> gaps;
  double achieved_gap = 0.0;
  // Smallest gap over the largest quarter of the sampled k.
  double tail_min_gap = 0.0;
  bool abs_gaps_decreasing = false;
};

struct SeriesTargetSpec {
  std::string label;
  double value = 0.0;
  std::string formula;
};

struct SeriesReport {
  std::string name;
  std::vector<long> ks;
  std::vector<double> values;
  SeriesRelation relation = SeriesRelation::converges_to;
  // targets.front() is the primary one.
  std::vector<SeriesTarget> targets;

  const SeriesTarget& primary() const { return targets.front(); }
  double target() const { return primary().value; }
  double achieved_gap() const { return primary().achieved_gap; }
};

SeriesReport make_series_report(std::string name, std::vector<long> ks, std::vector<double> values,
                                SeriesRelation relation, const std::vector<SeriesTargetSpec>& targets);

// Throws std::invalid_argument unless ks is nonempty, positive and strictly
// increasing, with every k <= cap.
void check_ks(std::span<const long> ks, long cap = kDefaultKCap);

// k^-2 sum_{i<j} log((a_i - a_j)^2 + eps) over A_k. Primary target is half the
// full-plane regularized energy (the pair sum counts each unordered pair once);
// the full-plane value is reported as a second target.
SeriesReport regularized_product_series(const SpectralMeasure& measure, double eps, std::span<const long> ks,
                                        double tol = 1e-8);

// k^-2 sum_{W_k} log(b_i - b_j)^2 over B_k, against 2E and E.
SeriesReport offdiag_sum_series(const SpectralMeasure& measure, std::span<const long> ks, double tol = 1e-8);

struct PackingTerms {
  double log_D = 0.0;
  double pair_sum = 0.0;
  double log_k_factorial = 0.0;
  double power_of_two = 0.0;
  double selberg = 0.0;
  double total = 0.0;
};

// log C_k = log D_k + sum_{W_k} log(b_i - b_j)^2 - log k!
//           + (2 #S_k + k - k^2) log 2 + selberg_log(k).
PackingTerms packing_constant_terms(const DiagonalMicrostate& microstate);
double packing_constant_log(const SpectralMeasure& measure, long k);

// k^-2 log C_k + (1/2) log k against E - alpha log 2 + (1/2) log pi + 3/4 - log 4,
// and the same with 2E.
SeriesReport packing_series(const SpectralMeasure& measure, std::span<const long> ks, double tol = 1e-8);

// Root alpha in (0, 1/2) of sqrt((alpha + 2 alpha^2) / (alpha + 2)) = t/eps + 1/4.
// Throws NoSolution when t/eps + 1/4 >= sqrt(2/5).
double inner_alpha(double eps, double t);

// log of the orbit-neighborhood volume bound for an A_k microstate:
//   k^{k/2} eps^k Gamma(k/2+1)^-1 (1+2 alpha)^{k(k-1)/2} e^{2 k^2 eps} pi^{k^2/2}
//   2^{k(k-1)/2} (prod_j j!)^-1 prod_{i<j} ((a_i - a_j)^2 + eps)
double volume_upper_bound_log(const DiagonalMicrostate& microstate, double eps, double t);

}  // namespace freehaus
