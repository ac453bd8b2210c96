#include "freehaus/microstates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "freehaus/asymptotics.hpp"
#include "freehaus/entropy.hpp"
#include "freehaus/errors.hpp"
#include "freehaus/summation.hpp"

namespace freehaus {

namespace {

long isqrt(long k) {
  long r = static_cast<long>(std::sqrt(static_cast<double>(k)));
  while (r * r > k) --r;
  while ((r + 1) * (r + 1) <= k) ++r;
  return r;
}

void require_k(long k) {
  if (k < 1) throw std::invalid_argument("microstate size k must be positive, got " + std::to_string(k));
}

// sum_{i<j} log((x_i - x_j)^2 + eps), pairs in row order.
double regularized_pair_sum(const std::vector<double>& x, double eps) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = x[j] - x[i];
      sum += std::log(d * d + eps);
    }
  }
  return sum.value();
}

// sum over pairs with distinct values of log (x_i - x_j)^2.
double distinct_pair_log_sum(const std::vector<double>& x) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = x[j] - x[i];
      if (d != 0.0) sum += 2.0 * std::log(std::fabs(d));
    }
  }
  return sum.value();
}

double finite_energy(const SpectralMeasure& measure, double tol) {
  const EnergyResult e = offdiag_energy(measure, tol);
  if (e.status == EnergyStatus::divergent) throw EnergyError("off-diagonal energy diverges");
  if (e.status == EnergyStatus::not_converged) {
    throw EnergyError("off-diagonal energy did not converge: error estimate " + std::to_string(e.abs_error_estimate));
  }
  return e.value;
}

}  // namespace

const char* to_string(MicrostateKind kind) { return kind == MicrostateKind::A ? "A" : "B"; }

const char* to_string(SeriesRelation relation) {
  return relation == SeriesRelation::converges_to ? "converges_to" : "eventually_at_least";
}

DiagonalMicrostate build_A(const SpectralMeasure& input, long k) {
  require_k(k);
  require_valid(input);
  const SpectralMeasure m = materialize(input);

  DiagonalMicrostate out;
  out.kind = MicrostateKind::A;
  out.k = k;
  out.eigenvalues = diffuse_quantiles(m, k);
  out.quantile_count = static_cast<long>(out.eigenvalues.size());
  for (const auto& atom : m.atoms_by_weight()) {
    const long copies = mass_count(atom.weight, k);
    out.atom_multiplicities.push_back({atom.location, atom.weight, copies});
    out.eigenvalues.insert(out.eigenvalues.end(), static_cast<std::size_t>(copies), atom.location);
  }
  const long used = static_cast<long>(out.eigenvalues.size());
  if (used > k) throw std::logic_error("build_A: entry counts exceed k");
  out.zero_count = k - used;
  out.eigenvalues.insert(out.eigenvalues.end(), static_cast<std::size_t>(out.zero_count), 0.0);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

DiagonalMicrostate build_B(const SpectralMeasure& input, long k) {
  require_k(k);
  require_valid(input);
  const SpectralMeasure m = materialize(input);
  const auto atoms = m.atoms_by_weight();
  if (atoms.empty()) throw InvalidMeasure("build_B: the measure has no atoms");

  const long root = isqrt(k);
  const long first = mass_count(atoms.front().weight, k) - root;
  if (first < 0) {
    throw InvalidMeasure("build_B: k = " + std::to_string(k) + " is too small: [c_1 k] - floor(sqrt k) = " +
                         std::to_string(first) + " < 0");
  }

  DiagonalMicrostate out;
  out.kind = MicrostateKind::B;
  out.k = k;

  std::vector<double> atom_locations;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const long full = mass_count(atoms[j].weight, k);
    if (full > 0) {
      ++out.n_k;
      atom_locations.push_back(atoms[j].location);
    }
    const long copies = j == 0 ? first : full;
    out.atom_multiplicities.push_back({atoms[j].location, atoms[j].weight, copies});
    out.eigenvalues.insert(out.eigenvalues.end(), static_cast<std::size_t>(copies), atoms[j].location);
  }

  // Indices (1-based) of the quantiles nearest each atom from below and above.
  const auto lambda = diffuse_quantiles(m, k);
  std::set<long> excluded;
  for (double r : atom_locations) {
    const auto above = std::lower_bound(lambda.begin(), lambda.end(), r);
    if (above != lambda.end()) excluded.insert(static_cast<long>(above - lambda.begin()) + 1);
    const auto past = std::upper_bound(lambda.begin(), lambda.end(), r);
    if (past != lambda.begin()) excluded.insert(static_cast<long>(past - lambda.begin()));
  }
  out.r_count = static_cast<long>(excluded.size());

  const long count = static_cast<long>(lambda.size());
  for (long j = 2; j <= count - 1; ++j) {
    if (excluded.count(j) == 0) {
      out.eigenvalues.push_back(lambda[static_cast<std::size_t>(j - 1)]);
      ++out.quantile_count;
    }
  }

  const long used = static_cast<long>(out.eigenvalues.size());
  if (used > k) throw std::logic_error("build_B: entry counts exceed k");
  out.filler_count = k - used;
  out.filler_base = m.support().hi + 3.0;
  for (long j = 1; j <= out.filler_count; ++j) {
    out.eigenvalues.push_back(out.filler_base + static_cast<double>(j) / static_cast<double>(out.filler_count));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

PairPartition pair_partition(const DiagonalMicrostate& microstate) {
  const auto& x = microstate.eigenvalues;
  PairPartition out;
  out.k = static_cast<long>(x.size());
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i + 1;
    while (j < x.size() && x[j] == x[i]) ++j;
    const auto run = static_cast<std::int64_t>(j - i);
    if (run > 1 && microstate.kind == MicrostateKind::B) {
      const bool at_atom = std::any_of(microstate.atom_multiplicities.begin(), microstate.atom_multiplicities.end(),
                                       [&](const AtomMultiplicity& a) { return a.location == x[i]; });
      if (!at_atom) throw std::logic_error("pair_partition: repeated eigenvalue away from the atoms");
    }
    out.s_count += run * (run - 1) / 2;
    i = j;
  }
  const auto k = static_cast<std::int64_t>(out.k);
  out.w_count = k * (k - 1) / 2 - out.s_count;
  return out;
}

CountingCheck sk_counting_check(const SpectralMeasure& measure, const DiagonalMicrostate& microstate) {
  require_valid(measure);
  const SpectralMeasure m = materialize(measure);
  CompensatedSum squares;
  for (const auto& a : m.atoms()) squares += a.weight * a.weight;

  CountingCheck out;
  const double k = static_cast<double>(microstate.k);
  out.alpha = 1.0 - squares.value();
  out.lhs = 2.0 * static_cast<double>(pair_partition(microstate).s_count) + k;
  out.rhs = squares.value() * k * k;
  out.margin = out.rhs - out.lhs;
  out.holds = out.lhs <= out.rhs;
  return out;
}

void check_ks(std::span<const long> ks, long cap) {
  if (ks.empty()) throw std::invalid_argument("ks must be nonempty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw std::invalid_argument("ks must be positive");
    if (ks[i] > cap) {
      throw std::invalid_argument("k = " + std::to_string(ks[i]) + " exceeds the cap " + std::to_string(cap));
    }
    if (i > 0 && ks[i] <= ks[i - 1]) throw std::invalid_argument("ks must be strictly increasing");
  }
}

SeriesReport make_series_report(std::string name, std::vector<long> ks, std::vector<double> values,
                                SeriesRelation relation, const std::vector<SeriesTargetSpec>& targets) {
  if (ks.size() != values.size() || ks.empty()) throw std::invalid_argument("series needs one value per k");
  if (targets.empty()) throw std::invalid_argument("series needs a target");
  SeriesReport out;
  out.name = std::move(name);
  out.ks = std::move(ks);
  out.values = std::move(values);
  out.relation = relation;
  const std::size_t n = out.values.size();
  const std::size_t tail_start = n - std::max<std::size_t>(1, n / 4);
  for (const auto& spec : targets) {
    SeriesTarget t;
    t.label = spec.label;
    t.value = spec.value;
    t.formula = spec.formula;
    t.abs_gaps_decreasing = true;
    for (std::size_t i = 0; i < n; ++i) {
      t.gaps.push_back(out.values[i] - spec.value);
      if (i > 0 && !(std::fabs(t.gaps[i]) < std::fabs(t.gaps[i - 1]))) t.abs_gaps_decreasing = false;
    }
    t.achieved_gap = t.gaps.back();
    t.tail_min_gap = *std::min_element(t.gaps.begin() + static_cast<std::ptrdiff_t>(tail_start), t.gaps.end());
    out.targets.push_back(std::move(t));
  }
  return out;
}

SeriesReport regularized_product_series(const SpectralMeasure& measure, double eps, std::span<const long> ks,
                                        double tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  check_ks(ks);
  const double full = regularized_energy(measure, eps, tol);
  std::vector<double> values;
  for (long k : ks) {
    const auto a = build_A(measure, k);
    const double kd = static_cast<double>(k);
    values.push_back(regularized_pair_sum(a.eigenvalues, eps) / (kd * kd));
  }
  return make_series_report(
      "regularized", {ks.begin(), ks.end()}, std::move(values), SeriesRelation::converges_to,
      {{"pair", 0.5 * full, "(1/2) iint log(|y-z|^2 + eps) dmu dmu"},
       {"full_plane", full, "iint log(|y-z|^2 + eps) dmu dmu"}});
}

SeriesReport offdiag_sum_series(const SpectralMeasure& measure, std::span<const long> ks, double tol) {
  check_ks(ks);
  const double e = finite_energy(measure, tol);
  std::vector<double> values;
  for (long k : ks) {
    const auto b = build_B(measure, k);
    const double kd = static_cast<double>(k);
    values.push_back(distinct_pair_log_sum(b.eigenvalues) / (kd * kd));
  }
  return make_series_report("offdiag", {ks.begin(), ks.end()}, std::move(values), SeriesRelation::eventually_at_least,
                            {{"square", 2.0 * e, "2 iint_{R^2-D} log|y-z| dmu dmu"},
                             {"literal", e, "iint_{R^2-D} log|y-z| dmu dmu"}});
}

PackingTerms packing_constant_terms(const DiagonalMicrostate& microstate) {
  const long k = microstate.k;
  const double kd = static_cast<double>(k);
  const PairPartition parts = pair_partition(microstate);
  PackingTerms t;
  t.log_D = log_mehta_constant(k);
  t.pair_sum = distinct_pair_log_sum(microstate.eigenvalues);
  t.log_k_factorial = log_factorial(k);
  t.power_of_two = (2.0 * static_cast<double>(parts.s_count) + kd - kd * kd) * std::numbers::ln2;
  t.selberg = selberg_log(k);
  CompensatedSum sum;
  sum += t.log_D;
  sum += t.pair_sum;
  sum += -t.log_k_factorial;
  sum += t.power_of_two;
  sum += t.selberg;
  t.total = sum.value();
  return t;
}

double packing_constant_log(const SpectralMeasure& measure, long k) {
  return packing_constant_terms(build_B(measure, k)).total;
}

SeriesReport packing_series(const SpectralMeasure& measure, std::span<const long> ks, double tol) {
  check_ks(ks);
  const double e = finite_energy(measure, tol);
  const double alpha = free_hausdorff_dimension(measure);
  const double rest = -alpha * std::numbers::ln2 + 0.5 * std::log(std::numbers::pi) + 0.75 - std::log(4.0);
  std::vector<double> values;
  for (long k : ks) {
    const double kd = static_cast<double>(k);
    values.push_back(packing_constant_log(measure, k) / (kd * kd) + 0.5 * std::log(kd));
  }
  return make_series_report(
      "packing", {ks.begin(), ks.end()}, std::move(values), SeriesRelation::converges_to,
      {{"limit", e + rest, "E - alpha log 2 + (1/2) log pi + 3/4 - log 4"},
       {"doubled", 2.0 * e + rest, "2E - alpha log 2 + (1/2) log pi + 3/4 - log 4"}});
}

double inner_alpha(double eps, double t) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  const double rhs = t / eps + 0.25;
  const double limit = std::sqrt(0.4);
  if (!(rhs < limit)) {
    throw NoSolution("no alpha in (0, 1/2): t/eps + 1/4 = " + std::to_string(rhs) +
                     " must be below sqrt(2/5) = " + std::to_string(limit) + ", i.e. t < " +
                     std::to_string(eps * (limit - 0.25)));
  }
  auto lhs = [](double a) { return std::sqrt((a + 2.0 * a * a) / (a + 2.0)); };
  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) < rhs) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double volume_upper_bound_log(const DiagonalMicrostate& microstate, double eps, double t) {
  if (microstate.kind != MicrostateKind::A) throw std::invalid_argument("volume bound needs an A_k microstate");
  const double alpha = inner_alpha(eps, t);
  const long k = microstate.k;
  const double kd = static_cast<double>(k);
  const double pairs = 0.5 * kd * (kd - 1.0);
  CompensatedSum sum;
  sum += 0.5 * kd * std::log(kd);
  sum += kd * std::log(eps);
  sum += -log_gamma(0.5 * kd + 1.0);
  sum += pairs * std::log1p(2.0 * alpha);
  sum += 2.0 * kd * kd * eps;
  sum += 0.5 * kd * kd * std::log(std::numbers::pi);
  sum += pairs * std::numbers::ln2;
  for (long j = 2; j <= k; ++j) sum += -log_factorial(j);
  sum += regularized_pair_sum(microstate.eigenvalues, eps);
  return sum.value();
}

}  // namespace freehaus
