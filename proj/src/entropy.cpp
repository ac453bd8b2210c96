#include "freehaus/entropy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "freehaus/errors.hpp"
#include "freehaus/summation.hpp"

namespace freehaus {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// (1/2) log(288 e)
double half_log_288e() { return 0.5 * (std::log(288.0) + 1.0); }

double require_finite_or_divergent(const EnergyResult& r) {
  if (r.status == EnergyStatus::not_converged) {
    throw EnergyError("energy did not converge: error estimate " + std::to_string(r.abs_error_estimate));
  }
  return r.value;
}

}  // namespace

double upper_bound_constant() { return std::log(16.0) + 0.25; }

double lower_bound_constant(double alpha) { return -alpha * std::numbers::ln2 - half_log_288e() + 0.75; }

double sandwich_width(double alpha) {
  return std::log(16.0) + 0.25 + alpha * std::numbers::ln2 + half_log_288e() - 0.75;
}

Dimension free_hausdorff_dimension_detailed(const SpectralMeasure& input) {
  require_valid(input);
  const SpectralMeasure m = materialize(input);
  CompensatedSum squares;
  for (const auto& a : m.atoms()) squares += a.weight * a.weight;
  Dimension out;
  out.alpha = 1.0 - squares.value();
  const double tau = m.truncated_tail_mass();
  out.tail_bound = tau * tau;
  return out;
}

double free_hausdorff_dimension(const SpectralMeasure& measure) {
  return free_hausdorff_dimension_detailed(measure).alpha;
}

double chi(const SpectralMeasure& measure, const EnergyOptions& options) {
  require_valid(measure);
  if (measure.has_atoms()) return kNegInf;
  const double e = require_finite_or_divergent(offdiag_energy(measure, options));
  if (std::isinf(e)) return kNegInf;
  return e + 0.75 + 0.5 * std::log(2.0 * std::numbers::pi);
}

double chi(const SpectralMeasure& measure, double tol) {
  EnergyOptions options;
  options.tol = tol;
  return chi(measure, options);
}

double h1_identity(const SpectralMeasure& measure, const EnergyOptions& options) {
  const double c = chi(measure, options);
  if (std::isinf(c)) return c;
  return c + 0.5 * std::log(2.0 / (std::numbers::pi * std::numbers::e));
}

double h1_identity(const SpectralMeasure& measure, double tol) {
  EnergyOptions options;
  options.tol = tol;
  return h1_identity(measure, options);
}

EntropyBounds hausdorff_entropy_bounds(const SpectralMeasure& measure, const EnergyOptions& options) {
  EntropyBounds out;
  out.alpha = free_hausdorff_dimension(measure);
  out.energy = offdiag_energy(measure, options);
  const double e = require_finite_or_divergent(out.energy);
  if (std::isinf(e)) {
    out.lower = kNegInf;
    out.upper = kNegInf;
    return out;
  }
  out.upper = e + upper_bound_constant();
  out.lower = e + lower_bound_constant(out.alpha);
  return out;
}

EntropyBounds hausdorff_entropy_bounds(const SpectralMeasure& measure, double tol) {
  EnergyOptions options;
  options.tol = tol;
  return hausdorff_entropy_bounds(measure, options);
}

double family_K1(long n, double beta) {
  const double nd = static_cast<double>(n);
  return -nd * half_log_288e() + 0.75 * nd - beta * std::numbers::ln2;
}

double family_K2(long n) {
  const double nd = static_cast<double>(n);
  return nd * (std::log(16.0) + 0.5 * std::log(nd)) + 0.25 * nd;
}

FamilyBounds free_family_bounds(const std::vector<SpectralMeasure>& measures, const EnergyOptions& options) {
  if (measures.empty()) throw std::invalid_argument("free_family_bounds: need at least one measure");
  FamilyBounds out;
  CompensatedSum beta;
  CompensatedSum energy;
  bool divergent = false;
  for (const auto& m : measures) {
    const double alpha = free_hausdorff_dimension(m);
    out.betas.push_back(alpha);
    beta += alpha;
    out.energies.push_back(offdiag_energy(m, options));
    const double e = require_finite_or_divergent(out.energies.back());
    if (std::isinf(e)) {
      divergent = true;
    } else {
      energy += e;
    }
  }
  const long n = static_cast<long>(measures.size());
  out.beta = beta.value();
  out.K1 = family_K1(n, out.beta);
  out.K2 = family_K2(n);
  if (divergent) {
    out.lower = kNegInf;
    out.upper = kNegInf;
  } else {
    out.lower = energy.value() + out.K1;
    out.upper = energy.value() + out.K2;
  }
  return out;
}

FamilyBounds free_family_bounds(const std::vector<SpectralMeasure>& measures, double tol) {
  EnergyOptions options;
  options.tol = tol;
  return free_family_bounds(measures, options);
}

}  // namespace freehaus
