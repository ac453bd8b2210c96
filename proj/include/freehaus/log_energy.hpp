#pragma once

#include "freehaus/spectral_measure.hpp"

namespace freehaus {

enum class EnergyStatus { converged, divergent, not_converged };

const char* to_string(EnergyStatus status);

// The three pieces of the off-diagonal energy.
struct EnergyComponents {
  double diffuse_diffuse = 0.0;
  double atomic_diffuse = 0.0;
  double atomic_atomic = 0.0;
};

// Result of the off-diagonal energy  E = iint_{R^2 - D} log|y - z| dmu(y) dmu(z).
struct EnergyResult {
  EnergyStatus status = EnergyStatus::converged;
  // -inf when status == divergent.
  double value = 0.0;
  double abs_error_estimate = 0.0;
  EnergyComponents components;
  // Mass dropped by truncating an infinite atom family, and a bound on the
  // energy contribution of the pairs it would have formed.
  double truncated_tail_mass = 0.0;
  double truncation_bound = 0.0;

  bool finite() const { return status != EnergyStatus::divergent; }
};

struct EnergyOptions {
  // Absolute tolerance on the quadrature error.
  double tol = 1e-6;
  // Any energy below this is reported as -inf.
  double divergence_floor = -1e6;
};

EnergyResult offdiag_energy(const SpectralMeasure& measure, const EnergyOptions& options);
EnergyResult offdiag_energy(const SpectralMeasure& measure, double tol);

// int log|x - y| dnu(y) for the diffuse part alone.
double diffuse_log_potential(const DiffusePart& nu, double x);

struct RegularizedEnergy {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  double truncation_bound = 0.0;
};

// Full-plane  iint log(|y - z|^2 + eps) dmu(y) dmu(z), diagonal included.
RegularizedEnergy regularized_energy_detailed(const SpectralMeasure& measure, double eps, double tol);
double regularized_energy(const SpectralMeasure& measure, double eps, double tol);

// int log((x - y)^2 + eps) dnu(y).
double diffuse_regularized_potential(const DiffusePart& nu, double x, double eps);

}  // namespace freehaus
