#pragma once

#include <vector>

#include "freehaus/log_energy.hpp"
#include "freehaus/spectral_measure.hpp"

namespace freehaus {

// Additive constants of the single-variable sandwich.
// upper = E + log 16 + 1/4
// lower = E - alpha log 2 - (1/2) log(288 e) + 3/4
double upper_bound_constant();
double lower_bound_constant(double alpha);
// upper - lower for a finite energy.
double sandwich_width(double alpha);

struct Dimension {
  double alpha = 1.0;
  // alpha may overstate the true value by at most this much when an atom
  // family was truncated: (tail mass)^2.
  double tail_bound = 0.0;
};

// alpha = 1 - sum c_i^2.
Dimension free_hausdorff_dimension_detailed(const SpectralMeasure& measure);
double free_hausdorff_dimension(const SpectralMeasure& measure);

// Full-plane energy + 3/4 + (1/2) log 2 pi. -inf when mu has an atom or the
// energy diverges; throws EnergyError when the quadrature does not converge.
double chi(const SpectralMeasure& measure, const EnergyOptions& options);
double chi(const SpectralMeasure& measure, double tol);

// chi + (1/2) log(2 / (pi e)).
double h1_identity(const SpectralMeasure& measure, const EnergyOptions& options);
double h1_identity(const SpectralMeasure& measure, double tol);

struct EntropyBounds {
  double alpha = 1.0;
  EnergyResult energy;
  // -inf when the energy diverges.
  double lower = 0.0;
  double upper = 0.0;
};

// Throws EnergyError when the energy fails to converge.
EntropyBounds hausdorff_entropy_bounds(const SpectralMeasure& measure, const EnergyOptions& options);
EntropyBounds hausdorff_entropy_bounds(const SpectralMeasure& measure, double tol);

struct FamilyBounds {
  std::vector<double> betas;
  double beta = 0.0;
  std::vector<EnergyResult> energies;
  double K1 = 0.0;
  double K2 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// K1 = -(n/2) log(288 e) + 3n/4 - beta log 2,  K2 = n log(16 sqrt n) + n/4.
double family_K1(long n, double beta);
double family_K2(long n);

FamilyBounds free_family_bounds(const std::vector<SpectralMeasure>& measures, const EnergyOptions& options);
FamilyBounds free_family_bounds(const std::vector<SpectralMeasure>& measures, double tol);

}  // namespace freehaus
