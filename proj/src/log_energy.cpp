#include "freehaus/log_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "freehaus/summation.hpp"

namespace freehaus {

namespace {

using Segment = DiffuseSegment;
constexpr double kInf = std::numeric_limits<double>::infinity();

// t log|t| with the limit 0 at t = 0.
double xlogx(double t) { return t == 0.0 ? 0.0 : t * std::log(std::fabs(t)); }

// (1/L) int_lo^hi log|x - y| dy.
double affine_log_mean(double lo, double hi, double x) {
  const double len = hi - lo;
  const double p = x - lo;
  const double q = x - hi;
  // Near the segment the antiderivative difference is well conditioned.
  const double z = x - 0.5 * (lo + hi);
  const double h = len / (2.0 * z);
  if (!(std::fabs(h) < 0.5)) return (xlogx(p) - xlogx(q)) / len - 1.0;
  // Far away: log|z| + f(h), z measured from the midpoint.
  double f;
  if (std::fabs(h) < 0.1) {
    // -sum_{m>=1} h^{2m} / (2m (2m+1))
    const double h2 = h * h;
    double power = h2;
    f = 0.0;
    for (int m = 1; m <= 12; ++m) {
      f -= power / (2.0 * m * (2.0 * m + 1.0));
      power *= h2;
    }
  } else {
    f = ((1.0 + h) * std::log1p(h) - (1.0 - h) * std::log1p(-h)) / (2.0 * h) - 1.0;
  }
  return std::log(std::fabs(z)) + f;
}

// int log|x - y| dsigma(y) for the arcsine law of radius r centered at c,
// and the same for the semicircle law.
double arcsine_log_mean(double center, double radius, double x) {
  const double z = std::fabs(x - center);
  if (z <= radius) return std::log(0.5 * radius);
  return std::log(0.5 * (z + std::sqrt((z - radius) * (z + radius))));
}

double semicircle_log_mean(double center, double radius, double x) {
  const double u = std::fabs(x - center) / radius;
  if (u <= 1.0) return std::log(0.5 * radius) + u * u - 0.5;
  const double root = std::sqrt((u - 1.0) * (u + 1.0));
  return std::log(0.5 * radius) + 1.0 / (1.0 + std::sqrt(1.0 - 1.0 / (u * u))) - 0.5 + std::log(u + root);
}

double segment_log_potential(const Segment& seg, double x) {
  if (seg.map == Segment::Map::affine) return seg.mass * affine_log_mean(seg.lo, seg.hi, x);
  const double c = 0.5 * (seg.lo + seg.hi);
  const double r = 0.5 * (seg.hi - seg.lo);
  if (seg.weight == Segment::Weight::constant) return seg.mass * arcsine_log_mean(c, r, x);
  return seg.mass * semicircle_log_mean(c, r, x);
}

// Quadrature result with error estimate.
struct Quad {
  double value = 0.0;
  double error = 0.0;
};

// int_0^1 g(s) ds for g continuous on (0,1) with at worst integrable endpoint
// singularities.
template <class F>
Quad endpoint_quadrature(F g, double rel_tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  Quad out;
  double l1 = 0.0;
  out.value = integrator.integrate(g, 0.0, 1.0, rel_tol, &out.error, &l1);
  // Rounding floor of the sum itself.
  out.error += 8.0 * std::numeric_limits<double>::epsilon() * l1;
  return out;
}

template <class F>
Quad peaked_quadrature(F g, double a, double b, double rel_tol) {
  Quad out;
  if (!(b > a)) return out;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 10, rel_tol, &out.error, &l1);
  out.error += 8.0 * std::numeric_limits<double>::epsilon() * l1;
  return out;
}

std::vector<Segment> segments_of(const DiffusePart& nu) { return nu.segments(); }

double potential(const std::vector<Segment>& segs, double x) {
  CompensatedSum sum;
  for (const auto& seg : segs) sum += segment_log_potential(seg, x);
  return sum.value();
}

// ---------------------------------------------------------------------------
// Regularized kernel log((x - y)^2 + eps).

double reg_antiderivative(double t, double eps, double sqrt_eps) {
  return t * std::log(t * t + eps) - 2.0 * t + 2.0 * sqrt_eps * std::atan(t / sqrt_eps);
}

double segment_reg_potential(const Segment& seg, double x, double eps) {
  if (seg.map == Segment::Map::affine) {
    const double len = seg.hi - seg.lo;
    const double p = x - seg.lo;
    const double q = x - seg.hi;
    const bool outside = (p > 0.0 && q > 0.0) || (p < 0.0 && q < 0.0);
    if (outside && std::min(std::fabs(p), std::fabs(q)) > 2.0 * len) {
      // Smooth on the segment; Gauss-Legendre avoids the cancellation in the
      // antiderivative difference.
      auto f = [&](double y) {
        const double d = x - y;
        return std::log(d * d + eps);
      };
      return seg.mass * boost::math::quadrature::gauss<double, 20>::integrate(f, seg.lo, seg.hi) / len;
    }
    const double se = std::sqrt(eps);
    return seg.mass * (reg_antiderivative(p, eps, se) - reg_antiderivative(q, eps, se)) / len;
  }
  // Cosine map: split at the parameter of x where the kernel peaks.
  const double s_star = seg.parameter_of(x);
  const double offset = x - seg.point(s_star);
  auto f = [&](double s) {
    const double d = seg.difference(s_star, s - s_star) - offset;
    return std::log(d * d + eps) * seg.density(s);
  };
  const Quad left = peaked_quadrature(f, 0.0, s_star, 1e-11);
  const Quad right = peaked_quadrature(f, s_star, 1.0, 1e-11);
  return left.value + right.value;
}

double reg_potential(const std::vector<Segment>& segs, double x, double eps) {
  CompensatedSum sum;
  for (const auto& seg : segs) sum += segment_reg_potential(seg, x, eps);
  return sum.value();
}

double diameter(const SpectralMeasure& m) { return m.support().width(); }

// Bound on |log|y - z|| over pairs formed with truncated atoms, using the
// smallest gap between retained atoms and the support diameter.
double log_kernel_bound(const SpectralMeasure& m) {
  double gap = diameter(m);
  const auto& atoms = m.atoms();
  for (std::size_t i = 1; i < atoms.size(); ++i) gap = std::min(gap, atoms[i].location - atoms[i - 1].location);
  double bound = 0.0;
  if (gap > 0.0) bound = std::fabs(std::log(gap));
  if (diameter(m) > 0.0) bound = std::max(bound, std::fabs(std::log(diameter(m))));
  return bound;
}

}  // namespace

const char* to_string(EnergyStatus status) {
  switch (status) {
    case EnergyStatus::converged: return "converged";
    case EnergyStatus::divergent: return "divergent";
    case EnergyStatus::not_converged: return "not_converged";
  }
  return "not_converged";
}

double diffuse_log_potential(const DiffusePart& nu, double x) { return potential(segments_of(nu), x); }

double diffuse_regularized_potential(const DiffusePart& nu, double x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("regularization eps must be positive");
  return reg_potential(segments_of(nu), x, eps);
}

EnergyResult offdiag_energy(const SpectralMeasure& input, const EnergyOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("energy tolerance must be positive");
  require_valid(input);
  const SpectralMeasure m = materialize(input);
  const auto segs = segments_of(m.diffuse());
  const auto& atoms = m.atoms();

  EnergyResult out;
  double error = 0.0;

  // atomic x atomic, off the diagonal: both orders of each pair.
  {
    CompensatedSum sum;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for (std::size_t j = i + 1; j < atoms.size(); ++j) {
        sum += 2.0 * atoms[i].weight * atoms[j].weight *
               std::log(std::fabs(atoms[j].location - atoms[i].location));
      }
    }
    out.components.atomic_atomic = sum.value();
  }

  // atomic x diffuse, both orders.
  {
    CompensatedSum sum;
    for (const auto& a : atoms) sum += 2.0 * a.weight * potential(segs, a.location);
    out.components.atomic_diffuse = sum.value();
  }

  // diffuse x diffuse: outer integral of the potential against nu.
  {
    CompensatedSum sum;
    const double rel = std::min(1e-12, options.tol);
    for (const auto& seg : segs) {
      auto g = [&](double s) { return potential(segs, seg.point(s)) * seg.density(s); };
      const Quad q = endpoint_quadrature(g, rel);
      sum += q.value;
      error += q.error;
    }
    out.components.diffuse_diffuse = sum.value();
  }

  CompensatedSum total;
  total += out.components.diffuse_diffuse;
  total += out.components.atomic_diffuse;
  total += out.components.atomic_atomic;
  out.value = total.value();
  out.abs_error_estimate = error;

  out.truncated_tail_mass = m.truncated_tail_mass();
  if (out.truncated_tail_mass > 0.0) {
    const double tau = out.truncated_tail_mass;
    out.truncation_bound = (2.0 * tau * (1.0 - tau) + tau * tau) * log_kernel_bound(m);
  }

  if (!std::isfinite(out.value) || out.value < options.divergence_floor) {
    out.status = EnergyStatus::divergent;
    out.value = -kInf;
  } else if (!(out.abs_error_estimate <= options.tol)) {
    out.status = EnergyStatus::not_converged;
  }
  return out;
}

EnergyResult offdiag_energy(const SpectralMeasure& measure, double tol) {
  EnergyOptions options;
  options.tol = tol;
  return offdiag_energy(measure, options);
}

RegularizedEnergy regularized_energy_detailed(const SpectralMeasure& input, double eps, double tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("regularization eps must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("energy tolerance must be positive");
  require_valid(input);
  const SpectralMeasure m = materialize(input);
  const auto segs = segments_of(m.diffuse());
  const auto& atoms = m.atoms();

  RegularizedEnergy out;
  CompensatedSum total;
  for (const auto& a : atoms) {
    for (const auto& b : atoms) {
      const double d = a.location - b.location;
      total += a.weight * b.weight * std::log(d * d + eps);
    }
    if (!segs.empty()) total += 2.0 * a.weight * reg_potential(segs, a.location, eps);
  }
  const double rel = std::min(1e-11, tol);
  for (const auto& seg : segs) {
    auto g = [&](double s) { return reg_potential(segs, seg.point(s), eps) * seg.density(s); };
    const Quad q = endpoint_quadrature(g, rel);
    total += q.value;
    out.abs_error_estimate += q.error;
  }
  out.value = total.value();

  const double tau = m.truncated_tail_mass();
  if (tau > 0.0) {
    const double diam = diameter(m);
    const double kernel = std::max(std::fabs(std::log(eps)), std::fabs(std::log(diam * diam + eps)));
    out.truncation_bound = (2.0 * tau * (1.0 - tau) + tau * tau) * kernel;
  }
  return out;
}

double regularized_energy(const SpectralMeasure& measure, double eps, double tol) {
  return regularized_energy_detailed(measure, eps, tol).value;
}

}  // namespace freehaus
