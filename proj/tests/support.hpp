#pragma once

// Shared helpers for the test suites: random measure generators and a small
// Gauss-Legendre rule used by the quadrature oracles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "freehaus/spectral_measure.hpp"

namespace testing_support {

using freehaus::Atom;
using freehaus::CdfKnot;
using freehaus::DiffusePart;
using freehaus::Interval;
using freehaus::SpectralMeasure;

struct GaussRule {
  std::vector<double> nodes;    // on [0,1]
  std::vector<double> weights;  // sum to 1
};

// n-point Gauss-Legendre on [0,1] by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    r.nodes[i] = 0.5 * (1.0 - x);
    r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// int_lo^hi f with composite Gauss-Legendre on a mesh graded geometrically
// toward the ends flagged singular.
inline double graded_integral(const std::function<double(double)>& f, double lo, double hi, bool sing_lo,
                              bool sing_hi, int levels = 18, double ratio = 0.2, int points = 16) {
  static const GaussRule rule = gauss_legendre(16);
  const GaussRule& g = points == 16 ? rule : gauss_legendre(points);
  std::vector<double> cuts;
  const double mid = 0.5 * (lo + hi);
  cuts.push_back(lo);
  if (sing_lo) {
    for (int i = levels; i >= 1; --i) cuts.push_back(lo + (mid - lo) * std::pow(ratio, i));
  }
  cuts.push_back(mid);
  if (sing_hi) {
    for (int i = 1; i <= levels; ++i) cuts.push_back(hi - (hi - mid) * std::pow(ratio, i));
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    if (!(b > a)) continue;
    double part = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) part += g.weights[i] * f(a + (b - a) * g.nodes[i]);
    total += (b - a) * part;
  }
  return total;
}

// A parametrized diffuse piece: s in [0,1] -> x(s) with density w(s).
struct Piece {
  std::function<double(double)> x;
  std::function<double(double)> w;
  // x(s) - x(t) without cancellation.
  std::function<double(double, double)> diff;
};

// iint log|x(s) - x(t)| w(s) w(t) ds dt over one piece, split along the
// diagonal and integrated with meshes graded toward it and the corners.
inline double self_log_energy_oracle(const Piece& p) {
  auto outer = [&](double s) {
    auto inner = [&](double t) { return std::log(std::fabs(p.diff(s, t))) * p.w(t); };
    return graded_integral(inner, 0.0, s, true, true) * p.w(s);
  };
  return 2.0 * graded_integral(outer, 0.0, 1.0, true, true);
}

inline double cross_log_energy_oracle(const Piece& p, const Piece& q) {
  auto outer = [&](double s) {
    auto inner = [&](double t) { return std::log(std::fabs(p.x(s) - q.x(t))) * q.w(t); };
    return graded_integral(inner, 0.0, 1.0, true, true) * p.w(s);
  };
  return graded_integral(outer, 0.0, 1.0, true, true);
}

// r (cos pi t - cos pi s)
inline double cos_difference(double r, double s, double t) {
  constexpr double h = std::numbers::pi / 2.0;
  return 2.0 * r * std::sin(h * (s + t)) * std::sin(h * (s - t));
}

inline Piece uniform_piece(double lo, double hi, double mass) {
  return {[=](double s) { return lo + (hi - lo) * s; }, [=](double) { return mass; },
          [=](double s, double t) { return (hi - lo) * (s - t); }};
}

inline Piece arcsine_piece(double lo, double hi, double mass) {
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  return {[=](double s) { return c - r * std::cos(std::numbers::pi * s); }, [=](double) { return mass; },
          [=](double s, double t) { return cos_difference(r, s, t); }};
}

inline Piece semicircle_piece(double c, double r, double mass) {
  return {[=](double s) { return c - r * std::cos(std::numbers::pi * s); },
          [=](double s) {
            const double v = std::sin(std::numbers::pi * s);
            return 2.0 * mass * v * v;
          },
          [=](double s, double t) { return cos_difference(r, s, t); }};
}

struct MeasureOptions {
  int min_atoms = 0;
  int max_atoms = 3;
  bool require_diffuse = false;
  // Smallest allowed weight of the heaviest atom (when atoms exist).
  double min_top_weight = 0.0;
};

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// A random valid measure: up to a few atoms and one diffuse part of a random
// kind, all inside a random support interval.
inline SpectralMeasure random_measure(std::mt19937_64& rng, const MeasureOptions& opt = {}) {
  for (;;) {
    const double a = uniform_real(rng, -3.0, 1.0);
    const double b = a + uniform_real(rng, 0.5, 4.0);
    const int n_atoms = uniform_int(rng, opt.min_atoms, opt.max_atoms);
    int kind = uniform_int(rng, 0, 4);  // 0 empty, 1 uniform, 2 arcsine, 3 semicircle, 4 piecewise
    if (n_atoms == 0 || opt.require_diffuse) kind = uniform_int(rng, 1, 4);

    std::vector<double> raw;
    for (int i = 0; i < n_atoms; ++i) raw.push_back(uniform_real(rng, 0.2, 1.0));
    if (kind != 0) raw.push_back(uniform_real(rng, 0.2, 1.0));
    double total = 0.0;
    for (double w : raw) total += w;
    std::vector<double> masses;
    double used = 0.0;
    for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
      masses.push_back(raw[i] / total);
      used += masses.back();
    }
    masses.push_back(1.0 - used);

    std::vector<Atom> atoms;
    for (int i = 0; i < n_atoms; ++i) {
      double loc;
      bool clash;
      do {
        loc = uniform_real(rng, a, b);
        clash = std::any_of(atoms.begin(), atoms.end(),
                            [&](const Atom& x) { return std::fabs(x.location - loc) < 1e-3; });
      } while (clash);
      atoms.push_back({loc, masses[static_cast<std::size_t>(i)]});
    }
    if (n_atoms > 0 && opt.min_top_weight > 0.0) {
      double top = 0.0;
      for (const auto& x : atoms) top = std::max(top, x.weight);
      if (top < opt.min_top_weight) continue;
    }

    DiffusePart nu;
    if (kind != 0) {
      const double mass = masses.back();
      const double width = (b - a) * uniform_real(rng, 0.2, 1.0);
      const double lo = uniform_real(rng, a, b - width);
      const double hi = std::min(b, lo + width);
      switch (kind) {
        case 1: nu = DiffusePart::uniform(lo, hi, mass); break;
        case 2: nu = DiffusePart::arcsine(lo, hi, mass); break;
        case 3: nu = DiffusePart::semicircle(0.5 * (lo + hi), 0.5 * (hi - lo), mass); break;
        default: {
          const int n_knots = uniform_int(rng, 2, 5);
          std::vector<double> xs = {lo, hi};
          for (int i = 2; i < n_knots; ++i) xs.push_back(uniform_real(rng, lo, hi));
          std::sort(xs.begin(), xs.end());
          xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
          std::vector<double> cs = {0.0};
          for (std::size_t i = 1; i + 1 < xs.size(); ++i) cs.push_back(uniform_real(rng, 0.0, mass));
          std::sort(cs.begin(), cs.end());
          cs.push_back(mass);
          std::vector<CdfKnot> knots;
          bool ok = true;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i > 0 && !(cs[i] > cs[i - 1] && xs[i] > xs[i - 1])) ok = false;
            knots.push_back({xs[i], cs[i]});
          }
          if (!ok) continue;
          nu = DiffusePart::piecewise_linear(knots);
        }
      }
    }
    SpectralMeasure m(Interval{a, b}, atoms, nu);
    if (freehaus::validate(m).valid()) return m;
  }
}

}  // namespace testing_support
