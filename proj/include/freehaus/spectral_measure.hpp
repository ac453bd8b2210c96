#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace freehaus {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// A point mass c_i at r_i.
struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

// A (cumulative mass) knot of a piecewise-linear diffuse CDF.
struct CdfKnot {
  double x = 0.0;
  double cumulative = 0.0;
};

enum class DiffuseKind { empty, uniform, semicircle, arcsine, piecewise_linear_cdf };

std::string to_string(DiffuseKind kind);
std::optional<DiffuseKind> diffuse_kind_from_string(const std::string& name);

// A smooth monotone parametrization of one piece of a diffuse measure:
// s in [0,1] maps to a point y(s), and the piece carries mass density w(s) ds.
struct DiffuseSegment {
  enum class Map { affine, cosine };
  enum class Weight { constant, sine_squared };

  Map map = Map::affine;
  Weight weight = Weight::constant;
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;

  double point(double s) const;
  // y(s) - y(s0), accurate when s - s0 = ds is tiny.
  double difference(double s0, double ds) const;
  double density(double s) const;
  // The s in [0,1] whose image is x, clamped to the ends.
  double parameter_of(double x) const;
};

// The diffuse component nu. Shape parameters depend on the kind:
//   uniform, arcsine:       {lo, hi}
//   semicircle:             {center, radius}
//   piecewise_linear_cdf:   strictly increasing (x, cumulative) knots from 0 to mass
class DiffusePart {
 public:
  DiffusePart() = default;

  static DiffusePart uniform(double lo, double hi, double mass = 1.0);
  static DiffusePart arcsine(double lo, double hi, double mass = 1.0);
  static DiffusePart semicircle(double center, double radius, double mass = 1.0);
  static DiffusePart piecewise_linear(std::vector<CdfKnot> knots);

  DiffuseKind kind() const { return kind_; }
  double mass() const { return mass_; }
  bool empty() const { return kind_ == DiffuseKind::empty; }

  // Shape accessors. For semicircle, lo/hi are center -/+ radius.
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<CdfKnot>& knots() const { return knots_; }
  // Semicircle shape as given at construction.
  double center() const { return center_; }
  double radius() const { return radius_; }

  // nu((-inf, x]).
  double cdf(double x) const;

  std::vector<DiffuseSegment> segments() const;

  // Push forward under x -> scale * x + shift (scale != 0).
  DiffusePart transformed(double scale, double shift) const;

  // Violated invariants of the part on its own.
  std::vector<std::string> check() const;

 private:
  DiffuseKind kind_ = DiffuseKind::empty;
  double mass_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double center_ = 0.0;
  double radius_ = 0.0;
  std::vector<CdfKnot> knots_;
};

// A named infinite atom family realized up to a tail-mass tolerance.
struct AtomFamily {
  std::string name;
  double tol = 1e-10;
};

// The only built-in family: weight 2^-j at 1/j for j >= 1.
inline constexpr const char* kExample42 = "example42";

bool is_known_family(const std::string& name);

// The measure mu = sigma + nu on [a, b].
class SpectralMeasure {
 public:
  SpectralMeasure() = default;
  SpectralMeasure(Interval support, std::vector<Atom> atoms, DiffusePart diffuse,
                  std::optional<AtomFamily> family = std::nullopt);

  const Interval& support() const { return support_; }
  // Explicit atoms, sorted by location.
  const std::vector<Atom>& atoms() const { return atoms_; }
  const DiffusePart& diffuse() const { return diffuse_; }
  const std::optional<AtomFamily>& atom_family() const { return family_; }

  // Atomic mass dropped when an infinite family was truncated. It belongs to
  // no atom and is carried so that downstream quantities can bound the error.
  double truncated_tail_mass() const { return tail_mass_; }

  double atomic_mass() const;
  bool has_atoms() const { return !atoms_.empty() || family_.has_value(); }

  // Atoms by decreasing weight; ties broken by increasing location.
  std::vector<Atom> atoms_by_weight() const;

  // mu((-inf, x]). Families are realized at their own tolerance first.
  double cdf(double x) const;

  SpectralMeasure transformed(double scale, double shift) const;

  // Internal: used by truncate_atoms.
  SpectralMeasure with_materialized_atoms(std::vector<Atom> atoms, double tail_mass) const;

 private:
  Interval support_;
  std::vector<Atom> atoms_;
  DiffusePart diffuse_;
  std::optional<AtomFamily> family_;
  double tail_mass_ = 0.0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  // (sum of weights + diffuse mass + truncated tail) - 1.
  double mass_defect = 0.0;
  // Tail mass of the realized atom family, if any.
  double tail_mass = 0.0;

  bool valid() const { return violations.empty(); }
};

inline constexpr double kMassTolerance = 1e-12;

ValidationReport validate(const SpectralMeasure& measure);

// Throws InvalidMeasure listing the violations.
void require_valid(const SpectralMeasure& measure);

// Realize a named atom family: keep atoms in decreasing weight order until the
// remaining mass is below tol. Measures without a family are returned as-is.
SpectralMeasure truncate_atoms(const SpectralMeasure& measure, double tol);

// Same, at the family's own tolerance.
SpectralMeasure materialize(const SpectralMeasure& measure);

double cdf(const SpectralMeasure& measure, double x);

// floor(mass * k), robust to representation error in mass.
long mass_count(double mass, long k);

// The largest lambda in [a,b] with nu([a, lambda]) = j/k, for 1 <= j <= [ck].
// Throws std::out_of_range outside that range.
double diffuse_quantile(const SpectralMeasure& measure, long j, long k);

// All of lambda_{1k} .. lambda_{[ck]k}.
std::vector<double> diffuse_quantiles(const SpectralMeasure& measure, long k);

}  // namespace freehaus
