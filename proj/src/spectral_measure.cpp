#include "freehaus/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "freehaus/errors.hpp"

namespace freehaus {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Atom j >= 1 of a named family.
Atom family_atom(const std::string& name, long j) {
  if (name == kExample42) {
    return {1.0 / static_cast<double>(j), std::ldexp(1.0, -static_cast<int>(j))};
  }
  throw InvalidMeasure("unknown atom family '" + name + "'");
}

// Mass of atoms j > count.
double family_tail(const std::string& name, long count) {
  if (name == kExample42) return std::ldexp(1.0, -static_cast<int>(count));
  throw InvalidMeasure("unknown atom family '" + name + "'");
}

struct RealizedFamily {
  std::vector<Atom> atoms;
  double tail = 0.0;
};

RealizedFamily realize_family(const AtomFamily& family, double tol) {
  RealizedFamily out;
  long count = 0;
  // 2^-1074 is the smallest weight representable; no family goes further.
  while (family_tail(family.name, count) >= tol && count < 1074) {
    ++count;
    out.atoms.push_back(family_atom(family.name, count));
  }
  out.tail = family_tail(family.name, count);
  return out;
}

void sort_by_location(std::vector<Atom>& atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.location < y.location; });
}

}  // namespace

std::string to_string(DiffuseKind kind) {
  switch (kind) {
    case DiffuseKind::empty: return "empty";
    case DiffuseKind::uniform: return "uniform";
    case DiffuseKind::semicircle: return "semicircle";
    case DiffuseKind::arcsine: return "arcsine";
    case DiffuseKind::piecewise_linear_cdf: return "piecewise_linear_cdf";
  }
  return "empty";
}

std::optional<DiffuseKind> diffuse_kind_from_string(const std::string& name) {
  for (auto kind : {DiffuseKind::empty, DiffuseKind::uniform, DiffuseKind::semicircle, DiffuseKind::arcsine,
                    DiffuseKind::piecewise_linear_cdf}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DiffuseSegment

double DiffuseSegment::point(double s) const {
  if (map == Map::affine) return lo + (hi - lo) * s;
  const double center = 0.5 * (lo + hi);
  const double radius = 0.5 * (hi - lo);
  return center - radius * std::cos(kPi * s);
}

double DiffuseSegment::difference(double s0, double ds) const {
  if (map == Map::affine) return (hi - lo) * ds;
  const double radius = 0.5 * (hi - lo);
  return 2.0 * radius * std::sin(0.5 * kPi * (2.0 * s0 + ds)) * std::sin(0.5 * kPi * ds);
}

double DiffuseSegment::density(double s) const {
  if (weight == Weight::constant) return mass;
  const double sn = std::sin(kPi * s);
  return 2.0 * mass * sn * sn;
}

double DiffuseSegment::parameter_of(double x) const {
  if (map == Map::affine) return clamp01((x - lo) / (hi - lo));
  const double center = 0.5 * (lo + hi);
  const double radius = 0.5 * (hi - lo);
  return std::acos(std::clamp((center - x) / radius, -1.0, 1.0)) / kPi;
}

// ---------------------------------------------------------------------------
// DiffusePart

DiffusePart DiffusePart::uniform(double lo, double hi, double mass) {
  DiffusePart p;
  p.kind_ = DiffuseKind::uniform;
  p.lo_ = lo;
  p.hi_ = hi;
  p.mass_ = mass;
  return p;
}

DiffusePart DiffusePart::arcsine(double lo, double hi, double mass) {
  DiffusePart p = uniform(lo, hi, mass);
  p.kind_ = DiffuseKind::arcsine;
  return p;
}

DiffusePart DiffusePart::semicircle(double center, double radius, double mass) {
  DiffusePart p = uniform(center - radius, center + radius, mass);
  p.kind_ = DiffuseKind::semicircle;
  p.center_ = center;
  p.radius_ = radius;
  return p;
}

DiffusePart DiffusePart::piecewise_linear(std::vector<CdfKnot> knots) {
  DiffusePart p;
  p.kind_ = DiffuseKind::piecewise_linear_cdf;
  if (!knots.empty()) {
    p.lo_ = knots.front().x;
    p.hi_ = knots.back().x;
    p.mass_ = knots.back().cumulative;
  }
  p.knots_ = std::move(knots);
  return p;
}

double DiffusePart::cdf(double x) const {
  switch (kind_) {
    case DiffuseKind::empty:
      return 0.0;
    case DiffuseKind::uniform:
      return mass_ * clamp01((x - lo_) / (hi_ - lo_));
    case DiffuseKind::arcsine: {
      const double u = std::clamp((2.0 * x - lo_ - hi_) / (hi_ - lo_), -1.0, 1.0);
      return mass_ * clamp01(0.5 + std::asin(u) / kPi);
    }
    case DiffuseKind::semicircle: {
      const double u = std::clamp((2.0 * x - lo_ - hi_) / (hi_ - lo_), -1.0, 1.0);
      return mass_ * clamp01(0.5 + (u * std::sqrt(1.0 - u * u) + std::asin(u)) / kPi);
    }
    case DiffuseKind::piecewise_linear_cdf: {
      if (knots_.empty() || x <= knots_.front().x) return 0.0;
      if (x >= knots_.back().x) return mass_;
      auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                 [](double v, const CdfKnot& k) { return v < k.x; });
      const CdfKnot& right = *it;
      const CdfKnot& left = *(it - 1);
      const double t = (x - left.x) / (right.x - left.x);
      return left.cumulative + t * (right.cumulative - left.cumulative);
    }
  }
  return 0.0;
}

std::vector<DiffuseSegment> DiffusePart::segments() const {
  using Map = DiffuseSegment::Map;
  using Weight = DiffuseSegment::Weight;
  switch (kind_) {
    case DiffuseKind::empty:
      return {};
    case DiffuseKind::uniform:
      return {{Map::affine, Weight::constant, lo_, hi_, mass_}};
    case DiffuseKind::arcsine:
      return {{Map::cosine, Weight::constant, lo_, hi_, mass_}};
    case DiffuseKind::semicircle:
      return {{Map::cosine, Weight::sine_squared, lo_, hi_, mass_}};
    case DiffuseKind::piecewise_linear_cdf: {
      std::vector<DiffuseSegment> out;
      for (std::size_t i = 1; i < knots_.size(); ++i) {
        out.push_back({Map::affine, Weight::constant, knots_[i - 1].x, knots_[i].x,
                       knots_[i].cumulative - knots_[i - 1].cumulative});
      }
      return out;
    }
  }
  return {};
}

DiffusePart DiffusePart::transformed(double scale, double shift) const {
  if (scale == 0.0) throw std::invalid_argument("pushforward scale must be nonzero");
  DiffusePart out = *this;
  double a = scale * lo_ + shift;
  double b = scale * hi_ + shift;
  if (a > b) std::swap(a, b);
  out.lo_ = a;
  out.hi_ = b;
  out.center_ = scale * center_ + shift;
  out.radius_ = std::fabs(scale) * radius_;
  if (kind_ == DiffuseKind::piecewise_linear_cdf) {
    out.knots_.clear();
    if (scale > 0) {
      for (const auto& k : knots_) out.knots_.push_back({scale * k.x + shift, k.cumulative});
    } else {
      for (auto it = knots_.rbegin(); it != knots_.rend(); ++it) {
        out.knots_.push_back({scale * it->x + shift, mass_ - it->cumulative});
      }
      out.knots_.front().cumulative = 0.0;
      out.knots_.back().cumulative = mass_;
    }
  }
  return out;
}

std::vector<std::string> DiffusePart::check() const {
  std::vector<std::string> out;
  if (!(mass_ >= 0.0 && mass_ <= 1.0)) out.push_back("diffuse.mass must lie in [0,1]");
  if ((kind_ == DiffuseKind::empty) != (mass_ == 0.0)) {
    out.push_back("diffuse.kind must be 'empty' exactly when diffuse.mass is 0");
  }
  switch (kind_) {
    case DiffuseKind::empty:
      break;
    case DiffuseKind::uniform:
    case DiffuseKind::arcsine:
    case DiffuseKind::semicircle:
      if (!(std::isfinite(lo_) && std::isfinite(hi_) && lo_ < hi_)) {
        out.push_back("diffuse.params must describe a nondegenerate finite interval");
      }
      break;
    case DiffuseKind::piecewise_linear_cdf:
      if (knots_.size() < 2) {
        out.push_back("diffuse.params.knots needs at least two knots");
        break;
      }
      if (knots_.front().cumulative != 0.0) out.push_back("diffuse.params.knots must start at cumulative mass 0");
      for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].x > knots_[i - 1].x) || !(knots_[i].cumulative > knots_[i - 1].cumulative)) {
          out.push_back("diffuse.params.knots must be strictly increasing in both coordinates (knot " +
                        std::to_string(i) + ")");
          break;
        }
      }
      for (const auto& k : knots_) {
        if (!std::isfinite(k.x) || !std::isfinite(k.cumulative)) {
          out.push_back("diffuse.params.knots must be finite");
          break;
        }
      }
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SpectralMeasure

bool is_known_family(const std::string& name) { return name == kExample42; }

SpectralMeasure::SpectralMeasure(Interval support, std::vector<Atom> atoms, DiffusePart diffuse,
                                 std::optional<AtomFamily> family)
    : support_(support), atoms_(std::move(atoms)), diffuse_(std::move(diffuse)), family_(std::move(family)) {
  sort_by_location(atoms_);
}

double SpectralMeasure::atomic_mass() const {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  return total;
}

std::vector<Atom> SpectralMeasure::atoms_by_weight() const {
  std::vector<Atom> out = atoms_;
  std::stable_sort(out.begin(), out.end(), [](const Atom& x, const Atom& y) { return x.weight > y.weight; });
  return out;
}

double SpectralMeasure::cdf(double x) const {
  if (family_) return materialize(*this).cdf(x);
  double total = diffuse_.cdf(x);
  for (const auto& a : atoms_) {
    if (a.location <= x) total += a.weight;
  }
  return total;
}

SpectralMeasure SpectralMeasure::transformed(double scale, double shift) const {
  const SpectralMeasure base = materialize(*this);
  std::vector<Atom> atoms;
  for (const auto& a : base.atoms_) atoms.push_back({scale * a.location + shift, a.weight});
  double lo = scale * base.support_.lo + shift;
  double hi = scale * base.support_.hi + shift;
  if (lo > hi) std::swap(lo, hi);
  SpectralMeasure out({lo, hi}, std::move(atoms), base.diffuse_.transformed(scale, shift));
  out.tail_mass_ = base.tail_mass_;
  return out;
}

SpectralMeasure SpectralMeasure::with_materialized_atoms(std::vector<Atom> atoms, double tail_mass) const {
  SpectralMeasure out(support_, std::move(atoms), diffuse_);
  out.tail_mass_ = tail_mass_ + tail_mass;
  return out;
}

ValidationReport validate(const SpectralMeasure& measure) {
  ValidationReport report;
  auto& v = report.violations;
  const Interval& s = measure.support();
  const bool support_ok = std::isfinite(s.lo) && std::isfinite(s.hi) && s.lo <= s.hi;
  if (!support_ok) v.push_back("support must be a finite interval [a,b] with a <= b");

  const auto& atoms = measure.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    const std::string where = "atoms[" + std::to_string(i) + "]";
    if (!(a.weight > 0.0 && a.weight <= 1.0)) v.push_back(where + ".weight must lie in (0,1]");
    if (!std::isfinite(a.location)) {
      v.push_back(where + ".location must be finite");
    } else if (support_ok && !s.contains(a.location)) {
      v.push_back(where + ".location lies outside the support");
    }
    if (i > 0 && atoms[i - 1].location == a.location) {
      v.push_back("duplicate atom location " + std::to_string(a.location));
    }
  }

  const DiffusePart& d = measure.diffuse();
  for (auto& msg : d.check()) v.push_back(std::move(msg));
  if (!d.empty() && support_ok && (d.lo() < s.lo || d.hi() > s.hi)) {
    v.push_back("diffuse part extends outside the support");
  }

  double total = measure.atomic_mass() + d.mass() + measure.truncated_tail_mass();
  report.tail_mass = measure.truncated_tail_mass();
  if (const auto& fam = measure.atom_family()) {
    if (!is_known_family(fam->name)) {
      v.push_back("atom_family.name '" + fam->name + "' is not a known family");
    } else if (!(fam->tol > 0.0)) {
      v.push_back("atom_family.tol must be positive");
    } else {
      const RealizedFamily realized = realize_family(*fam, fam->tol);
      for (const auto& a : realized.atoms) {
        total += a.weight;
        if (support_ok && !s.contains(a.location)) {
          v.push_back("atom_family atom at " + std::to_string(a.location) + " lies outside the support");
          break;
        }
        for (const auto& e : atoms) {
          if (e.location == a.location) v.push_back("explicit atom collides with atom_family at " +
                                                    std::to_string(a.location));
        }
      }
      total += realized.tail;
      report.tail_mass += realized.tail;
    }
  }
  report.mass_defect = total - 1.0;
  if (!(std::fabs(report.mass_defect) <= kMassTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "total mass must be 1 (defect " << report.mass_defect << ")";
    v.push_back(os.str());
  }
  return report;
}

void require_valid(const SpectralMeasure& measure) {
  const ValidationReport report = validate(measure);
  if (report.valid()) return;
  std::string msg = "invalid measure:";
  for (const auto& m : report.violations) msg += " " + m + ";";
  throw InvalidMeasure(msg);
}

SpectralMeasure truncate_atoms(const SpectralMeasure& measure, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("truncation tolerance must be positive");
  const auto& fam = measure.atom_family();
  if (!fam) return measure;
  RealizedFamily realized = realize_family(*fam, tol);
  std::vector<Atom> atoms = measure.atoms();
  atoms.insert(atoms.end(), realized.atoms.begin(), realized.atoms.end());
  return measure.with_materialized_atoms(std::move(atoms), realized.tail);
}

SpectralMeasure materialize(const SpectralMeasure& measure) {
  const auto& fam = measure.atom_family();
  return fam ? truncate_atoms(measure, fam->tol) : measure;
}

double cdf(const SpectralMeasure& measure, double x) { return measure.cdf(x); }

long mass_count(double mass, long k) {
  const double x = mass * static_cast<double>(k);
  return static_cast<long>(std::floor(x + 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)));
}

namespace {

// Largest double lambda in [from, b] with nu([a, lambda]) <= target. The
// diffuse CDF is continuous, so this is the right end of the level set.
double rightmost_level(const DiffusePart& nu, double from, double b, double target) {
  if (nu.cdf(b) <= target) return b;
  double lo = from;
  double hi = b;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if (nu.cdf(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

double diffuse_quantile(const SpectralMeasure& measure, long j, long k) {
  if (k < 1) throw std::out_of_range("quantile index k must be positive");
  const DiffusePart& nu = measure.diffuse();
  const long count = mass_count(nu.mass(), k);
  if (j < 1 || j > count) {
    throw std::out_of_range("lambda_{" + std::to_string(j) + "," + std::to_string(k) +
                            "} is undefined: need 1 <= j <= [ck] = " + std::to_string(count));
  }
  const double target = static_cast<double>(j) / static_cast<double>(k);
  return rightmost_level(nu, measure.support().lo, measure.support().hi, target);
}

std::vector<double> diffuse_quantiles(const SpectralMeasure& measure, long k) {
  const DiffusePart& nu = measure.diffuse();
  const long count = k >= 1 ? mass_count(nu.mass(), k) : 0;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  double from = measure.support().lo;
  for (long j = 1; j <= count; ++j) {
    const double target = static_cast<double>(j) / static_cast<double>(k);
    from = rightmost_level(nu, from, measure.support().hi, target);
    out.push_back(from);
  }
  return out;
}

}  // namespace freehaus
