#include "freehaus/run.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "freehaus/asymptotics.hpp"
#include "freehaus/entropy.hpp"
#include "freehaus/errors.hpp"
#include "freehaus/log_energy.hpp"
#include "freehaus/measure_io.hpp"
#include "freehaus/microstates.hpp"

namespace freehaus {

namespace {

using nlohmann::json;

constexpr double kDefaultTol = 1e-6;
constexpr std::uint64_t kDefaultSeed = 42;
constexpr std::uint64_t kDefaultSamples = 1000000;
constexpr double kDefaultSelbergEps = 0.5;
const std::vector<double> kDefaultEpsSweep = {1.0, 0.1, 0.01};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values become strings; JSON has no infinities.
json jnum(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  return x;
}

json jnums(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(jnum(x));
  return out;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  // Shortest text that reads back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// --- knob checking ----------------------------------------------------------

enum class Need { forbidden, optional, required };

struct Knobs {
  int min_measures = 0;
  int max_measures = 0;
  Need k = Need::forbidden;
  Need ks = Need::forbidden;
  Need eps = Need::forbidden;
  Need t = Need::forbidden;
  Need tol = Need::forbidden;
  Need floor = Need::forbidden;
  Need samples = Need::forbidden;
  Need seed = Need::forbidden;
  Need kind = Need::forbidden;
};

constexpr int kMany = 1 << 20;

Knobs knobs_for(const RunConfig& c) {
  Knobs n;
  const auto& cmd = c.command;
  if (cmd == "validate") {
    n.min_measures = 1;
    n.max_measures = kMany;
  } else if (cmd == "energy" || cmd == "chi" || cmd == "bounds") {
    n.min_measures = n.max_measures = 1;
    n.tol = n.floor = Need::optional;
  } else if (cmd == "dim") {
    n.min_measures = n.max_measures = 1;
  } else if (cmd == "family-bounds" || cmd == "report") {
    n.min_measures = 1;
    n.max_measures = kMany;
    n.tol = n.floor = Need::optional;
  } else if (cmd == "microstate") {
    n.min_measures = n.max_measures = 1;
    n.k = Need::required;
    n.kind = n.eps = n.t = Need::optional;
  } else if (cmd == "selberg") {
    n.k = Need::required;
    n.eps = n.samples = n.seed = Need::optional;
  } else if (cmd == "series") {
    n.ks = Need::required;
    if (c.series == "regularized") {
      n.min_measures = n.max_measures = 1;
      n.eps = n.tol = Need::optional;
    } else if (c.series == "offdiag" || c.series == "packing") {
      n.min_measures = n.max_measures = 1;
      n.tol = Need::optional;
    } else if (c.series != "lemma41" && c.series != "ball") {
      throw UsageError("unknown series '" + c.series + "' (expected lemma41, regularized, offdiag, packing, ball)");
    }
  } else {
    throw UsageError("unknown command '" + cmd + "'");
  }
  return n;
}

void check_need(Need need, bool present, const char* flag, const std::string& command) {
  if (need == Need::required && !present) throw UsageError(command + " requires " + flag);
  if (need == Need::forbidden && present) throw UsageError(command + " does not take " + flag);
}

void check_knobs(const RunConfig& c) {
  if (c.command != "series" && !c.series.empty()) {
    throw UsageError("unexpected argument '" + c.series + "' after " + c.command);
  }
  if (c.command == "series" && c.series.empty()) throw UsageError("series requires a series name");
  const Knobs n = knobs_for(c);
  const std::string name = c.command == "series" ? "series " + c.series : c.command;
  const int m = static_cast<int>(c.measure_paths.size());
  if (m < n.min_measures) throw UsageError(name + " requires --measure");
  if (m > n.max_measures) {
    throw UsageError(n.max_measures == 0 ? name + " does not take --measure"
                                         : name + " takes exactly one --measure");
  }
  check_need(n.k, c.k.has_value(), "--k", name);
  check_need(n.ks, !c.ks.empty(), "--ks", name);
  check_need(n.eps, c.eps.has_value(), "--eps", name);
  check_need(n.t, c.t.has_value(), "--t", name);
  check_need(n.tol, c.tol.has_value(), "--tol", name);
  check_need(n.floor, c.floor.has_value(), "--floor", name);
  check_need(n.samples, c.samples.has_value(), "--samples", name);
  check_need(n.seed, c.seed.has_value(), "--seed", name);
  check_need(n.kind, c.kind.has_value(), "--kind", name);

  if (c.tol && !(*c.tol > 0.0)) throw UsageError("--tol must be positive");
  if (c.eps && !(*c.eps > 0.0)) throw UsageError("--eps must be positive");
  if (c.t && !(*c.t > 0.0)) throw UsageError("--t must be positive");
  if (c.floor && !std::isfinite(*c.floor)) throw UsageError("--floor must be finite");
  if (!c.ks.empty()) {
    try {
      check_ks(c.ks);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--ks: ") + e.what());
    }
  }
  if (c.command == "microstate") {
    if (*c.k < 1 || *c.k > kDefaultKCap) throw UsageError("--k must lie in [1, " + std::to_string(kDefaultKCap) + "]");
    if (c.kind && *c.kind != "A" && *c.kind != "B") throw UsageError("--kind must be A or B");
    if (c.eps.has_value() != c.t.has_value()) throw UsageError("microstate takes --eps and --t together");
    if (c.eps && c.kind && *c.kind == "B") throw UsageError("the volume bound (--eps, --t) needs --kind A");
  }
  if (c.command == "selberg") {
    if (*c.k < 1 || *c.k > 6) throw UsageError("selberg --k must lie in [1, 6]");
    if (c.samples && *c.samples < 2) throw UsageError("--samples must be at least 2");
  }
  const bool csv_ok = c.command == "series" || c.command == "microstate";
  if (c.format == OutputFormat::csv && !csv_ok) throw UsageError("--format csv is only for series and microstate");
}

// --- report pieces -----------------------------------------------------------

EnergyOptions energy_options(const RunConfig& c) {
  EnergyOptions o;
  o.tol = c.tol.value_or(kDefaultTol);
  if (c.floor) o.divergence_floor = *c.floor;
  return o;
}

json energy_json(const EnergyResult& r) {
  return {
      {"value", jnum(r.value)},
      {"status", to_string(r.status)},
      {"abs_error_estimate", jnum(r.abs_error_estimate)},
      {"components",
       {{"diffuse_diffuse", jnum(r.components.diffuse_diffuse)},
        {"atomic_diffuse", jnum(r.components.atomic_diffuse)},
        {"atomic_atomic", jnum(r.components.atomic_atomic)}}},
      {"truncated_tail_mass", jnum(r.truncated_tail_mass)},
      {"truncation_bound", jnum(r.truncation_bound)},
  };
}

json series_json(const SeriesReport& s) {
  json targets = json::array();
  for (const auto& t : s.targets) {
    targets.push_back({{"label", t.label},
                       {"value", jnum(t.value)},
                       {"formula", t.formula},
                       {"gaps", jnums(t.gaps)},
                       {"achieved_gap", jnum(t.achieved_gap)},
                       {"tail_min_gap", jnum(t.tail_min_gap)},
                       {"abs_gaps_decreasing", t.abs_gaps_decreasing}});
  }
  return {{"name", s.name},
          {"ks", s.ks},
          {"values", jnums(s.values)},
          {"relation", to_string(s.relation)},
          {"target", jnum(s.target())},
          {"achieved_gap", jnum(s.achieved_gap())},
          {"targets", targets}};
}

void series_csv(const SeriesReport& s, std::ostream& os) {
  os << "k,value,target,gap\n";
  for (std::size_t i = 0; i < s.ks.size(); ++i) {
    os << s.ks[i] << ',' << fmt(s.values[i]) << ',' << fmt(s.target()) << ',' << fmt(s.primary().gaps[i]) << '\n';
  }
}

void text_render(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) text_render(value, prefix.empty() ? key : prefix + "." + key, os);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) text_render(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else if (j.is_number_float()) {
    os << prefix << " = " << fmt(j.get<double>()) << '\n';
  } else if (j.is_string()) {
    os << prefix << " = " << j.get<std::string>() << '\n';
  } else {
    os << prefix << " = " << j.dump() << '\n';
  }
}

struct Loaded {
  std::string path;
  SpectralMeasure measure;
};

std::vector<Loaded> load_all(const RunConfig& c) {
  std::vector<Loaded> out;
  for (const auto& p : c.measure_paths) {
    try {
      out.push_back({p, load_measure(p)});
    } catch (const InvalidMeasure& e) {
      throw InvalidMeasure(p + ": " + e.what());
    }
  }
  return out;
}

void require_all_valid(const std::vector<Loaded>& ms) {
  for (const auto& m : ms) {
    const auto report = validate(m.measure);
    if (!report.valid()) throw InvalidMeasure(m.path + ": " + report.violations.front());
  }
}

json inputs_json(const RunConfig& c, const std::vector<Loaded>& ms) {
  json in = json::object();
  if (!ms.empty()) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back({{"path", m.path}, {"spec", measure_to_json(m.measure)}});
    in["measures"] = arr;
  }
  if (!c.series.empty()) in["series"] = c.series;
  if (c.k) in["k"] = *c.k;
  if (!c.ks.empty()) in["ks"] = c.ks;
  if (c.eps) in["eps"] = *c.eps;
  if (c.t) in["t"] = *c.t;
  if (c.tol) in["tol"] = *c.tol;
  if (c.floor) in["floor"] = *c.floor;
  if (c.samples) in["samples"] = *c.samples;
  if (c.seed) in["seed"] = *c.seed;
  if (c.kind) in["kind"] = *c.kind;
  return in;
}

// What a command produced: JSON results, optional CSV body, and exit code.
struct Outcome {
  json results = json::object();
  json formulas = json::object();
  std::string csv;
  int code = kExitOk;
  std::string diagnostic;
};

void flag_energy(Outcome& o, const EnergyResult& r, const std::string& who) {
  if (r.status == EnergyStatus::converged) return;
  o.code = kExitEnergy;
  if (o.diagnostic.empty()) {
    o.diagnostic = std::string("energy: ") + who + ": " + to_string(r.status) + " (error estimate " +
                   fmt(r.abs_error_estimate) + ")";
  }
}

const char* kChiFormula = "chi = iint log|y-z| dmu dmu + 3/4 + (1/2) log(2 pi)";
const char* kH1Formula = "H1 = chi + (1/2) log(2/(pi e))";
const char* kUpperFormula = "upper = E + log 16 + 1/4";
const char* kLowerFormula = "lower = E - alpha log 2 - (1/2) log(288 e) + 3/4";
const char* kAlphaFormula = "alpha = 1 - sum_i c_i^2";
const char* kEnergyFormula = "E = iint_{R^2-D} log|y-z| dmu(y) dmu(z)";

Outcome cmd_validate(const std::vector<Loaded>& ms) {
  Outcome o;
  json arr = json::array();
  for (const auto& m : ms) {
    const auto r = validate(m.measure);
    arr.push_back({{"path", m.path},
                   {"valid", r.valid()},
                   {"violations", r.violations},
                   {"mass_defect", jnum(r.mass_defect)},
                   {"tail_mass", jnum(r.tail_mass)}});
    if (!r.valid() && o.code == kExitOk) {
      o.code = kExitInvalidMeasure;
      o.diagnostic = "invalid-measure: " + m.path + ": " + r.violations.front();
    }
  }
  o.results["measures"] = arr;
  return o;
}

Outcome cmd_energy(const RunConfig& c, const Loaded& m) {
  Outcome o;
  const EnergyResult r = offdiag_energy(m.measure, energy_options(c));
  o.results["energy"] = energy_json(r);
  o.formulas["energy"] = kEnergyFormula;
  flag_energy(o, r, m.path);
  return o;
}

// chi from an already computed energy; -inf with atoms.
double chi_from(const SpectralMeasure& m, const EnergyResult& r) {
  if (m.has_atoms() || !std::isfinite(r.value)) return -std::numeric_limits<double>::infinity();
  return r.value + 0.75 + 0.5 * std::log(2.0 * std::numbers::pi);
}

Outcome cmd_chi(const RunConfig& c, const Loaded& m) {
  Outcome o;
  o.formulas["chi"] = kChiFormula;
  if (m.measure.has_atoms()) {
    o.results["chi"] = jnum(-std::numeric_limits<double>::infinity());
    o.results["reason"] = "atomic mass on the diagonal";
    return o;
  }
  const EnergyResult r = offdiag_energy(m.measure, energy_options(c));
  o.results["energy"] = energy_json(r);
  o.results["chi"] = jnum(chi_from(m.measure, r));
  flag_energy(o, r, m.path);
  return o;
}

Outcome cmd_dim(const Loaded& m) {
  Outcome o;
  const Dimension d = free_hausdorff_dimension_detailed(m.measure);
  o.results["alpha"] = jnum(d.alpha);
  o.results["tail_bound"] = jnum(d.tail_bound);
  o.formulas["alpha"] = kAlphaFormula;
  return o;
}

json bounds_json(double alpha, const EnergyResult& r) {
  const bool finite = std::isfinite(r.value);
  const double upper = finite ? r.value + upper_bound_constant() : -std::numeric_limits<double>::infinity();
  const double lower = finite ? r.value + lower_bound_constant(alpha) : -std::numeric_limits<double>::infinity();
  return {{"alpha", jnum(alpha)}, {"energy", energy_json(r)}, {"lower", jnum(lower)}, {"upper", jnum(upper)}};
}

Outcome cmd_bounds(const RunConfig& c, const Loaded& m) {
  Outcome o;
  const double alpha = free_hausdorff_dimension(m.measure);
  const EnergyResult r = offdiag_energy(m.measure, energy_options(c));
  o.results = bounds_json(alpha, r);
  o.formulas = {{"upper", kUpperFormula}, {"lower", kLowerFormula}, {"alpha", kAlphaFormula}};
  flag_energy(o, r, m.path);
  return o;
}

json family_json(const std::vector<double>& alphas, const std::vector<EnergyResult>& energies) {
  double beta = 0.0;
  double sum = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    beta += alphas[i];
    if (std::isfinite(energies[i].value)) {
      sum += energies[i].value;
    } else {
      finite = false;
    }
  }
  const long n = static_cast<long>(alphas.size());
  const double k1 = family_K1(n, beta);
  const double k2 = family_K2(n);
  const double ninf = -std::numeric_limits<double>::infinity();
  json energies_json = json::array();
  for (const auto& e : energies) energies_json.push_back(energy_json(e));
  return {{"n", n},
          {"betas", jnums(alphas)},
          {"beta", jnum(beta)},
          {"energies", energies_json},
          {"K1", jnum(k1)},
          {"K2", jnum(k2)},
          {"lower", jnum(finite ? sum + k1 : ninf)},
          {"upper", jnum(finite ? sum + k2 : ninf)}};
}

json family_formulas() {
  return {{"K1", "K1 = -(n/2) log(288 e) + 3n/4 - beta log 2"},
          {"K2", "K2 = n log(16 sqrt(n)) + n/4"},
          {"lower", "lower = sum_i E_i + K1"},
          {"upper", "upper = sum_i E_i + K2"}};
}

Outcome cmd_family(const RunConfig& c, const std::vector<Loaded>& ms) {
  Outcome o;
  std::vector<double> alphas;
  std::vector<EnergyResult> energies;
  for (const auto& m : ms) {
    alphas.push_back(free_hausdorff_dimension(m.measure));
    energies.push_back(offdiag_energy(m.measure, energy_options(c)));
    flag_energy(o, energies.back(), m.path);
  }
  o.results = family_json(alphas, energies);
  o.formulas = family_formulas();
  return o;
}

Outcome cmd_report(const RunConfig& c, const std::vector<Loaded>& ms) {
  Outcome o;
  json arr = json::array();
  std::vector<double> alphas;
  std::vector<EnergyResult> energies;
  for (const auto& m : ms) {
    const Dimension d = free_hausdorff_dimension_detailed(m.measure);
    const EnergyResult r = offdiag_energy(m.measure, energy_options(c));
    flag_energy(o, r, m.path);
    json entry = {{"path", m.path},
                  {"alpha", jnum(d.alpha)},
                  {"alpha_tail_bound", jnum(d.tail_bound)},
                  {"energy", energy_json(r)},
                  {"chi", jnum(chi_from(m.measure, r))}};
    if (!m.measure.has_atoms()) {
      const double ch = chi_from(m.measure, r);
      entry["h1_identity"] = jnum(std::isfinite(ch) ? ch + 0.5 * std::log(2.0 / (std::numbers::pi * std::numbers::e))
                                                    : ch);
    }
    json b = bounds_json(d.alpha, r);
    entry["bounds"] = {{"lower", b["lower"]}, {"upper", b["upper"]}};
    arr.push_back(entry);
    alphas.push_back(d.alpha);
    energies.push_back(r);
  }
  o.results["measures"] = arr;
  o.formulas = {{"energy", kEnergyFormula}, {"alpha", kAlphaFormula}, {"chi", kChiFormula},
                {"h1_identity", kH1Formula},  {"upper", kUpperFormula}, {"lower", kLowerFormula}};
  if (ms.size() >= 2) {
    o.results["family"] = family_json(alphas, energies);
    const json family = family_formulas();
    for (const auto& [key, value] : family.items()) o.formulas["family." + key] = value;
  }
  return o;
}

Outcome cmd_microstate(const RunConfig& c, const Loaded& m) {
  Outcome o;
  const bool is_b = c.kind && *c.kind == "B";
  const DiagonalMicrostate s = is_b ? build_B(m.measure, *c.k) : build_A(m.measure, *c.k);
  const PairPartition p = pair_partition(s);
  json mult = json::array();
  for (const auto& a : s.atom_multiplicities) {
    mult.push_back({{"location", jnum(a.location)}, {"weight", jnum(a.weight)}, {"multiplicity", a.multiplicity}});
  }
  o.results = {{"kind", to_string(s.kind)},
               {"k", s.k},
               {"eigenvalues", jnums(s.eigenvalues)},
               {"atom_multiplicities", mult},
               {"quantile_count", s.quantile_count},
               {"s_count", p.s_count},
               {"w_count", p.w_count}};
  if (is_b) {
    const CountingCheck check = sk_counting_check(m.measure, s);
    o.results["n_k"] = s.n_k;
    o.results["r_count"] = s.r_count;
    o.results["filler_count"] = s.filler_count;
    o.results["filler_base"] = jnum(s.filler_base);
    o.results["counting_check"] = {{"holds", check.holds},
                                   {"lhs", jnum(check.lhs)},
                                   {"rhs", jnum(check.rhs)},
                                   {"margin", jnum(check.margin)}};
    o.results["log_packing_constant"] = jnum(packing_constant_terms(s).total);
    o.formulas["counting_check"] = "2 #S_k + k <= (1 - alpha) k^2";
    o.formulas["log_packing_constant"] =
        "log D_k + sum_W log(b_i - b_j)^2 - log k! + (2 #S_k + k - k^2) log 2 + log prod Gamma(j+1) Gamma(j)^2 / "
        "Gamma(k+j)";
  } else {
    o.results["zero_count"] = s.zero_count;
    if (c.eps) {
      o.results["inner_alpha"] = jnum(inner_alpha(*c.eps, *c.t));
      o.results["log_volume_bound"] = jnum(volume_upper_bound_log(s, *c.eps, *c.t));
      o.formulas["inner_alpha"] = "sqrt((alpha + 2 alpha^2) / (alpha + 2)) = t/eps + 1/4";
      o.formulas["log_volume_bound"] =
          "log[k^{k/2} eps^k Gamma(k/2+1)^-1 (1+2 alpha)^{k(k-1)/2} e^{2 k^2 eps} pi^{k^2/2} 2^{k(k-1)/2} "
          "(prod j!)^-1 prod_{i<j} ((a_i - a_j)^2 + eps)]";
    }
  }
  std::ostringstream csv;
  for (double x : s.eigenvalues) csv << fmt(x) << '\n';
  o.csv = csv.str();
  return o;
}

Outcome cmd_selberg(const RunConfig& c) {
  Outcome o;
  const SelbergMonteCarlo r = selberg_mc_check(*c.k, c.eps.value_or(kDefaultSelbergEps),
                                               c.samples.value_or(kDefaultSamples), c.seed.value_or(kDefaultSeed));
  o.results = {{"k", r.k},
               {"eps", jnum(r.eps)},
               {"samples", r.samples},
               {"seed", r.seed},
               {"selberg_log", jnum(selberg_log(r.k))},
               {"mc_estimate", jnum(r.mc_estimate)},
               {"std_error", jnum(r.std_error)},
               {"closed_form", jnum(r.closed_form)},
               {"z_score", jnum(r.z_score)}};
  o.formulas = {{"selberg_log", "log prod_{j=1}^k Gamma(j+1) Gamma(j)^2 / Gamma(k+j)"},
                {"closed_form", "(2 eps)^{k^2} exp(selberg_log(k))"},
                {"z_score", "(mc_estimate - closed_form) / std_error"}};
  return o;
}

Outcome cmd_series(const RunConfig& c, const std::vector<Loaded>& ms) {
  Outcome o;
  std::vector<SeriesReport> reports;
  const std::vector<long>& ks = c.ks;
  const double tol = std::min(c.tol.value_or(kDefaultTol), 1e-8);
  if (c.series == "lemma41") {
    const GammaSeries g = gamma_ratio_limit_series(ks);
    reports.push_back(make_series_report("lemma41", ks, g.normalized_values, SeriesRelation::converges_to,
                                         {{"limit", g.limit, "-log 4"}}));
    o.formulas["value"] = "k^-2 log prod_{j=1}^k Gamma(j+1) Gamma(j)^2 / Gamma(k+j)";
  } else if (c.series == "ball") {
    std::vector<double> values;
    for (long k : ks) {
      const double kd = static_cast<double>(k);
      values.push_back(log_ball_volume(k) / (kd * kd) + 0.5 * std::log(kd));
    }
    reports.push_back(make_series_report("ball", ks, values, SeriesRelation::converges_to,
                                         {{"limit", 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e),
                                           "(1/2) log(2 pi e)"}}));
    o.formulas["value"] = "k^-2 log L_k + (1/2) log k,  log L_k = (k^2/2) log(pi k) - log Gamma(k^2/2 + 1)";
  } else if (c.series == "regularized") {
    const std::vector<double> sweep = c.eps ? std::vector<double>{*c.eps} : kDefaultEpsSweep;
    for (double eps : sweep) {
      reports.push_back(regularized_product_series(ms.front().measure, eps, ks, tol));
      reports.back().name = "regularized eps=" + fmt(eps);
    }
    o.formulas["value"] = "k^-2 sum_{i<j} log((a_i - a_j)^2 + eps) over A_k";
  } else if (c.series == "offdiag") {
    reports.push_back(offdiag_sum_series(ms.front().measure, ks, tol));
    o.formulas["value"] = "k^-2 sum_{(i,j) in W_k} log(b_i - b_j)^2 over B_k";
  } else {
    reports.push_back(packing_series(ms.front().measure, ks, tol));
    o.formulas["value"] = "k^-2 log C_k + (1/2) log k";
  }
  json arr = json::array();
  std::ostringstream csv;
  for (const auto& r : reports) {
    arr.push_back(series_json(r));
    if (reports.size() > 1) csv << "# " << r.name << '\n';
    series_csv(r, csv);
  }
  o.results["series"] = arr;
  o.csv = csv.str();
  return o;
}

Outcome dispatch(const RunConfig& c, const std::vector<Loaded>& ms) {
  const auto& cmd = c.command;
  if (cmd == "validate") return cmd_validate(ms);
  require_all_valid(ms);
  if (cmd == "energy") return cmd_energy(c, ms.front());
  if (cmd == "chi") return cmd_chi(c, ms.front());
  if (cmd == "dim") return cmd_dim(ms.front());
  if (cmd == "bounds") return cmd_bounds(c, ms.front());
  if (cmd == "family-bounds") return cmd_family(c, ms);
  if (cmd == "report") return cmd_report(c, ms);
  if (cmd == "microstate") return cmd_microstate(c, ms.front());
  if (cmd == "selberg") return cmd_selberg(c);
  return cmd_series(c, ms);
}

int fail(std::ostream& err, int code, const std::string& category, const std::string& reason) {
  std::string line = reason;
  for (char& ch : line) {
    if (ch == '\n') ch = ' ';
  }
  err << "freehaus: " << category << ": " << line << '\n';
  return code;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Outcome outcome;
  std::vector<Loaded> measures;
  try {
    check_knobs(config);
    measures = load_all(config);
    outcome = dispatch(config, measures);
  } catch (const UsageError& e) {
    return fail(err, kExitUsage, "usage", e.what());
  } catch (const InvalidMeasure& e) {
    return fail(err, kExitInvalidMeasure, "invalid-measure", e.what());
  } catch (const EnergyError& e) {
    return fail(err, kExitEnergy, "energy", e.what());
  } catch (const NoSolution& e) {
    return fail(err, kExitNoSolution, "no-solution", e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, "usage", e.what());
  }

  std::ostringstream body;
  if (config.format == OutputFormat::csv) {
    body << outcome.csv;
  } else {
    json doc = {{"tool", {{"name", "freehaus"}, {"version", kVersion}}},
                {"command", config.command},
                {"inputs", inputs_json(config, measures)},
                {"results", outcome.results},
                {"formulas", outcome.formulas},
                {"exit_code", outcome.code}};
    if (config.format == OutputFormat::json) {
      body << doc.dump(2) << '\n';
    } else {
      text_render(doc["results"], "", body);
    }
  }

  if (config.out_path) {
    std::ofstream file(*config.out_path, std::ios::binary);
    if (!file) return fail(err, kExitUsage, "usage", "cannot write --out " + *config.out_path);
    file << body.str();
  } else {
    out << body.str();
  }
  if (outcome.code != kExitOk) {
    const auto sep = outcome.diagnostic.find(": ");
    return fail(err, outcome.code, outcome.diagnostic.substr(0, sep), outcome.diagnostic.substr(sep + 2));
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free entropy, free Hausdorff dimension and microstate numerics for one selfadjoint variable"};
  app.set_version_flag("--version", std::string(kVersion));

  RunConfig c;
  std::string format = "json";
  app.add_option("command", c.command,
                 "validate | energy | chi | dim | bounds | family-bounds | microstate | series | selberg | report")
      ->required();
  app.add_option("series", c.series, "for series: lemma41 | regularized | offdiag | packing | ball");
  app.add_option("--measure", c.measure_paths, "measure specification file (repeatable)");
  app.add_option("--k", c.k, "matrix size");
  app.add_option("--ks", c.ks, "comma-separated matrix sizes")->delimiter(',');
  app.add_option("--eps", c.eps, "regularization / box half-width");
  app.add_option("--t", c.t, "neighborhood radius for the volume bound");
  app.add_option("--tol", c.tol, "absolute energy tolerance (default 1e-6)");
  app.add_option("--floor", c.floor, "energies below this are reported as -inf (default -1e6)");
  app.add_option("--samples", c.samples, "Monte Carlo samples (default 1e6)");
  app.add_option("--seed", c.seed, "Monte Carlo seed (default 42)");
  app.add_option("--kind", c.kind, "microstate kind A or B (default A)");
  app.add_option("--out", c.out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kExitUsage, "usage", e.what());
  }
  c.format = format == "csv" ? OutputFormat::csv : format == "text" ? OutputFormat::text : OutputFormat::json;
  return run(c, out, err);
}

}  // namespace freehaus
