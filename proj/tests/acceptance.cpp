// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "freehaus/asymptotics.hpp"
#include "freehaus/entropy.hpp"
#include "freehaus/errors.hpp"
#include "freehaus/log_energy.hpp"
#include "freehaus/measure_io.hpp"
#include "freehaus/microstates.hpp"
#include "freehaus/run.hpp"
#include "support.hpp"

using namespace freehaus;
using testing_support::MeasureOptions;
using testing_support::random_measure;
using testing_support::uniform_int;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SpectralMeasure uniform01() { return {{0, 1}, {}, DiffusePart::uniform(0, 1)}; }
SpectralMeasure half_atom_uniform() { return {{0, 2}, {{0, 0.5}}, DiffusePart::uniform(1, 2, 0.5)}; }
SpectralMeasure example42() { return {{0, 1}, {}, DiffusePart(), AtomFamily{kExample42, 1e-10}}; }

Outcome gamma_limit() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<long> ks = {1000, 2000};
  const auto s = gamma_ratio_limit_series(ks);
  const double t = seconds_since(start);
  const bool ok = s.gaps[0] < 0.05 && s.gaps[1] < s.gaps[0] && t < 1.0;
  return {ok, fmt("gap at k=1000 %.5f, ", s.gaps[0]) + fmt("at k=2000 %.5f, ", s.gaps[1]) + fmt("%.3f s", t)};
}

Outcome selberg() {
  const auto start = std::chrono::steady_clock::now();
  const double exact = std::exp(selberg_log(2));
  const auto two = selberg_mc_check(2, 0.5, 1000000, 42);
  const auto three = selberg_mc_check(3, 1.0, 1000000, 42);
  const double t = seconds_since(start);
  const bool ok = std::fabs(exact - 1.0 / 6.0) < 1e-12 && std::fabs(two.z_score) < 4 && std::fabs(three.z_score) < 4 &&
                  t < 10.0;
  return {ok, fmt("|exp(S_2) - 1/6| = %.1e, ", std::fabs(exact - 1.0 / 6.0)) +
                  fmt("z(k=2) = %.3f, z(k=3) = %.3f, ", two.z_score, three.z_score) + fmt("%.2f s", t)};
}

Outcome example_dimension() {
  const auto start = std::chrono::steady_clock::now();
  const auto m = example42();
  const double alpha = free_hausdorff_dimension(m);
  const auto b = hausdorff_entropy_bounds(m, 1e-8);
  double oracle = 0.0;
  for (int i = 1; i <= 60; ++i) {
    for (int j = 1; j <= 60; ++j) {
      if (i != j) oracle += std::ldexp(1.0, -i - j) * std::log(std::fabs(1.0 / i - 1.0 / j));
    }
  }
  const double t = seconds_since(start);
  const double err = std::fabs(b.energy.value - oracle);
  const bool ok = std::fabs(alpha - 2.0 / 3.0) < 1e-9 && std::isfinite(b.lower) && std::isfinite(b.upper) &&
                  err < 1e-6 && t < 5.0;
  return {ok, fmt("alpha %.12f, ", alpha) + fmt("bounds [%.6f, %.6f], ", b.lower, b.upper) +
                  fmt("|E - double sum| = %.1e, ", err) + fmt("%.2f s", t)};
}

Outcome sandwich_width_identity() {
  std::mt19937_64 rng(2025);
  double worst_width = 0.0;
  double worst_family = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_measure(rng);
    const auto b = hausdorff_entropy_bounds(m, 1e-7);
    if (!b.energy.finite()) return {false, "random measure with non-finite energy"};
    const double expected =
        std::log(16.0) + 0.25 + b.alpha * std::numbers::ln2 + 0.5 * (std::log(288.0) + 1.0) - 0.75;
    worst_width = std::max(worst_width, std::fabs(b.upper - b.lower - expected));
    const auto f = free_family_bounds({m}, 1e-7);
    worst_family = std::max({worst_family, std::fabs(f.lower - b.lower), std::fabs(f.upper - b.upper)});
  }
  const bool ok = worst_width <= 1e-12 && worst_family <= 1e-12;
  return {ok, fmt("max width error %.1e, ", worst_width) + fmt("max n=1 family error %.1e", worst_family)};
}

Outcome energy_oracles() {
  const auto start = std::chrono::steady_clock::now();
  const double u = offdiag_energy(uniform01(), 1e-6).value;
  const double a = offdiag_energy(SpectralMeasure({-2, 2}, {}, DiffusePart::arcsine(-2, 2)), 1e-6).value;
  const SpectralMeasure sc({-2, 2}, {}, DiffusePart::semicircle(0, 2));
  const double s = offdiag_energy(sc, 1e-6).value;
  const double c = chi(sc, 1e-6);
  const double t = seconds_since(start);
  const bool ok = std::fabs(u + 1.5) < 1e-6 && std::fabs(a) < 1e-6 && std::fabs(s + 0.25) < 1e-6 &&
                  std::fabs(c - 1.418939) < 1e-5 && t < 10.0;
  return {ok, fmt("uniform %.10f, arcsine %.1e, ", u, a) + fmt("semicircle %.10f, chi %.7f, ", s, c) + fmt("%.2f s", t)};
}

// Read literally: the pair sum against the full-plane integral.
Outcome regularized_convergence(std::string& note) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<long> ks = {100, 400, 1600};
  const auto r = regularized_product_series(uniform01(), 0.1, ks);
  const double t = seconds_since(start);
  const auto& full = r.targets.at(1);
  const bool ok = std::fabs(full.achieved_gap) < 1e-2 && full.abs_gaps_decreasing && t < 30.0;
  const auto& pair = r.primary();
  note = fmt("pair-normalized target (1/2) RegE = %.6f: gap at k=1600 %.5f, ", pair.value, pair.achieved_gap) +
         std::string("gaps decreasing ") + (pair.abs_gaps_decreasing ? "yes" : "no");
  return {ok, fmt("value at k=1600 %.6f vs RegE %.6f, ", r.values.back(), full.value) +
                  fmt("gap %.5f, ", full.achieved_gap) + fmt("%.2f s", t)};
}

Outcome offdiag_inequality() {
  const std::vector<long> ks = {100, 200, 400, 800};
  const auto s = offdiag_sum_series(half_atom_uniform(), ks);
  const double v = s.values.back();
  const double square = s.targets.at(0).value;
  const double literal = s.targets.at(1).value;
  const bool ok = v >= square - 0.05 || v >= literal - 0.05;
  return {ok, fmt("value at k=800 %.6f; ", v) + fmt("gap vs 2E %.5f, gap vs E %.5f", v - square, v - literal)};
}

Outcome counting_bound() {
  std::vector<SpectralMeasure> measures = {
      half_atom_uniform(), example42(), SpectralMeasure({0, 1}, {{0, 1}}, DiffusePart()),
      SpectralMeasure({0, 1}, {{0, 0.5}, {1, 0.5}}, DiffusePart())};
  std::mt19937_64 rng(7);
  MeasureOptions opt;
  opt.min_atoms = 1;
  opt.min_top_weight = 0.15;
  for (int i = 0; i < 30; ++i) measures.push_back(random_measure(rng, opt));
  double worst = INFINITY;
  int checks = 0;
  for (const auto& m : measures) {
    for (long k : {100L, 400L, 1000L}) {
      const auto c = sk_counting_check(m, build_B(m, k));
      ++checks;
      worst = std::min(worst, c.margin / (static_cast<double>(k) * k));
      if (!c.holds) return {false, "fails at k = " + std::to_string(k)};
    }
  }
  return {true, std::to_string(checks) + " checks, smallest margin / k^2 = " + fmt("%.4f", worst)};
}

Outcome ball_normalization() {
  const double v = log_ball_volume(200) / 40000.0 + 0.5 * std::log(200.0);
  const double target = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return {std::fabs(v - target) < 1e-3, fmt("value %.8f, gap %.2e", v, v - target)};
}

std::string run_to_string(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"freehaus"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str();
}

Outcome structural_invariants() {
  std::mt19937_64 rng(10);
  long failures = 0;
  long trials = 0;
  auto expect = [&](bool c) {
    if (!c) ++failures;
  };
  const auto dir = std::filesystem::temp_directory_path() / "freehaus_acceptance";
  std::filesystem::create_directories(dir);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_measure(rng);
    const long k = uniform_int(rng, 4, 400);
    const auto mat = materialize(m);
    ++trials;

    const auto a = build_A(m, k);
    long atoms = 0;
    for (const auto& x : a.atom_multiplicities) {
      expect(x.multiplicity == mass_count(x.weight, k));
      atoms += x.multiplicity;
    }
    expect(a.quantile_count == mass_count(mat.diffuse().mass(), k));
    expect(a.zero_count == k - a.quantile_count - atoms);
    const auto pa = pair_partition(a);
    expect(pa.s_count + pa.w_count == static_cast<std::int64_t>(k) * (k - 1) / 2);

    if (m.has_atoms()) {
      try {
        const auto b = build_B(m, k);
        long mult = 0;
        for (const auto& x : b.atom_multiplicities) mult += x.multiplicity;
        expect(mult + b.quantile_count + b.filler_count == k);
        expect(b.r_count <= 2 * b.n_k);
        const auto pb = pair_partition(b);
        expect(pb.s_count + pb.w_count == static_cast<std::int64_t>(k) * (k - 1) / 2);
      } catch (const InvalidMeasure&) {
        // k below the B_k threshold for this measure
      }
    }

    const auto doc = measure_to_json(m);
    expect(measure_to_json(measure_from_json(doc)).dump() == doc.dump());
    if (trial % 20 == 0) {
      const auto path = (dir / ("m" + std::to_string(trial) + ".json")).string();
      std::ofstream(path) << doc.dump();
      const std::vector<std::string> args = {"report", "--measure", path, "--tol", "1e-7"};
      const std::string first = run_to_string(args);
      expect(first == run_to_string(args));
      expect(first.rfind("0\n", 0) == 0);
    }
  }
  return {failures == 0, std::to_string(trials) + " random measures, " + std::to_string(failures) + " violations"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  };

  std::string note;
  report(1, "gamma product limit -log 4", gamma_limit);
  report(2, "Selberg closed form and Monte Carlo", selberg);
  report(3, "example42 dimension 2/3 and finite sandwich", example_dimension);
  report(4, "sandwich width identity", sandwich_width_identity);
  report(5, "energy oracles and chi", energy_oracles);
  report(6, "regularized product series vs full regularized energy", [&] { return regularized_convergence(note); });
  std::printf("       6 (info) %s\n", note.c_str());
  report(7, "off-diagonal sum inequality", offdiag_inequality);
  report(8, "counting bound 2#S_k + k <= (1 - alpha) k^2", counting_bound);
  report(9, "ball volume normalization", ball_normalization);
  report(10, "structural invariants and JSON determinism", structural_invariants);
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
