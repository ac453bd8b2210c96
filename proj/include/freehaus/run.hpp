#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace freehaus {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvalidMeasure = 2,
  kExitEnergy = 3,
  kExitNoSolution = 4,
};

enum class OutputFormat { json, csv, text };

struct RunConfig {
  // validate, energy, chi, dim, bounds, family-bounds, microstate, series,
  // selberg, report
  std::string command;
  // series: lemma41, regularized, offdiag, packing, ball
  std::string series;
  std::vector<std::string> measure_paths;
  std::optional<long> k;
  std::vector<long> ks;
  std::optional<double> eps;
  std::optional<double> t;
  std::optional<double> tol;
  std::optional<double> floor;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  // microstate: A or B
  std::optional<std::string> kind;
  std::optional<std::string> out_path;
  OutputFormat format = OutputFormat::json;
};

// Validates the knobs for the command, runs it and writes the report to
// out_path (or `out`). Diagnostics go to `err` as one line
// "freehaus: <category>: <reason>". Returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv with the command-line grammar and calls run().
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freehaus
