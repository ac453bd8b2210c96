#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "freehaus/spectral_measure.hpp"

namespace freehaus {

// Measure specification files are JSON objects:
//
//   {
//     "support": [a, b],
//     "atoms": [{"location": r, "weight": c}, ...],            (optional)
//     "diffuse": {"kind": "uniform", "mass": c,                 (optional)
//                 "params": {"lo": 0, "hi": 1}},
//     "atom_family": {"name": "example42", "tol": 1e-10}        (optional)
//   }
//
// diffuse.params by kind:
//   uniform, arcsine       {"lo": x, "hi": y}
//   semicircle             {"center": x, "radius": r}
//   piecewise_linear_cdf   {"knots": [[x0, 0], [x1, F1], ..., [xm, mass]]}
//   empty                  {} (or omitted)
//
// Parse errors throw InvalidMeasure with a message that starts with the JSON
// key path of the offending value, e.g. "$.diffuse.params.lo: expected number".
SpectralMeasure measure_from_json(const nlohmann::json& doc);
nlohmann::json measure_to_json(const SpectralMeasure& measure);

SpectralMeasure parse_measure(const std::string& text);
SpectralMeasure load_measure(const std::filesystem::path& path);

}  // namespace freehaus
