#pragma once

#include <json.hpp>
#include <string>

#include "sgdlab/bounds.hpp"
#include "sgdlab/problem.hpp"
#include "sgdlab/schedule.hpp"

namespace sgdlab {

/// Instance document:
///   {"spectrum": {"kind": "poly|polylog|exp", "d": int, "param": float}
///              | {"kind": "explicit", "values": [...]},
///    "target": "ones|inv|inv_sq" | [...],
///    "w0": "zeros" | [...],
///    "sigma2": float, "alpha": float, "beta": float}
/// alpha and beta default to the Gaussian values 3 and 1. Errors are
/// ValidationError with a field path prefix such as "instance.spectrum.d".
ProblemInstance instance_from_json(const nlohmann::json& doc, const std::string& path = "instance");

/// {"variant": "constant|tail_geometric|tail_polynomial", "gamma0": float,
///  "N": int, "s": int, "K": int?, "a": float?}; a missing K on a
/// tail-geometric schedule means default_phase_length(N, s).
Schedule schedule_from_json(const nlohmann::json& doc, const std::string& path = "schedule");
nlohmann::json schedule_to_json(const Schedule& schedule);

/// Absent bounds serialize as null; flags go under "preconditions".
nlohmann::json bound_report_to_json(const BoundReport& report);

}  // namespace sgdlab
