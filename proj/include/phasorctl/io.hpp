#pragma once

// JSON and CSV serialisation of toolkit objects. JSON output is canonical:
// sorted keys and doubles printed with 17 significant digits, so identical
// inputs give byte-identical files.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "phasorctl/sim.hpp"

namespace phasorctl::io {

using json = nlohmann::json;

std::string dump(const json& j);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

json to_json(const PhasorConfig& c);
PhasorConfig config_from_json(const json& j);

/// {n, h, coeffs}: coeffs[k + h] is a list of n [re, im] pairs.
json to_json(const PhasorVector& x);
PhasorVector phasors_from_json(const json& j);

json to_json(const PhasorTrajectory& traj);
PhasorTrajectory trajectory_from_json(const json& j);

/// {n, m, h, period, blocks: [{k, re, im}]}, matrices as row lists.
json to_json(const ToeplitzOperator& op);
ToeplitzOperator toeplitz_from_json(const json& j);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);

json to_json(const BilinearAffineSystem& sys);
BilinearAffineSystem system_from_json(const json& j);

json to_json(const EquilibriumResult& r);
json to_json(const Metrics& m);

/// Controller bundle; import restores the time-domain representatives
/// without solving anything.
json to_json(const ForwardingController& c);
ForwardingController controller_from_json(const json& j);

/// Column 1 time, then one column per component (real signals only).
std::string signal_csv(const SampledSignal& s);
SampledSignal signal_from_csv(const std::string& text);

/// t, state components, s_pre, s_post, z_1..z_q.
std::string trace_csv(const SimTrace& trace);

}  // namespace phasorctl::io
