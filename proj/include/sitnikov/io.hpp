#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "sitnikov/connection.hpp"
#include "sitnikov/periodic.hpp"
#include "sitnikov/verify.hpp"

namespace sitnikov::io {

using json = nlohmann::ordered_json;

json to_json(const Grid& grid);
Grid grid_from_json(const json& j);

json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& j);

json to_json(const ConnectionSpec& spec);
ConnectionSpec connection_spec_from_json(const json& j);

json to_json(const PeriodicOrbit& orbit);
PeriodicOrbit periodic_orbit_from_json(const json& j);

/// One self-contained document: spec, both periodic ends, and the orbit.
json to_json(const ConnectionProblem& problem, const ConnectingOrbit& orbit);
std::pair<ConnectionProblem, ConnectingOrbit> connection_from_json(const json& j);

json to_json(const VerificationReport& report);

/// Temp file in the target directory, then rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// CSV rows (t, y), one per node.
std::string trajectory_csv(const Trajectory& traj);

/// CSV rows (t, x, xdot); the xdot field is empty at integer t (collision).
std::string sample_x_csv(const KeplerDrive& drive, double t_from, double t_to, double step);

/// Static plot of (t, y) with the +-x(t) drive envelope.
std::string svg_periodic(const KeplerDrive& drive, const PeriodicOrbit& orbit);

/// Connecting orbit overlaid on both periodic-orbit extensions.
std::string svg_connection(const KeplerDrive& drive, const ConnectionProblem& problem,
                           const ConnectingOrbit& orbit);

}  // namespace sitnikov::io
