#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "epdecay/spectral_solver.hpp"

namespace epdecay {

/// Resolved solver configuration as JSON (echoed into manifests and
/// trajectory headers).
nlohmann::json to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SnapshotDiagnostics& d);

/// Self-describing binary container:
///   8-byte magic "EPDTRJ01", uint64 little-endian header length, UTF-8 JSON
///   header (grid, config, times, diagnostics, layout), then for every
///   snapshot 11 spectral fields (sigma_e, u_e, sigma_i, u_i, E) of
///   complex128 values in the grid's half-spectrum order.
void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);
/// Throws ConfigError on a malformed or truncated container.
Trajectory read_trajectory(const std::filesystem::path& path);

/// Diagnostics in long format with columns t, quantity, group, value.
void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& trajectory);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

}  // namespace epdecay
