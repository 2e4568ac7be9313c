// Artifact serialization: NDJSON trajectories, CSV diagnostics and reports,
// JSON summaries, and the run manifest. All numeric output goes through one
// round-trip-exact formatter so identical runs give identical bytes.
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hyrelax/experiments.hpp"
#include "hyrelax/solver.hpp"

namespace hyrelax {

// Shortest-exact double formatting (%.17g round-trips).
std::string fmt_double(double x);

std::string sha256_hex(const std::string& bytes);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// One record per snapshot: {"t": ..., "sigma": [...], "v": [...], "w": [...],
// "u": [...]} with u the control applied on the step starting at that time
// (the final record repeats the last applied control).
void write_ndjson_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                             int snapshot_stride);

void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& traj);

// Tidy long-format table (t, cell, x, y, variable, value) for external tools.
void write_plot_data_csv(const std::filesystem::path& path, const Trajectory& traj,
                         int snapshot_stride);

void write_lipschitz_csv(const std::filesystem::path& path, const LipschitzReport& report);
nlohmann::json lipschitz_summary(const LipschitzReport& report);

void write_relaxation_csv(const std::filesystem::path& path, const RelaxationReport& report);
nlohmann::json relaxation_summary(const RelaxationReport& report);

nlohmann::json stop_recovery_summary(const StopRecoveryReport& report);

void write_oracle_csv(const std::filesystem::path& path, const OracleAgreementReport& report);
nlohmann::json oracle_summary(const OracleAgreementReport& report);

void write_refinement_csv(const std::filesystem::path& path, const RefinementReport& report);
nlohmann::json refinement_summary(const RefinementReport& report);

// NDJSON serialization of control objects, one record per time step.
void write_control_field_ndjson(const std::filesystem::path& path, const ControlField& cf);
void write_relaxed_control_ndjson(const std::filesystem::path& path, const RelaxedControl& rc);

// manifest.json: {"config_sha": ..., "seed": ..., "artifact_list": [...]}.
void write_manifest(const std::filesystem::path& out_dir, const std::string& resolved_config,
                    std::uint64_t seed, std::vector<std::string> artifacts);

}  // namespace hyrelax
