// Run configuration: a documented JSON schema with unknown-key rejection,
// resolved into a validated model + grid + solver + control recipe. The seed
// fixes every random choice a run makes.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyrelax/model.hpp"
#include "hyrelax/solver.hpp"

namespace hyrelax {

enum class ControlKind { bang, constant, relaxed };

struct ControlSpecCfg {
    ControlKind kind = ControlKind::bang;
    int switches = 8;                       // bang: random switch count
    int index = 1;                          // constant: 1-based generator index
    std::vector<double> weights{0.5, 0.5};  // relaxed: constant simplex weights
};

struct ExperimentCfg {
    std::vector<int> windows{5, 10, 20, 40, 80};
    int pairs = 20;
    std::vector<int> grids{32, 64};
    int controls_per_preset = 10;
    double dt_fine = 1e-6;
    int refine_levels = 4;
    std::string refine_mode = "spatial";
    double stop_amplitude = 0.8;
    int stop_periods = 2;
    double stop_period = 4.0;
    double tol_relax_fraction = 0.05;
};

struct RunConfig {
    std::string preset_name = "budworm";
    GridSpec grid = GridSpec::line(64);
    SolverConfig solver;
    ControlSpecCfg control;
    ExperimentCfg experiment;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool plot_data = false;

    // Normalized form with every default filled in; reloading it reproduces
    // the same resolved config byte for byte.
    nlohmann::json resolved_json() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Instantiates the preset on the configured grid and runs the hypothesis
// validators; throws with the failing clause on a bad configuration.
Preset resolve_preset(const RunConfig& cfg, int box_samples = 33);

// Deterministic control construction from the config and seed.
ControlField build_bang_control(const RunConfig& cfg, const ControlSet& set, int n_steps,
                                int n_cells);
RelaxedControl build_relaxed_control(const RunConfig& cfg, int n_steps, int n_cells);

}  // namespace hyrelax
