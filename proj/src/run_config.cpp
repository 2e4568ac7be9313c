#include "hyrelax/run_config.hpp"

#include <fstream>

#include "hyrelax/experiments.hpp"

namespace hyrelax {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
void read_into(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: bad value for '" + where + "." + key +
                                    "': " + e.what());
    }
}

GridSpec grid_from_json(const json& j) {
    reject_unknown_keys(j, {"dim", "n", "extent"}, "grid");
    int dim = 1;
    std::vector<int> n{64};
    std::vector<double> extent;
    read_into(j, "dim", dim, "grid");
    read_into(j, "n", n, "grid");
    read_into(j, "extent", extent, "grid");
    if (extent.empty()) extent.assign(static_cast<std::size_t>(dim), 1.0);
    if (static_cast<int>(n.size()) != dim || static_cast<int>(extent.size()) != dim)
        throw std::invalid_argument("config: grid.n and grid.extent must have dim entries");
    if (dim == 1) return GridSpec::line(n[0], extent[0]);
    return GridSpec::rect(n[0], n[1], extent[0], extent[1]);
}

}  // namespace

RunConfig config_from_json(const json& j) {
    reject_unknown_keys(
        j, {"preset", "grid", "solver", "control", "experiment", "seed", "out", "plot_data"},
        "top level");
    RunConfig cfg;
    read_into(j, "preset", cfg.preset_name, "top level");
    if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        reject_unknown_keys(s, {"dt", "t_end", "snapshot_stride", "override_stability"},
                            "solver");
        read_into(s, "dt", cfg.solver.dt, "solver");
        read_into(s, "t_end", cfg.solver.t_end, "solver");
        read_into(s, "snapshot_stride", cfg.solver.snapshot_stride, "solver");
        read_into(s, "override_stability", cfg.solver.override_stability, "solver");
        if (!(cfg.solver.dt > 0.0))
            throw std::invalid_argument("config: solver.dt must be positive");
        if (!(cfg.solver.t_end >= 0.0))
            throw std::invalid_argument("config: solver.t_end must be nonnegative");
        if (cfg.solver.snapshot_stride < 1)
            throw std::invalid_argument("config: solver.snapshot_stride must be >= 1");
    }
    if (j.contains("control")) {
        const json& c = j.at("control");
        reject_unknown_keys(c, {"kind", "switches", "index", "weights"}, "control");
        std::string kind = "bang";
        read_into(c, "kind", kind, "control");
        if (kind == "bang")
            cfg.control.kind = ControlKind::bang;
        else if (kind == "constant")
            cfg.control.kind = ControlKind::constant;
        else if (kind == "relaxed")
            cfg.control.kind = ControlKind::relaxed;
        else
            throw std::invalid_argument("config: control.kind must be bang|constant|relaxed");
        read_into(c, "switches", cfg.control.switches, "control");
        read_into(c, "index", cfg.control.index, "control");
        read_into(c, "weights", cfg.control.weights, "control");
        if (cfg.control.switches < 0)
            throw std::invalid_argument("config: control.switches must be >= 0");
        if (cfg.control.index < 1)
            throw std::invalid_argument("config: control.index is 1-based");
    }
    if (j.contains("experiment")) {
        const json& e = j.at("experiment");
        reject_unknown_keys(e,
                            {"windows", "pairs", "grids", "controls_per_preset", "dt_fine",
                             "refine_levels", "refine_mode", "stop_amplitude", "stop_periods",
                             "stop_period", "tol_relax_fraction"},
                            "experiment");
        read_into(e, "windows", cfg.experiment.windows, "experiment");
        read_into(e, "pairs", cfg.experiment.pairs, "experiment");
        read_into(e, "grids", cfg.experiment.grids, "experiment");
        read_into(e, "controls_per_preset", cfg.experiment.controls_per_preset, "experiment");
        read_into(e, "dt_fine", cfg.experiment.dt_fine, "experiment");
        read_into(e, "refine_levels", cfg.experiment.refine_levels, "experiment");
        read_into(e, "refine_mode", cfg.experiment.refine_mode, "experiment");
        read_into(e, "stop_amplitude", cfg.experiment.stop_amplitude, "experiment");
        read_into(e, "stop_periods", cfg.experiment.stop_periods, "experiment");
        read_into(e, "stop_period", cfg.experiment.stop_period, "experiment");
        read_into(e, "tol_relax_fraction", cfg.experiment.tol_relax_fraction, "experiment");
        if (cfg.experiment.refine_mode != "spatial" && cfg.experiment.refine_mode != "temporal")
            throw std::invalid_argument("config: experiment.refine_mode must be spatial|temporal");
    }
    read_into(j, "seed", cfg.seed, "top level");
    read_into(j, "out", cfg.out_dir, "top level");
    read_into(j, "plot_data", cfg.plot_data, "top level");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: parse error in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

nlohmann::json RunConfig::resolved_json() const {
    json j;
    j["preset"] = preset_name;
    j["grid"]["dim"] = grid.dim;
    j["grid"]["n"] = grid.dim == 1 ? std::vector<int>{grid.n_cells[0]}
                                   : std::vector<int>{grid.n_cells[0], grid.n_cells[1]};
    j["grid"]["extent"] = grid.dim == 1 ? std::vector<double>{grid.extent[0]}
                                        : std::vector<double>{grid.extent[0], grid.extent[1]};
    j["solver"]["dt"] = solver.dt;
    j["solver"]["t_end"] = solver.t_end;
    j["solver"]["snapshot_stride"] = solver.snapshot_stride;
    j["solver"]["override_stability"] = solver.override_stability;
    switch (control.kind) {
        case ControlKind::bang:
            j["control"]["kind"] = "bang";
            break;
        case ControlKind::constant:
            j["control"]["kind"] = "constant";
            break;
        case ControlKind::relaxed:
            j["control"]["kind"] = "relaxed";
            break;
    }
    j["control"]["switches"] = control.switches;
    j["control"]["index"] = control.index;
    j["control"]["weights"] = control.weights;
    j["experiment"]["windows"] = experiment.windows;
    j["experiment"]["pairs"] = experiment.pairs;
    j["experiment"]["grids"] = experiment.grids;
    j["experiment"]["controls_per_preset"] = experiment.controls_per_preset;
    j["experiment"]["dt_fine"] = experiment.dt_fine;
    j["experiment"]["refine_levels"] = experiment.refine_levels;
    j["experiment"]["refine_mode"] = experiment.refine_mode;
    j["experiment"]["stop_amplitude"] = experiment.stop_amplitude;
    j["experiment"]["stop_periods"] = experiment.stop_periods;
    j["experiment"]["stop_period"] = experiment.stop_period;
    j["experiment"]["tol_relax_fraction"] = experiment.tol_relax_fraction;
    j["seed"] = seed;
    // the output directory is not part of the run's identity
    j["plot_data"] = plot_data;
    return j;
}

Preset resolve_preset(const RunConfig& cfg, int box_samples) {
    Preset p = preset(cfg.preset_name, cfg.grid);
    const ValidationReport report =
        validate_hypotheses(p.model, p.init, &p.controls, box_samples);
    if (!report.all_pass())
        throw std::runtime_error("config: hypothesis validation failed\n" + report.summary());
    return p;
}

ControlField build_bang_control(const RunConfig& cfg, const ControlSet& set, int n_steps,
                                int n_cells) {
    std::mt19937_64 rng(cfg.seed);
    ControlField cf;
    if (cfg.control.kind == ControlKind::constant) {
        if (cfg.control.index > set.count())
            throw std::invalid_argument("config: control.index exceeds generator count");
        cf.dt = cfg.solver.dt;
        cf.n_steps = n_steps;
        cf.n_cells = n_cells;
        cf.idx.assign(static_cast<std::size_t>(n_steps) * n_cells,
                      static_cast<std::uint16_t>(cfg.control.index - 1));
        return cf;
    }
    return random_bang_bang(set, n_steps, n_cells, cfg.solver.dt, rng);
}

RelaxedControl build_relaxed_control(const RunConfig& cfg, int n_steps, int n_cells) {
    return constant_relaxed(cfg.control.weights, n_steps, n_cells, cfg.solver.dt);
}

}  // namespace hyrelax
