// Command-line frontend: reproducible simulation and experiment runs with
// NDJSON/CSV artifacts and a manifest per output directory.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "hyrelax/report_io.hpp"
#include "hyrelax/run_config.hpp"

namespace fs = std::filesystem;
using namespace hyrelax;

namespace {

struct CommonFlags {
    std::string config_path;
    std::int64_t seed = -1;
    std::string out_dir;
    int grid_n = 0;
    double dt = 0.0;
    std::vector<int> windows;
    int pairs = 0;
    bool plot_data = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "path to a JSON run configuration");
    cmd->add_option("--seed", f.seed, "override the config seed");
    cmd->add_option("--out", f.out_dir, "override the output directory");
    cmd->add_option("--grid", f.grid_n, "override the 1-D cell count");
    cmd->add_option("--dt", f.dt, "override the time step");
}

RunConfig make_config(const CommonFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) cfg = load_config(f.config_path);
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.grid_n > 0) cfg.grid = GridSpec::line(f.grid_n, cfg.grid.extent[0]);
    if (f.dt > 0.0) cfg.solver.dt = f.dt;
    if (!f.windows.empty()) cfg.experiment.windows = f.windows;
    if (f.pairs > 0) cfg.experiment.pairs = f.pairs;
    if (f.plot_data) cfg.plot_data = true;
    return cfg;
}

// Every run directory carries the resolved config and a manifest of what
// was written.
struct RunDir {
    fs::path dir;
    std::string resolved;
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;

    explicit RunDir(const RunConfig& cfg) : dir(cfg.out_dir), seed(cfg.seed) {
        fs::create_directories(dir);
        resolved = cfg.resolved_json().dump(2) + "\n";
        write_text_file(dir / "resolved_config.json", resolved);
        artifacts.push_back("resolved_config.json");
    }
    fs::path file(const std::string& name) {
        artifacts.push_back(name);
        return dir / name;
    }
    void finish() { write_manifest(dir, resolved, seed, artifacts); }
};

int cmd_validate(const CommonFlags& f) {
    const int box = 64;
    bool all_ok = true;
    std::vector<std::string> names = preset_names();
    if (!f.config_path.empty()) names = {make_config(f).preset_name};
    for (const auto& name : names) {
        const GridSpec grid = GridSpec::line(64);
        Preset p = preset(name, grid);
        const ValidationReport report = validate_hypotheses(p.model, p.init, &p.controls, box);
        std::cout << "preset '" << name << "' (box_samples=" << box << "):\n"
                  << report.summary();
        all_ok = all_ok && report.all_pass();
    }
    return all_ok ? 0 : 1;
}

int cmd_simulate(const CommonFlags& f) {
    RunConfig cfg = make_config(f);
    Preset p = resolve_preset(cfg);
    RunDir run(cfg);

    const int n_steps = cfg.solver.steps();
    Trajectory traj;
    if (cfg.control.kind == ControlKind::relaxed) {
        const RelaxedControl rc = build_relaxed_control(cfg, n_steps, cfg.grid.cells());
        write_relaxed_control_ndjson(run.file("control.ndjson"), rc);
        traj = simulate(p.model, p.init, p.controls, &rc, cfg.solver);
    } else {
        const ControlField cf = build_bang_control(cfg, p.controls, n_steps, cfg.grid.cells());
        write_control_field_ndjson(run.file("control.ndjson"), cf);
        traj = simulate(p.model, p.init, p.controls, &cf, cfg.solver);
    }
    write_ndjson_trajectory(run.file("trajectory.ndjson"), traj, cfg.solver.snapshot_stride);
    write_diagnostics_csv(run.file("diagnostics.csv"), traj);
    if (cfg.plot_data)
        write_plot_data_csv(run.file("plot_data.csv"), traj, cfg.solver.snapshot_stride);

    const ReactionSups sups = reaction_sups(p.model);
    nlohmann::json j;
    j["steps"] = traj.n_steps;
    j["energy_lhs"] = traj.energy_lhs();
    j["energy_rhs"] = traj.energy_rhs(p.controls.m_bound, sups);
    j["energy_ok"] = traj.energy_lhs() <= traj.energy_rhs(p.controls.m_bound, sups) + 1e-12;
    write_text_file(run.file("run_summary.json"), j.dump(2) + "\n");
    run.finish();
    std::cout << "simulate: " << traj.n_steps << " steps -> " << run.dir.string() << "\n";
    return j["energy_ok"].get<bool>() ? 0 : 1;
}

int cmd_relax(const CommonFlags& f) {
    RunConfig cfg = make_config(f);
    Preset p = resolve_preset(cfg);
    RunDir run(cfg);

    const int n_steps = cfg.solver.steps();
    const RelaxedControl rc = build_relaxed_control(cfg, n_steps, cfg.grid.cells());
    const RelaxationReport report =
        relaxation_run(p.model, p.init, p.controls, rc, cfg.experiment.windows, cfg.solver,
                       cfg.experiment.tol_relax_fraction);
    write_relaxation_csv(run.file("relaxation.csv"), report);
    const nlohmann::json j = relaxation_summary(report);
    write_text_file(run.file("relaxation_summary.json"), j.dump(2) + "\n");
    run.finish();
    std::cout << "relax: final_ratio=" << report.final_ratio
              << " pass=" << (j["pass"].get<bool>() ? "yes" : "no") << "\n";
    return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_lipschitz(const CommonFlags& f) {
    RunConfig cfg = make_config(f);
    Preset p = resolve_preset(cfg);
    RunDir run(cfg);

    const int n_steps = cfg.solver.steps();
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::pair<ControlField, ControlField>> pairs;
    for (int k = 0; k < cfg.experiment.pairs; ++k)
        pairs.emplace_back(random_bang_bang(p.controls, n_steps, cfg.grid.cells(), cfg.solver.dt, rng),
                           random_bang_bang(p.controls, n_steps, cfg.grid.cells(), cfg.solver.dt, rng));
    const LipschitzReport report =
        lipschitz_check(p.model, p.init, p.controls, pairs, cfg.solver);
    write_lipschitz_csv(run.file("lipschitz.csv"), report);
    const nlohmann::json j = lipschitz_summary(report);
    write_text_file(run.file("lipschitz_summary.json"), j.dump(2) + "\n");
    run.finish();
    std::cout << "lipschitz: C_emp=" << report.C_emp
              << " held_out_pass=" << (report.held_out_pass ? "yes" : "no") << "\n";
    return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_stop_test(const CommonFlags& f) {
    RunConfig cfg = make_config(f);
    cfg.preset_name = "stop-test";
    RunDir run(cfg);

    StopRecoveryConfig scfg;
    scfg.dt = cfg.solver.dt;
    scfg.amplitude = cfg.experiment.stop_amplitude;
    scfg.periods = cfg.experiment.stop_periods;
    scfg.period = cfg.experiment.stop_period;
    const StopRecoveryReport report = stop_recovery(scfg);
    const nlohmann::json j = stop_recovery_summary(report);
    write_text_file(run.file("stop_test_summary.json"), j.dump(2) + "\n");
    run.finish();
    std::cout << "stop-test: area_rel_err=" << report.area_rel_err
              << " closure=" << report.closure_error << "\n";
    return (report.area_rel_err < 0.02 && report.closure_error < 1e-3) ? 0 : 1;
}

int cmd_oracle(const CommonFlags& f) {
    RunConfig cfg = make_config(f);
    RunDir run(cfg);
    const OracleAgreementReport report =
        oracle_agreement(preset_names(), cfg.experiment.controls_per_preset, cfg.solver.dt,
                         cfg.solver.t_end, cfg.experiment.dt_fine, cfg.seed);
    write_oracle_csv(run.file("oracle.csv"), report);
    const nlohmann::json j = oracle_summary(report);
    write_text_file(run.file("oracle_summary.json"), j.dump(2) + "\n");
    run.finish();
    std::cout << "oracle: bound_ok=" << (report.bound_ok ? "yes" : "no")
              << " halving_ok=" << (report.halving_ok ? "yes" : "no") << "\n";
    return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_refine(const CommonFlags& f) {
    RunConfig cfg = make_config(f);
    Preset p = resolve_preset(cfg);
    RunDir run(cfg);

    const RefineMode mode = cfg.experiment.refine_mode == "temporal" ? RefineMode::temporal
                                                                     : RefineMode::spatial;
    const std::string preset_name = cfg.preset_name;
    InitBuilder builder = [preset_name](const GridSpec& g) {
        return preset(preset_name, g).init;
    };
    const RefinementReport report = grid_refinement_report(
        p.model, builder, p.controls, cfg.control.index - 1, mode, cfg.grid.n_cells[0],
        cfg.solver.dt, cfg.solver.t_end, cfg.experiment.refine_levels);
    write_refinement_csv(run.file("refine.csv"), report);
    const nlohmann::json j = refinement_summary(report);
    write_text_file(run.file("refine_summary.json"), j.dump(2) + "\n");
    run.finish();
    std::cout << "refine: mode=" << cfg.experiment.refine_mode
              << " observed_order=" << report.observed_order << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hysteretic vegetation-prey-predator control laboratory"};
    app.require_subcommand(1);

    CommonFlags f;
    auto* validate = app.add_subcommand("validate", "run hypothesis validators on the presets");
    add_common(validate, f);
    auto* sim = app.add_subcommand("simulate", "simulate one run and write trajectory artifacts");
    add_common(sim, f);
    sim->add_flag("--plot-data", f.plot_data, "emit tidy long-format CSV");
    auto* relax = app.add_subcommand("relax", "chattering relaxation experiment");
    add_common(relax, f);
    relax->add_option("--windows", f.windows, "window counts N for the chattering sweep");
    auto* lip = app.add_subcommand("lipschitz", "empirical control-to-state Lipschitz check");
    add_common(lip, f);
    lip->add_option("--pairs", f.pairs, "number of random control pairs");
    auto* stop = app.add_subcommand("stop-test", "scalar stop operator recovery");
    add_common(stop, f);
    auto* oracle = app.add_subcommand("oracle", "single-cell solver vs reference integrator");
    add_common(oracle, f);
    auto* refine = app.add_subcommand("refine", "grid/time refinement consistency orders");
    add_common(refine, f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(f);
        if (sim->parsed()) return cmd_simulate(f);
        if (relax->parsed()) return cmd_relax(f);
        if (lip->parsed()) return cmd_lipschitz(f);
        if (stop->parsed()) return cmd_stop_test(f);
        if (oracle->parsed()) return cmd_oracle(f);
        if (refine->parsed()) return cmd_refine(f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
