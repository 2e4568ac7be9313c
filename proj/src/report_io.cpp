#include "hyrelax/report_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hyrelax {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out.good()) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

void append_array(std::string& out, const char* key, const double* vals, int n) {
    out += "\"";
    out += key;
    out += "\":[";
    for (int i = 0; i < n; ++i) {
        if (i > 0) out += ",";
        out += fmt_double(vals[i]);
    }
    out += "]";
}

}  // namespace

void write_ndjson_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                             int snapshot_stride) {
    std::string out;
    const int cells = traj.grid.cells();
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const State& s = traj.states[k];
        const int step = std::min(static_cast<int>(k) * snapshot_stride, traj.n_steps);
        const int u_step = std::min(step, traj.n_steps - 1);
        out += "{\"t\":";
        out += fmt_double(s.t);
        out += ",";
        append_array(out, "sigma", s.sigma.values.data(), cells);
        out += ",";
        append_array(out, "v", s.v.values.data(), cells);
        out += ",";
        append_array(out, "w", s.w.values.data(), cells);
        out += ",";
        if (u_step >= 0)
            append_array(out, "u",
                         &traj.realized.values[static_cast<std::size_t>(u_step) * cells], cells);
        else
            append_array(out, "u", nullptr, 0);  // zero-step run
        out += "}\n";
    }
    write_text_file(path, out);
}

void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::string out =
        "step,t,sigma_dot_H,v_dot_H,w_dot_H,grad_v_H,grad_w_H,lap_v_H,lap_w_H,"
        "sigma_min,sigma_max,v_min,v_max,w_min,w_max,v_preclip_min,w_preclip_min\n";
    for (std::size_t k = 0; k < traj.diag.size(); ++k) {
        const StepDiagnostics& d = traj.diag[k];
        out += std::to_string(k + 1);
        for (double x : {d.t, d.sigma_dot_H, d.v_dot_H, d.w_dot_H, d.grad_v_H, d.grad_w_H,
                         d.lap_v_H, d.lap_w_H, d.sigma_min, d.sigma_max, d.v_min, d.v_max,
                         d.w_min, d.w_max, d.v_preclip_min, d.w_preclip_min}) {
            out += ",";
            out += fmt_double(x);
        }
        out += "\n";
    }
    write_text_file(path, out);
}

void write_plot_data_csv(const std::filesystem::path& path, const Trajectory& traj,
                         int snapshot_stride) {
    std::string out = "t,cell,x,y,variable,value\n";
    const int cells = traj.grid.cells();
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const State& s = traj.states[k];
        const int step = std::min(static_cast<int>(k) * snapshot_stride, traj.n_steps);
        const int u_step = std::min(step, traj.n_steps - 1);
        for (int c = 0; c < cells; ++c) {
            const auto p = traj.grid.cell_center(c);
            auto row = [&](const char* var, double val) {
                out += fmt_double(s.t);
                out += "," + std::to_string(c) + "," + fmt_double(p[0]) + "," + fmt_double(p[1]);
                out += ",";
                out += var;
                out += ",";
                out += fmt_double(val);
                out += "\n";
            };
            row("sigma", s.sigma[c]);
            row("v", s.v[c]);
            row("w", s.w[c]);
            if (u_step >= 0)
                row("u", traj.realized.values[static_cast<std::size_t>(u_step) * cells + c]);
        }
    }
    write_text_file(path, out);
}

void write_lipschitz_csv(const std::filesystem::path& path, const LipschitzReport& report) {
    std::string out = "pair_id,split,degenerate,t_star,state_dist_sq,control_int_sq,ratio\n";
    for (const auto& r : report.pairs) {
        out += std::to_string(r.pair_id);
        out += r.calibration ? ",calibration" : ",held-out";
        out += r.degenerate ? ",1" : ",0";
        out += "," + fmt_double(r.t_star) + "," + fmt_double(r.state_dist_sq) + "," +
               fmt_double(r.control_int_sq) + "," + fmt_double(r.ratio) + "\n";
    }
    write_text_file(path, out);
}

nlohmann::json lipschitz_summary(const LipschitzReport& report) {
    nlohmann::json j;
    j["C_emp"] = report.C_emp;
    j["held_out_checked"] = report.held_out_checked;
    j["held_out_pass"] = report.held_out_pass;
    j["pairs"] = report.pairs.size();
    j["pass"] = report.held_out_pass && report.held_out_checked > 0;
    return j;
}

void write_relaxation_csv(const std::filesystem::path& path, const RelaxationReport& report) {
    std::string out = "windows,weak_defect,defect_bound,distance\n";
    for (const auto& r : report.rows)
        out += std::to_string(r.windows) + "," + fmt_double(r.weak_defect) + "," +
               fmt_double(r.defect_bound) + "," + fmt_double(r.distance) + "\n";
    write_text_file(path, out);
}

nlohmann::json relaxation_summary(const RelaxationReport& report) {
    nlohmann::json j;
    j["reference_size"] = report.reference_size;
    j["tol_relax"] = report.tol_relax;
    j["monotone_ok"] = report.monotone_ok;
    j["terminal_ok"] = report.terminal_ok;
    j["defect_bound_ok"] = report.defect_bound_ok;
    j["spearman"] = report.spearman;
    j["final_ratio"] = report.final_ratio;
    j["pass"] = report.monotone_ok && report.terminal_ok && report.defect_bound_ok;
    return j;
}

nlohmann::json stop_recovery_summary(const StopRecoveryReport& report) {
    nlohmann::json j;
    j["sup_error"] = report.sup_error;
    j["loop_area_sim"] = report.loop_area_sim;
    j["loop_area_ref"] = report.loop_area_ref;
    j["area_rel_err"] = report.area_rel_err;
    j["closure_error"] = report.closure_error;
    j["attached"] = report.attached;
    return j;
}

void write_oracle_csv(const std::filesystem::path& path, const OracleAgreementReport& report) {
    std::string out = "preset,control_id,err_dt,err_dt_half\n";
    for (const auto& r : report.rows)
        out += r.preset_name + "," + std::to_string(r.control_id) + "," + fmt_double(r.err_dt) +
               "," + fmt_double(r.err_dt_half) + "\n";
    write_text_file(path, out);
}

nlohmann::json oracle_summary(const OracleAgreementReport& report) {
    nlohmann::json j;
    j["dt"] = report.dt;
    j["bound_ok"] = report.bound_ok;
    j["halving_ok"] = report.halving_ok;
    j["rows"] = report.rows.size();
    j["pass"] = report.bound_ok && report.halving_ok;
    return j;
}

void write_refinement_csv(const std::filesystem::path& path, const RefinementReport& report) {
    std::string out = "level,n,dt,diff_norm,order\n";
    for (const auto& r : report.rows)
        out += std::to_string(r.level) + "," + std::to_string(r.n) + "," + fmt_double(r.dt) +
               "," + fmt_double(r.diff_norm) + "," + fmt_double(r.order) + "\n";
    write_text_file(path, out);
}

nlohmann::json refinement_summary(const RefinementReport& report) {
    nlohmann::json j;
    j["mode"] = report.mode == RefineMode::spatial ? "spatial" : "temporal";
    j["observed_order"] = report.observed_order;
    j["levels"] = report.rows.size();
    return j;
}

void write_control_field_ndjson(const std::filesystem::path& path, const ControlField& cf) {
    std::string out;
    for (int s = 0; s < cf.n_steps; ++s) {
        out += "{\"step\":" + std::to_string(s) + ",\"t\":" + fmt_double(s * cf.dt) + ",\"idx\":[";
        for (int c = 0; c < cf.n_cells; ++c) {
            if (c > 0) out += ",";
            out += std::to_string(cf.at(s, c) + 1);  // 1-based on the wire
        }
        out += "]}\n";
    }
    write_text_file(path, out);
}

void write_relaxed_control_ndjson(const std::filesystem::path& path, const RelaxedControl& rc) {
    std::string out;
    for (int s = 0; s < rc.n_steps; ++s) {
        out += "{\"step\":" + std::to_string(s) + ",\"t\":" + fmt_double(s * rc.dt) +
               ",\"weights\":[";
        for (int c = 0; c < rc.n_cells; ++c) {
            if (c > 0) out += ",";
            out += "[";
            const double* lam = rc.at(s, c);
            for (int j = 0; j < rc.n_gen; ++j) {
                if (j > 0) out += ",";
                out += fmt_double(lam[j]);
            }
            out += "]";
        }
        out += "]}\n";
    }
    write_text_file(path, out);
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& resolved_config,
                    std::uint64_t seed, std::vector<std::string> artifacts) {
    std::sort(artifacts.begin(), artifacts.end());
    nlohmann::json j;
    j["config_sha"] = sha256_hex(resolved_config);
    j["seed"] = seed;
    j["artifact_list"] = artifacts;
    write_text_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace hyrelax
