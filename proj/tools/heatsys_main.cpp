// Command-line front end: ode | bounds | classify | pde | verify.
//
// Exit codes: 0 success, 1 invariant failure, 2 validation error,
// 3 inconclusive/unsupported.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "heatsys/config.hpp"
#include "heatsys/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using heatsys::config::ExperimentConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInconclusive = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
};

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg = args.config_path.empty()
                               ? heatsys::config::parse(heatsys::config::default_config_json())
                               : heatsys::config::parse_file(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (args.workers > 0) cfg.workers = args.workers;
#ifdef _OPENMP
    if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif
    return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

json base_report(const ExperimentConfig& cfg) {
    json rep;
    rep["config"] = json::parse(cfg.resolved_json);
    rep["seed"] = cfg.seed;
    return rep;
}

json verdict_to_json(const heatsys::bounds::Verdict& v) {
    using K = heatsys::bounds::Verdict::Kind;
    json j;
    j["component"] = v.component;
    j["case"] = v.case_label;
    switch (v.kind) {
        case K::UpperBound: j["kind"] = "UpperBound"; break;
        case K::GlobalCertificate: j["kind"] = "GlobalCertificate"; break;
        case K::BlowUpCertificate: j["kind"] = "BlowUpCertificate"; break;
        case K::Inconclusive: j["kind"] = "Inconclusive"; break;
        case K::HypothesisUnverified: j["kind"] = "HypothesisUnverified"; break;
    }
    if (std::isfinite(v.tau_bar)) j["tau_bar"] = v.tau_bar;
    if (!v.reason.empty()) j["reason"] = v.reason;
    j["audit"] = v.audit;
    return j;
}

int cmd_ode(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    const auto prob = cfg.companion_problem();

    heatsys::companion::SolveControls controls;
    controls.rel_tol = cfg.ode.rel_tol;
    controls.escape_threshold = cfg.ode.escape_threshold;
    heatsys::companion::BracketOptions opts;
    opts.horizon = cfg.ode.horizon;
    opts.controls = controls;
    const auto bracket = heatsys::bounds::bracket_or_global(prob, opts);

    const auto traj = heatsys::companion::solve(
        prob, std::min(cfg.ode.t_end, cfg.ode.horizon), controls);
    std::filesystem::create_directories(args.out_dir);
    {
        std::ofstream csv(std::filesystem::path(args.out_dir) / "trajectory.csv");
        heatsys::companion::write_csv(traj, csv);
    }

    json rep = base_report(cfg);
    using BK = heatsys::companion::BracketResult::Kind;
    switch (bracket.kind) {
        case BK::Bracket:
            rep["status"] = "BlowUp";
            rep["bracket"] = {bracket.t_lo, bracket.t_hi};
            break;
        case BK::Global:
            rep["status"] = "Global";
            rep["horizon"] = bracket.horizon;
            break;
        case BK::Inconclusive:
            rep["status"] = "Inconclusive";
            rep["horizon"] = bracket.horizon;
            break;
    }
    rep["y_final"] = {bracket.y_final[0], bracket.y_final[1]};
    if (!bracket.note.empty()) rep["note"] = bracket.note;
    const std::string text = rep.dump(2) + "\n";
    write_text(std::filesystem::path(args.out_dir) / "ode_report.json", text);
    std::cout << text;
    return bracket.kind == BK::Inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_bounds(const CommonArgs& args, bool with_simulation_audit) {
    ExperimentConfig cfg = load_config(args);
    const auto prob = cfg.companion_problem();
    const auto report = heatsys::bounds::analyze(prob, cfg.case_override);

    json rep = base_report(cfg);
    switch (report.case_info.label) {
        case heatsys::bounds::Case::A: rep["case"] = "a"; break;
        case heatsys::bounds::Case::B: rep["case"] = "b"; break;
        case heatsys::bounds::Case::C: rep["case"] = "c"; break;
        case heatsys::bounds::Case::Unsupported: rep["case"] = "unsupported"; break;
    }
    rep["a"] = {report.case_info.a1, report.case_info.a2};
    rep["verdicts"] = json::array();
    for (const auto& v : report.verdicts) rep["verdicts"].push_back(verdict_to_json(v));
    if (report.system_upper_bound) rep["system_upper_bound"] = *report.system_upper_bound;
    if (report.classifier)
        rep["classifier"] =
            *report.classifier == heatsys::bounds::ClassifierVerdict::BlowUp ? "BlowUp"
                                                                           : "NotCovered";
    if (with_simulation_audit) {
        heatsys::companion::BracketOptions opts;
        opts.horizon = cfg.ode.horizon;
        const auto bracket = heatsys::bounds::bracket_or_global(prob, opts);
        if (bracket.kind == heatsys::companion::BracketResult::Kind::Bracket)
            rep["simulation_bracket"] = {bracket.t_lo, bracket.t_hi};
        else
            rep["simulation_bracket"] = nullptr;
    }

    std::filesystem::create_directories(args.out_dir);
    const std::string text = rep.dump(2) + "\n";
    write_text(std::filesystem::path(args.out_dir) / "bounds_report.json", text);
    std::cout << text;
    return report.case_info.label == heatsys::bounds::Case::Unsupported ? kExitInconclusive
                                                                        : kExitOk;
}

int cmd_classify(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    json rep = base_report(cfg);
    if (!cfg.h1.is_constant() || !cfg.h2.is_constant()) {
        std::cerr << "classify: requires constant h1 and h2\n";
        return kExitValidation;
    }
    const auto verdict = heatsys::bounds::classify_constant_coefficients(cfg.exponents);
    rep["classifier"] =
        verdict == heatsys::bounds::ClassifierVerdict::BlowUp ? "BlowUp" : "NotCovered";
    const auto& e = cfg.exponents;
    rep["determinant"] = (e.p11 - 1.0) * (e.p22 - 1.0) - e.p12 * e.p21;
    std::filesystem::create_directories(args.out_dir);
    const std::string text = rep.dump(2) + "\n";
    write_text(std::filesystem::path(args.out_dir) / "classify_report.json", text);
    std::cout << text;
    return kExitOk;
}

int cmd_pde(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    heatsys::pde::Simulator sim(cfg.pde_config());
    const auto run = sim.run();

    std::filesystem::create_directories(args.out_dir);
    {
        std::ofstream csv(std::filesystem::path(args.out_dir) / "snapshots.csv");
        heatsys::pde::write_snapshot_csv(run, csv);
    }
    {
        std::ofstream dump(std::filesystem::path(args.out_dir) / "final_fields.csv");
        heatsys::pde::write_field_dump(run.grid, run.last_stable_fields, dump);
    }

    json rep = base_report(cfg);
    rep["grid"] = {{"dim", run.grid.dim}, {"n", run.grid.n}, {"L", run.grid.half_length}};
    rep["steps"] = run.steps_taken;
    switch (run.status) {
        case heatsys::pde::SimulationRun::Status::Completed:
            rep["status"] = "Completed";
            break;
        case heatsys::pde::SimulationRun::Status::BlowUpDetected: {
            rep["status"] = "BlowUpDetected";
            rep["last_stable_time"] = run.last_stable_time;
            const auto space = heatsys::pde::space_infinity_report(run);
            json js;
            js["radii"] = space.radii;
            js["interior_max"] = {space.interior_max[0], space.interior_max[1]};
            js["far_value"] = {space.far_value[0], space.far_value[1]};
            js["snapshot_times"] = space.snapshot_times;
            js["center_over_far"] = {space.center_over_far[0], space.center_over_far[1]};
            js["ratio_nonincreasing"] = {space.ratio_nonincreasing[0],
                                         space.ratio_nonincreasing[1]};
            js["caveat"] = space.caveat;
            rep["space_infinity"] = js;
            break;
        }
        case heatsys::pde::SimulationRun::Status::BudgetExceeded:
            rep["status"] = "BudgetExceeded";
            break;
    }
    const std::string text = rep.dump(2) + "\n";
    write_text(std::filesystem::path(args.out_dir) / "pde_report.json", text);
    std::cout << text;
    return kExitOk;
}

int cmd_verify(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    const auto results = heatsys::verify::run_suite(cfg);

    json rep = base_report(cfg);
    rep["checks"] = json::array();
    bool all_pass = true;
    std::printf("%-22s %-6s %s\n", "check", "result", "detail");
    for (const auto& r : results) {
        std::printf("%-22s %-6s %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
        rep["checks"].push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all_pass = all_pass && r.pass;
    }
    rep["all_pass"] = all_pass;
    std::filesystem::create_directories(args.out_dir);
    write_text(std::filesystem::path(args.out_dir) / "verify_report.json", rep.dump(2) + "\n");
    return all_pass ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled semilinear heat system laboratory"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "experiment config (JSON)");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", args.seed, "override the config seed")
            ->each([&](const std::string&) { args.seed_set = true; });
        sub->add_option("--workers", args.workers, "worker threads (0 = default)");
    };

    auto* ode = app.add_subcommand("ode", "companion system trajectory and blow-up bracket");
    auto* bounds_cmd = app.add_subcommand("bounds", "blow-up / global-existence verdicts");
    auto* classify = app.add_subcommand("classify", "constant-coefficient blow-up classifier");
    auto* pde_cmd = app.add_subcommand("pde", "spectral splitting simulation");
    auto* verify_cmd = app.add_subcommand("verify", "invariant suite (exit 0 iff all pass)");
    bool audit = false;
    bounds_cmd->add_flag("--audit", audit, "also run the simulation bracket for comparison");
    for (auto* sub : {ode, bounds_cmd, classify, pde_cmd, verify_cmd}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ode->parsed()) return cmd_ode(args);
        if (bounds_cmd->parsed()) return cmd_bounds(args, audit);
        if (classify->parsed()) return cmd_classify(args);
        if (pde_cmd->parsed()) return cmd_pde(args);
        if (verify_cmd->parsed()) return cmd_verify(args);
    } catch (const heatsys::config::ValidationError& e) {
        std::cerr << "config validation failed:\n" << e.what();
        return kExitValidation;
    } catch (const heatsys::expr::ParseError& e) {
        std::cerr << "parse error at byte " << e.offset << ": " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}
