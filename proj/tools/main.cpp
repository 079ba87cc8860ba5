// Batch front-end: single-point analysis, parameter sweeps, Evans and
// discriminant scans, modulation eigenvalues, randomized validation, and the
// benchmark-case reproduction harness.
//
// Exit codes: 0 success, 1 usage error, 2 infeasible configuration,
// 3 validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "wavestab/cases.hpp"
#include "wavestab/drivers.hpp"

namespace fs = std::filesystem;
using namespace wavestab;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

RunConfig load_config(const std::string& path) { return parse_config_file(path); }

int run_analyze(const std::string& config_path, const std::string& out_dir) {
    const RunConfig cfg = load_config(config_path);
    const std::string json = analyze_point_json(cfg);
    std::cout << json;
    if (!out_dir.empty()) write_file(fs::path(out_dir) / "analyze.json", json);
    return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_dir, int workers) {
    const RunConfig cfg = load_config(config_path);
    const SweepResult result = run_sweep(cfg, workers);
    const std::string base = cfg.model_name;
    if (cfg.emit_csv) write_file(fs::path(out_dir) / (base + ".csv"), sweep_csv(result));
    if (cfg.emit_json)
        write_file(fs::path(out_dir) / (base + ".json"), sweep_summary_json(cfg, result, base));
    if (cfg.emit_gnuplot)
        write_file(fs::path(out_dir) / (base + ".gp"), sweep_gnuplot(result, base + ".csv", base));
    std::cout << "rows: " << result.rows.size() << ", skipped: " << result.skipped.size()
              << ", written to " << out_dir << "\n";
    for (const auto& s : result.skipped) std::cerr << "skipped " << s << "\n";
    return 0;
}

int run_evans_cmd(const std::string& config_path, const std::string& out_dir) {
    const RunConfig cfg = load_config(config_path);
    const EvansRun run = run_evans(cfg);
    write_file(fs::path(out_dir) / "evans.csv", evans_csv(run.scan));
    std::printf("leading power r^%d, fit coefficient %.6g vs det Hess %.6g (rel err %.3g)\n",
                run.scan.leading_power, run.scan.fit_coeff, run.det_hess_reference,
                run.fit_rel_error);
    std::printf("tail sign %d, sign changes %d, T(0) residual %.3g, T'(0) %.6g "
                "(Upsilon_mu %.6g)\n",
                run.scan.tail_sign, run.scan.sign_changes, run.discriminant.T0_residual,
                run.discriminant.Tp0, run.theta_mu_mu);
    return 0;
}

int run_modulate_cmd(const std::string& config_path, const std::string& out_dir, int workers) {
    const RunConfig cfg = load_config(config_path);
    write_file(fs::path(out_dir) / "modulation.csv", modulate_csv(cfg, workers));
    std::cout << "modulation eigenvalues written to " << out_dir << "/modulation.csv\n";
    return 0;
}

int run_validate_cmd(std::uint64_t seed, int n_points, bool with_evans,
                     const std::vector<std::string>& models) {
    ValidationOptions opts;
    opts.n_points = n_points;
    opts.with_evans = with_evans;
    opts.models = models;
    const ValidationReport rep = validate(seed, opts);
    std::cout << rep.to_text();
    return rep.ok() ? 0 : 3;
}

int run_reproduce_cmd(const std::string& name, const std::string& out_dir, int workers) {
    const SweepResult result = reproduce_case(name, out_dir, workers);
    std::cout << name << ": " << result.rows.size() << " rows ("
              << result.skipped.size() << " skipped) -> " << out_dir << "/" << name
              << ".{csv,json,gp}\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"co-periodic stability of periodic traveling waves via action Hessians"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", case_name;
    int workers = 1, n_points = 20;
    std::uint64_t seed = 1;
    bool with_evans = false;
    std::vector<std::string> models;

    auto* analyze = app.add_subcommand("analyze", "single-point stability report (JSON)");
    analyze->add_option("--config", config_path, "run config file")->required();
    analyze->add_option("--out", out_dir, "output directory (optional)");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep with CSV/JSON/gnuplot output");
    sweep->add_option("--config", config_path, "run config file")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--workers", workers, "worker threads");

    auto* evans = app.add_subcommand("evans", "Evans-function scan + Sturm discriminant");
    evans->add_option("--config", config_path, "run config file")->required();
    evans->add_option("--out", out_dir, "output directory");

    auto* modulate = app.add_subcommand("modulate", "modulation (Whitham) eigenvalues along a sweep");
    modulate->add_option("--config", config_path, "run config file")->required();
    modulate->add_option("--out", out_dir, "output directory");
    modulate->add_option("--workers", workers, "worker threads");

    auto* validate_cmd = app.add_subcommand("validate", "randomized identity and cross-pipeline checks");
    validate_cmd->add_option("--seed", seed, "RNG seed");
    validate_cmd->add_option("--points", n_points, "feasible points per model");
    validate_cmd->add_flag("--with-evans", with_evans, "include the Evans cross-check");
    validate_cmd->add_option("--model", models, "restrict to named models (repeatable)");

    auto* reproduce = app.add_subcommand("reproduce", "rerun a benchmark case end to end");
    reproduce->add_option("case", case_name,
                          "kdv | mkdv-focusing | mkdv-defocusing | gkdv4 | nls | boussinesq | perfect-gas")
        ->required();
    reproduce->add_option("--out", out_dir, "output directory");
    reproduce->add_option("--workers", workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(analyze)) return run_analyze(config_path, out_dir);
        if (app.got_subcommand(sweep)) return run_sweep_cmd(config_path, out_dir, workers);
        if (app.got_subcommand(evans)) return run_evans_cmd(config_path, out_dir);
        if (app.got_subcommand(modulate)) return run_modulate_cmd(config_path, out_dir, workers);
        if (app.got_subcommand(validate_cmd))
            return run_validate_cmd(seed, n_points, with_evans, models);
        if (app.got_subcommand(reproduce)) return run_reproduce_cmd(case_name, out_dir, workers);
    } catch (const ConfigError& e) {
        std::cerr << "config error (line " << e.line << "): " << e.what() << "\n";
        return 1;
    } catch (const NoWellError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const NoOscillationError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const AboveBarrierError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
