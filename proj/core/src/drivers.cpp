#include "wavestab/drivers.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wavestab/cases.hpp"

namespace wavestab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class F>
void parallel_for(int n, int workers, F f) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
        });
    for (auto& t : pool) t.join();
}

std::vector<double> sweep_values(const RunConfig& cfg) {
    std::vector<double> v(static_cast<std::size_t>(cfg.sweep_count));
    const int n = cfg.sweep_count;
    if (n == 1) {
        v[0] = cfg.sweep_min;
        return v;
    }
    if (cfg.sweep_log) {
        const double a = cfg.sweep_min - cfg.sweep_log_floor;
        const double b = cfg.sweep_max - cfg.sweep_log_floor;
        const double q = std::log(b / a) / (n - 1);
        for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] = cfg.sweep_log_floor + a * std::exp(q * i);
    } else {
        for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] =
                cfg.sweep_min + (cfg.sweep_max - cfg.sweep_min) * i / (n - 1);
    }
    return v;
}

void apply_sweep_value(RunConfig& cfg, double value) {
    const std::string& var = *cfg.sweep_variable;
    if (cfg.kind == ParamKind::QKdV) {
        if (var == "mu") cfg.q.mu = value;
        else if (var == "lambda") cfg.q.lambda = value;
        else cfg.q.c = value;
    } else {
        if (var == "mu") cfg.ek.mu = value;
        else if (var == "lambda") cfg.ek.lambda = value;
        else if (var == "j") cfg.ek.j = value;
        else cfg.ek.sigma = value;
    }
}

std::string join_matched(const std::vector<std::string>& m) {
    std::string out;
    for (const auto& s : m) {
        if (!out.empty()) out += "+";
        out += s;
    }
    return out.empty() ? "-" : out;
}

SweepRow row_from_qkdv(double value, const ActionJet3& jet, const StabilityReport& rep) {
    SweepRow row;
    row.sweep_value = value;
    row.period = jet.integrals.period;
    row.action = jet.value;
    row.minors = rep.minors;
    row.n_neg = rep.sig_hess.n_neg;
    row.n_zero = rep.sig_hess.n_zero;
    row.spectral = to_string(rep.spectral);
    row.orbital = to_string(rep.orbital);
    row.matched = join_matched(rep.matched_conditions);
    row.stability_index = rep.stability_index;
    row.condition_number = rep.condition_number;
    row.asym_residual = jet.asym_residual;
    row.limit_zone = rep.limit_zone || jet.limit_zone;
    row.residuals = rep.identity_residuals;
    return row;
}

SweepRow row_from_ek(double value, const ActionJet4& jet, const StabilityReport& rep) {
    SweepRow row;
    row.sweep_value = value;
    row.period = jet.underlying.integrals.period;
    row.action = jet.value;
    row.minors = rep.minors;
    row.n_neg = rep.sig_hess.n_neg;
    row.n_zero = rep.sig_hess.n_zero;
    row.spectral = to_string(rep.spectral);
    row.orbital_ekl = to_string(rep.orbital_ekl);
    row.orbital_eke = to_string(rep.orbital_eke);
    row.matched = join_matched(rep.matched_conditions);
    row.stability_index = rep.stability_index;
    row.condition_number = rep.condition_number;
    row.asym_residual = jet.underlying.asym_residual;
    row.limit_zone = rep.limit_zone || jet.limit_zone;
    row.residuals = rep.identity_residuals;
    row.residuals["Theta_mumu"] = jet.hess(0, 0); // figures track it separately
    return row;
}

std::vector<std::string> columns_for(ParamKind kind, const std::string& sweep_name) {
    if (kind == ParamKind::QKdV)
        return {sweep_name, "period", "action", "m1", "m2", "m3", "n_neg", "n_zero",
                "spectral", "orbital", "matched", "stability_index", "condition_number",
                "asym_residual", "limit_zone", "detActionC", "cauchy_schwarz_margin"};
    return {sweep_name, "period", "action", "M1", "M2", "M3", "M4", "Theta_mumu",
            "n_neg", "n_zero", "spectral", "orbital_ekl", "orbital_eke", "matched",
            "stability_index", "condition_number", "asym_residual", "limit_zone",
            "constEKE", "constEKL", "detActionaction", "negsign_check",
            "cauchy_schwarz_margin"};
}

double residual_or_nan(const SweepRow& row, const char* name) {
    const auto it = row.residuals.find(name);
    return it == row.residuals.end() ? std::nan("") : it->second;
}

ordered_json report_to_json(const StabilityReport& rep, ParamKind kind) {
    ordered_json j;
    j["minors"] = rep.minors;
    j["n_hess"] = {{"neg", rep.sig_hess.n_neg},
                   {"zero", rep.sig_hess.n_zero},
                   {"pos", rep.sig_hess.n_pos}};
    j["verdict_spectral"] = to_string(rep.spectral);
    if (kind == ParamKind::QKdV) {
        j["verdict_orbital_qkdv"] = to_string(rep.orbital);
    } else {
        j["verdict_orbital_EKL"] = to_string(rep.orbital_ekl);
        j["verdict_orbital_EKE"] = to_string(rep.orbital_eke);
    }
    j["stability_index"] = rep.stability_index;
    j["matched_conditions"] = rep.matched_conditions;
    j["condition_number"] = rep.condition_number;
    j["residuals"] = rep.identity_residuals;
    j["inconsistent"] = rep.inconsistent;
    j["limit_zone"] = rep.limit_zone;
    return j;
}

} // namespace

SweepResult run_sweep(const RunConfig& cfg, int workers) {
    if (!cfg.sweep_variable) throw Error("run_sweep: config has no sweep variable");
    const auto values = sweep_values(cfg);
    const NonlinearModel model = cfg.make_model();

    SweepResult result;
    result.kind = cfg.kind;
    result.columns = columns_for(cfg.kind, *cfg.sweep_variable);

    const int n = static_cast<int>(values.size());
    std::vector<std::optional<SweepRow>> slots(static_cast<std::size_t>(n));
    std::vector<std::string> errors(static_cast<std::size_t>(n));

    parallel_for(n, workers, [&](int i) {
        RunConfig point = cfg;
        apply_sweep_value(point, values[static_cast<std::size_t>(i)]);
        try {
            if (cfg.kind == ParamKind::QKdV) {
                const auto jet = action_jet_qkdv(model, point.q, point.numerics, point.fd, point.hint);
                const auto rep = verdict_qkdv(jet);
                slots[static_cast<std::size_t>(i)] = row_from_qkdv(values[static_cast<std::size_t>(i)], jet, rep);
            } else {
                const auto jet = action_jet_ek(model, point.ek, point.numerics, point.fd,
                                               point.ek_hessian, point.hint);
                const auto rep = verdict_ek(jet);
                slots[static_cast<std::size_t>(i)] = row_from_ek(values[static_cast<std::size_t>(i)], jet, rep);
            }
        } catch (const Error& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    });

    for (int i = 0; i < n; ++i) {
        if (slots[static_cast<std::size_t>(i)])
            result.rows.push_back(*slots[static_cast<std::size_t>(i)]);
        else
            result.skipped.push_back(fmt17(values[static_cast<std::size_t>(i)]) + ": " +
                                     errors[static_cast<std::size_t>(i)]);
    }
    if (result.rows.empty())
        throw Error("run_sweep: no feasible point in the sweep range");
    return result;
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (i) out << ',';
        out << r.columns[i];
    }
    out << '\n';
    for (const auto& row : r.rows) {
        out << fmt17(row.sweep_value) << ',' << fmt17(row.period) << ',' << fmt17(row.action);
        for (double m : row.minors) out << ',' << fmt17(m);
        if (r.kind == ParamKind::EK) out << ',' << fmt17(residual_or_nan(row, "Theta_mumu"));
        out << ',' << row.n_neg << ',' << row.n_zero << ',' << row.spectral;
        if (r.kind == ParamKind::QKdV) out << ',' << row.orbital;
        else out << ',' << row.orbital_ekl << ',' << row.orbital_eke;
        out << ',' << row.matched << ',' << row.stability_index << ','
            << fmt17(row.condition_number) << ',' << fmt17(row.asym_residual) << ','
            << (row.limit_zone ? 1 : 0);
        if (r.kind == ParamKind::QKdV) {
            out << ',' << fmt17(residual_or_nan(row, "detActionC")) << ','
                << fmt17(residual_or_nan(row, "cauchy_schwarz_margin"));
        } else {
            out << ',' << fmt17(residual_or_nan(row, "constEKE")) << ','
                << fmt17(residual_or_nan(row, "constEKL")) << ','
                << fmt17(residual_or_nan(row, "detActionaction")) << ','
                << fmt17(residual_or_nan(row, "negsign_check")) << ','
                << fmt17(residual_or_nan(row, "cauchy_schwarz_margin"));
        }
        out << '\n';
    }
    return out.str();
}

std::string sweep_summary_json(const RunConfig& cfg, const SweepResult& r,
                               const std::string& case_name) {
    ordered_json j;
    j["case"] = case_name;
    j["model"] = cfg.model_name;
    j["kind"] = cfg.kind == ParamKind::QKdV ? "qkdv" : "ek";
    j["sweep"] = {{"variable", cfg.sweep_variable ? *cfg.sweep_variable : ""},
                  {"min", cfg.sweep_min},
                  {"max", cfg.sweep_max},
                  {"count", cfg.sweep_count},
                  {"rows", r.rows.size()},
                  {"skipped", r.skipped}};
    j["delta_nu"] = cfg.fd.delta_nu;
    j["delta_nu_absolute"] = cfg.fd.absolute;
    j["delta_omega"] = cfg.numerics.delta_omega;

    double per_lo = std::numeric_limits<double>::infinity(), per_hi = 0.0;
    int spectral_unstable = 0, orbital_stable = 0, degenerate = 0, limit = 0;
    for (const auto& row : r.rows) {
        per_lo = std::min(per_lo, row.period);
        per_hi = std::max(per_hi, row.period);
        if (row.spectral == "Unstable") ++spectral_unstable;
        const std::string& orb = r.kind == ParamKind::QKdV ? row.orbital : row.orbital_ekl;
        if (orb == "Stable") ++orbital_stable;
        if (orb == "Degenerate") ++degenerate;
        if (row.limit_zone) ++limit;
    }
    j["period_range"] = {per_lo, per_hi};
    j["counts"] = {{"rows", r.rows.size()},
                   {"spectral_unstable", spectral_unstable},
                   {"orbital_stable", orbital_stable},
                   {"degenerate", degenerate},
                   {"limit_zone", limit}};

    // first sign change of the determinant (last minor) along the sweep
    ordered_json transition;
    transition["detected"] = false;
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        const double d0 = r.rows[i - 1].minors.back();
        const double d1 = r.rows[i].minors.back();
        if (d0 != 0.0 && d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0)) {
            const double t = d0 / (d0 - d1);
            transition["detected"] = true;
            transition["period"] = r.rows[i - 1].period + t * (r.rows[i].period - r.rows[i - 1].period);
            transition["sweep_value"] =
                r.rows[i - 1].sweep_value + t * (r.rows[i].sweep_value - r.rows[i - 1].sweep_value);
            break;
        }
    }
    j["det_transition"] = transition;

    std::map<std::string, double> worst;
    for (const auto& row : r.rows)
        for (const auto& [k, v] : row.residuals)
            if (k != "cauchy_schwarz_margin" && k != "Theta_mumu")
                worst[k] = std::max(worst[k], std::abs(v));
    j["worst_residuals"] = worst;
    return j.dump(2) + "\n";
}

std::string sweep_gnuplot(const SweepResult& r, const std::string& csv_name,
                          const std::string& title) {
    std::ostringstream out;
    out << "# gnuplot script, mirrors the condition-number + minors layout\n";
    out << "set datafile separator ','\n";
    out << "set key off\nset grid\n";
    out << "set terminal pngcairo size 1400,1000\n";
    out << "set output '" << title << ".png'\n";
    out << "set multiplot layout 2,2 title '" << title << "'\n";
    if (r.kind == ParamKind::QKdV) {
        out << "set logscale y\nset title 'condition number of Hess theta vs period'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:13 with lines\n";
        out << "unset logscale y\nset title 'm1 = theta_mumu'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:4 with lines\n";
        out << "set title 'm2'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:5 with lines\n";
        out << "set title 'm3 = det Hess theta'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:6 with lines\n";
    } else {
        out << "set logscale y\nset title 'condition number of Hess Theta vs period'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:16 with lines\n";
        out << "unset logscale y\nset title 'M1 and M2'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:4 with lines, '" << csv_name
            << "' every ::1 using 2:5 with lines\n";
        out << "set title 'M3'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:6 with lines\n";
        out << "set title 'M4 = det Hess Theta'\n";
        out << "plot '" << csv_name << "' every ::1 using 2:7 with lines\n";
    }
    out << "unset multiplot\n";
    return out.str();
}

SweepResult reproduce_case(const std::string& name, const std::string& out_dir, int workers) {
    const CaseDefinition& cd = find_case(name);
    SweepResult result = run_sweep(cd.config, workers);
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / (name + ".csv"));
        csv << sweep_csv(result);
    }
    {
        std::ofstream json(fs::path(out_dir) / (name + ".json"));
        json << sweep_summary_json(cd.config, result, name);
    }
    {
        std::ofstream gp(fs::path(out_dir) / (name + ".gp"));
        gp << sweep_gnuplot(result, name + ".csv", name);
    }
    return result;
}

std::string analyze_point_json(const RunConfig& cfg) {
    const NonlinearModel model = cfg.make_model();
    ordered_json j;
    j["model"] = cfg.model_name;
    if (cfg.kind == ParamKind::QKdV) {
        const auto jet = action_jet_qkdv(model, cfg.q, cfg.numerics, cfg.fd, cfg.hint);
        const auto rep = verdict_qkdv(jet);
        j["kind"] = "qkdv";
        j["parameters"] = {{"mu", cfg.q.mu}, {"lambda", cfg.q.lambda}, {"c", cfg.q.c}};
        j["period"] = jet.integrals.period;
        j["action"] = jet.value;
        j["gradient"] = jet.grad;
        j["turning_points"] = {{"v2", jet.tp.v2}, {"v3", jet.tp.v3}, {"v0", jet.tp.v0}};
        j["report"] = report_to_json(rep, ParamKind::QKdV);
        const auto mod = modulation_matrix_qkdv(jet, cfg.q.c);
        ordered_json eigs = ordered_json::array();
        for (const auto& e : mod.eigenvalues) eigs.push_back({e.real(), e.imag()});
        // a nonreal characteristic velocity signals sideband instability; this
        // is an advisory, separate from the co-periodic verdicts above
        j["modulation"] = {{"eigenvalues", eigs},
                           {"hyperbolic", mod.hyperbolic},
                           {"sideband_instability_advisory", !mod.hyperbolic}};
    } else {
        const auto jet = action_jet_ek(model, cfg.ek, cfg.numerics, cfg.fd, cfg.ek_hessian, cfg.hint);
        const auto rep = verdict_ek(jet);
        j["kind"] = "ek";
        j["parameters"] = {{"mu", cfg.ek.mu}, {"lambda", cfg.ek.lambda},
                           {"j", cfg.ek.j}, {"sigma", cfg.ek.sigma}};
        j["period"] = jet.underlying.integrals.period;
        j["action"] = jet.value;
        j["gradient"] = jet.grad;
        j["report"] = report_to_json(rep, ParamKind::EK);
        if (cfg.ek_hessian == EkHessianSource::Both)
            j["chain_vs_direct"] = jet.chain_vs_direct;
        const auto mod = modulation_matrix_ekl(jet, cfg.ek.j);
        ordered_json eigs = ordered_json::array();
        for (const auto& e : mod.eigenvalues) eigs.push_back({e.real(), e.imag()});
        j["modulation"] = {{"eigenvalues", eigs},
                           {"hyperbolic", mod.hyperbolic},
                           {"sideband_instability_advisory", !mod.hyperbolic}};
    }
    return j.dump(2) + "\n";
}

EvansRun run_evans(const RunConfig& cfg) {
    const NonlinearModel model = cfg.make_model();
    EvansRun out;
    EvansSettings settings;
    settings.r_max = cfg.r_max;
    settings.n_grid = cfg.evans_rk4_steps;
    settings.r_count = cfg.evans_r_count;

    if (cfg.kind == ParamKind::QKdV) {
        const auto jet = action_jet_qkdv(model, cfg.q, cfg.numerics, cfg.fd, cfg.hint);
        const auto profile = reconstruct_profile(model, cfg.q, jet.tp, cfg.numerics.rk4_steps);
        out.scan = evans_scan_qkdv(profile, model, cfg.q, settings);
        out.det_hess_reference = determinant(jet.hess);
        out.discriminant = sturm_discriminant(profile, model, cfg.q, {});
        out.theta_mu_mu = jet.hess(0, 0);
    } else {
        const WaveParamsQ q = ek_to_qkdv(cfg.ek);
        const auto jet = action_jet_ek(model, cfg.ek, cfg.numerics, cfg.fd, cfg.ek_hessian, cfg.hint);
        const auto profile = reconstruct_profile(model, q, jet.underlying.tp, cfg.numerics.rk4_steps);
        out.scan = evans_scan_ekl(profile, model, cfg.ek, settings);
        out.det_hess_reference = determinant(jet.hess);
        out.discriminant = sturm_discriminant(profile, model, q, {});
        out.theta_mu_mu = jet.underlying.hess(0, 0);
    }
    out.fit_rel_error = std::abs(out.scan.fit_coeff - out.det_hess_reference) /
                        std::max(std::abs(out.det_hess_reference), 1e-300);
    return out;
}

std::string evans_csv(const EvansScan& scan) {
    std::ostringstream out;
    out << "r,value,cumulative_sign_changes\n";
    int changes = 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < scan.r.size(); ++i) {
        const double v = scan.value[i];
        if (v != 0.0) {
            if (prev != 0.0 && (v < 0.0) != (prev < 0.0)) ++changes;
            prev = v;
        }
        out << fmt17(scan.r[i]) << ',' << fmt17(v) << ',' << changes << '\n';
    }
    return out.str();
}

std::string modulate_csv(const RunConfig& cfg, int workers) {
    if (!cfg.sweep_variable) throw Error("modulate: config has no sweep variable");
    const auto values = sweep_values(cfg);
    const NonlinearModel model = cfg.make_model();
    const int dim = cfg.kind == ParamKind::QKdV ? 3 : 4;

    struct Line {
        double value = 0.0, period = 0.0, residual = 0.0;
        std::vector<std::complex<double>> eigs;
        bool hyperbolic = false;
        bool ok = false;
    };
    std::vector<Line> lines(values.size());
    parallel_for(static_cast<int>(values.size()), workers, [&](int i) {
        RunConfig point = cfg;
        apply_sweep_value(point, values[static_cast<std::size_t>(i)]);
        try {
            Line ln;
            ln.value = values[static_cast<std::size_t>(i)];
            if (cfg.kind == ParamKind::QKdV) {
                const auto jet = action_jet_qkdv(model, point.q, point.numerics, point.fd, point.hint);
                const auto mod = modulation_matrix_qkdv(jet, point.q.c);
                ln.period = jet.integrals.period;
                ln.eigs = mod.eigenvalues;
                ln.hyperbolic = mod.hyperbolic;
                ln.residual = mod.residual;
            } else {
                const auto jet = action_jet_ek(model, point.ek, point.numerics, point.fd,
                                               point.ek_hessian, point.hint);
                const auto mod = modulation_matrix_ekl(jet, point.ek.j);
                ln.period = jet.underlying.integrals.period;
                ln.eigs = mod.eigenvalues;
                ln.hyperbolic = mod.hyperbolic;
                ln.residual = mod.residual;
            }
            ln.ok = true;
            lines[static_cast<std::size_t>(i)] = ln;
        } catch (const Error&) {
            lines[static_cast<std::size_t>(i)].ok = false;
        }
    });

    std::ostringstream out;
    out << (cfg.sweep_variable ? *cfg.sweep_variable : std::string("value")) << ",period";
    for (int k = 1; k <= dim; ++k) out << ",re" << k << ",im" << k;
    out << ",hyperbolic,residual\n";
    for (const auto& ln : lines) {
        if (!ln.ok) continue;
        out << fmt17(ln.value) << ',' << fmt17(ln.period);
        for (const auto& e : ln.eigs) out << ',' << fmt17(e.real()) << ',' << fmt17(e.imag());
        out << ',' << (ln.hyperbolic ? 1 : 0) << ',' << fmt17(ln.residual) << '\n';
    }
    return out.str();
}

// ---- validation ----

namespace {

// splitmix64: deterministic across platforms, unlike <random> distributions.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

struct SampleBox {
    std::string model;
    double gamma = 2.0;
    int sign = 1;
    double lambda_lo, lambda_hi; // reduced lambda_q
    double j_lo, j_hi;           // mass flux magnitude
    double s_lo = 0.15, s_hi = 0.70;
    std::optional<std::pair<double, double>> hint;
};

const std::vector<SampleBox>& sample_boxes() {
    static const std::vector<SampleBox> boxes = {
        {"kdv3", 2.0, 1, -5.0, -0.5, 0.3, 1.5, 0.15, 0.70, std::nullopt},
        {"power-law", 3.0, 1, -5.0, -1.0, 0.3, 1.5, 0.15, 0.70, std::nullopt},
        {"boussinesq", 2.0, 1, 1.0, 3.0, 0.05, 0.3, 0.15, 0.70, std::nullopt},
        {"perfect-gas", 2.0, 1, -3.5, -2.2, 0.7, 1.2, 0.15, 0.70, std::nullopt},
        {"nls-capillarity", 2.0, 1, -3.5, -1.8, 0.7, 1.2, 0.15, 0.70, std::nullopt},
        {"constant-capillarity", 2.0, 1, -3.5, -1.8, 0.7, 1.2, 0.15, 0.70, std::nullopt},
        {"synthetic-quadratic", 2.0, 1, -1.0, 1.0, 0.5, 1.5, 0.15, 0.70, std::nullopt},
    };
    return boxes;
}

struct Sampled {
    WaveParamsEK ek;
    WaveParamsQ q;
    WellInfo well;
};

// Draw a feasible EK-compatible point: c_q = -j^2 ties the reduced speed to
// the flux, lambda_q and the energy fraction come from the box.
std::optional<Sampled> draw_point(const NonlinearModel& model, const SampleBox& box, Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double j = (rng.next_u64() & 1 ? 1.0 : -1.0) * rng.uniform(box.j_lo, box.j_hi);
        const double sigma = rng.uniform(-0.5, 0.5);
        const double lambda_q = rng.uniform(box.lambda_lo, box.lambda_hi);
        const double c_q = -j * j;
        try {
            const WellInfo well = find_well(model, lambda_q, c_q, box.hint);
            const double top = well.barrier_mu
                                   ? *well.barrier_mu
                                   : well.well_min + 50.0 * std::max(1.0, std::abs(well.well_min));
            const double s = rng.uniform(box.s_lo, box.s_hi);
            const double mu_q = well.well_min + s * (top - well.well_min);
            Sampled out;
            out.q = WaveParamsQ{mu_q, lambda_q, c_q};
            // invert the parameter map: lambda = mu_q + sigma^2/2, mu = j sigma - lambda_q
            out.ek = WaveParamsEK{j * sigma - lambda_q, mu_q + 0.5 * sigma * sigma, j, sigma};
            out.well = well;
            (void)find_turning_points(model, out.q,
                                      std::make_pair(well.v0 - 1e-3 - 0.5 * std::abs(well.v0),
                                                     well.v0 + 1e-3 + 0.5 * std::abs(well.v0)));
            return out;
        } catch (const Error&) {
            continue;
        }
    }
    return std::nullopt;
}

void record(ValidationReport& rep, const std::string& name, bool pass, double value) {
    for (auto& c : rep.checks) {
        if (c.name == name) {
            ++c.total;
            if (pass) ++c.pass;
            c.worst = std::max(c.worst, std::abs(value));
            return;
        }
    }
    rep.checks.push_back({name, pass ? 1 : 0, 1, std::abs(value)});
}

} // namespace

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.pass == c.total ? "PASS " : "FAIL ") << c.name << ": " << c.pass << "/"
            << c.total << " (worst " << fmt17(c.worst) << ")\n";
    }
    for (const auto& n : notes) out << "note: " << n << '\n';
    return out.str();
}

ValidationReport validate(std::uint64_t seed, const ValidationOptions& opts) {
    ValidationReport rep;
    Numerics num;
    FdSettings fd; // relative 1e-3 steps

    for (const auto& box : sample_boxes()) {
        if (!opts.models.empty()) {
            bool wanted = false;
            for (const auto& m : opts.models) wanted = wanted || (m == box.model);
            if (!wanted) continue;
        }
        const NonlinearModel model = make_builtin(box.model, {box.gamma, box.sign});
        Rng rng(seed ^ std::hash<std::string>{}(box.model));
        int produced = 0;
        for (int k = 0; k < opts.n_points * 4 && produced < opts.n_points; ++k) {
            const auto pt = draw_point(model, box, rng);
            if (!pt) continue;
            ++produced;
            const std::pair<double, double> hint{
                pt->well.v0 - 1e-3 - 0.5 * std::abs(pt->well.v0),
                pt->well.v0 + 1e-3 + 0.5 * std::abs(pt->well.v0)};
            ActionJet4 jet4;
            try {
                jet4 = action_jet_ek(model, pt->ek, num, fd, EkHessianSource::Chain, hint);
            } catch (const Error& e) {
                rep.notes.push_back(box.model + ": jet failed at a sampled point: " + e.what());
                continue;
            }
            const ActionJet3& jet3 = jet4.underlying;
            const auto cm = constraint_matrices(jet3, jet4);
            const auto residuals = identity_report(jet3, jet4, cm, pt->ek.j);

            if (cm.c_q_valid)
                record(rep, "detActionC", residuals.at("detActionC") <= 1e-6,
                       residuals.at("detActionC"));
            else if (box.model == "synthetic-quadratic")
                ; // isochronous: theta_mumu vanishes identically, pivot undefined
            else
                record(rep, "detActionC", false, 1.0);
            if (cm.C_E_valid)
                record(rep, "constEKE", residuals.at("constEKE") <= 1e-6, residuals.at("constEKE"));
            if (cm.C_L_valid)
                record(rep, "constEKL", residuals.at("constEKL") <= 1e-6, residuals.at("constEKL"));
            record(rep, "detActionaction", residuals.at("detActionaction") <= 1e-6,
                   residuals.at("detActionaction"));
            if (residuals.count("negsign_check"))
                record(rep, "negsign_identity", residuals.at("negsign_check") == 0.0,
                       residuals.at("negsign_check"));
            record(rep, "cauchy_schwarz", residuals.at("cauchy_schwarz_margin") > 0.0,
                   residuals.at("cauchy_schwarz_margin"));

            // finite-difference gradient of theta against the quadrature identities
            {
                double worst = 0.0;
                for (int var = 0; var < 3; ++var) {
                    const double base = var == 0 ? pt->q.mu : (var == 1 ? pt->q.lambda : pt->q.c);
                    const double dstep = 1e-4 * std::max(1.0, std::abs(base));
                    auto value_at = [&](double delta) {
                        WaveParamsQ q = pt->q;
                        if (var == 0) q.mu += delta;
                        else if (var == 1) q.lambda += delta;
                        else q.c += delta;
                        const auto tp = find_turning_points(model, q, hint);
                        return profile_integrals(model, q, tp).action;
                    };
                    try {
                        const double fd_grad = (value_at(+dstep) - value_at(-dstep)) / (2.0 * dstep);
                        const double qd = jet3.grad[static_cast<std::size_t>(var)];
                        worst = std::max(worst, std::abs(fd_grad - qd) / std::max(std::abs(qd), 1e-12));
                    } catch (const Error&) {
                        worst = std::max(worst, 1.0);
                    }
                }
                record(rep, "gradient_fd_vs_quadrature", worst <= 1e-5, worst);
            }
        }
        if (produced < opts.n_points)
            rep.notes.push_back(box.model + ": only " + std::to_string(produced) + "/" +
                                std::to_string(opts.n_points) + " feasible points drawn");
    }

    if (opts.with_discriminant) {
        // Discriminant sign rule on two reduced families covering both signs
        // of Upsilon_mu: the KdV well (increasing period) and a hardening
        // quartic well (decreasing period).
        struct DiscFamily {
            std::string model;
            double gamma;
            int sign;
            double lambda0, c0, jitter;
        };
        const DiscFamily fams[] = {
            {"kdv3", 2.0, 1, -60.0, 60.0, 0.02},
            {"power-law", 3.0, 1, 0.0, -2.0, 0.05},
        };
        bool saw_pos = false, saw_neg = false;
        for (const auto& fam : fams) {
            const NonlinearModel model = make_builtin(fam.model, {fam.gamma, fam.sign});
            Rng rng(seed ^ 0xd15c0ULL ^ std::hash<std::string>{}(fam.model));
            for (int k = 0; k < 6; ++k) {
                const double lambda = fam.lambda0 * (1.0 + fam.jitter * rng.uniform(-1.0, 1.0)) +
                                      (fam.lambda0 == 0.0 ? 0.1 * rng.uniform(-1.0, 1.0) : 0.0);
                const double c = fam.c0 * (1.0 + fam.jitter * rng.uniform(-1.0, 1.0));
                try {
                    const WellInfo well = find_well(model, lambda, c);
                    const double top = well.barrier_mu ? *well.barrier_mu
                                                       : well.well_min + 50.0 * std::max(1.0, std::abs(well.well_min));
                    const double mu = well.well_min + rng.uniform(0.2, 0.6) * (top - well.well_min);
                    const WaveParamsQ q{mu, lambda, c};
                    const auto tp = find_turning_points(model, q);
                    const auto jet = action_jet_qkdv(model, q, num, fd);
                    const auto profile = reconstruct_profile(model, q, tp, 4096);
                    const auto disc = sturm_discriminant(profile, model, q, {}, 16384);
                    record(rep, "sturm_T0", disc.T0_residual <= 1e-6, disc.T0_residual);
                    const double tmm = jet.hess(0, 0);
                    if (std::abs(tmm) > 1e-8 * std::max(1.0, jet.integrals.period)) {
                        const bool agree = (disc.Tp0 > 0.0) == (tmm > 0.0);
                        record(rep, "sturm_sign_rule", agree, disc.Tp0);
                        if (tmm > 0.0) saw_pos = true;
                        else saw_neg = true;
                    }
                } catch (const Error& e) {
                    rep.notes.push_back(fam.model + ": discriminant sample failed: " + e.what());
                }
            }
        }
        record(rep, "sturm_sign_coverage", saw_pos && saw_neg, saw_pos && saw_neg ? 1.0 : 0.0);
    }

    if (opts.with_evans) {
        // One cross-pipeline fit on the KdV family.
        try {
            RunConfig cfg;
            cfg.model_name = "kdv3";
            cfg.kind = ParamKind::QKdV;
            cfg.q.lambda = -60.0;
            cfg.q.c = 60.0;
            const NonlinearModel model = cfg.make_model();
            const WellInfo well = find_well(model, cfg.q.lambda, cfg.q.c);
            cfg.q.mu = well.well_min + 0.4 * (*well.barrier_mu - well.well_min);
            cfg.fd.delta_nu = 0.005;
            cfg.fd.absolute = true;
            const auto run = run_evans(cfg);
            record(rep, "evans_fit_qkdv", run.fit_rel_error <= 0.02, run.fit_rel_error);
            record(rep, "evans_tail_sign_qkdv", run.scan.tail_sign == -1,
                   static_cast<double>(run.scan.tail_sign));
        } catch (const Error& e) {
            rep.notes.push_back(std::string("evans validation failed: ") + e.what());
            record(rep, "evans_fit_qkdv", false, 1.0);
        }
    }
    return rep;
}

} // namespace wavestab
