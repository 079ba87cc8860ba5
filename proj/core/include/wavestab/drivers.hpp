#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavestab/config.hpp"
#include "wavestab/evans.hpp"
#include "wavestab/modulation.hpp"
#include "wavestab/stability.hpp"

namespace wavestab {

/// One computed sweep point. For qKdV runs the EK-only fields stay empty.
struct SweepRow {
    double sweep_value = 0.0;
    double period = 0.0;
    double action = 0.0;
    std::vector<double> minors;
    int n_neg = 0;
    int n_zero = 0;
    std::string spectral;
    std::string orbital;     // qKdV verdict, empty for EK
    std::string orbital_ekl; // EK only
    std::string orbital_eke; // EK only
    std::string matched;     // '+'-joined condition labels
    int stability_index = 0;
    double condition_number = 0.0;
    double asym_residual = 0.0;
    bool limit_zone = false;
    std::map<std::string, double> residuals;
};

struct SweepResult {
    ParamKind kind = ParamKind::QKdV;
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;
    std::vector<std::string> skipped; // "value: reason" for infeasible points
};

/// Evaluate a full sweep; points are distributed over `workers` threads and
/// rows come back in sweep order regardless of the worker count.
SweepResult run_sweep(const RunConfig& cfg, int workers = 1);

/// Single-point analysis (no sweep variable required): JSON text.
std::string analyze_point_json(const RunConfig& cfg);

std::string sweep_csv(const SweepResult& r);
std::string sweep_summary_json(const RunConfig& cfg, const SweepResult& r,
                               const std::string& case_name);
std::string sweep_gnuplot(const SweepResult& r, const std::string& csv_name,
                          const std::string& title);

/// Write csv/json/gp artifacts for a named case into out_dir; returns the
/// sweep for further inspection.
SweepResult reproduce_case(const std::string& name, const std::string& out_dir, int workers = 1);

/// Evans + discriminant run at the configured single point.
struct EvansRun {
    EvansScan scan;
    DiscriminantEval discriminant;
    double det_hess_reference = 0.0; // det Hess theta (qKdV) or det Hess Theta (EK)
    double fit_rel_error = 0.0;
    double theta_mu_mu = 0.0; // Upsilon_mu of the reduced problem
};
EvansRun run_evans(const RunConfig& cfg);
std::string evans_csv(const EvansScan& scan);

/// Modulation eigenvalues along a sweep: CSV with period, Re/Im pairs, flag.
std::string modulate_csv(const RunConfig& cfg, int workers = 1);

struct ValidationCheck {
    std::string name;
    int pass = 0;
    int total = 0;
    double worst = 0.0; // worst residual seen (absolute value)
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    std::vector<std::string> notes;
    bool ok() const {
        if (checks.empty()) return false; // a vacuous run proves nothing
        for (const auto& c : checks)
            if (c.pass != c.total) return false;
        return true;
    }
    std::string to_text() const;
};

struct ValidationOptions {
    int n_points = 20;
    bool with_evans = false;     // cross-pipeline Evans fit at one point per model
    bool with_discriminant = true;
    std::vector<std::string> models; // empty: every built-in model
};

/// Randomized feasible-point identity and cross-pipeline checks,
/// deterministic in the seed.
ValidationReport validate(std::uint64_t seed, const ValidationOptions& opts = {});

} // namespace wavestab
