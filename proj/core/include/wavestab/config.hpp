#pragma once

#include <map>
#include <optional>
#include <string>

#include "wavestab/action.hpp"
#include "wavestab/models.hpp"
#include "wavestab/profile.hpp"

namespace wavestab {

enum class ParamKind { QKdV, EK };

/// One parsed run description. Exactly one sweep variable when sweeping.
struct RunConfig {
    // [model]
    std::string model_name = "kdv3";
    ModelParams model_params{};

    // [parameters]
    ParamKind kind = ParamKind::QKdV;
    WaveParamsQ q{};
    WaveParamsEK ek{};
    std::optional<std::string> sweep_variable; // mu|lambda|c|j|sigma
    double sweep_min = 0.0;
    double sweep_max = 0.0;
    int sweep_count = 0;
    bool sweep_log = false;       // geometric spacing of the offset above sweep_log_floor
    double sweep_log_floor = 0.0; // reference level for log spacing (well floor)
    std::optional<std::pair<double, double>> hint;

    // [numerics]
    Numerics numerics{};
    FdSettings fd{};
    EkHessianSource ek_hessian = EkHessianSource::Chain;
    double r_max = 0.0;
    int evans_rk4_steps = 32768;
    int evans_r_count = 240;

    // [output]
    std::string out_dir = "out";
    bool emit_csv = true;
    bool emit_json = true;
    bool emit_gnuplot = true;

    NonlinearModel make_model() const { return make_builtin(model_name, model_params); }
};

/// Line-oriented `key = value` file with `[section]` headers and `#` comments.
/// Throws ConfigError with a 1-based line number on malformed input.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Raw section/key map, exposed for tests.
std::map<std::string, std::string> tokenize_config(const std::string& text);

} // namespace wavestab
