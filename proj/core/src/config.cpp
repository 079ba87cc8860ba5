#include "wavestab/config.hpp"

#include <fstream>
#include <sstream>

namespace wavestab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'", line);
    }
}

int to_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + v + "'", line);
    }
}

} // namespace

std::map<std::string, std::string> tokenize_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        kv[section.empty() ? key : section + "." + key] = val;
    }
    return kv;
}

RunConfig parse_config_text(const std::string& text) {
    // Re-scan to retain line numbers for value errors.
    std::map<std::string, int> key_line;
    {
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty() || line.front() == '[') {
                if (!line.empty()) section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                const std::string key = trim(line.substr(0, eq));
                key_line[section.empty() ? key : section + "." + key] = lineno;
            }
        }
    }
    const auto kv = tokenize_config(text);
    auto line_of = [&](const std::string& k) {
        const auto it = key_line.find(k);
        return it == key_line.end() ? 0 : it->second;
    };

    RunConfig cfg;
    bool has_j = false, has_sigma = false, has_c = false;
    double mu = 0, lambda = 0, c = 0, j = 0, sigma = 0;

    for (const auto& [key, val] : kv) {
        const int ln = line_of(key);
        if (key == "model.model") cfg.model_name = val;
        else if (key == "model.gamma") cfg.model_params.gamma = to_double(val, ln);
        else if (key == "model.sign") cfg.model_params.sign = to_int(val, ln);
        else if (key == "parameters.mu") mu = to_double(val, ln);
        else if (key == "parameters.lambda") lambda = to_double(val, ln);
        else if (key == "parameters.c") { c = to_double(val, ln); has_c = true; }
        else if (key == "parameters.j") { j = to_double(val, ln); has_j = true; }
        else if (key == "parameters.sigma") { sigma = to_double(val, ln); has_sigma = true; }
        else if (key == "parameters.sweep") cfg.sweep_variable = val;
        else if (key == "parameters.sweep_min") cfg.sweep_min = to_double(val, ln);
        else if (key == "parameters.sweep_max") cfg.sweep_max = to_double(val, ln);
        else if (key == "parameters.sweep_count") cfg.sweep_count = to_int(val, ln);
        else if (key == "parameters.sweep_log") cfg.sweep_log = (val == "true" || val == "1");
        else if (key == "parameters.hint_lo" || key == "parameters.hint_hi") {
            if (!cfg.hint) cfg.hint = std::make_pair(0.0, 0.0);
            if (key == "parameters.hint_lo") cfg.hint->first = to_double(val, ln);
            else cfg.hint->second = to_double(val, ln);
        }
        else if (key == "numerics.epsilon") cfg.numerics.epsilon = to_double(val, ln);
        else if (key == "numerics.delta_omega") cfg.numerics.delta_omega = to_double(val, ln);
        else if (key == "numerics.quadrature") {
            if (val == "midpoint") cfg.numerics.quadrature = Quadrature::Midpoint;
            else if (val == "trapezoid") cfg.numerics.quadrature = Quadrature::Trapezoid;
            else throw ConfigError("quadrature must be midpoint|trapezoid", ln);
        }
        else if (key == "numerics.rk4_steps") cfg.numerics.rk4_steps = to_int(val, ln);
        else if (key == "numerics.delta_nu") { cfg.fd.delta_nu = to_double(val, ln); cfg.numerics.delta_nu = cfg.fd.delta_nu; }
        else if (key == "numerics.delta_nu_absolute") { cfg.fd.absolute = (val == "true" || val == "1"); cfg.numerics.absolute_delta_nu = cfg.fd.absolute; }
        else if (key == "numerics.hessian") {
            if (val == "grad-fd") cfg.fd.scheme = HessianScheme::GradFd;
            else if (val == "second-diff") cfg.fd.scheme = HessianScheme::SecondDiff;
            else throw ConfigError("hessian must be grad-fd|second-diff", ln);
        }
        else if (key == "numerics.ek_hessian") {
            if (val == "chain") cfg.ek_hessian = EkHessianSource::Chain;
            else if (val == "direct") cfg.ek_hessian = EkHessianSource::DirectFd;
            else if (val == "both") cfg.ek_hessian = EkHessianSource::Both;
            else throw ConfigError("ek_hessian must be chain|direct|both", ln);
        }
        else if (key == "numerics.r_max") cfg.r_max = to_double(val, ln);
        else if (key == "numerics.evans_rk4_steps") cfg.evans_rk4_steps = to_int(val, ln);
        else if (key == "numerics.evans_r_count") cfg.evans_r_count = to_int(val, ln);
        else if (key == "output.directory") cfg.out_dir = val;
        else if (key == "output.formats") {
            cfg.emit_csv = val.find("csv") != std::string::npos;
            cfg.emit_json = val.find("json") != std::string::npos;
            cfg.emit_gnuplot = val.find("gp") != std::string::npos;
        }
        else throw ConfigError("unknown key '" + key + "'", ln);
    }

    if (has_j || has_sigma) {
        cfg.kind = ParamKind::EK;
        cfg.ek = WaveParamsEK{mu, lambda, j, sigma};
        if (has_c) throw ConfigError("parameters: c conflicts with (j, sigma)", line_of("parameters.c"));
    } else {
        cfg.kind = ParamKind::QKdV;
        cfg.q = WaveParamsQ{mu, lambda, c};
    }

    if (cfg.sweep_variable) {
        static const char* q_vars[] = {"mu", "lambda", "c"};
        static const char* ek_vars[] = {"mu", "lambda", "j", "sigma"};
        bool ok = false;
        if (cfg.kind == ParamKind::QKdV)
            for (const char* v : q_vars) ok = ok || (*cfg.sweep_variable == v);
        else
            for (const char* v : ek_vars) ok = ok || (*cfg.sweep_variable == v);
        if (!ok) throw ConfigError("invalid sweep variable '" + *cfg.sweep_variable + "'",
                                   line_of("parameters.sweep"));
        if (cfg.sweep_count < 1)
            throw ConfigError("sweep_count must be positive", line_of("parameters.sweep_count"));
    }

    // positivity checks
    if (cfg.numerics.delta_omega <= 0.0) throw ConfigError("delta_omega must be positive", line_of("numerics.delta_omega"));
    if (cfg.fd.delta_nu <= 0.0) throw ConfigError("delta_nu must be positive", line_of("numerics.delta_nu"));
    if (cfg.numerics.rk4_steps < 256) throw ConfigError("rk4_steps must be >= 256", line_of("numerics.rk4_steps"));
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace wavestab
