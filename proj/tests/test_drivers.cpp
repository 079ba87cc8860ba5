#include "doctest.h"

#include <cmath>

#include "wavestab/cases.hpp"
#include "wavestab/config.hpp"
#include "wavestab/drivers.hpp"

using namespace wavestab;

namespace {

const char* kQkdvConfig = R"(
# qKdV sweep over the energy level
[model]
model = kdv3

[parameters]
lambda = -60
c = 60
mu = -3000
sweep = mu
sweep_min = -5000
sweep_max = -3000
sweep_count = 5

[numerics]
delta_omega = 1e-3
delta_nu = 0.005
delta_nu_absolute = 1
rk4_steps = 1024

[output]
directory = out
formats = csv,json,gp
)";

} // namespace

TEST_CASE("config parsing round trip") {
    const RunConfig cfg = parse_config_text(kQkdvConfig);
    CHECK(cfg.model_name == "kdv3");
    CHECK(cfg.kind == ParamKind::QKdV);
    CHECK(cfg.q.lambda == doctest::Approx(-60.0));
    CHECK(cfg.q.c == doctest::Approx(60.0));
    REQUIRE(cfg.sweep_variable.has_value());
    CHECK(*cfg.sweep_variable == "mu");
    CHECK(cfg.sweep_count == 5);
    CHECK(cfg.fd.absolute);
    CHECK(cfg.fd.delta_nu == doctest::Approx(0.005));
    CHECK(cfg.numerics.delta_omega == doctest::Approx(1e-3));
    CHECK(cfg.emit_csv);
    CHECK(cfg.emit_gnuplot);
}

TEST_CASE("config errors carry line numbers") {
    try {
        (void)parse_config_text("[model]\nmodel = kdv3\n[parameters]\nmu = abc\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 4);
    }
    try {
        (void)parse_config_text("[parameters]\nnot a key value\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS((void)parse_config_text("[parameters]\nc = 1\nj = 2\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("[parameters]\nsweep = bogus\nsweep_count = 3\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("[numerics]\nquadrature = simpson\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("mystery = 1\n"), ConfigError);
}

TEST_CASE("sweep is deterministic and worker-count independent") {
    const RunConfig cfg = parse_config_text(kQkdvConfig);
    const auto r1 = run_sweep(cfg, 1);
    const auto r2 = run_sweep(cfg, 4);
    const auto r3 = run_sweep(cfg, 1);
    CHECK(sweep_csv(r1) == sweep_csv(r2));
    CHECK(sweep_csv(r1) == sweep_csv(r3));
    CHECK(sweep_summary_json(cfg, r1, "t") == sweep_summary_json(cfg, r2, "t"));
    CHECK(r1.rows.size() == 5);
}

TEST_CASE("csv schema is stable") {
    const RunConfig cfg = parse_config_text(kQkdvConfig);
    const auto r = run_sweep(cfg, 1);
    const std::string csv = sweep_csv(r);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header ==
          "mu,period,action,m1,m2,m3,n_neg,n_zero,spectral,orbital,matched,stability_index,"
          "condition_number,asym_residual,limit_zone,detActionC,cauchy_schwarz_margin");
    // one line per row plus header
    std::size_t lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == r.rows.size() + 1);
}

TEST_CASE("infeasible sweep points are skipped with a reason") {
    RunConfig cfg = parse_config_text(kQkdvConfig);
    cfg.sweep_min = -6000; // below the well floor (about -5229)
    cfg.sweep_max = -5000;
    cfg.sweep_count = 4;
    const auto r = run_sweep(cfg, 1);
    CHECK(!r.skipped.empty());
    CHECK(r.rows.size() + r.skipped.size() == 4);
    CHECK(r.skipped.front().find("well minimum") != std::string::npos);

    cfg.sweep_min = -7000;
    cfg.sweep_max = -6000; // entirely infeasible
    CHECK_THROWS_AS((void)run_sweep(cfg, 1), Error);
}

TEST_CASE("analyze json exposes the stable report fields") {
    RunConfig cfg = parse_config_text(kQkdvConfig);
    cfg.sweep_variable.reset();
    cfg.q.mu = -4000.0;
    const std::string json = analyze_point_json(cfg);
    for (const char* field : {"\"minors\"", "\"n_hess\"", "\"verdict_spectral\"",
                              "\"verdict_orbital_qkdv\"", "\"stability_index\"", "\"residuals\"",
                              "\"modulation\""})
        CHECK(json.find(field) != std::string::npos);
}

TEST_CASE("evans csv header") {
    EvansScan scan;
    scan.r = {0.5, 1.0};
    scan.value = {-1.0, 2.0};
    const std::string csv = evans_csv(scan);
    CHECK(csv.rfind("r,value,cumulative_sign_changes\n", 0) == 0);
    CHECK(csv.find("\n1,2,1\n") != std::string::npos); // one cumulative flip
}

TEST_CASE("case catalog integrity") {
    const auto& cases = benchmark_cases();
    CHECK(cases.size() == 7);
    for (const char* name : {"kdv", "mkdv-focusing", "mkdv-defocusing", "gkdv4", "nls",
                             "boussinesq", "perfect-gas"}) {
        const auto& cd = find_case(name);
        CHECK(cd.config.sweep_count > 0);
        CHECK(cd.config.sweep_min < cd.config.sweep_max);
        CHECK(cd.config.fd.absolute); // captions quote absolute steps
    }
    CHECK_THROWS_AS((void)find_case("unknown"), Error);
    // benchmark step sizes are pinned verbatim
    CHECK(find_case("kdv").config.fd.delta_nu == doctest::Approx(0.005));
    CHECK(find_case("mkdv-focusing").config.fd.delta_nu == doctest::Approx(0.05));
    CHECK(find_case("nls").config.fd.delta_nu == doctest::Approx(1e-5));
    CHECK(find_case("boussinesq").config.fd.delta_nu == doctest::Approx(0.5e-4));
    CHECK(find_case("perfect-gas").config.fd.delta_nu == doctest::Approx(0.5e-4));
}

TEST_CASE("validation is deterministic in the seed") {
    ValidationOptions opts;
    opts.n_points = 3;
    opts.with_discriminant = false;
    opts.models = {"synthetic-quadratic"};
    const auto a = validate(7, opts);
    const auto b = validate(7, opts);
    CHECK(a.to_text() == b.to_text());
    CHECK(a.ok());
}

TEST_CASE("modulate csv shape") {
    RunConfig cfg = parse_config_text(kQkdvConfig);
    cfg.sweep_count = 3;
    const std::string csv = modulate_csv(cfg, 1);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header == "mu,period,re1,im1,re2,im2,re3,im3,hyperbolic,residual");
}

TEST_CASE("analyze json carries the sideband advisory field") {
    RunConfig cfg = parse_config_text(kQkdvConfig);
    cfg.sweep_variable.reset();
    cfg.q.mu = -4000.0;
    const std::string json = analyze_point_json(cfg);
    CHECK(json.find("\"sideband_instability_advisory\"") != std::string::npos);
}

TEST_CASE("hint keys select the well from the config") {
    const char* text = R"(
[model]
model = power-law
gamma = 3
sign = 1

[parameters]
lambda = -500
c = 1000
mu = -20000
hint_lo = 1
hint_hi = 60
)";
    const RunConfig cfg = parse_config_text(text);
    REQUIRE(cfg.hint.has_value());
    CHECK(cfg.hint->first == doctest::Approx(1.0));
    CHECK(cfg.hint->second == doctest::Approx(60.0));
    const auto m = cfg.make_model();
    const auto tp = find_turning_points(m, cfg.q, cfg.hint);
    CHECK(tp.v0 > 0.0); // the hint picks the positive-v well
}

TEST_CASE("EK analyze json from config text") {
    const char* text = R"(
[model]
model = nls-capillarity

[parameters]
mu = 2.5
lambda = -2.85
j = 1
sigma = 0
)";
    const RunConfig cfg = parse_config_text(text);
    CHECK(cfg.kind == ParamKind::EK);
    const std::string json = analyze_point_json(cfg);
    CHECK(json.find("\"verdict_orbital_EKL\"") != std::string::npos);
    CHECK(json.find("\"verdict_orbital_EKE\"") != std::string::npos);
}

TEST_CASE("a vacuous validation run does not report success") {
    ValidationOptions opts;
    opts.models = {"no-such-model"};
    opts.with_discriminant = false;
    const auto rep = validate(1, opts);
    CHECK_FALSE(rep.ok());
}
