#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wavestab/profile.hpp"

using namespace wavestab;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("ek_to_qkdv parameter map") {
    auto q = ek_to_qkdv({-2.5, 2.0, 1.0, 0.0});
    CHECK(q.mu == doctest::Approx(2.0));
    CHECK(q.lambda == doctest::Approx(2.5));
    CHECK(q.c == doctest::Approx(-1.0));

    q = ek_to_qkdv({0.0, 0.0, 0.0, 0.0});
    CHECK(q.mu == 0.0);
    CHECK(q.lambda == 0.0);
    CHECK(q.c == 0.0);

    q = ek_to_qkdv({-2.0, 1.0, -0.1, 0.0});
    CHECK(q.mu == doctest::Approx(1.0));
    CHECK(q.lambda == doctest::Approx(2.0));
    CHECK(q.c == doctest::Approx(-0.01));
}

TEST_CASE("synthetic-quadratic turning points are exact") {
    const auto m = make_builtin("synthetic-quadratic");
    const WaveParamsQ p{1.0, 0.0, -2.0}; // W = v^2
    const auto tp = find_turning_points(m, p);
    CHECK(tp.v2 == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(tp.v3 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tp.v0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(tp.residual_v2 <= 1e-10);
    CHECK(tp.residual_v3 <= 1e-10);
}

TEST_CASE("synthetic-quadratic integrals match the harmonic oracle") {
    const auto m = make_builtin("synthetic-quadratic");
    for (double mu : {0.5, 1.0, 2.0}) {
        const WaveParamsQ p{mu, 0.0, -2.0};
        const auto tp = find_turning_points(m, p);
        const auto ints = profile_integrals(m, p, tp);
        CHECK(std::abs(ints.period - kPi * std::sqrt(2.0)) <= 1e-8 * ints.period);
        CHECK(std::abs(ints.action - kPi * std::sqrt(2.0) * mu) <= 1e-8 * ints.action);
        CHECK(std::abs(ints.mean) <= 1e-10);
        CHECK(ints.half_square == doctest::Approx(mu * kPi * std::sqrt(2.0) / 4.0).epsilon(1e-8));
    }
}

TEST_CASE("kdv3 turning points against a bisection oracle") {
    const auto m = make_builtin("kdv3");
    const double lambda = -60.0, c = 60.0;
    auto W = [&](double v) { return v * v * v - 30.0 * v * v - 60.0 * v; };
    const double v0 = 10.0 + std::sqrt(120.0);
    const double mu = W(v0) + 100.0;
    const WaveParamsQ p{mu, lambda, c};
    const auto tp = find_turning_points(m, p);
    // independent bisection brackets around the center
    const double v2_oracle = oracles::bisect([&](double v) { return W(v) - mu; }, v0, v0 - 10.0);
    const double v3_oracle = oracles::bisect([&](double v) { return W(v) - mu; }, v0, v0 + 10.0);
    CHECK(tp.v2 == doctest::Approx(v2_oracle).epsilon(1e-10));
    CHECK(tp.v3 == doctest::Approx(v3_oracle).epsilon(1e-10));
    CHECK(tp.v2 < tp.v0);
    CHECK(tp.v0 < tp.v3);
    CHECK(tp.residual_v2 <= 1e-10);
    CHECK(tp.residual_v3 <= 1e-10);
}

TEST_CASE("infeasible energies raise the documented errors") {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    CHECK_THROWS_AS((void)find_turning_points(m, {well.well_min - 1.0, -60.0, 60.0}),
                    NoOscillationError);
    CHECK_THROWS_AS((void)find_turning_points(m, {*well.barrier_mu + 10.0, -60.0, 60.0}),
                    AboveBarrierError);
    CHECK_THROWS_AS((void)find_turning_points(m, {*well.barrier_mu, -60.0, 60.0}), Error);
    // W' = 3v^2 + 1 > 0 everywhere: no well at all
    CHECK_THROWS_AS((void)find_well(m, 1.0, 0.0), NoWellError);
}

TEST_CASE("quadrature self-consistency under step halving and rule change") {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    const WaveParamsQ p{well.well_min + 0.4 * (*well.barrier_mu - well.well_min), -60.0, 60.0};
    const auto tp = find_turning_points(m, p);
    Numerics coarse, fine, trap;
    fine.delta_omega = 0.5e-4;
    trap.quadrature = Quadrature::Trapezoid;
    const auto a = profile_integrals(m, p, tp, coarse);
    const auto b = profile_integrals(m, p, tp, fine);
    const auto t = profile_integrals(m, p, tp, trap);
    CHECK(std::abs(a.period - b.period) <= 1e-6 * a.period);
    CHECK(std::abs(a.action - b.action) <= 1e-6 * a.action);
    CHECK(std::abs(a.period - t.period) <= 1e-6 * a.period);
    CHECK(std::abs(a.action - t.action) <= 1e-6 * a.action);
}

TEST_CASE("profile reconstruction: harmonic closed form and periodicity") {
    const auto m = make_builtin("synthetic-quadratic");
    const WaveParamsQ p{1.0, 0.0, -2.0};
    const auto tp = find_turning_points(m, p);
    const auto prof = reconstruct_profile(m, p, tp, 4096);
    double sup = 0.0;
    for (std::size_t i = 0; i < prof.x.size(); ++i)
        sup = std::max(sup, std::abs(prof.v[i] + std::cos(std::sqrt(2.0) * prof.x[i])));
    CHECK(sup <= 1e-6);
    CHECK(prof.v.front() == doctest::Approx(tp.v2));
    CHECK(prof.vx.front() == 0.0);
    CHECK(std::abs(prof.v.back() - tp.v2) <= 1e-6);
    CHECK(std::abs(prof.vx.back()) <= 1e-6);
    CHECK(prof.drift <= 1e-8 * (std::abs(p.mu) + 1.0));
    CHECK_THROWS_AS((void)reconstruct_profile(m, p, tp, 128), Error);
}

TEST_CASE("profile reconstruction properties on a kdv3 wave") {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    const WaveParamsQ p{well.well_min + 0.5 * (*well.barrier_mu - well.well_min), -60.0, 60.0};
    const auto tp = find_turning_points(m, p);
    const auto ints = profile_integrals(m, p, tp);
    const auto prof = reconstruct_profile(m, p, tp, 4096);

    CHECK(prof.drift <= 1e-8 * (std::abs(p.mu) + 1.0));
    CHECK(std::abs(prof.v.back() - tp.v2) <= 1e-4 * (tp.v3 - tp.v2));

    // monotone rise from trough to crest on (0, period/2)
    const std::size_t half = prof.v.size() / 2;
    for (std::size_t i = 1; i + 1 < half; ++i) CHECK(prof.vx[i] > 0.0);

    // the grid value nearest period/2 hits the crest
    std::size_t nearest = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < prof.x.size(); ++i) {
        const double dist = std::abs(prof.x[i] - 0.5 * prof.period);
        if (dist < best) {
            best = dist;
            nearest = i;
        }
    }
    CHECK(std::abs(prof.v[nearest] - tp.v3) <= 1e-4 * (tp.v3 - tp.v2));

    // quadrature mean matches the trapezoid mean of the samples
    double trap = 0.0;
    for (std::size_t i = 0; i + 1 < prof.v.size(); ++i)
        trap += 0.5 * (prof.v[i] + prof.v[i + 1]) * (prof.x[i + 1] - prof.x[i]);
    CHECK(std::abs(trap - ints.mean) <= 1e-4 * std::abs(ints.mean));

    // Cauchy-Schwarz strictness
    CHECK(ints.period * 2.0 * ints.half_square - ints.mean * ints.mean > 0.0);
}

TEST_CASE("period grows toward the soliton limit") {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    const double span = *well.barrier_mu - well.well_min;
    double prev = 0.0;
    for (double s : {0.2, 0.5, 0.8, 0.95, 0.999}) {
        const WaveParamsQ p{well.well_min + s * span, -60.0, 60.0};
        const auto tp = find_turning_points(m, p);
        const auto ints = profile_integrals(m, p, tp);
        CHECK(ints.period > prev);
        prev = ints.period;
    }
}

TEST_CASE("limit-zone flags near the harmonic and soliton limits") {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    const double span = *well.barrier_mu - well.well_min;
    // extremely small amplitude: width below 1e-6 * |v0|
    const double mu_harm = well.well_min + 1e-16 * span;
    bool flagged_or_thrown = false;
    try {
        flagged_or_thrown = find_turning_points(m, {mu_harm, -60.0, 60.0}).limit_zone;
    } catch (const Error&) {
        flagged_or_thrown = true; // degenerate enough to be rejected outright
    }
    CHECK(flagged_or_thrown);
    // extremely close to the barrier: flagged, or rejected as degenerate
    const double mu_sol = *well.barrier_mu - 1e-15 * span;
    bool soliton_flagged = false;
    try {
        soliton_flagged = find_turning_points(m, {mu_sol, -60.0, 60.0}).limit_zone;
    } catch (const Error&) {
        soliton_flagged = true;
    }
    CHECK(soliton_flagged);
}

TEST_CASE("hint selects a well in a double-well potential") {
    // focusing mKdV landscape has centers on both sides of the saddle
    const auto m = make_builtin("power-law", {3.0, 1});
    const auto right = find_well(m, -500.0, 1000.0, std::make_pair(1.0, 60.0));
    const auto left = find_well(m, -500.0, 1000.0, std::make_pair(-60.0, -1.0));
    CHECK(right.v0 > 0.0);
    CHECK(left.v0 < 0.0);
    // unhinted pick: the deepest well
    const auto deepest = find_well(m, -500.0, 1000.0);
    CHECK(deepest.well_min == doctest::Approx(std::min(right.well_min, left.well_min)));
}
