#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "wavestab/action.hpp"
#include "wavestab/evans.hpp"

using namespace wavestab;

namespace {

struct KdvPoint {
    NonlinearModel model = make_builtin("kdv3");
    WaveParamsQ params;
    ActionJet3 jet;
    ProfileSamples profile;
};

KdvPoint kdv_point(double frac = 0.4) {
    KdvPoint kp;
    const auto well = find_well(kp.model, -60.0, 60.0);
    kp.params = {well.well_min + frac * (*well.barrier_mu - well.well_min), -60.0, 60.0};
    Numerics num;
    FdSettings fd;
    fd.delta_nu = 0.005;
    fd.absolute = true;
    kp.jet = action_jet_qkdv(kp.model, kp.params, num, fd);
    kp.profile = reconstruct_profile(kp.model, kp.params, kp.jet.tp, 4096);
    return kp;
}

} // namespace

TEST_CASE("qKdV Evans scan: cubic fit, tail sign, Liouville drift") {
    const auto kp = kdv_point();
    EvansSettings st;
    st.n_grid = 16384;
    st.r_count = 160;
    const auto scan = evans_scan_qkdv(kp.profile, kp.model, kp.params, st);
    const double det = determinant(kp.jet.hess);
    CHECK(std::abs(scan.fit_coeff - det) <= 0.02 * std::abs(det));
    CHECK(std::abs(scan.fit_slope - 3.0) <= 0.25);
    CHECK(scan.tail_sign == -1);
    CHECK(scan.det_monodromy_drift <= 1e-6);
    CHECK(scan.leading_power == 3);
    // cubic decay on the fit window: |d| <= C r^3 with C close to the fit
    for (std::size_t i = 0; i < scan.r.size(); ++i) {
        if (scan.r[i] < scan.fit_window_lo || scan.r[i] > scan.fit_window_hi) continue;
        CHECK(std::abs(scan.value[i]) <= 10.0 * std::abs(scan.fit_coeff) * std::pow(scan.r[i], 3));
    }
    // stable wave, det < 0: even number of sign changes
    CHECK(scan.sign_changes % 2 == 0);
}

TEST_CASE("translation mode is fixed by the zero-frequency fundamental matrix") {
    const auto kp = kdv_point();
    CHECK(translation_mode_residual(kp.profile, kp.model, kp.params, 16384) <= 1e-5);
}

TEST_CASE("EKL Evans scan at an NLS-type point") {
    const auto model = make_builtin("nls-capillarity");
    const auto well = find_well(model, -2.5, -1.0);
    WaveParamsEK ek{2.5, well.well_min + 0.4 * (*well.barrier_mu - well.well_min), 1.0, 0.0};
    Numerics num;
    FdSettings fd;
    fd.delta_nu = 1e-5;
    fd.absolute = true;
    const auto jet = action_jet_ek(model, ek, num, fd, EkHessianSource::Chain);
    const auto profile = reconstruct_profile(model, ek_to_qkdv(ek), jet.underlying.tp, 4096);
    EvansSettings st;
    st.n_grid = 16384;
    st.r_count = 160;
    const auto scan = evans_scan_ekl(profile, model, ek, st);
    const double det = determinant(jet.hess);
    CHECK(det > 0.0);
    CHECK(std::abs(scan.fit_coeff - det) <= 0.05 * std::abs(det));
    CHECK(std::abs(scan.fit_slope - 4.0) <= 0.25);
    CHECK(scan.tail_sign == 1);
    CHECK(scan.det_monodromy_drift <= 1e-6);
    CHECK(scan.sign_changes % 2 == 0); // det > 0: even count per the parity rule
}

TEST_CASE("spectrally unstable Boussinesq point: odd sign-change count") {
    const auto model = make_builtin("boussinesq", {2.0, 1});
    const auto well = find_well(model, 2.0, -0.01);
    WaveParamsEK ek{-2.0, well.well_min + 0.3 * (*well.barrier_mu - well.well_min), -0.1, 0.0};
    Numerics num;
    FdSettings fd;
    fd.delta_nu = 0.5e-4;
    fd.absolute = true;
    const auto jet = action_jet_ek(model, ek, num, fd, EkHessianSource::Chain);
    REQUIRE(determinant(jet.hess) < 0.0); // past the transition
    const auto profile = reconstruct_profile(model, ek_to_qkdv(ek), jet.underlying.tp, 4096);
    EvansSettings st;
    st.n_grid = 16384;
    st.r_count = 160;
    const auto scan = evans_scan_ekl(profile, model, ek, st);
    CHECK(scan.sign_changes % 2 == 1);
    CHECK(scan.tail_sign == 1); // D(r) > 0 for r >> 1
}

TEST_CASE("grid robustness: doubling the integration grid moves values marginally") {
    const auto kp = kdv_point();
    EvansSettings coarse, fine;
    coarse.n_grid = 8192;
    fine.n_grid = 16384;
    coarse.r_count = fine.r_count = 24;
    coarse.r_max = fine.r_max = 100.0;
    const auto a = evans_scan_qkdv(kp.profile, kp.model, kp.params, coarse);
    const auto b = evans_scan_qkdv(kp.profile, kp.model, kp.params, fine);
    for (std::size_t i = 0; i < a.r.size(); ++i) {
        if (std::abs(b.value[i]) < 1e-9 * std::abs(b.value.back())) continue;
        CHECK(std::abs(a.value[i] - b.value[i]) <= 1e-4 * std::abs(b.value[i]));
    }
}

TEST_CASE("Sturm discriminant: T(0) = 2, unit determinant, sign rule both ways") {
    // increasing-period well: T'(0) > 0
    const auto kp = kdv_point();
    const auto disc = sturm_discriminant(kp.profile, kp.model, kp.params, {0.5, 1.0}, 16384);
    CHECK(disc.T0_residual <= 1e-6);
    CHECK(disc.det_drift <= 1e-8);
    CHECK(disc.Tp0 > 0.0);
    CHECK(kp.jet.hess(0, 0) > 0.0);
    CHECK(disc.T.size() == 2);

    // hardening quartic well: period decreases with energy, T'(0) < 0
    const auto hard = make_builtin("power-law", {3.0, 1});
    const WaveParamsQ hp{1.0, 0.1, -2.0};
    const auto tp = find_turning_points(hard, hp);
    const auto prof = reconstruct_profile(hard, hp, tp, 4096);
    Numerics num;
    FdSettings fd;
    const auto jet = action_jet_qkdv(hard, hp, num, fd);
    const auto dh = sturm_discriminant(prof, hard, hp, {}, 16384);
    CHECK(dh.T0_residual <= 1e-6);
    CHECK(jet.hess(0, 0) < 0.0);
    CHECK(dh.Tp0 < 0.0);
}

TEST_CASE("Sturm discriminant on the isochronous well against the closed form") {
    // a = -d^2/dx^2 - 2 on a period pi sqrt(2): T(r) = 2 cos(sqrt(2 + r) period)
    const auto m = make_builtin("synthetic-quadratic");
    const WaveParamsQ p{1.0, 0.0, -2.0};
    const auto tp = find_turning_points(m, p);
    const auto prof = reconstruct_profile(m, p, tp, 4096);
    const auto disc = sturm_discriminant(prof, m, p, {1.0, 5.0}, 8192);
    CHECK(disc.T0_residual <= 1e-8);
    CHECK(std::abs(disc.Tp0) <= 1e-4); // Upsilon_mu = 0 edge
    for (std::size_t i = 0; i < disc.r.size(); ++i) {
        const double exact = 2.0 * std::cos(std::sqrt(2.0 + disc.r[i]) * prof.period);
        CHECK(disc.T[i] == doctest::Approx(exact).epsilon(1e-7).scale(1.0));
    }
}
