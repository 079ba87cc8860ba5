#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wavestab/action.hpp"

using namespace wavestab;

namespace {

const double kPi = std::numbers::pi;

ActionJet3 kdv_mid_jet(double frac = 0.4, double delta_nu = 0.005) {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    const WaveParamsQ p{well.well_min + frac * (*well.barrier_mu - well.well_min), -60.0, 60.0};
    Numerics num;
    FdSettings fd;
    fd.delta_nu = delta_nu;
    fd.absolute = true;
    return action_jet_qkdv(m, p, num, fd);
}

} // namespace

TEST_CASE("synthetic action jet: isochronous well") {
    const auto m = make_builtin("synthetic-quadratic");
    Numerics num;
    FdSettings fd;
    const auto jet = action_jet_qkdv(m, {1.0, 0.0, -2.0}, num, fd);
    CHECK(jet.value == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-8));
    CHECK(jet.grad[0] == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-8)); // theta_mu = period
    CHECK(std::abs(jet.hess(0, 0)) <= 1e-8);  // theta_mumu = 0: period independent of mu
    CHECK(jet.fd_noise_warning);              // flagged as FD-degenerate
}

TEST_CASE("gradient identities tie the jet to the integrals") {
    const auto jet = kdv_mid_jet();
    CHECK(jet.grad[0] == jet.integrals.period);       // same quadrature values
    CHECK(jet.grad[1] == -jet.integrals.mean);
    CHECK(jet.grad[2] == jet.integrals.half_square);
}

TEST_CASE("kdv3 mid-range minors have the reference signs") {
    const auto jet = kdv_mid_jet();
    const auto minors = leading_minors(jet.hess);
    CHECK(minors[0] > 0.0);
    CHECK(minors[1] < 0.0);
    CHECK(minors[2] < 0.0);
    CHECK(jet.asym_residual <= 1e-3);
    CHECK_FALSE(jet.limit_zone);
}

TEST_CASE("finite-difference gradient of theta matches the quadrature gradient") {
    const auto m = make_builtin("kdv3");
    const auto jet = kdv_mid_jet();
    const WaveParamsQ p = jet.params;
    for (int var = 0; var < 3; ++var) {
        const double base = var == 0 ? p.mu : (var == 1 ? p.lambda : p.c);
        const double h = 1e-4 * std::max(1.0, std::abs(base));
        auto theta_at = [&](double delta) {
            WaveParamsQ q = p;
            (var == 0 ? q.mu : var == 1 ? q.lambda : q.c) += delta;
            const auto tp = find_turning_points(m, q);
            return profile_integrals(m, q, tp).action;
        };
        const double fd = (theta_at(h) - theta_at(-h)) / (2.0 * h);
        CHECK(std::abs(fd - jet.grad[static_cast<std::size_t>(var)]) <=
              1e-5 * std::max(1.0, std::abs(jet.grad[static_cast<std::size_t>(var)])));
    }
}

TEST_CASE("grad-fd and 9-point second-difference Hessians agree") {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    const WaveParamsQ p{well.well_min + 0.4 * (*well.barrier_mu - well.well_min), -60.0, 60.0};
    Numerics num;
    FdSettings grad_fd, second;
    grad_fd.delta_nu = second.delta_nu = 0.005;
    grad_fd.absolute = second.absolute = true;
    second.scheme = HessianScheme::SecondDiff;
    const auto a = action_jet_qkdv(m, p, num, grad_fd);
    const auto b = action_jet_qkdv(m, p, num, second);
    CHECK(determinant(a.hess) == doctest::Approx(determinant(b.hess)).epsilon(1e-2));
    for (int i = 0; i < 3; ++i)
        CHECK(a.hess(i, i) == doctest::Approx(b.hess(i, i)).epsilon(2e-2));
}

TEST_CASE("Richardson stability of det Hess theta in the FD step") {
    const auto a = kdv_mid_jet(0.4, 0.005);
    const auto b = kdv_mid_jet(0.4, 0.0025);
    const double da = determinant(a.hess), db = determinant(b.hess);
    CHECK(std::abs(da - db) <= 5e-3 * std::abs(da));
}

TEST_CASE("eta formula, boundary rejection, positivity on computed waves") {
    ActionJet3 jet;
    jet.grad = {1.0, 0.0, 1.0};
    CHECK(eta(jet, 1.0) == doctest::Approx(0.5));
    jet.grad = {2.0, 2.0, 1.0};
    CHECK_THROWS_AS((void)eta(jet, 1.0), Error); // Cauchy-Schwarz margin exactly zero
    jet.grad = {1.0, 0.0, 1.0};
    CHECK_THROWS_AS((void)eta(jet, 0.0), Error);

    const auto computed = kdv_mid_jet();
    CHECK(eta(computed, 0.7) > 0.0);
}

TEST_CASE("EK jet: value equals the mapped qKdV action, exchanged second derivatives") {
    const auto m = make_builtin("nls-capillarity");
    const WaveParamsEK ek{2.5, -2.8, 1.0, 0.0};
    Numerics num;
    FdSettings fd;
    fd.delta_nu = 1e-5;
    fd.absolute = true;
    const auto jet = action_jet_ek(m, ek, num, fd, EkHessianSource::Chain);
    CHECK(jet.value == jet.underlying.value); // Theta(mu,lambda,j,sigma) = theta(mapped)
    // chain-rule construction makes the exchange identities exact
    CHECK(jet.hess(0, 0) == jet.underlying.hess(1, 1)); // Theta_mumu = theta_ll
    CHECK(jet.hess(1, 1) == jet.underlying.hess(0, 0)); // Theta_ll = theta_mumu
}

TEST_CASE("EK chain-rule and direct-fd Hessians agree entrywise") {
    const auto m = make_builtin("nls-capillarity");
    const WaveParamsEK ek{2.5, -2.5, 1.0, 0.3}; // nonzero sigma exercises every term
    Numerics num;
    FdSettings fd;
    fd.delta_nu = 1e-5;
    fd.absolute = true;
    const auto jet = action_jet_ek(m, ek, num, fd, EkHessianSource::Both);
    CHECK_FALSE(jet.limit_zone);
    CHECK(jet.chain_vs_direct <= 1e-3);
}

TEST_CASE("chain-rule Hessian against symbolic differentiation on a synthetic theta") {
    // theta(a, b, c) = quadratic form with known coefficients: its chain-rule
    // pullback through (lambda - sigma^2/2, j sigma - mu, -j^2) is computed
    // here by finite differences of the closed form.
    oracles::Rng rng(91);
    for (int trial = 0; trial < 10; ++trial) {
        std::array<double, 10> q{};
        for (auto& x : q) x = rng.uniform(-1.0, 1.0);
        auto theta = [&](double a, double b, double c) {
            return q[0] + q[1] * a + q[2] * b + q[3] * c + 0.5 * q[4] * a * a +
                   0.5 * q[5] * b * b + 0.5 * q[6] * c * c + q[7] * a * b + q[8] * a * c +
                   q[9] * b * c;
        };
        const double j = rng.uniform(0.3, 1.5), sigma = rng.uniform(-1.0, 1.0);
        const double mu = rng.uniform(-1.0, 1.0), lambda = rng.uniform(-1.0, 1.0);
        auto Theta = [&](double m_, double l_, double j_, double s_) {
            return theta(l_ - 0.5 * s_ * s_, j_ * s_ - m_, -j_ * j_);
        };
        // jet of the quadratic theta at the mapped point
        const double a = lambda - 0.5 * sigma * sigma, b = j * sigma - mu, c = -j * j;
        ActionJet3 jet;
        jet.grad = {q[1] + q[4] * a + q[7] * b + q[8] * c,
                    q[2] + q[5] * b + q[7] * a + q[9] * c,
                    q[3] + q[6] * c + q[8] * a + q[9] * b};
        jet.hess(0, 0) = q[4];
        jet.hess(1, 1) = q[5];
        jet.hess(2, 2) = q[6];
        jet.hess(0, 1) = jet.hess(1, 0) = q[7];
        jet.hess(0, 2) = jet.hess(2, 0) = q[8];
        jet.hess(1, 2) = jet.hess(2, 1) = q[9];
        const Mat4 H = chain_rule_hessian(jet, j, sigma);
        // finite differences of Theta in the practical variables
        const double h = 1e-4;
        const double vars[4] = {mu, lambda, j, sigma};
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s) {
                double vp[4], vm[4], wp[4], wm[4];
                for (int k = 0; k < 4; ++k) vp[k] = vm[k] = wp[k] = wm[k] = vars[k];
                vp[r] += h; vp[s] += h;
                vm[r] -= h; vm[s] -= h;
                wp[r] += h; wp[s] -= h;
                wm[r] -= h; wm[s] += h;
                const double fd = (Theta(vp[0], vp[1], vp[2], vp[3]) + Theta(vm[0], vm[1], vm[2], vm[3]) -
                                   Theta(wp[0], wp[1], wp[2], wp[3]) - Theta(wm[0], wm[1], wm[2], wm[3])) /
                                  (4.0 * h * h);
                // the quadratic-in-theta composite is quartic in (j, sigma): FD error O(h^2)
                CHECK(H(r, s) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
    }
}

TEST_CASE("stencil displacement failures carry the failing variable") {
    const auto m = make_builtin("kdv3");
    const auto well = find_well(m, -60.0, 60.0);
    Numerics num;
    FdSettings fd;
    fd.delta_nu = 1.0; // absolute step of 1 in mu crosses the barrier
    fd.absolute = true;
    const WaveParamsQ p{*well.barrier_mu - 0.5, -60.0, 60.0};
    try {
        (void)action_jet_qkdv(m, p, num, fd);
        CHECK(false);
    } catch (const StencilError& e) {
        CHECK(e.variable == 0);
        CHECK(e.displacement == doctest::Approx(1.0));
    }
}

TEST_CASE("the jet records its own gradient cross-check") {
    const auto jet = kdv_mid_jet();
    for (int k = 0; k < 3; ++k)
        CHECK(jet.grad_fd[static_cast<std::size_t>(k)] ==
              doctest::Approx(jet.grad[static_cast<std::size_t>(k)]).epsilon(1e-4));
    CHECK(jet.grad_cross_residual <= 1e-4);
}
