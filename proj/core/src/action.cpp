#include "wavestab/action.hpp"

#include <cmath>

namespace wavestab {

namespace {

struct PointEval {
    ProfileIntegrals ints;
    TurningPoints tp;
};

std::array<double, 3> gradient_of(const ProfileIntegrals& ints) {
    return {ints.period, -ints.mean, ints.half_square};
}

// Re-solve the wave at a displaced parameter point, reusing the base center
// as the hint bracket. Reports which displacement failed.
PointEval eval_displaced(const NonlinearModel& model, const WaveParamsQ& base,
                         const TurningPoints& base_tp, int var, double step,
                         const Numerics& num) {
    WaveParamsQ p = base;
    if (var == 0) p.mu += step;
    else if (var == 1) p.lambda += step;
    else p.c += step;
    const double pad = 0.1 * std::max(1.0, base_tp.v3 - base_tp.v2);
    const std::pair<double, double> hint{base_tp.v0 - pad, base_tp.v0 + pad};
    try {
        PointEval out;
        out.tp = find_turning_points(model, p, hint, num);
        out.ints = profile_integrals(model, p, out.tp, num);
        return out;
    } catch (const Error& e) {
        throw StencilError(std::string("stencil displacement failed: ") + e.what(), var, step);
    }
}

std::array<double, 3> fd_steps(const WaveParamsQ& p, const FdSettings& fd) {
    if (fd.absolute) return {fd.delta_nu, fd.delta_nu, fd.delta_nu};
    return {fd.delta_nu * std::max(1.0, std::abs(p.mu)),
            fd.delta_nu * std::max(1.0, std::abs(p.lambda)),
            fd.delta_nu * std::max(1.0, std::abs(p.c))};
}

} // namespace

ActionJet3 action_jet_qkdv(const NonlinearModel& model, const WaveParamsQ& params,
                           const Numerics& num, const FdSettings& fd,
                           std::optional<std::pair<double, double>> hint) {
    ActionJet3 jet;
    jet.params = params;
    jet.tp = find_turning_points(model, params, hint, num);
    jet.integrals = profile_integrals(model, params, jet.tp, num);
    jet.value = jet.integrals.action;
    jet.grad = gradient_of(jet.integrals);
    jet.limit_zone = jet.tp.limit_zone;

    const auto steps = fd_steps(params, fd);
    Mat3 H;
    // Quadrature relative accuracy drives the subtractive-cancellation floor
    // of the finite differences.
    const double quad_rel = 1e-11;
    bool noise_warning = false;

    if (fd.scheme == HessianScheme::GradFd) {
        for (int k = 0; k < 3; ++k) {
            const double dk = steps[static_cast<std::size_t>(k)];
            const auto plus = eval_displaced(model, params, jet.tp, k, +dk, num);
            const auto minus = eval_displaced(model, params, jet.tp, k, -dk, num);
            const auto gp = gradient_of(plus.ints);
            const auto gm = gradient_of(minus.ints);
            // the displaced action values give the first-difference gradient
            // for free; the jet keeps the quadrature one and the gap
            jet.grad_fd[static_cast<std::size_t>(k)] =
                (plus.ints.action - minus.ints.action) / (2.0 * dk);
            for (int i = 0; i < 3; ++i) {
                const double est = (gp[static_cast<std::size_t>(i)] - gm[static_cast<std::size_t>(i)]) / (2.0 * dk);
                H(i, k) = est;
                const double noise =
                    quad_rel * std::max(std::abs(gp[static_cast<std::size_t>(i)]), std::abs(gm[static_cast<std::size_t>(i)])) / dk;
                if (std::abs(est) < 10.0 * noise) noise_warning = true;
            }
        }
    } else {
        // 9-point stencil: pure second differences of theta on a 3x3 cross.
        const double th0 = jet.value;
        std::array<double, 3> plus, minus;
        for (int k = 0; k < 3; ++k) {
            const double dk = steps[static_cast<std::size_t>(k)];
            plus[static_cast<std::size_t>(k)] = eval_displaced(model, params, jet.tp, k, +dk, num).ints.action;
            minus[static_cast<std::size_t>(k)] = eval_displaced(model, params, jet.tp, k, -dk, num).ints.action;
            jet.grad_fd[static_cast<std::size_t>(k)] =
                (plus[static_cast<std::size_t>(k)] - minus[static_cast<std::size_t>(k)]) / (2.0 * dk);
            H(k, k) = (plus[static_cast<std::size_t>(k)] - 2.0 * th0 + minus[static_cast<std::size_t>(k)]) / (dk * dk);
        }
        auto displaced2 = [&](int a, double da, int b, double db) {
            WaveParamsQ p = params;
            auto bump = [&](int var, double s) {
                if (var == 0) p.mu += s;
                else if (var == 1) p.lambda += s;
                else p.c += s;
            };
            bump(a, da);
            bump(b, db);
            const double pad = 0.1 * std::max(1.0, jet.tp.v3 - jet.tp.v2);
            const std::pair<double, double> h2{jet.tp.v0 - pad, jet.tp.v0 + pad};
            try {
                const auto tp = find_turning_points(model, p, h2, num);
                return profile_integrals(model, p, tp, num).action;
            } catch (const Error& e) {
                throw StencilError(std::string("stencil displacement failed: ") + e.what(), a, da);
            }
        };
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const double da = steps[static_cast<std::size_t>(a)], db = steps[static_cast<std::size_t>(b)];
                const double pp = displaced2(a, +da, b, +db);
                const double pm = displaced2(a, +da, b, -db);
                const double mp = displaced2(a, -da, b, +db);
                const double mm = displaced2(a, -da, b, -db);
                const double est = (pp - pm - mp + mm) / (4.0 * da * db);
                H(a, b) = est;
                H(b, a) = est;
                const double noise = quad_rel * std::abs(th0) / (da * db);
                if (std::abs(est) < 10.0 * noise) noise_warning = true;
            }
    }

    jet.asym_residual = asymmetry(H);
    jet.hess = symmetrized(H);
    jet.fd_noise_warning = noise_warning;
    for (int k = 0; k < 3; ++k)
        jet.grad_cross_residual = std::max(
            jet.grad_cross_residual,
            std::abs(jet.grad_fd[static_cast<std::size_t>(k)] - jet.grad[static_cast<std::size_t>(k)]) /
                std::max(1.0, std::abs(jet.grad[static_cast<std::size_t>(k)])));
    return jet;
}

double eta(const ActionJet3& jet3, double j) {
    if (j == 0.0) throw Error("eta: j must be nonzero");
    const double tmu = jet3.grad[0], tl = jet3.grad[1], tc = jet3.grad[2];
    if (tmu <= 0.0) throw Error("eta: theta_mu must be positive");
    const double num = 2.0 * tc * tmu - tl * tl;
    if (num <= 0.0)
        throw Error("eta: 2 theta_c theta_mu - theta_lambda^2 must be strictly positive (Cauchy-Schwarz)");
    return num / (4.0 * j * j * tmu);
}

Mat4 chain_rule_hessian(const ActionJet3& jet3, double j, double sigma) {
    const double tm = jet3.grad[0];  // theta_mu
    const double tl = jet3.grad[1];  // theta_lambda
    const double tmm = jet3.hess(0, 0), tml = jet3.hess(0, 1), tmc = jet3.hess(0, 2);
    const double tll = jet3.hess(1, 1), tlc = jet3.hess(1, 2), tcc = jet3.hess(2, 2);
    const double tc = jet3.grad[2];

    Mat4 H;
    // Ordering (mu, lambda, j, sigma); derivatives of theta taken at the
    // mapped point (lambda - sigma^2/2, j sigma - mu, -j^2).
    H(0, 0) = tll;
    H(0, 1) = -tml;
    H(0, 2) = -sigma * tll + 2.0 * j * tlc;
    H(0, 3) = -j * tll + sigma * tml;
    H(1, 1) = tmm;
    H(1, 2) = -2.0 * j * tmc + sigma * tml;
    H(1, 3) = -sigma * tmm + j * tml;
    H(2, 2) = 4.0 * j * j * tcc + sigma * sigma * tll - 4.0 * j * sigma * tlc - 2.0 * tc;
    H(2, 3) = j * sigma * tll - 2.0 * j * j * tlc + 2.0 * j * sigma * tmc - sigma * sigma * tml + tl;
    H(3, 3) = j * j * tll + sigma * sigma * tmm - 2.0 * j * sigma * tml - tm;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < i; ++k) H(i, k) = H(k, i);
    return H;
}

ActionJet4 action_jet_ek(const NonlinearModel& model, const WaveParamsEK& params,
                         const Numerics& num, const FdSettings& fd, EkHessianSource source,
                         std::optional<std::pair<double, double>> hint) {
    ActionJet4 jet;
    jet.params = params;
    jet.source = source;
    const WaveParamsQ q = ek_to_qkdv(params);
    jet.underlying = action_jet_qkdv(model, q, num, fd, hint);
    jet.limit_zone = jet.underlying.limit_zone;
    jet.value = jet.underlying.value;

    // Gradient of Theta by the chain rule on the exact quadrature gradient:
    // Theta_mu = -theta_lambda, Theta_lambda = theta_mu,
    // Theta_j = sigma theta_lambda - 2 j theta_c, Theta_sigma = -sigma theta_mu + j theta_lambda.
    const double tm = jet.underlying.grad[0], tl = jet.underlying.grad[1], tc = jet.underlying.grad[2];
    jet.grad = {-tl, tm, params.sigma * tl - 2.0 * params.j * tc,
                -params.sigma * tm + params.j * tl};

    const Mat4 chain = chain_rule_hessian(jet.underlying, params.j, params.sigma);

    Mat4 direct{};
    if (source != EkHessianSource::Chain) {
        // Central differences of the Theta gradient in the four practical variables.
        std::array<double, 4> steps;
        if (fd.absolute)
            steps = {fd.delta_nu, fd.delta_nu, fd.delta_nu, fd.delta_nu};
        else
            steps = {fd.delta_nu * std::max(1.0, std::abs(params.mu)),
                     fd.delta_nu * std::max(1.0, std::abs(params.lambda)),
                     fd.delta_nu * std::max(1.0, std::abs(params.j)),
                     fd.delta_nu * std::max(1.0, std::abs(params.sigma))};
        auto grad_at = [&](WaveParamsEK p) {
            const WaveParamsQ qq = ek_to_qkdv(p);
            const double pad = 0.1 * std::max(1.0, jet.underlying.tp.v3 - jet.underlying.tp.v2);
            const std::pair<double, double> h2{jet.underlying.tp.v0 - pad, jet.underlying.tp.v0 + pad};
            const auto tp = find_turning_points(model, qq, h2, num);
            const auto ints = profile_integrals(model, qq, tp, num);
            const double gm = ints.period, gl = -ints.mean, gc = ints.half_square;
            return std::array<double, 4>{-gl, gm, p.sigma * gl - 2.0 * p.j * gc,
                                         -p.sigma * gm + p.j * gl};
        };
        Mat4 Hd;
        for (int k = 0; k < 4; ++k) {
            WaveParamsEK pp = params, pm = params;
            const double dk = steps[static_cast<std::size_t>(k)];
            auto bump = [&](WaveParamsEK& p, double s) {
                if (k == 0) p.mu += s;
                else if (k == 1) p.lambda += s;
                else if (k == 2) p.j += s;
                else p.sigma += s;
            };
            bump(pp, +dk);
            bump(pm, -dk);
            std::array<double, 4> gp, gm2;
            try {
                gp = grad_at(pp);
                gm2 = grad_at(pm);
            } catch (const Error& e) {
                throw StencilError(std::string("EK stencil displacement failed: ") + e.what(), k, dk);
            }
            for (int i = 0; i < 4; ++i)
                Hd(i, k) = (gp[static_cast<std::size_t>(i)] - gm2[static_cast<std::size_t>(i)]) / (2.0 * dk);
        }
        direct = symmetrized(Hd);
    }

    if (source == EkHessianSource::Chain) {
        jet.hess = chain;
    } else if (source == EkHessianSource::DirectFd) {
        jet.hess = direct;
    } else {
        jet.hess = chain;
        double worst = 0.0;
        const double scale = frobenius_norm(chain);
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k)
                worst = std::max(worst,
                                 std::abs(chain(i, k) - direct(i, k)) /
                                     std::max({std::abs(chain(i, k)), std::abs(direct(i, k)),
                                               1e-8 * scale}));
        jet.chain_vs_direct = worst;
    }
    return jet;
}

} // namespace wavestab
