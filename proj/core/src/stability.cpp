#include "wavestab/stability.hpp"

#include <algorithm>
#include <cmath>

namespace wavestab {

const char* to_string(SpectralVerdict v) {
    return v == SpectralVerdict::Unstable ? "Unstable" : "NotExcluded";
}

const char* to_string(OrbitalVerdict v) {
    switch (v) {
        case OrbitalVerdict::Stable: return "Stable";
        case OrbitalVerdict::Degenerate: return "Degenerate";
        default: return "NotConcluded";
    }
}

namespace {

// 2x2 pivot minor | H(a,b) H(p,b) ; H(a,p) H(p,p) | of a symmetric H.
template <int N>
double pivot_minor(const Mat<N>& H, int a, int b, int p) {
    return H(a, b) * H(p, p) - H(p, b) * H(a, p);
}

template <int N>
std::array<double, N> row_norms(const Mat<N>& H) {
    std::array<double, N> r{};
    for (int i = 0; i < N; ++i) {
        double s = 0.0;
        for (int j = 0; j < N; ++j) s += H(i, j) * H(i, j);
        r[static_cast<std::size_t>(i)] = std::max(std::sqrt(s), 1e-300);
    }
    return r;
}

// Hadamard bounds of the leading minors: the natural per-minor magnitude
// scale for sign decisions on badly scale-imbalanced Hessians.
template <int N>
std::array<double, N> minor_scales(const Mat<N>& H) {
    const auto rn = row_norms(H);
    std::array<double, N> s{};
    double prod = 1.0;
    for (int i = 0; i < N; ++i) {
        prod *= rn[static_cast<std::size_t>(i)];
        s[static_cast<std::size_t>(i)] = prod;
    }
    return s;
}

// Zero-band tolerance for verdict signatures: relative to the smallest row
// norm rather than ||H||, so a tiny-but-resolved theta_mumu direction is not
// declared degenerate merely because other parameters live on bigger scales.
template <int N>
double verdict_eigen_tol(const Mat<N>& H, double tol) {
    const auto rn = row_norms(H);
    double lo = rn[0];
    for (double x : rn) lo = std::min(lo, x);
    const double fro = frobenius_norm(H);
    if (fro <= 0.0) return tol;
    return std::clamp(tol * lo / fro, 1e-14, tol);
}

} // namespace

template <int N>
SignatureResult signature(const Mat<N>& H, double tol) {
    const Mat<N> S = symmetrized(H);
    if (asymmetry(H) > 1e-8 && asymmetry(H) > 100.0 * tol)
        throw Error("signature: matrix asymmetric beyond threshold");
    const double scale = frobenius_norm(S);
    SignatureResult r;
    r.tol = tol * scale;
    const auto spec = jacobi_eigenvalues(S, std::min(tol, 1e-12));
    r.eigenvalues = spec.eigenvalues;
    for (double ev : r.eigenvalues) {
        if (ev < -r.tol) ++r.n_neg;
        else if (ev > r.tol) ++r.n_pos;
        else ++r.n_zero;
    }
    r.method = SignatureMethod::Eigen;

    // Sylvester's rule as a cross-check when every leading minor is resolved.
    const auto minors = leading_minors(S);
    const auto scales = minor_scales(S);
    bool resolved = scale > 0.0;
    for (int k = 0; k < N; ++k)
        resolved = resolved && std::abs(minors[static_cast<std::size_t>(k)]) >
                                   tol * scales[static_cast<std::size_t>(k)];
    if (resolved && r.n_zero == 0) {
        int changes = 0;
        double prev = 1.0;
        for (int k = 0; k < N; ++k) {
            const double cur = minors[static_cast<std::size_t>(k)];
            if ((cur < 0.0) != (prev < 0.0)) ++changes;
            prev = cur;
        }
        if (changes == r.n_neg) r.method = SignatureMethod::Sylvester;
        // disagreement leaves the eigen count in force; callers can compare
    }
    return r;
}

template SignatureResult signature<2>(const Mat2&, double);
template SignatureResult signature<3>(const Mat3&, double);
template SignatureResult signature<4>(const Mat4&, double);

template <int N>
double condition_number(const Mat<N>& H) {
    const auto spec = jacobi_eigenvalues(symmetrized(H));
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double ev : spec.eigenvalues) {
        lo = std::min(lo, std::abs(ev));
        hi = std::max(hi, std::abs(ev));
    }
    if (lo < 1e-30) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

template double condition_number<2>(const Mat2&);
template double condition_number<3>(const Mat3&);
template double condition_number<4>(const Mat4&);


ConstraintMatrices constraint_matrices(const ActionJet3& jet3,
                                       const std::optional<ActionJet4>& jet4, double tol) {
    ConstraintMatrices cm;
    const Mat3& h = jet3.hess;
    const auto rn3 = row_norms(h);
    cm.pivot_mu_mu = h(0, 0);
    if (std::abs(h(0, 0)) > tol * rn3[0]) {
        Mat2 c;
        // variables (lambda, c) = indices (1, 2); pivot theta_mumu = (0,0)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) c(i, j) = -pivot_minor(h, i + 1, j + 1, 0) / h(0, 0);
        cm.c_q = c;
        cm.c_q_valid = true;
    }
    if (jet4) {
        const Mat4& H = jet4->hess;
        const auto rn4 = row_norms(H);
        cm.pivot_mu_mu = H(0, 0);
        cm.pivot_lambda_lambda = H(1, 1);
        if (std::abs(H(0, 0)) > tol * rn4[0]) {
            Mat3 ce;
            // rows/cols over (lambda, j, sigma) = indices (1, 2, 3); pivot Theta_mumu
            const int idx[3] = {1, 2, 3};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    ce(i, j) = -pivot_minor(H, idx[i], idx[j], 0) / H(0, 0);
            cm.C_E = ce;
            cm.C_E_valid = true;
        }
        if (std::abs(H(1, 1)) > tol * rn4[1]) {
            Mat3 cl;
            // rows/cols over (mu, sigma, j) = indices (0, 3, 2); pivot Theta_lambdalambda
            const int idx[3] = {0, 3, 2};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    cl(i, j) = -pivot_minor(H, idx[i], idx[j], 1) / H(1, 1);
            cm.C_L = cl;
            cm.C_L_valid = true;
        }
    }
    return cm;
}

StabilityReport verdict_qkdv(const ActionJet3& jet3, double tol) {
    StabilityReport rep;
    rep.limit_zone = jet3.limit_zone;
    const Mat3& h = jet3.hess;
    const auto minors = leading_minors(h);
    rep.minors.assign(minors.begin(), minors.end());
    rep.sig_hess = signature(h, verdict_eigen_tol(h, tol));
    rep.condition_number = condition_number(h);
    rep.stability_index = rep.sig_hess.n_neg - 1;

    const double m1 = minors[0], m2 = minors[1], m3 = minors[2];
    const auto scales = minor_scales(h);
    const double t1 = tol * scales[0];
    const double t2 = tol * scales[1];
    const double t3 = tol * scales[2];

    rep.spectral = (m3 > t3) ? SpectralVerdict::Unstable : SpectralVerdict::NotExcluded;

    const bool m1_zero = std::abs(m1) <= t1;
    const bool m2_zero = std::abs(m2) <= t2;
    const bool m3_zero = std::abs(m3) <= t3;

    if (m1_zero || m3_zero) {
        rep.orbital = OrbitalVerdict::Degenerate;
    } else if (rep.sig_hess.n_neg == 1 && rep.sig_hess.n_zero == 0) {
        rep.orbital = OrbitalVerdict::Stable;
        rep.matched_conditions.push_back("s");
        if (!m2_zero) {
            if (m1 > 0.0 && m3 < 0.0) {
                rep.matched_conditions.push_back("s1");
                if (m2 < 0.0) rep.matched_conditions.push_back("johnson");
            } else if (m1 < 0.0 && m2 < 0.0 && m3 < 0.0) {
                rep.matched_conditions.push_back("s2");
            }
        }
    } else {
        rep.orbital = OrbitalVerdict::NotConcluded;
    }

    // First row of the sign table is algebraically impossible for a computed
    // wave: all minors positive with no negative direction.
    if (!m1_zero && !m2_zero && !m3_zero && m1 > 0.0 && m2 > 0.0 && m3 > 0.0 &&
        rep.sig_hess.n_neg == 0)
        rep.inconsistent = true;

    const auto cm = constraint_matrices(jet3, std::nullopt, tol);
    if (cm.c_q_valid) rep.sig_cq = signature(*cm.c_q, tol);
    rep.identity_residuals = identity_report(jet3, std::nullopt, cm, 0.0);
    return rep;
}

StabilityReport verdict_ek(const ActionJet4& jet4, double tol) {
    StabilityReport rep;
    rep.limit_zone = jet4.limit_zone;
    const Mat4& H = jet4.hess;
    // Minors follow the EKL bookkeeping order (lambda, mu, sigma, j), the one
    // the reference figures label M1 = Theta_lambdalambda .. M4 = det.
    Mat4 Hp;
    const int perm[4] = {1, 0, 3, 2};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) Hp(i, k) = H(perm[i], perm[k]);
    const auto minors = leading_minors(Hp);
    rep.minors.assign(minors.begin(), minors.end());
    rep.sig_hess = signature(H, verdict_eigen_tol(H, tol));
    rep.condition_number = condition_number(H);
    rep.stability_index = rep.sig_hess.n_neg - 2;

    const double det = minors[3];
    const auto scales = minor_scales(Hp);
    const double t4 = tol * scales[3];
    rep.spectral = (det < -t4) ? SpectralVerdict::Unstable : SpectralVerdict::NotExcluded;

    const auto rn = row_norms(H);
    const bool piv_mu_zero = std::abs(H(0, 0)) <= tol * rn[0];
    const bool piv_ll_zero = std::abs(H(1, 1)) <= tol * rn[1];
    const bool det_zero = std::abs(det) <= t4;
    const bool n_is_2 = rep.sig_hess.n_neg == 2 && rep.sig_hess.n_zero == 0;

    if (piv_ll_zero || det_zero)
        rep.orbital_ekl = OrbitalVerdict::Degenerate;
    else if (n_is_2) {
        rep.orbital_ekl = OrbitalVerdict::Stable;
        rep.matched_conditions.push_back("S_L");
    } else
        rep.orbital_ekl = OrbitalVerdict::NotConcluded;

    if (piv_mu_zero || det_zero)
        rep.orbital_eke = OrbitalVerdict::Degenerate;
    else if (n_is_2) {
        rep.orbital_eke = OrbitalVerdict::Stable;
        rep.matched_conditions.push_back("S_E");
    } else
        rep.orbital_eke = OrbitalVerdict::NotConcluded;

    const auto cm = constraint_matrices(jet4.underlying, jet4, tol);
    if (cm.c_q_valid) rep.sig_cq = signature(*cm.c_q, tol);
    if (cm.C_E_valid) rep.sig_CE = signature(*cm.C_E, tol);
    if (cm.C_L_valid) rep.sig_CL = signature(*cm.C_L, tol);
    rep.identity_residuals = identity_report(jet4.underlying, jet4, cm, jet4.params.j);
    return rep;
}

std::map<std::string, double> identity_report(const ActionJet3& jet3,
                                              const std::optional<ActionJet4>& jet4,
                                              const ConstraintMatrices& cm, double j) {
    std::map<std::string, double> out;
    const Mat3& h = jet3.hess;
    const double det3 = determinant(h);

    if (cm.c_q_valid) {
        const double lhs = h(0, 0) * determinant(*cm.c_q);
        out["detActionC"] = std::abs(lhs - det3) / std::max(std::abs(det3), 1e-300);
    }

    const double tmu = jet3.grad[0], tl = jet3.grad[1], tc = jet3.grad[2];
    const double cs_margin = 2.0 * tc * tmu - tl * tl;
    out["cauchy_schwarz_margin"] = cs_margin;

    if (jet4) {
        const Mat4& H = jet4->hess;
        const double det4 = determinant(H);
        if (cm.C_E_valid)
            out["constEKE"] = std::abs(H(0, 0) * determinant(*cm.C_E) + det4) /
                              std::max(std::abs(det4), 1e-300);
        if (cm.C_L_valid)
            out["constEKL"] = std::abs(H(1, 1) * determinant(*cm.C_L) + det4) /
                              std::max(std::abs(det4), 1e-300);

        const double m2 = h(0, 0) * h(1, 1) - h(0, 1) * h(0, 1);
        const double rhs = cs_margin * m2 - 4.0 * j * j * tmu * det3;
        out["detActionaction"] =
            std::abs(det4 - rhs) /
            std::max({std::abs(det4), std::abs(4.0 * j * j * tmu * det3), 1e-300});

        if (j != 0.0 && cs_margin > 0.0 && tmu > 0.0) {
            const double eta_val = cs_margin / (4.0 * j * j * tmu);
            Mat3 shifted = h;
            shifted(2, 2) -= eta_val;
            const auto n_theta = signature(shifted);
            const auto n_Theta = signature(H);
            out["negsign_check"] =
                static_cast<double>(n_Theta.n_neg - 1 - n_theta.n_neg);
        }
    }
    return out;
}

} // namespace wavestab
