#include "wavestab/modulation.hpp"

#include <cmath>

namespace wavestab {

namespace {

template <int N>
std::vector<std::vector<double>> to_rows(const Mat<N>& m) {
    std::vector<std::vector<double>> rows(N, std::vector<double>(N));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return rows;
}

template <int N>
double eigen_residual(const Mat<N>& m, const std::array<cplx, N>& eigs) {
    double worst = 0.0;
    for (const cplx& lam : eigs) {
        std::array<std::array<cplx, N>, N> a{};
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    cplx(m(i, j), 0.0) - (i == j ? lam : cplx(0.0, 0.0));
        const auto x = null_vector<N>(a);
        double res = 0.0;
        for (int i = 0; i < N; ++i) {
            cplx s(0.0, 0.0);
            for (int j = 0; j < N; ++j)
                s += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
            res += std::norm(s);
        }
        worst = std::max(worst, std::sqrt(res));
    }
    return worst;
}

template <int N>
ModulationResult finish(const Mat<N>& m, double tol) {
    ModulationResult out;
    out.matrix = to_rows(m);
    const auto eigs = eigenvalues_general(m);
    out.eigenvalues.assign(eigs.begin(), eigs.end());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    double spectral_scale = 0.0;
    for (const cplx& e : out.eigenvalues) spectral_scale = std::max(spectral_scale, std::abs(e));
    spectral_scale = std::max(spectral_scale, 1e-300);
    out.hyperbolic = true;
    for (const cplx& e : out.eigenvalues)
        if (std::abs(e.imag()) > tol * spectral_scale) out.hyperbolic = false;
    out.residual = eigen_residual<N>(m, eigs);
    return out;
}

} // namespace

ModulationResult modulation_matrix_qkdv(const ActionJet3& jet3, double c, double tol) {
    Mat3 P;
    P(0, 2) = -1.0;
    P(2, 0) = -1.0;
    P(1, 1) = 1.0;
    Mat3 Hinv;
    try {
        Hinv = inverse(jet3.hess);
    } catch (const Error&) {
        throw Error("modulation_matrix_qkdv: Hess theta is numerically singular");
    }
    Mat3 d = Hinv * P;
    for (int i = 0; i < 3; ++i) d(i, i) += c;
    return finish(d, tol);
}

ModulationResult modulation_matrix_ekl(const ActionJet4& jet4, double j, double tol) {
    Mat4 P;
    P(0, 3) = -1.0;
    P(3, 0) = -1.0;
    P(1, 2) = 1.0;
    P(2, 1) = 1.0;
    Mat4 Hinv;
    try {
        Hinv = inverse(jet4.hess);
    } catch (const Error&) {
        throw Error("modulation_matrix_ekl: Hess Theta is numerically singular");
    }
    // Shift term taken as -j I4 (dimensional consistency; see README note).
    Mat4 D = Hinv * P;
    for (int i = 0; i < 4; ++i) D(i, i) += -j;
    return finish(D, tol);
}

std::vector<std::complex<double>> spectrum_small(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 2) {
        Mat2 a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const auto e = eigenvalues_general(a);
        return {e.begin(), e.end()};
    }
    if (n == 3) {
        Mat3 a;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const auto e = eigenvalues_general(a);
        return {e.begin(), e.end()};
    }
    if (n == 4) {
        Mat4 a;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const auto e = eigenvalues_general(a);
        return {e.begin(), e.end()};
    }
    throw Error("spectrum_small: dimension must be 2, 3 or 4");
}

} // namespace wavestab
