#include "doctest.h"

#include <complex>

#include "oracles.hpp"
#include "wavestab/smallmat.hpp"

using namespace wavestab;

namespace {

template <int N>
Mat<N> random_matrix(oracles::Rng& rng, double scale = 1.0) {
    Mat<N> m;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
    return m;
}

template <int N>
std::vector<std::vector<double>> to_rows(const Mat<N>& m) {
    std::vector<std::vector<double>> r(N, std::vector<double>(N));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return r;
}

} // namespace

TEST_CASE("determinant matches permutation expansion") {
    oracles::Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m3 = random_matrix<3>(rng, 2.0);
        CHECK(determinant(m3) == doctest::Approx(oracles::det_permutation(to_rows(m3))).epsilon(1e-12));
        const auto m4 = random_matrix<4>(rng, 2.0);
        CHECK(determinant(m4) == doctest::Approx(oracles::det_permutation(to_rows(m4))).epsilon(1e-12));
    }
}

TEST_CASE("inverse solves to identity") {
    oracles::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Mat4 m = random_matrix<4>(rng);
        for (int i = 0; i < 4; ++i) m(i, i) += 3.0; // keep well conditioned
        const Mat4 id = m * inverse(m);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(id(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
    Mat3 z{};
    CHECK_THROWS_AS((void)inverse(z), Error);
}

TEST_CASE("jacobi eigenvalues on diagonal and random symmetric input") {
    Mat3 d{};
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    d(2, 2) = 2.0;
    const auto spec = jacobi_eigenvalues(d);
    REQUIRE(spec.eigenvalues.size() == 3);
    CHECK(spec.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(spec.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(spec.eigenvalues[2] == doctest::Approx(2.0));

    oracles::Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Mat4 s = symmetrized(random_matrix<4>(rng, 2.0));
        const auto sp = jacobi_eigenvalues(s);
        // each eigenvalue annihilates the characteristic polynomial
        const auto cp = characteristic_polynomial(s);
        for (double ev : sp.eigenvalues) {
            double p = 0.0;
            for (double c : cp) p = p * ev + c;
            CHECK(std::abs(p) < 1e-8 * std::pow(1.0 + std::abs(ev), 4));
        }
    }
}

TEST_CASE("closed-form roots: rotation, diagonal, roots of unity") {
    Mat2 rot{};
    rot(0, 1) = 1.0;
    rot(1, 0) = -1.0;
    const auto e2 = eigenvalues_general(rot);
    CHECK(std::abs(e2[0].real()) < 1e-12);
    CHECK(std::abs(std::abs(e2[0].imag()) - 1.0) < 1e-12);
    CHECK(e2[1] == std::conj(e2[0]));

    Mat4 diag{};
    diag(0, 0) = 1;
    diag(1, 1) = 2;
    diag(2, 2) = 3;
    diag(3, 3) = 4;
    auto e4 = eigenvalues_general(diag);
    std::sort(e4.begin(), e4.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    for (int k = 0; k < 4; ++k) {
        CHECK(e4[static_cast<std::size_t>(k)].real() == doctest::Approx(k + 1.0).epsilon(1e-10));
        CHECK(std::abs(e4[static_cast<std::size_t>(k)].imag()) < 1e-10);
    }

    // companion matrix of x^4 - 1 -> fourth roots of unity
    Mat4 comp{};
    comp(0, 3) = 1.0;
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    comp(3, 2) = 1.0;
    const auto roots = eigenvalues_general(comp);
    int real_pos = 0, real_neg = 0, imag = 0;
    for (const auto& z : roots) {
        if (std::abs(z.imag()) < 1e-9) {
            if (z.real() > 0) ++real_pos;
            else ++real_neg;
            CHECK(std::abs(std::abs(z.real()) - 1.0) < 1e-9);
        } else {
            ++imag;
            CHECK(std::abs(std::abs(z.imag()) - 1.0) < 1e-9);
        }
    }
    CHECK(real_pos == 1);
    CHECK(real_neg == 1);
    CHECK(imag == 2);
}

TEST_CASE("null vector of a singular complex matrix") {
    std::array<std::array<cplx, 3>, 3> a{};
    a[0][0] = cplx(0.0, 0.0);
    a[1][1] = cplx(1.0, 0.0);
    a[2][2] = cplx(2.0, 0.0);
    const auto x = null_vector<3>(a);
    double residual = 0.0;
    for (int i = 0; i < 3; ++i) {
        cplx s(0.0, 0.0);
        for (int j = 0; j < 3; ++j) s += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        residual += std::norm(s);
    }
    CHECK(std::sqrt(residual) < 1e-10);
}

TEST_CASE("leading minors agree with sub-determinants") {
    oracles::Rng rng(23);
    const auto m = symmetrized(random_matrix<4>(rng));
    const auto minors = leading_minors(m);
    for (int k = 1; k <= 4; ++k) {
        std::vector<std::vector<double>> sub(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k)));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
        CHECK(minors[static_cast<std::size_t>(k - 1)] ==
              doctest::Approx(oracles::det_permutation(sub)).epsilon(1e-12));
    }
}
