#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "wavestab/errors.hpp"

// Dense fixed-size matrices up to 4x4 and the spectral helpers the stability
// and modulation modules need. Dimensions never exceed 4, so everything is
// direct: cofactor determinants, cyclic Jacobi for symmetric spectra, and
// closed-form characteristic-polynomial roots with a Newton polish for the
// nonsymmetric case.

namespace wavestab {

template <int N>
struct Mat {
    std::array<double, static_cast<std::size_t>(N) * N> a{};

    static constexpr int dim = N;

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * N + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * N + j]; }

    static Mat identity() {
        Mat m;
        for (int i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    Mat transposed() const {
        Mat t;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;
using Mat4 = Mat<4>;

template <int N>
Mat<N> operator+(const Mat<N>& x, const Mat<N>& y) {
    Mat<N> r;
    for (std::size_t k = 0; k < x.a.size(); ++k) r.a[k] = x.a[k] + y.a[k];
    return r;
}

template <int N>
Mat<N> operator-(const Mat<N>& x, const Mat<N>& y) {
    Mat<N> r;
    for (std::size_t k = 0; k < x.a.size(); ++k) r.a[k] = x.a[k] - y.a[k];
    return r;
}

template <int N>
Mat<N> operator*(double s, const Mat<N>& x) {
    Mat<N> r;
    for (std::size_t k = 0; k < x.a.size(); ++k) r.a[k] = s * x.a[k];
    return r;
}

template <int N>
Mat<N> operator*(const Mat<N>& x, const Mat<N>& y) {
    Mat<N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double s = 0.0;
            for (int k = 0; k < N; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

template <int N, class Vec>
Vec mat_vec(const Mat<N>& m, const Vec& v) {
    Vec r{};
    for (int i = 0; i < N; ++i) {
        double s = 0.0;
        for (int j = 0; j < N; ++j) s += m(i, j) * v[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = s;
    }
    return r;
}

template <int N>
double frobenius_norm(const Mat<N>& m) {
    double s = 0.0;
    for (double x : m.a) s += x * x;
    return std::sqrt(s);
}

template <int N>
double max_abs(const Mat<N>& m) {
    double s = 0.0;
    for (double x : m.a) s = std::max(s, std::abs(x));
    return s;
}

/// Relative departure from symmetry, ||M - M^T|| / ||M||.
template <int N>
double asymmetry(const Mat<N>& m) {
    double num = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double d = m(i, j) - m(j, i);
            num += d * d;
        }
    const double den = frobenius_norm(m);
    return den > 0.0 ? std::sqrt(num) / den : 0.0;
}

template <int N>
Mat<N> symmetrized(const Mat<N>& m) {
    Mat<N> s;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

inline double det2(double a, double b, double c, double d) { return a * d - b * c; }

template <int N>
double determinant(const Mat<N>& m);

template <>
inline double determinant(const Mat<2>& m) {
    return det2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

template <>
inline double determinant(const Mat<3>& m) {
    return m(0, 0) * det2(m(1, 1), m(1, 2), m(2, 1), m(2, 2))
         - m(0, 1) * det2(m(1, 0), m(1, 2), m(2, 0), m(2, 2))
         + m(0, 2) * det2(m(1, 0), m(1, 1), m(2, 0), m(2, 1));
}

template <>
inline double determinant(const Mat<4>& m) {
    double det = 0.0;
    for (int j = 0; j < 4; ++j) {
        Mat3 sub;
        for (int r = 1; r < 4; ++r) {
            int cc = 0;
            for (int c = 0; c < 4; ++c) {
                if (c == j) continue;
                sub(r - 1, cc++) = m(r, c);
            }
        }
        const double term = m(0, j) * determinant(sub);
        det += (j % 2 == 0) ? term : -term;
    }
    return det;
}

struct BalancedDet {
    double det = 0.0;
    double hadamard = 0.0; // product of balanced row norms: rounding scale of det
};

/// Determinant after exact power-of-two row/column balancing (a similarity,
/// so the value is unchanged while the floating-point cancellation floor
/// drops to eps times the returned Hadamard bound). Essential for
/// fundamental-matrix determinants whose state components live on very
/// different scales.
template <int N>
BalancedDet balanced_determinant(Mat<N> m) {
    for (int sweep = 0; sweep < 12; ++sweep) {
        bool converged = true;
        for (int i = 0; i < N; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < N; ++j) {
                if (j == i) continue;
                r += std::abs(m(i, j));
                c += std::abs(m(j, i));
            }
            if (r == 0.0 || c == 0.0) continue;
            int e = 0;
            std::frexp(std::sqrt(r / c), &e);
            const double f = std::ldexp(1.0, e); // power of two near sqrt(r/c)
            if (f != 1.0) {
                converged = false;
                for (int j = 0; j < N; ++j) {
                    m(i, j) /= f;
                    m(j, i) *= f;
                }
            }
        }
        if (converged) break;
    }
    BalancedDet out;
    out.det = determinant(m);
    out.hadamard = 1.0;
    for (int i = 0; i < N; ++i) {
        double s = 0.0;
        for (int j = 0; j < N; ++j) s += m(i, j) * m(i, j);
        out.hadamard *= std::sqrt(s);
    }
    return out;
}

/// Leading principal minors Delta_1 .. Delta_N.
template <int N>
std::array<double, N> leading_minors(const Mat<N>& m) {
    std::array<double, N> d{};
    d[0] = m(0, 0);
    if constexpr (N >= 2) {
        Mat2 m2;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m2(i, j) = m(i, j);
        d[1] = determinant(m2);
    }
    if constexpr (N >= 3) {
        Mat3 m3;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m3(i, j) = m(i, j);
        d[2] = determinant(m3);
    }
    if constexpr (N >= 4) d[3] = determinant(m);
    return d;
}

/// Gauss-Jordan inverse with full pivoting; throws on a pivot below `rel_tol`
/// times the largest entry.
template <int N>
Mat<N> inverse(const Mat<N>& m, double rel_tol = 1e-13) {
    Mat<N> a = m;
    Mat<N> inv = Mat<N>::identity();
    std::array<int, N> col_perm{};
    for (int i = 0; i < N; ++i) col_perm[i] = i;
    const double scale = max_abs(m);
    if (scale == 0.0) throw Error("inverse: zero matrix");

    for (int k = 0; k < N; ++k) {
        int pr = k, pc = k;
        double best = 0.0;
        for (int i = k; i < N; ++i)
            for (int j = k; j < N; ++j)
                if (std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pr = i;
                    pc = j;
                }
        if (best < rel_tol * scale) throw Error("inverse: matrix numerically singular");
        if (pr != k)
            for (int j = 0; j < N; ++j) {
                std::swap(a.a[static_cast<std::size_t>(k) * N + j], a.a[static_cast<std::size_t>(pr) * N + j]);
                std::swap(inv.a[static_cast<std::size_t>(k) * N + j], inv.a[static_cast<std::size_t>(pr) * N + j]);
            }
        if (pc != k) {
            for (int i = 0; i < N; ++i) std::swap(a(i, k), a(i, pc));
            std::swap(col_perm[k], col_perm[pc]);
        }
        const double piv = a(k, k);
        for (int j = 0; j < N; ++j) {
            a(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (int i = 0; i < N; ++i) {
            if (i == k) continue;
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < N; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    // Undo the column permutation (it permuted the unknowns, i.e. rows of inv).
    Mat<N> out;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) out(col_perm[i], j) = inv(i, j);
    return out;
}

struct JacobiSpectrum {
    std::vector<double> eigenvalues; // ascending
    int sweeps = 0;
    double off_norm = 0.0; // final off-diagonal Frobenius norm
};

/// Cyclic Jacobi on a symmetric matrix; iterates until the off-diagonal norm
/// falls below tol * ||H||.
template <int N>
JacobiSpectrum jacobi_eigenvalues(Mat<N> h, double tol = 1e-14) {
    const double scale = frobenius_norm(h);
    JacobiSpectrum out;
    if (scale == 0.0) {
        out.eigenvalues.assign(N, 0.0);
        return out;
    }
    auto off = [&]() {
        double s = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                if (i != j) s += h(i, j) * h(i, j);
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 64; ++sweep) {
        out.sweeps = sweep;
        if (off() <= tol * scale) break;
        for (int p = 0; p < N - 1; ++p)
            for (int q = p + 1; q < N; ++q) {
                const double apq = h(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = h(p, p), aqq = h(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < N; ++k) {
                    const double hkp = h(k, p), hkq = h(k, q);
                    h(k, p) = c * hkp - s * hkq;
                    h(k, q) = s * hkp + c * hkq;
                }
                for (int k = 0; k < N; ++k) {
                    const double hpk = h(p, k), hqk = h(q, k);
                    h(p, k) = c * hpk - s * hqk;
                    h(q, k) = s * hpk + c * hqk;
                }
            }
    }
    out.off_norm = off();
    out.eigenvalues.resize(N);
    for (int i = 0; i < N; ++i) out.eigenvalues[static_cast<std::size_t>(i)] = h(i, i);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

// ---- characteristic polynomials and closed-form roots ----

using cplx = std::complex<double>;

/// Monic characteristic polynomial coefficients by Faddeev-LeVerrier:
/// p(x) = x^N + c[1] x^(N-1) + ... + c[N].
template <int N>
std::array<double, N + 1> characteristic_polynomial(const Mat<N>& m) {
    std::array<double, N + 1> c{};
    c[0] = 1.0;
    Mat<N> mk = m;
    for (int k = 1; k <= N; ++k) {
        double tr = 0.0;
        for (int i = 0; i < N; ++i) tr += mk(i, i);
        c[static_cast<std::size_t>(k)] = -tr / k;
        if (k < N) {
            Mat<N> shifted = mk;
            for (int i = 0; i < N; ++i) shifted(i, i) += c[static_cast<std::size_t>(k)];
            mk = m * shifted;
        }
    }
    return c;
}

/// Roots of x^2 + b x + c, computed without subtractive cancellation.
inline std::array<cplx, 2> roots_quadratic(double b, double c) {
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        if (q == 0.0) return {cplx(0.0, 0.0), cplx(0.0, 0.0)};
        return {cplx(q, 0.0), cplx(c / q, 0.0)};
    }
    const double re = -0.5 * b;
    const double im = 0.5 * std::sqrt(-disc);
    return {cplx(re, im), cplx(re, -im)};
}

/// Roots of x^3 + a x^2 + b x + c (Cardano, trigonometric branch for the
/// three-real case).
inline std::array<cplx, 3> roots_cubic(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    std::array<cplx, 3> r;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sq);
        const double v = std::cbrt(-q / 2.0 - sq);
        r[0] = cplx(shift + u + v, 0.0);
        const double re = shift - (u + v) / 2.0;
        const double im = std::sqrt(3.0) / 2.0 * (u - v);
        r[1] = cplx(re, im);
        r[2] = cplx(re, -im);
    } else if (p == 0.0) {
        const double u = std::cbrt(-q);
        r[0] = r[1] = r[2] = cplx(shift + u, 0.0);
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            r[static_cast<std::size_t>(k)] =
                cplx(shift + m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0), 0.0);
    }
    return r;
}

/// Roots of x^4 + a x^3 + b x^2 + c x + d via the resolvent cubic (Ferrari).
inline std::array<cplx, 4> roots_quartic(double a, double b, double c, double d) {
    // Depressed quartic y^4 + p y^2 + q y + r, x = y - a/4.
    const double p = b - 3.0 * a * a / 8.0;
    const double q = c - a * b / 2.0 + a * a * a / 8.0;
    const double r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
    const double shift = -a / 4.0;
    std::array<cplx, 4> out;
    if (std::abs(q) < 1e-14 * (1.0 + std::abs(p) + std::sqrt(std::abs(r)))) {
        // Biquadratic.
        const auto z = roots_quadratic(p, r);
        int k = 0;
        for (const cplx& zi : z) {
            const cplx s = std::sqrt(zi);
            out[static_cast<std::size_t>(k++)] = shift + s;
            out[static_cast<std::size_t>(k++)] = shift - s;
        }
        return out;
    }
    // Resolvent cubic z^3 + 2p z^2 + (p^2 - 4r) z - q^2 = 0 has a positive real root.
    const auto zr = roots_cubic(2.0 * p, p * p - 4.0 * r, -q * q);
    double z = 0.0;
    for (const cplx& zi : zr)
        if (std::abs(zi.imag()) < 1e-9 * (1.0 + std::abs(zi.real()))) z = std::max(z, zi.real());
    if (z <= 0.0) z = std::abs(zr[0]);
    const double w = std::sqrt(z);
    // y^4 + p y^2 + q y + r = (y^2 + w y + s1)(y^2 - w y + s2)
    const double s1 = (p + z - q / w) / 2.0;
    const double s2 = (p + z + q / w) / 2.0;
    const auto r1 = roots_quadratic(w, s1);
    const auto r2 = roots_quadratic(-w, s2);
    out[0] = shift + r1[0];
    out[1] = shift + r1[1];
    out[2] = shift + r2[0];
    out[3] = shift + r2[1];
    return out;
}

namespace detail {

inline cplx polyval(const std::vector<double>& c, cplx x) {
    cplx v(0.0, 0.0);
    for (double ck : c) v = v * x + ck;
    return v;
}

inline cplx polyder(const std::vector<double>& c, cplx x) {
    const int n = static_cast<int>(c.size()) - 1;
    cplx v(0.0, 0.0);
    for (int i = 0; i < n; ++i) v = v * x + c[static_cast<std::size_t>(i)] * static_cast<double>(n - i);
    return v;
}

} // namespace detail

/// Eigenvalues of a real matrix with dim in {2,3,4}: closed-form
/// characteristic roots, two Newton steps, then conjugate pairing.
template <int N>
std::array<cplx, N> eigenvalues_general(const Mat<N>& m) {
    static_assert(N >= 2 && N <= 4);
    const auto cp = characteristic_polynomial(m);
    std::array<cplx, N> roots{};
    if constexpr (N == 2) {
        const auto r = roots_quadratic(cp[1], cp[2]);
        roots = {r[0], r[1]};
    } else if constexpr (N == 3) {
        roots = roots_cubic(cp[1], cp[2], cp[3]);
    } else {
        roots = roots_quartic(cp[1], cp[2], cp[3], cp[4]);
    }
    std::vector<double> c(cp.begin(), cp.end());
    const double scale = std::max(1.0, max_abs(m));
    for (cplx& x : roots) {
        for (int it = 0; it < 2; ++it) {
            const cplx f = detail::polyval(c, x);
            const cplx df = detail::polyder(c, x);
            if (std::abs(df) < 1e-300) break;
            const cplx step = f / df;
            if (std::abs(step) > 0.5 * scale) break; // polish only, never jump roots
            x -= step;
        }
        if (std::abs(x.imag()) <= 1e-9 * (scale + std::abs(x.real()))) x = cplx(x.real(), 0.0);
    }
    // Enforce exact conjugate pairing of complex roots.
    std::array<bool, N> used{};
    for (int i = 0; i < N; ++i) {
        if (used[static_cast<std::size_t>(i)] || roots[static_cast<std::size_t>(i)].imag() == 0.0) continue;
        int best = -1;
        double bd = 1e300;
        for (int j = i + 1; j < N; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double d = std::abs(roots[static_cast<std::size_t>(j)] - std::conj(roots[static_cast<std::size_t>(i)]));
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        if (best >= 0) {
            const cplx mean_re(0.5 * (roots[static_cast<std::size_t>(i)].real() + roots[static_cast<std::size_t>(best)].real()),
                               0.5 * (roots[static_cast<std::size_t>(i)].imag() - roots[static_cast<std::size_t>(best)].imag()));
            roots[static_cast<std::size_t>(i)] = mean_re;
            roots[static_cast<std::size_t>(best)] = std::conj(mean_re);
            used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(best)] = true;
        } else {
            roots[static_cast<std::size_t>(i)] = cplx(roots[static_cast<std::size_t>(i)].real(), 0.0);
        }
    }
    return roots;
}

/// Null vector of a near-singular complex matrix (full-pivot elimination,
/// free variable set to one). Used for eigen-residual reporting.
template <int N>
std::array<cplx, N> null_vector(std::array<std::array<cplx, N>, N> a) {
    std::array<int, N> col{};
    for (int i = 0; i < N; ++i) col[static_cast<std::size_t>(i)] = i;
    int rank = 0;
    for (int k = 0; k < N; ++k) {
        int pr = k, pc = k;
        double best = 0.0;
        for (int i = k; i < N; ++i)
            for (int j = k; j < N; ++j)
                if (std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > best) {
                    best = std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                    pr = i;
                    pc = j;
                }
        if (best < 1e-11) break; // treat the rest as zero rows: rank deficiency found
        std::swap(a[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(pr)]);
        if (pc != k) {
            for (int i = 0; i < N; ++i)
                std::swap(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                          a[static_cast<std::size_t>(i)][static_cast<std::size_t>(pc)]);
            std::swap(col[static_cast<std::size_t>(k)], col[static_cast<std::size_t>(pc)]);
        }
        for (int i = k + 1; i < N; ++i) {
            const cplx f = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] /
                           a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
            for (int j = k; j < N; ++j)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    f * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        }
        rank = k + 1;
    }
    std::array<cplx, N> x{};
    if (rank == N) rank = N - 1; // matrix was not singular enough: force a null direction
    x[static_cast<std::size_t>(rank)] = cplx(1.0, 0.0);
    for (int i = rank - 1; i >= 0; --i) {
        cplx s(0.0, 0.0);
        for (int j = i + 1; j <= rank; ++j)
            s += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = -s / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    std::array<cplx, N> out{};
    double nrm = 0.0;
    for (int i = 0; i < N; ++i) {
        out[static_cast<std::size_t>(col[static_cast<std::size_t>(i)])] = x[static_cast<std::size_t>(i)];
        nrm += std::norm(x[static_cast<std::size_t>(i)]);
    }
    nrm = std::sqrt(nrm);
    for (cplx& v : out) v /= nrm;
    return out;
}

} // namespace wavestab
