#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavestab/action.hpp"

namespace wavestab {

enum class SignatureMethod { Eigen, Sylvester };

struct SignatureResult {
    int n_neg = 0;
    int n_zero = 0;
    int n_pos = 0;
    SignatureMethod method = SignatureMethod::Eigen;
    std::vector<double> eigenvalues; // ascending, from the Jacobi sweep
    double tol = 0.0;                // absolute threshold used for zero decisions
    int dim() const { return n_neg + n_zero + n_pos; }
};

/// Bordered-Hessian reductions: c (qKdV, 2x2), C_E and C_L (EK, 3x3), built
/// entrywise from 2x2 minors containing the pivot.
struct ConstraintMatrices {
    std::optional<Mat2> c_q;
    std::optional<Mat3> C_E;
    std::optional<Mat3> C_L;
    double pivot_mu_mu = 0.0;         // Theta_mumu (or theta_mumu for c_q)
    double pivot_lambda_lambda = 0.0; // Theta_lambdalambda
    bool c_q_valid = false;
    bool C_E_valid = false;
    bool C_L_valid = false;
};

enum class SpectralVerdict { Unstable, NotExcluded };
enum class OrbitalVerdict { Stable, NotConcluded, Degenerate };

const char* to_string(SpectralVerdict v);
const char* to_string(OrbitalVerdict v);

struct StabilityReport {
    std::vector<double> minors; // leading principal minors m1..m3 or M1..M4
    SignatureResult sig_hess;
    std::optional<SignatureResult> sig_cq;
    std::optional<SignatureResult> sig_CE;
    std::optional<SignatureResult> sig_CL;
    double condition_number = 0.0;
    SpectralVerdict spectral = SpectralVerdict::NotExcluded;
    OrbitalVerdict orbital = OrbitalVerdict::NotConcluded;     // qKdV: condition (s)
    OrbitalVerdict orbital_ekl = OrbitalVerdict::NotConcluded; // EK: condition (S_L)
    OrbitalVerdict orbital_eke = OrbitalVerdict::NotConcluded; // EK: condition (S_E)
    std::vector<std::string> matched_conditions; // subset of {s, s1, s2, johnson, S_L, S_E}
    int stability_index = 0; // n(Hess) - N
    std::map<std::string, double> identity_residuals;
    bool inconsistent = false; // algebraically impossible minor pattern realized
    bool limit_zone = false;
};

/// Signature by cyclic Jacobi with a zero band of half-width tol * ||H||;
/// when every leading minor clears the band, Sylvester's rule is evaluated
/// too and cross-checked.
template <int N>
SignatureResult signature(const Mat<N>& H, double tol = 1e-6);

ConstraintMatrices constraint_matrices(const ActionJet3& jet3,
                                       const std::optional<ActionJet4>& jet4 = std::nullopt,
                                       double tol = 1e-6);

StabilityReport verdict_qkdv(const ActionJet3& jet3, double tol = 1e-6);

StabilityReport verdict_ek(const ActionJet4& jet4, double tol = 1e-6);

/// Ratio of extreme eigenvalue magnitudes; +inf when the smallest is below 1e-30.
template <int N>
double condition_number(const Mat<N>& H);

/// Named residuals of the algebraic identities tying theta, Theta, and the
/// constraint matrices together, plus the integer signature check
/// n(Hess Theta) = 1 + n(Hess theta - eta J). Entries requiring eta are
/// omitted when j = 0.
std::map<std::string, double> identity_report(const ActionJet3& jet3,
                                              const std::optional<ActionJet4>& jet4,
                                              const ConstraintMatrices& cm, double j);

} // namespace wavestab
