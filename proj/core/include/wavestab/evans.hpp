#pragma once

#include <vector>

#include "wavestab/profile.hpp"

namespace wavestab {

/// Sampled co-periodic Evans function with its low-frequency power fit.
struct EvansScan {
    std::vector<double> r;      // ascending, on (0, r_max]
    std::vector<double> value;  // d(r) or D(r)
    std::vector<double> mat_norm; // balanced Hadamard bound of F - I per r (noise scale)
    int sign_changes = 0;
    double fit_coeff = 0.0;     // coefficient of r^N extracted on the fit window
    double fit_slope = 0.0;     // measured log-log slope over the window
    double fit_window_lo = 0.0;
    double fit_window_hi = 0.0;
    int tail_sign = 0;          // sign at r_max
    int leading_power = 3;      // 3 for qKdV, 4 for EKL
    double det_monodromy_drift = 0.0; // worst |det F(period) - 1| where resolvable
};

/// Discriminant T(r) of the reduced Sturm-Liouville operator.
struct DiscriminantEval {
    std::vector<double> r;
    std::vector<double> T;
    double T0 = 0.0;
    double T0_residual = 0.0; // |T(0) - 2|
    double Tp0 = 0.0;         // central-difference slope at 0
    double det_drift = 0.0;   // worst |det monodromy - 1|
};

struct EvansSettings {
    double r_max = 0.0;        // <= 0: automatic from the coefficient scale
    int n_grid = 32768;        // RK4 steps per period
    int r_count = 240;         // geometric r grid size
    double r_min_factor = 1e-6;
};

/// Sturm-Liouville data along one period of the profile, tabulated on the
/// half-step grid the fundamental-matrix integrator consumes. q is the
/// potential coefficient of Hess(e + c q)[v] at the reduced parameters.
struct OperatorCoefficients {
    double period = 0.0;
    int n_steps = 0;                 // RK4 steps; arrays have 2 n_steps + 1 entries
    std::vector<double> K;           // cap(v(x))
    std::vector<double> Kx;          // d/dx cap(v(x))
    std::vector<double> q;           // full qKdV coefficient (includes + c)
    double q_sup = 0.0;              // sup |q|
    double c = 0.0;
    double int_K_m13 = 0.0;          // integral of K^(-1/3) over one period
    double int_K_m14 = 0.0;          // integral of K^(-1/4) over one period
};

OperatorCoefficients operator_coefficients(const ProfileSamples& profile,
                                           const NonlinearModel& model,
                                           const WaveParamsQ& params, int n_steps);

/// d(r) = det(F(period; r) - I3) for the scalar third-order eigenvalue
/// problem; the small-r cubic coefficient estimates det Hess theta.
EvansScan evans_scan_qkdv(const ProfileSamples& profile, const NonlinearModel& model,
                          const WaveParamsQ& params, const EvansSettings& settings = {});

/// D(r) = det(F(period; r) - I4) for the EKL first-order system at mass flux
/// j; the small-r quartic coefficient estimates det Hess Theta.
EvansScan evans_scan_ekl(const ProfileSamples& profile, const NonlinearModel& model,
                         const WaveParamsEK& ekparams, const EvansSettings& settings = {});

/// T(r) = trace of the 2x2 monodromy of the reduced operator; sign T'(0)
/// matches sign Upsilon_mu.
DiscriminantEval sturm_discriminant(const ProfileSamples& profile, const NonlinearModel& model,
                                    const WaveParamsQ& params, const std::vector<double>& r_list,
                                    int n_steps = 16384);

/// Relative defect of the translation mode under the z = 0 fundamental
/// matrix (kernel direction of the qKdV operator).
double translation_mode_residual(const ProfileSamples& profile, const NonlinearModel& model,
                                 const WaveParamsQ& params, int n_steps = 32768);

} // namespace wavestab
