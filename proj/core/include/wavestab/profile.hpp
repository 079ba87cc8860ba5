#pragma once

#include <optional>
#include <vector>

#include "wavestab/models.hpp"

namespace wavestab {

/// Reduced-profile parameters: energy level, Lagrange multiplier, wave speed.
struct WaveParamsQ {
    double mu = 0.0;
    double lambda = 0.0;
    double c = 0.0;
};

/// Euler--Korteweg quadruple: j is the mass flux, sigma the Eulerian speed.
struct WaveParamsEK {
    double mu = 0.0;
    double lambda = 0.0;
    double j = 0.0;
    double sigma = 0.0;
};

/// Parameters of the reduced profile equation seen by the EKL wave:
/// (mu', lambda', c') = (lambda - sigma^2/2, j sigma - mu, -j^2).
WaveParamsQ ek_to_qkdv(const WaveParamsEK& p);

enum class Quadrature { Midpoint, Trapezoid };

struct Numerics {
    double epsilon = 1e-10;   // relative tolerance of the turning-point roots
    double delta_omega = 1e-4;
    Quadrature quadrature = Quadrature::Midpoint;
    double delta_nu = 1e-3;   // finite-difference step for Hessians
    bool absolute_delta_nu = false; // reproduce mode: figure-caption steps are absolute
    int rk4_steps = 4096;
};

/// Oscillation interval [v2, v3] around a center v0 of the potential well,
/// with Newton-polished residuals. Saddle positions, when they exist on the
/// scanned side, are kept for limit-zone detection.
struct TurningPoints {
    double v2 = 0.0; // trough
    double v3 = 0.0; // crest
    double v0 = 0.0; // center (local minimum of W)
    double residual_v2 = 0.0; // |W(v2)-mu| relative
    double residual_v3 = 0.0;
    double well_min = 0.0;             // W(v0)
    std::optional<double> saddle_lo;   // nearest local max of W below v2
    std::optional<double> saddle_hi;   // nearest local max of W above v3
    std::optional<double> barrier_mu;  // min of the two saddle levels found
    bool limit_zone = false; // harmonic or soliton limit proximity flag
};

/// All period-type integrals of one wave, computed on a common omega grid.
struct ProfileIntegrals {
    double period = 0.0;      // Upsilon
    double action = 0.0;      // Theta of the reduced problem
    double mean = 0.0;        // integral of v over one period
    double half_square = 0.0; // integral of v^2/2 over one period
};

/// One reconstructed period of the profile by classical RK4.
struct ProfileSamples {
    std::vector<double> x;  // [0, Upsilon]
    std::vector<double> v;  // v(x), v(0) = v2
    std::vector<double> vx; // v'(x), v'(0) = 0
    double drift = 0.0;     // max |cap v'^2/2 + W(v) - mu| over the grid
    double period = 0.0;
    WaveParamsQ params;
};

/// A potential well of W(.; lambda, c) independent of the energy level:
/// center, floor value, and the lowest adjacent barrier when one exists.
struct WellInfo {
    double v0 = 0.0;
    double well_min = 0.0;
    std::optional<double> saddle_lo;
    std::optional<double> saddle_hi;
    std::optional<double> barrier_mu;
};

/// Locate a well of the potential; the deepest one wins unless hint brackets
/// a specific center.
WellInfo find_well(const NonlinearModel& model, double lambda, double c,
                   std::optional<std::pair<double, double>> hint = std::nullopt);

/// Locate the center and the turning points of W = mu.
/// hint, when given, brackets the center to select among multiple wells.
TurningPoints find_turning_points(const NonlinearModel& model, const WaveParamsQ& params,
                                  std::optional<std::pair<double, double>> hint = std::nullopt,
                                  const Numerics& num = {});

/// Desingularized quadrature of period, action, mean and half-square weight
/// over omega in (-pi/2, pi/2).
ProfileIntegrals profile_integrals(const NonlinearModel& model, const WaveParamsQ& params,
                                   const TurningPoints& tp, const Numerics& num = {});

/// RK4 reconstruction of v(x) over one period starting at (v2, 0).
ProfileSamples reconstruct_profile(const NonlinearModel& model, const WaveParamsQ& params,
                                   const TurningPoints& tp, int n_steps = 4096);

} // namespace wavestab
