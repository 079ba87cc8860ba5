#pragma once

#include <optional>

#include "wavestab/profile.hpp"
#include "wavestab/smallmat.hpp"

namespace wavestab {

enum class HessianScheme { GradFd, SecondDiff };
enum class EkHessianSource { Chain, DirectFd, Both };

struct FdSettings {
    double delta_nu = 1e-3;
    bool absolute = false; // relative steps scaled by max(1,|parameter|) unless set
    HessianScheme scheme = HessianScheme::GradFd;
};

/// Value, gradient and Hessian of the reduced action theta(mu, lambda, c).
/// The gradient comes from the exact quadrature identities
/// (theta_mu, theta_lambda, theta_c) = (Upsilon, -mean, half_square).
struct ActionJet3 {
    double value = 0.0;
    std::array<double, 3> grad{};    // ordering (mu, lambda, c)
    std::array<double, 3> grad_fd{}; // central differences of theta, for cross-checking
    double grad_cross_residual = 0.0; // worst relative gap between the two gradients
    Mat3 hess{};                  // symmetrized
    double asym_residual = 0.0;   // ||H - H^T||/||H|| before symmetrization
    bool limit_zone = false;
    bool fd_noise_warning = false;
    ProfileIntegrals integrals{};
    TurningPoints tp{};
    WaveParamsQ params{};
};

/// Value, gradient and Hessian of the EK action Theta(mu, lambda, j, sigma).
struct ActionJet4 {
    double value = 0.0;
    std::array<double, 4> grad{}; // ordering (mu, lambda, j, sigma)
    Mat4 hess{};
    EkHessianSource source = EkHessianSource::Chain;
    double chain_vs_direct = 0.0; // max entrywise relative difference when Both
    bool limit_zone = false;
    ActionJet3 underlying{}; // jet at the mapped qKdV point
    WaveParamsEK params{};
};

ActionJet3 action_jet_qkdv(const NonlinearModel& model, const WaveParamsQ& params,
                           const Numerics& num, const FdSettings& fd,
                           std::optional<std::pair<double, double>> hint = std::nullopt);

ActionJet4 action_jet_ek(const NonlinearModel& model, const WaveParamsEK& params,
                         const Numerics& num, const FdSettings& fd,
                         EkHessianSource source = EkHessianSource::Chain,
                         std::optional<std::pair<double, double>> hint = std::nullopt);

/// eta = (2 theta_c theta_mu - theta_lambda^2) / (4 j^2 theta_mu).
/// Throws on j = 0 and on inputs violating strict Cauchy-Schwarz positivity.
double eta(const ActionJet3& jet3, double j);

/// Hess Theta assembled entrywise from grad/Hess theta at the mapped point.
Mat4 chain_rule_hessian(const ActionJet3& jet3, double j, double sigma);

} // namespace wavestab
