#pragma once

#include <complex>
#include <vector>

#include "wavestab/action.hpp"

namespace wavestab {

/// Characteristic velocities of the modulated (Whitham-averaged) system.
struct ModulationResult {
    std::vector<std::vector<double>> matrix; // row-major, 3x3 or 4x4, nonsymmetric
    std::vector<std::complex<double>> eigenvalues;
    bool hyperbolic = false; // all imaginary parts below tol * spectral scale
    double residual = 0.0;   // max ||(M - lambda I) x|| over computed eigenpairs
};

/// d = c I + (Hess theta)^(-1) P with P the coupling pattern
/// ((1,3) = (3,1) = -1, (2,2) = 1).
ModulationResult modulation_matrix_qkdv(const ActionJet3& jet3, double c, double tol = 1e-9);

/// D = -j I + (Hess Theta)^(-1) P4 with P4 the anti-diagonal pattern
/// ((1,4) = (4,1) = -1, (2,3) = (3,2) = 1).
ModulationResult modulation_matrix_ekl(const ActionJet4& jet4, double j, double tol = 1e-9);

/// Eigenvalues of a real matrix of dimension 2..4 by characteristic-
/// polynomial roots with a Newton polish; conjugate pairing enforced.
std::vector<std::complex<double>> spectrum_small(const std::vector<std::vector<double>>& m);

} // namespace wavestab
