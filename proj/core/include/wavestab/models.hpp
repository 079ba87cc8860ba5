#pragma once

#include <functional>
#include <limits>
#include <string>

#include "wavestab/errors.hpp"

namespace wavestab {

/// Admissible open interval for the dependent variable v.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double v) const { return v > lo && v < hi; }
};

/// A nonlinearity pair (f, cap): bulk energy density and capillarity, with
/// closed-form derivatives. p = -f' is the associated pressure law. Models
/// are immutable after construction and all evaluations are pure.
struct NonlinearModel {
    std::string name;
    std::function<double(double)> f, fp, fpp;
    std::function<double(double)> cap, capp, cappp;
    Interval domain;

    double p(double v) const { return -fp(v); }
    double pp(double v) const { return -fpp(v); }

    /// Throws DomainError unless v is admissible and cap(v) > 0.
    void check(double v) const;
};

/// Eulerian-side energy pair, F(rho) = rho f(1/rho), Cap(rho) = rho^-5 cap(1/rho).
struct EulerianModel {
    std::function<double(double)> F;
    std::function<double(double)> Cap;
    Interval domain; // in rho
};

/// Potential value and two derivatives at a point:
/// W(v) = -f(v) - c v^2 / 2 + lambda v.
struct PotentialEval {
    double W;
    double Wp;  // p(v) - c v + lambda
    double Wpp; // p'(v) - c
};

/// Options for the built-in catalog. gamma and sign apply only where the
/// named law uses them.
struct ModelParams {
    double gamma = 2.0;
    int sign = 1; // focusing (+1) / defocusing (-1)
};

/// Built-in catalog. Recognized names:
///   power-law        p(v) = sign (gamma+1) v^gamma, cap = 1
///   kdv3             alias for power-law(gamma=2, sign=+1), p = 3 v^2
///   boussinesq       p(v) = v - v^gamma, cap = 1
///   perfect-gas      p(v) = 1/(2v), cap(v) = 1/v^5
///   nls-capillarity  p(v) = 1/(2v^2), cap(v) = 1/(4 v^4)
///   constant-capillarity  p(v) = 1/(2v^2), cap = 1
///   synthetic-quadratic   f = 0, cap = 1 (exact harmonic-oscillator oracle)
/// Throws Error on an unknown name, DomainError on an invalid exponent.
NonlinearModel make_builtin(const std::string& name, const ModelParams& params = {});

PotentialEval potential(const NonlinearModel& model, double v, double lambda, double c);

EulerianModel eulerian_view(const NonlinearModel& model);

} // namespace wavestab
