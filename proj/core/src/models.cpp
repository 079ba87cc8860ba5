#include "wavestab/models.hpp"

#include <cmath>

namespace wavestab {

namespace {

bool is_integral(double g) { return g == std::floor(g); }

// v^n for integral n >= 0; keeps power laws exact on negative v.
double ipow(double v, long n) {
    double r = 1.0;
    for (long k = 0; k < n; ++k) r *= v;
    return r;
}

double gpow(double v, double g) {
    if (is_integral(g) && g >= 0.0) return ipow(v, static_cast<long>(g));
    return std::pow(v, g);
}

} // namespace

void NonlinearModel::check(double v) const {
    if (!domain.contains(v))
        throw DomainError(name + ": v = " + std::to_string(v) + " outside admissible interval");
    if (cap(v) <= 0.0)
        throw DomainError(name + ": cap(v) <= 0 at v = " + std::to_string(v));
}

NonlinearModel make_builtin(const std::string& name, const ModelParams& params) {
    NonlinearModel m;
    m.name = name;
    const double g = params.gamma;
    const double e = params.sign >= 0 ? 1.0 : -1.0;

    auto unit_cap = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };

    if (name == "power-law" || name == "kdv3") {
        const double ge = (name == "kdv3") ? 2.0 : g;
        const double se = (name == "kdv3") ? 1.0 : e;
        if (ge < 2.0) throw DomainError("power-law: gamma must be >= 2");
        // p = se (ge+1) v^ge, f = -se v^(ge+1)
        m.f = [se, ge](double v) { return -se * gpow(v, ge + 1.0); };
        m.fp = [se, ge](double v) { return -se * (ge + 1.0) * gpow(v, ge); };
        m.fpp = [se, ge](double v) { return -se * (ge + 1.0) * ge * gpow(v, ge - 1.0); };
        m.cap = unit_cap;
        m.capp = zero;
        m.cappp = zero;
        m.domain = is_integral(ge) ? Interval{} : Interval{0.0, std::numeric_limits<double>::infinity()};
    } else if (name == "boussinesq") {
        if (g < 2.0 || !is_integral(g)) throw DomainError("boussinesq: gamma must be an integer >= 2");
        // p = v - v^g, f = -v^2/2 + v^(g+1)/(g+1)
        m.f = [g](double v) { return -0.5 * v * v + gpow(v, g + 1.0) / (g + 1.0); };
        m.fp = [g](double v) { return -v + gpow(v, g); };
        m.fpp = [g](double v) { return -1.0 + g * gpow(v, g - 1.0); };
        m.cap = unit_cap;
        m.capp = zero;
        m.cappp = zero;
        m.domain = Interval{};
    } else if (name == "perfect-gas") {
        // p = 1/(2v), f = -log(v)/2, cap = 1/v^5 (so Cap(rho) = 1)
        m.f = [](double v) { return -0.5 * std::log(v); };
        m.fp = [](double v) { return -0.5 / v; };
        m.fpp = [](double v) { return 0.5 / (v * v); };
        m.cap = [](double v) { return 1.0 / ipow(v, 5); };
        m.capp = [](double v) { return -5.0 / ipow(v, 6); };
        m.cappp = [](double v) { return 30.0 / ipow(v, 7); };
        m.domain = Interval{0.0, std::numeric_limits<double>::infinity()};
    } else if (name == "nls-capillarity" || name == "constant-capillarity") {
        // Shallow-water bulk term: p = 1/(2 v^2), f = 1/(2v).
        m.f = [](double v) { return 0.5 / v; };
        m.fp = [](double v) { return -0.5 / (v * v); };
        m.fpp = [](double v) { return 1.0 / (v * v * v); };
        if (name == "nls-capillarity") {
            // cap = 1/(4 v^4) <=> Cap(rho) = 1/(4 rho)
            m.cap = [](double v) { return 0.25 / ipow(v, 4); };
            m.capp = [](double v) { return -1.0 / ipow(v, 5); };
            m.cappp = [](double v) { return 5.0 / ipow(v, 6); };
        } else {
            m.cap = unit_cap;
            m.capp = zero;
            m.cappp = zero;
        }
        m.domain = Interval{0.0, std::numeric_limits<double>::infinity()};
    } else if (name == "synthetic-quadratic") {
        // f = 0 so that W = -c v^2/2 + lambda v; with c = -2, lambda = 0 the
        // profile equation is the exact harmonic oscillator v'' = -2 v.
        m.f = zero;
        m.fp = zero;
        m.fpp = zero;
        m.cap = unit_cap;
        m.capp = zero;
        m.cappp = zero;
        m.domain = Interval{};
    } else {
        throw Error("make_builtin: unknown model '" + name + "'");
    }
    return m;
}

PotentialEval potential(const NonlinearModel& model, double v, double lambda, double c) {
    model.check(v);
    PotentialEval out;
    out.W = -model.f(v) - 0.5 * c * v * v + lambda * v;
    out.Wp = model.p(v) - c * v + lambda;
    out.Wpp = model.pp(v) - c;
    return out;
}

EulerianModel eulerian_view(const NonlinearModel& model) {
    EulerianModel e;
    auto f = model.f;
    auto cap = model.cap;
    const Interval dom = model.domain;
    auto check_rho = [dom](double rho) {
        if (rho <= 0.0) throw DomainError("eulerian_view: rho must be positive");
        if (!dom.contains(1.0 / rho))
            throw DomainError("eulerian_view: 1/rho outside model domain");
    };
    e.F = [f, check_rho](double rho) {
        check_rho(rho);
        return rho * f(1.0 / rho);
    };
    e.Cap = [cap, check_rho](double rho) {
        check_rho(rho);
        return cap(1.0 / rho) / (rho * rho * rho * rho * rho);
    };
    const double lo = dom.hi <= 0.0 || !std::isfinite(dom.hi) ? 0.0 : 1.0 / dom.hi;
    e.domain = Interval{lo, dom.lo > 0.0 ? 1.0 / dom.lo : std::numeric_limits<double>::infinity()};
    return e;
}

} // namespace wavestab
