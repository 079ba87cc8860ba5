#include "wavestab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavestab {

WaveParamsQ ek_to_qkdv(const WaveParamsEK& p) {
    return WaveParamsQ{p.lambda - 0.5 * p.sigma * p.sigma, p.j * p.sigma - p.mu, -p.j * p.j};
}

namespace {

struct Potential {
    const NonlinearModel* m;
    double lambda, c;
    double W(double v) const { return -m->f(v) - 0.5 * c * v * v + lambda * v; }
    double Wp(double v) const { return m->p(v) - c * v + lambda; }
    double Wpp(double v) const { return m->pp(v) - c; }
};

// Clip to the open domain with a small relative margin.
double clip_to_domain(const Interval& dom, double v) {
    const double margin = 1e-12;
    if (std::isfinite(dom.lo) && v <= dom.lo) v = dom.lo + margin * (1.0 + std::abs(dom.lo));
    if (std::isfinite(dom.hi) && v >= dom.hi) v = dom.hi - margin * (1.0 + std::abs(dom.hi));
    return v;
}

// Newton iteration on g with bisection fallback inside [a, b]; g(a), g(b)
// must have opposite signs. Converges to |g| <= tol_g or a machine-width
// bracket.
template <class F, class DF>
double newton_bisect(F g, DF dg, double a, double b, double ga, double gb, double tol_g) {
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double gx = g(x);
        if (std::abs(gx) <= tol_g) return x;
        if ((gx < 0.0) == (ga < 0.0)) {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
        const double d = dg(x);
        double xn = (d != 0.0) ? x - gx / d : a - 1.0; // force bisection when flat
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (xn == x || b - a <= 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b)))
            return x;
        x = xn;
    }
    return x;
}

// Candidate abscissas for the center scan: a symmetric log ladder clipped to
// the domain, dense enough for every built-in law.
std::vector<double> scan_grid(const Interval& dom) {
    std::vector<double> g;
    const double mul[] = {1.0, 1.3, 1.7, 2.2, 2.8, 3.6, 4.7, 6.0, 7.8};
    for (int k = -6; k <= 5; ++k)
        for (double m : mul) {
            const double s = m * std::pow(10.0, k);
            g.push_back(s);
            g.push_back(-s);
        }
    g.push_back(0.0);
    std::vector<double> out;
    for (double v : g)
        if (dom.contains(v)) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> polish_center(const Potential& pot, double a, double b) {
    const double ga = pot.Wp(a), gb = pot.Wp(b);
    if ((ga < 0.0) == (gb < 0.0)) return std::nullopt;
    const double tol = 1e-14 * (std::abs(ga) + std::abs(gb) + 1e-30);
    const double r = newton_bisect([&](double v) { return pot.Wp(v); },
                                   [&](double v) { return pot.Wpp(v); }, a, b, ga, gb, tol);
    if (pot.Wpp(r) > 0.0) return r;
    return std::nullopt;
}

double find_center(const NonlinearModel& model, const Potential& pot,
                   const std::optional<std::pair<double, double>>& hint) {
    if (hint) {
        double a = clip_to_domain(model.domain, hint->first);
        double b = clip_to_domain(model.domain, hint->second);
        if (a > b) std::swap(a, b);
        const int n = 64;
        for (int i = 0; i < n; ++i) {
            const double x0 = a + (b - a) * i / n;
            const double x1 = a + (b - a) * (i + 1) / n;
            if (auto r = polish_center(pot, x0, x1)) return *r;
        }
        throw NoWellError(model.name + ": no center of W inside hint bracket");
    }
    const auto grid = scan_grid(model.domain);
    double best_depth = std::numeric_limits<double>::infinity();
    double v0 = 0.0;
    bool found = false;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (auto r = polish_center(pot, grid[i], grid[i + 1])) {
            const double depth = pot.W(*r);
            if (depth < best_depth) { // deepest well wins; hint overrides
                best_depth = depth;
                v0 = *r;
                found = true;
            }
        }
    }
    if (!found) throw NoWellError(model.name + ": no center of W found in scanned range");
    return v0;
}

std::optional<double> find_saddle(const NonlinearModel& model, const Potential& pot,
                                  double from, int dir) {
    const double step0 = 1e-3 * std::max(1.0, std::abs(from));
    double step = step0;
    const double anchor = from;
    double prev = from;
    double gprev = pot.Wp(prev);
    for (int it = 0; it < 500; ++it) {
        double v = prev + dir * step;
        const double edge = dir > 0 ? model.domain.hi : model.domain.lo;
        if (std::isfinite(edge) && (dir > 0 ? v >= edge : v <= edge)) return std::nullopt;
        if (!std::isfinite(v)) return std::nullopt;
        const double g = pot.Wp(v);
        if ((g < 0.0) != (gprev < 0.0)) {
            const double tol = 1e-12 * (std::abs(g) + std::abs(gprev) + 1e-30);
            const double r = newton_bisect([&](double x) { return pot.Wp(x); },
                                           [&](double x) { return pot.Wpp(x); }, std::min(prev, v),
                                           std::max(prev, v), prev < v ? gprev : g,
                                           prev < v ? g : gprev, tol);
            if (pot.Wpp(r) < 0.0) return r;
            return std::nullopt;
        }
        prev = v;
        gprev = g;
        step = std::min(step * 1.6, std::max(0.2 * std::abs(prev - anchor), step0));
    }
    return std::nullopt;
}

} // namespace

WellInfo find_well(const NonlinearModel& model, double lambda, double c,
                   std::optional<std::pair<double, double>> hint) {
    const Potential pot{&model, lambda, c};
    WellInfo w;
    w.v0 = find_center(model, pot, hint);
    w.well_min = pot.W(w.v0);
    // step past the center before hunting for crests
    const double nudge = 1e-3 * std::max(1.0, std::abs(w.v0));
    w.saddle_lo = find_saddle(model, pot, w.v0 - nudge, -1);
    w.saddle_hi = find_saddle(model, pot, w.v0 + nudge, +1);
    if (w.saddle_lo || w.saddle_hi) {
        double b = std::numeric_limits<double>::infinity();
        if (w.saddle_lo) b = std::min(b, pot.W(*w.saddle_lo));
        if (w.saddle_hi) b = std::min(b, pot.W(*w.saddle_hi));
        w.barrier_mu = b;
    }
    return w;
}

TurningPoints find_turning_points(const NonlinearModel& model, const WaveParamsQ& params,
                                  std::optional<std::pair<double, double>> hint,
                                  const Numerics& num) {
    const Potential pot{&model, params.lambda, params.c};
    const double mu = params.mu;

    TurningPoints tp;
    tp.v0 = find_center(model, pot, hint);
    tp.well_min = pot.W(tp.v0);

    const double mu_scale = std::max({std::abs(mu), std::abs(tp.well_min), 1e-12});
    if (mu <= tp.well_min + 1e-14 * mu_scale)
        throw NoOscillationError(model.name + ": mu at or below the well minimum");

    // march outward to bracket W = mu on each side; the step is capped by a
    // fraction of the distance already traveled so narrow barrier bumps
    // cannot be jumped over
    auto march = [&](int dir) -> std::pair<double, double> {
        const double step0 = 1e-3 * std::max(1.0, std::abs(tp.v0));
        double step = step0;
        double prev = tp.v0;
        for (int it = 0; it < 800; ++it) {
            double v = prev + dir * step;
            bool clipped = false;
            const double edge = dir > 0 ? model.domain.hi : model.domain.lo;
            if (std::isfinite(edge) && (dir > 0 ? v >= edge : v <= edge)) {
                v = clip_to_domain(model.domain, edge);
                clipped = true;
            }
            const double w = pot.W(v);
            if (w >= mu) return {prev, v};
            if (dir * pot.Wp(v) < 0.0) {
                // slope points back down: either mu is above the barrier or a
                // crossing hides inside the last step; rescan it finely
                for (int k = 1; k <= 64; ++k) {
                    const double vk = prev + (v - prev) * k / 64.0;
                    if (pot.W(vk) >= mu) return {prev + (v - prev) * (k - 1) / 64.0, vk};
                }
                throw AboveBarrierError(model.name + ": mu above the potential barrier");
            }
            if (clipped)
                throw AboveBarrierError(model.name + ": domain ends below mu");
            prev = v;
            step = std::min(step * 1.6, std::max(0.2 * std::abs(prev - tp.v0), step0));
        }
        throw AboveBarrierError(model.name + ": no crossing of W = mu found");
    };

    auto polish_crossing = [&](double a, double b) {
        const double lo = std::min(a, b), hi = std::max(a, b);
        const double glo = pot.W(lo) - mu, ghi = pot.W(hi) - mu;
        const double tol = 1e-14 * mu_scale;
        return newton_bisect([&](double v) { return pot.W(v) - mu; },
                             [&](double v) { return pot.Wp(v); }, lo, hi, glo, ghi, tol);
    };

    const auto [l_in, l_out] = march(-1);
    const auto [r_in, r_out] = march(+1);
    tp.v2 = polish_crossing(l_out, l_in);
    tp.v3 = polish_crossing(r_in, r_out);
    tp.residual_v2 = std::abs(pot.W(tp.v2) - mu) / mu_scale;
    tp.residual_v3 = std::abs(pot.W(tp.v3) - mu) / mu_scale;
    if (tp.residual_v2 > num.epsilon || tp.residual_v3 > num.epsilon)
        throw Error(model.name + ": turning-point residual above tolerance");

    const double wp_scale =
        std::max(2.0 * (mu - tp.well_min) / std::max(tp.v3 - tp.v2, 1e-300), 1e-300);
    if (std::abs(pot.Wp(tp.v2)) < 1e-8 * wp_scale || std::abs(pot.Wp(tp.v3)) < 1e-8 * wp_scale)
        throw NonSimpleRootError(model.name + ": degenerate turning point (harmonic or soliton limit)");

    tp.saddle_lo = find_saddle(model, pot, tp.v2, -1);
    tp.saddle_hi = find_saddle(model, pot, tp.v3, +1);
    if (tp.saddle_lo || tp.saddle_hi) {
        double b = std::numeric_limits<double>::infinity();
        if (tp.saddle_lo) b = std::min(b, pot.W(*tp.saddle_lo));
        if (tp.saddle_hi) b = std::min(b, pot.W(*tp.saddle_hi));
        tp.barrier_mu = b;
    }

    const bool harmonic_zone = (tp.v3 - tp.v2) < 1e-6 * std::max(1.0, std::abs(tp.v0));
    bool soliton_zone = false;
    if (tp.saddle_lo)
        soliton_zone |= std::abs(tp.v2 - *tp.saddle_lo) < 1e-6 * std::max(1.0, std::abs(*tp.saddle_lo));
    if (tp.saddle_hi)
        soliton_zone |= std::abs(tp.v3 - *tp.saddle_hi) < 1e-6 * std::max(1.0, std::abs(*tp.saddle_hi));
    tp.limit_zone = harmonic_zone || soliton_zone;
    return tp;
}

ProfileIntegrals profile_integrals(const NonlinearModel& model, const WaveParamsQ& params,
                                   const TurningPoints& tp, const Numerics& num) {
    const Potential pot{&model, params.lambda, params.c};
    const double mu = params.mu;
    const double v2 = tp.v2, v3 = tp.v3;
    const double mid = 0.5 * (v3 + v2);
    const double half = 0.5 * (v3 - v2);
    const double pi = std::numbers::pi;

    // G(v) = (mu - W(v)) / ((v - v2)(v3 - v)), extended by its limits at the
    // endpoints; smooth and positive across the well for simple roots.
    const double G_lo = -pot.Wp(v2) / (v3 - v2);
    const double G_hi = pot.Wp(v3) / (v3 - v2);
    auto G = [&](double v, bool at_lo, bool at_hi) {
        if (at_lo) return G_lo;
        if (at_hi) return G_hi;
        const double den = (v - v2) * (v3 - v);
        return (mu - pot.W(v)) / den;
    };

    const int n = std::max(16, static_cast<int>(std::ceil(pi / num.delta_omega)));
    const double h = pi / n;

    // Kahan-compensated accumulators keep sweeps deterministic and tight.
    struct Acc {
        double s = 0.0, comp = 0.0;
        void add(double x) {
            const double y = x - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
    };
    Acc a_period, a_action, a_mean, a_halfsq;

    auto sample = [&](double omega, double weight, bool at_lo, bool at_hi) {
        const double sn = std::sin(omega);
        const double cs = std::cos(omega);
        const double v = mid + half * sn;
        const double g = G(v, at_lo, at_hi);
        if (!(g > 0.0) || !std::isfinite(g))
            throw Error(model.name + ": nonpositive desingularized integrand (inconsistent turning points)");
        const double cp = model.cap(v);
        if (cp <= 0.0) throw DomainError(model.name + ": cap(v) <= 0 inside the well");
        const double root_period = std::sqrt(cp / (2.0 * g));
        a_period.add(weight * root_period);
        a_action.add(weight * std::sqrt(2.0 * cp * g) * half * half * cs * cs);
        a_mean.add(weight * v * root_period);
        a_halfsq.add(weight * 0.5 * v * v * root_period);
    };

    if (num.quadrature == Quadrature::Midpoint) {
        for (int i = 0; i < n; ++i) {
            const double omega = -0.5 * pi + (i + 0.5) * h;
            sample(omega, 1.0, false, false);
        }
    } else {
        sample(-0.5 * pi, 0.5, true, false);
        for (int i = 1; i < n; ++i) sample(-0.5 * pi + i * h, 1.0, false, false);
        sample(0.5 * pi, 0.5, false, true);
    }

    ProfileIntegrals out;
    out.period = 2.0 * h * a_period.s;
    out.action = 2.0 * h * a_action.s;
    out.mean = 2.0 * h * a_mean.s;
    out.half_square = 2.0 * h * a_halfsq.s;
    if (!(out.period > 0.0) || !(out.action > 0.0))
        throw Error(model.name + ": nonpositive period or action");
    return out;
}

ProfileSamples reconstruct_profile(const NonlinearModel& model, const WaveParamsQ& params,
                                   const TurningPoints& tp, int n_steps) {
    if (n_steps < 256) throw Error("reconstruct_profile: n_steps must be >= 256");
    const Potential pot{&model, params.lambda, params.c};
    const ProfileIntegrals ints = profile_integrals(model, params, tp);
    const double period = ints.period;
    const double hstep = period / n_steps;

    // cap(v) v'' = -W'(v) - cap'(v) v'^2 / 2
    auto accel = [&](double v, double vx) {
        return (-pot.Wp(v) - 0.5 * model.capp(v) * vx * vx) / model.cap(v);
    };

    ProfileSamples out;
    out.params = params;
    out.period = period;
    out.x.resize(static_cast<std::size_t>(n_steps) + 1);
    out.v.resize(static_cast<std::size_t>(n_steps) + 1);
    out.vx.resize(static_cast<std::size_t>(n_steps) + 1);

    double v = tp.v2, vx = 0.0;
    out.x[0] = 0.0;
    out.v[0] = v;
    out.vx[0] = 0.0;
    double drift = 0.0;
    const double mu = params.mu;
    for (int i = 0; i < n_steps; ++i) {
        const double k1v = vx, k1w = accel(v, vx);
        const double k2v = vx + 0.5 * hstep * k1w, k2w = accel(v + 0.5 * hstep * k1v, vx + 0.5 * hstep * k1w);
        const double k3v = vx + 0.5 * hstep * k2w, k3w = accel(v + 0.5 * hstep * k2v, vx + 0.5 * hstep * k2w);
        const double k4v = vx + hstep * k3w, k4w = accel(v + hstep * k3v, vx + hstep * k3w);
        v += hstep / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        vx += hstep / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if (!model.domain.contains(v))
            throw DomainError(model.name + ": profile reconstruction left the model domain");
        out.x[static_cast<std::size_t>(i) + 1] = (i + 1) * hstep;
        out.v[static_cast<std::size_t>(i) + 1] = v;
        out.vx[static_cast<std::size_t>(i) + 1] = vx;
        drift = std::max(drift, std::abs(0.5 * model.cap(v) * vx * vx + pot.W(v) - mu));
    }
    out.drift = drift;
    if (drift > 1e-6 * (std::abs(mu) + 1.0))
        throw Error(model.name + ": first-integral drift too large, RK4 step too coarse");
    return out;
}

} // namespace wavestab
