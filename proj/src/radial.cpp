#include "lelab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lelab/errors.hpp"

namespace lelab {

namespace {

// u'' + u'/r + |u|^{p-1} u = 0 becomes  d2u/dt2 = -e^{2t} |u|^{p-1} u
// with t = log r; all features are O(1) wide in t.

struct State {
    double u, v;  // v = du/dt
};

struct TracePoint {
    double t, u, v;
};

struct Trace {
    std::vector<TracePoint> pts;
    std::vector<double> zeros_t;  // refined crossing times
    double u_end = 0.0;
};

State rk_step(double p, double t, State s, double dt, double& err) {
    // Cash-Karp 4(5)
    auto f = [p](double tt, State y) {
        return State{y.v, -std::exp(2.0 * tt) * std::pow(std::abs(y.u), p - 1.0) * y.u};
    };
    auto ax = [](State a, double c, State b) { return State{a.u + c * b.u, a.v + c * b.v}; };
    State k1 = f(t, s);
    State k2 = f(t + 0.2 * dt, ax(s, 0.2 * dt, k1));
    State k3 = f(t + 0.3 * dt, {s.u + dt * (3 * k1.u + 9 * k2.u) / 40, s.v + dt * (3 * k1.v + 9 * k2.v) / 40});
    State k4 = f(t + 0.6 * dt, {s.u + dt * (0.3 * k1.u - 0.9 * k2.u + 1.2 * k3.u),
                                s.v + dt * (0.3 * k1.v - 0.9 * k2.v + 1.2 * k3.v)});
    State k5 = f(t + dt, {s.u + dt * (-11.0 / 54 * k1.u + 2.5 * k2.u - 70.0 / 27 * k3.u + 35.0 / 27 * k4.u),
                          s.v + dt * (-11.0 / 54 * k1.v + 2.5 * k2.v - 70.0 / 27 * k3.v + 35.0 / 27 * k4.v)});
    State k6 = f(t + 0.875 * dt,
                 {s.u + dt * (1631.0 / 55296 * k1.u + 175.0 / 512 * k2.u + 575.0 / 13824 * k3.u +
                              44275.0 / 110592 * k4.u + 253.0 / 4096 * k5.u),
                  s.v + dt * (1631.0 / 55296 * k1.v + 175.0 / 512 * k2.v + 575.0 / 13824 * k3.v +
                              44275.0 / 110592 * k4.v + 253.0 / 4096 * k5.v)});
    State y5{s.u + dt * (37.0 / 378 * k1.u + 250.0 / 621 * k3.u + 125.0 / 594 * k4.u + 512.0 / 1771 * k6.u),
             s.v + dt * (37.0 / 378 * k1.v + 250.0 / 621 * k3.v + 125.0 / 594 * k4.v + 512.0 / 1771 * k6.v)};
    State y4{s.u + dt * (2825.0 / 27648 * k1.u + 18575.0 / 48384 * k3.u + 13525.0 / 55296 * k4.u +
                         277.0 / 14336 * k5.u + 0.25 * k6.u),
             s.v + dt * (2825.0 / 27648 * k1.v + 18575.0 / 48384 * k3.v + 13525.0 / 55296 * k4.v +
                         277.0 / 14336 * k5.v + 0.25 * k6.v)};
    err = std::max(std::abs(y5.u - y4.u), std::abs(y5.v - y4.v));
    return y5;
}

double hermite_zero(const TracePoint& a, const TracePoint& b) {
    // cubic Hermite root by bisection on [a.t, b.t]
    const double h = b.t - a.t;
    auto eval = [&](double t) {
        const double s = (t - a.t) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * a.u + h10 * h * a.v + h01 * b.u + h11 * h * b.v;
    };
    double lo = a.t, hi = b.t, flo = a.u;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Integrate from the series start up to t_end (or until `max_zeros` sign
/// changes when max_zeros > 0).
Trace integrate(double p, double alpha, double t_end, double tol, int max_zeros) {
    // series: u = alpha - (alpha^p / 4) e^{2t}; start where the correction
    // is alpha * 1e-14
    const double t0 = 0.5 * (std::log(4e-14) - (p - 1.0) * std::log(alpha));
    Trace tr;
    const double corr = std::pow(alpha, p) / 4.0 * std::exp(2.0 * t0);
    State s{alpha - corr, -2.0 * corr};
    double t = t0;
    double dt = 0.05;
    tr.pts.push_back({t, s.u, s.v});
    int guard = 0;
    while (t < t_end) {
        if (++guard > 4000000) throw NumericError("radial integration exceeded step budget");
        dt = std::min(dt, t_end - t);
        double err = 0.0;
        State snew = rk_step(p, t, s, dt, err);
        const double scale = tol * (1.0 + std::abs(s.u) + std::abs(s.v));
        if (err > scale && dt > 1e-12) {
            dt *= std::max(0.2, 0.9 * std::pow(scale / err, 0.25));
            continue;
        }
        const TracePoint prev{t, s.u, s.v};
        t += dt;
        s = snew;
        tr.pts.push_back({t, s.u, s.v});
        if ((prev.u > 0) != (s.u > 0)) {
            tr.zeros_t.push_back(hermite_zero(prev, tr.pts.back()));
            if (max_zeros > 0 && static_cast<int>(tr.zeros_t.size()) >= max_zeros) break;
        }
        if (err < 0.25 * scale) dt = std::min(dt * 1.5, 0.25);
    }
    tr.u_end = s.u;
    return tr;
}

RadialSolution shoot(double p, int sign_changes, const RadialOptions& opts) {
    if (p <= 1.0) throw UsageError("radial shooting needs p > 1");
    // canonical run (alpha = 1) locates the zeros of the scale-invariant
    // profile; u_alpha(r) = alpha * v(alpha^{(p-1)/2} r) predicts the root
    const double t_cap = 0.35 * p + 25.0;
    Trace canon = integrate(p, 1.0, t_cap, opts.local_error, sign_changes + 1);
    if (static_cast<int>(canon.zeros_t.size()) < sign_changes + 1) {
        std::ostringstream os;
        os << "canonical scan found only " << canon.zeros_t.size() << " zeros up to log r = "
           << t_cap << " (need " << sign_changes + 1 << ")";
        throw NumericError(os.str());
    }
    const double target_zero_t = canon.zeros_t[sign_changes];
    const double alpha_pred = std::exp(2.0 * target_zero_t / (p - 1.0));

    // bracket u_alpha(1): widen around the prediction until the endpoint
    // value changes sign
    auto endpoint = [&](double alpha) {
        Trace tr = integrate(p, alpha, 0.0, opts.local_error, 0);
        return tr;
    };
    double lo = alpha_pred * (1.0 - 3e-3), hi = alpha_pred * (1.0 + 3e-3);
    Trace tr_lo = endpoint(lo), tr_hi = endpoint(hi);
    int widen = 0;
    while ((tr_lo.u_end > 0) == (tr_hi.u_end > 0)) {
        if (++widen > 8) {
            std::ostringstream os;
            os << "alpha bisection failed to bracket u(1)=0 in [" << lo << ", " << hi << "]";
            throw NumericError(os.str());
        }
        lo -= alpha_pred * 3e-3 * (1 << widen);
        hi += alpha_pred * 3e-3 * (1 << widen);
        tr_lo = endpoint(lo);
        tr_hi = endpoint(hi);
    }
    Trace best = tr_lo;
    double alpha = lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        Trace tm = endpoint(mid);
        if (std::abs(tm.u_end) < std::abs(best.u_end)) {
            best = tm;
            alpha = mid;
        }
        if ((tm.u_end > 0) == (tr_lo.u_end > 0)) {
            lo = mid;
            tr_lo = tm;
        } else {
            hi = mid;
        }
        if (std::abs(best.u_end) <= opts.boundary_tol && hi - lo <= 1e-15 * alpha) break;
    }
    if (std::abs(best.u_end) > opts.boundary_tol) {
        std::ostringstream os;
        os << "alpha bisection stalled: |u(1)| = " << std::abs(best.u_end);
        throw NumericError(os.str());
    }
    // require the prescribed interior sign-change count (crossings clearly
    // inside r < 1)
    int interior = 0;
    for (double zt : best.zeros_t)
        if (zt < -1e-6) ++interior;
    if (interior != sign_changes)
        throw NumericError("converged profile has the wrong interior sign-change count");

    RadialSolution sol;
    sol.p = p;
    sol.alpha = alpha;
    sol.max_positive = alpha;  // 0 is the maximum of the positive part
    sol.node_radius = sign_changes > 0 ? std::exp(best.zeros_t[0]) : 0.0;
    sol.residual_at_one = std::abs(best.u_end);
    double umin = 0.0;
    for (const auto& q : best.pts) umin = std::min(umin, q.u);
    sol.max_negative = -umin;

    // uniform samples on [0,1] by linear interpolation in t
    sol.radii.resize(opts.profile_samples);
    sol.values.resize(opts.profile_samples);
    size_t k = 0;
    for (int i = 0; i < opts.profile_samples; ++i) {
        const double r = static_cast<double>(i) / (opts.profile_samples - 1);
        sol.radii[i] = r;
        if (r <= std::exp(best.pts.front().t)) {
            sol.values[i] = alpha;
            continue;
        }
        const double t = std::log(r);
        while (k + 1 < best.pts.size() && best.pts[k + 1].t < t) ++k;
        if (k + 1 >= best.pts.size()) {
            sol.values[i] = best.u_end;
            continue;
        }
        const auto& a = best.pts[k];
        const auto& b = best.pts[k + 1];
        const double w = (t - a.t) / (b.t - a.t);
        sol.values[i] = (1 - w) * a.u + w * b.u;
    }
    sol.values.back() = best.u_end;
    return sol;
}

}  // namespace

RadialSolution solve_radial_nodal(double p, const RadialOptions& opts) {
    return shoot(p, 1, opts);
}

RadialSolution solve_radial_positive(double p, const RadialOptions& opts) {
    return shoot(p, 0, opts);
}

}  // namespace lelab
