#include "lelab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lelab/errors.hpp"

namespace lelab {

double limit_profile(double r) { return -2.0 * std::log1p(r * r / 8.0); }

double limit_profile_exp(double r) {
    const double t = 1.0 + r * r / 8.0;
    return 1.0 / (t * t);
}

double kernel_psi(int j, Vec2 z) {
    const double d = 8.0 + z.norm2();
    switch (j) {
        case 1: return z.x / d;
        case 2: return z.y / d;
        case 3: return (8.0 - z.norm2()) / d;
        default: throw UsageError("kernel index must be 1, 2 or 3");
    }
}

double fundamental_psi1(double r) { return (8.0 - r * r) / (8.0 + r * r); }

double fundamental_psi2(double r) {
    if (r <= 0.0) throw UsageError("psi2 needs r > 0");
    return ((8.0 - r * r) * std::log(r) + 16.0) / (8.0 + r * r);
}

double fundamental_psi1_deriv(double r) {
    const double d = 8.0 + r * r;
    return -32.0 * r / (d * d);
}

double fundamental_psi2_deriv(double r) {
    if (r <= 0.0) throw UsageError("psi2 needs r > 0");
    const double d = 8.0 + r * r;
    const double num = (8.0 - r * r) * std::log(r) + 16.0;
    const double dnum = -2.0 * r * std::log(r) + (8.0 - r * r) / r;
    return (dnum * d - num * 2.0 * r) / (d * d);
}

double RadialProfile::value_at(double r) const {
    auto it = std::lower_bound(radii.begin(), radii.end(), r);
    if (it == radii.begin()) return values.front();
    if (it == radii.end()) return values.back();
    size_t i = static_cast<size_t>(it - radii.begin());
    double t = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
    return (1.0 - t) * values[i - 1] + t * values[i];
}

double RadialProfile::derivative_at(double r) const {
    auto it = std::lower_bound(radii.begin(), radii.end(), r);
    if (it == radii.begin()) return derivatives.front();
    if (it == radii.end()) return derivatives.back();
    size_t i = static_cast<size_t>(it - radii.begin());
    double t = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
    return (1.0 - t) * derivatives[i - 1] + t * derivatives[i];
}

std::vector<double> variation_of_parameters(const std::vector<double>& radii,
                                            const std::function<double(double)>& f) {
    // V(r) = psi1(r) \int_0^r s psi2 f ds - psi2(r) \int_0^r s psi1 f ds,
    // cumulative trapezoid; s psi2(s) -> 0 as s -> 0 despite the log
    std::vector<double> out(radii.size(), 0.0);
    double i1 = 0.0, i2 = 0.0;  // \int s psi2 f, \int s psi1 f
    double prev_r = 0.0, prev_g1 = 0.0, prev_g2 = 0.0;
    for (size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        if (r > 0.0) {
            const double g1 = r * fundamental_psi2(r) * f(r);
            const double g2 = r * fundamental_psi1(r) * f(r);
            i1 += 0.5 * (prev_g1 + g1) * (r - prev_r);
            i2 += 0.5 * (prev_g2 + g2) * (r - prev_r);
            prev_g1 = g1;
            prev_g2 = g2;
            prev_r = r;
            out[k] = fundamental_psi1(r) * i1 - fundamental_psi2(r) * i2;
        }
    }
    return out;
}

namespace {

struct W0State {
    double w, wp;
};

W0State w0_rk4_step(double r, W0State s, double dr) {
    auto rhs = [](double rr, W0State y) {
        const double eu = limit_profile_exp(rr);
        const double u = limit_profile(rr);
        return W0State{y.wp, -y.wp / rr + eu * (0.5 * u * u - y.w)};
    };
    W0State k1 = rhs(r, s);
    W0State k2 = rhs(r + dr / 2, {s.w + dr / 2 * k1.w, s.wp + dr / 2 * k1.wp});
    W0State k3 = rhs(r + dr / 2, {s.w + dr / 2 * k2.w, s.wp + dr / 2 * k2.wp});
    W0State k4 = rhs(r + dr, {s.w + dr * k3.w, s.wp + dr * k3.wp});
    return {s.w + dr / 6 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w),
            s.wp + dr / 6 * (k1.wp + 2 * k2.wp + 2 * k3.wp + k4.wp)};
}

}  // namespace

RadialProfile solve_w0(const W0Options& opts) {
    if (opts.dr <= 0 || opts.r_max <= 1.0) throw UsageError("bad w0 integration options");
    RadialProfile prof;
    prof.name = "w0";
    prof.radii.push_back(0.0);
    prof.values.push_back(0.0);
    prof.derivatives.push_back(0.0);

    double r = opts.series_start;
    // near 0 the source is O(r^4), so w = O(r^6); starting from (0,0) at
    // series_start incurs error well below the 1e-8 truncation budget
    W0State s{0.0, 0.0};
    double store_at = opts.dr;
    int check_countdown = 64;
    while (r < opts.r_max) {
        double dr = std::min(opts.dr * std::max(1.0, r), opts.r_max - r);
        if (--check_countdown == 0) {
            check_countdown = 64;
            // local truncation estimate: one step vs two half steps
            W0State full = w0_rk4_step(r, s, dr);
            W0State half = w0_rk4_step(r + dr / 2, w0_rk4_step(r, s, dr / 2), dr / 2);
            const double err = std::abs(full.w - half.w) / 15.0;
            if (err > 1e-8)
                throw NumericError("w0 step too coarse: truncation estimate above 1e-8");
            s = half;
        } else {
            s = w0_rk4_step(r, s, dr);
        }
        r += dr;
        if (r >= store_at || r >= opts.r_max) {
            prof.radii.push_back(r);
            prof.values.push_back(s.w);
            prof.derivatives.push_back(s.wp);
            // dense below r=32 (finite-difference oracles), thinned beyond
            store_at = r <= 32.0 ? store_at + opts.dr : std::max(store_at + opts.dr, r * 1.002);
        }
    }
    return prof;
}

namespace {

// Gauss-Kronrod (7,15) nodes/weights on [-1,1].
const double kKronrodX[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double kKronrodW[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double kGaussW[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469, 0.381830050505119, 0.279705391489277,
                           0.129484966168870};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double kres = 0.0, gres = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(c + hw * kKronrodX[i]);
        kres += kKronrodW[i] * v;
        if (i % 2 == 1) gres += kGaussW[i / 2] * v;
    }
    return {kres * hw, std::abs(kres - gres) * hw};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_depth) {
    // worst-panel-first refinement against a global error budget
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    PanelResult first = gk15(f, a, b);
    std::vector<Panel> heap{{a, b, first.value, first.error}};
    const int max_panels = 1 << std::min(max_depth, 14);
    while (true) {
        double total = 0.0, err = 0.0;
        for (const auto& p : heap) {
            total += p.value;
            err += p.error;
        }
        if (err <= std::max(abs_tol, rel_tol * std::abs(total))) return total;
        if (static_cast<int>(heap.size()) >= max_panels)
            throw NumericError("adaptive quadrature failed to converge");
        std::pop_heap(heap.begin(), heap.end());
        Panel worst = heap.back();
        heap.pop_back();
        const double m = 0.5 * (worst.a + worst.b);
        PanelResult left = gk15(f, worst.a, m);
        PanelResult right = gk15(f, m, worst.b);
        heap.push_back({worst.a, m, left.value, left.error});
        std::push_heap(heap.begin(), heap.end());
        heap.push_back({m, worst.b, right.value, right.error});
        std::push_heap(heap.begin(), heap.end());
    }
}

MomentTable moments(const QuadratureConfig& cfg) {
    MomentTable table;
    table.quad_rel_tol = cfg.rel_tol;

    // analytic tails from e^U <= 64 s^-4:
    //   mass:        2 pi \int_R 64 s^-3 ds            = 64 pi / R^2
    //   u_mass:      2 pi \int_R 4 log s * 64 s^-3 ds <= 512 pi (log R + 1/2) / R^2
    //   log moment:  2 pi \int_R log s * 64 s^-3 ds    = 64 pi (log R + 1/2) / R^2
    double R = 1e6;
    auto tail_bound = [&](double r) {
        return 512.0 * kPi * (std::log(r) + 0.5) / (r * r);
    };
    while (tail_bound(R) > cfg.tail_bound) R *= 2.0;
    table.tail_cutoff = R;

    auto radial = [&](const std::function<double(double)>& g) {
        // split at the profile scale to help the adaptive panels
        auto f = [&](double s) { return g(s) * s; };
        double v = integrate_adaptive(f, 0.0, 8.0, cfg.rel_tol);
        v += integrate_adaptive(f, 8.0, 1e3, cfg.rel_tol);
        v += integrate_adaptive(f, 1e3, R, cfg.rel_tol);
        return 2.0 * kPi * v;
    };
    table.mass = radial([](double s) { return limit_profile_exp(s); });
    table.u_mass = radial([](double s) { return limit_profile(s) * limit_profile_exp(s); });
    table.log_moment = radial([](double s) {
        return s > 0 ? std::log(s) * limit_profile_exp(s) : 0.0;
    });

    RadialProfile w0 = solve_w0(cfg.w0);
    table.w0_rmax = w0.radii.back();
    table.w0_flux = 2.0 * kPi * w0.radii.back() * w0.derivatives.back();
    return table;
}

}  // namespace lelab
