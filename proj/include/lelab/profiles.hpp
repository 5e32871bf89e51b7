#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lelab/geometry.hpp"

namespace lelab {

/// Sampled radial function with derivative data on a strictly increasing grid
/// starting at 0.
struct RadialProfile {
    std::string name;
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> derivatives;

    double value_at(double r) const;       // linear interpolation
    double derivative_at(double r) const;  // linear interpolation of stored slopes
};

struct MomentTable {
    double mass = 0.0;        // \int e^U            = 8 pi
    double u_mass = 0.0;      // \int U e^U          = -16 pi
    double log_moment = 0.0;  // \int log|z| e^U     = 12 pi log 2
    double w0_flux = 0.0;     // lim 2 pi r w0'(r)   = 24 pi
    double quad_rel_tol = 0.0;
    double tail_cutoff = 0.0;
    double w0_rmax = 0.0;
};

// Entire limit profile of the peak rescaling: U(z) = -2 log(1 + |z|^2/8),
// solving -lap U = e^U with U(0) = 0 and mass 8 pi.
double limit_profile(double r);
double limit_profile_exp(double r);  // e^{U(r)}
inline double limit_profile(Vec2 z) { return limit_profile(z.norm()); }

/// Bounded kernel of the linearization -lap v = e^U v:
/// j=1,2 are the translation modes, j=3 the dilation mode.
double kernel_psi(int j, Vec2 z);

/// Radial solutions of the homogeneous linearized equation:
/// psi1(r) = (8-r^2)/(8+r^2)  (bounded),
/// psi2(r) = ((8-r^2) log r + 16)/(8+r^2)  (log-singular at 0).
double fundamental_psi1(double r);
double fundamental_psi2(double r);
double fundamental_psi1_deriv(double r);
double fundamental_psi2_deriv(double r);

/// Variation-of-parameters solution V of -V'' - V'/r - e^U V = f with
/// V(0) = 0, built from the fundamental pair (their Abel invariant
/// r (psi1 psi2' - psi2 psi1') equals 1).
std::vector<double> variation_of_parameters(const std::vector<double>& radii,
                                            const std::function<double(double)>& f);

struct W0Options {
    double r_max = 1e5;
    double dr = 5e-4;       // base step; grows proportionally to r past r=1
    double series_start = 1e-6;
};

/// First-order correction profile: -w'' - w'/r - e^U w = -(U^2/2) e^U with
/// w(0) = w'(0) = 0 (radial representative). Raises NumericError when the
/// runtime truncation estimate exceeds 1e-8.
RadialProfile solve_w0(const W0Options& opts = {});

/// Adaptive Gauss-Kronrod (7,15) quadrature on [a,b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 1e-14, int max_depth = 60);

struct QuadratureConfig {
    double rel_tol = 1e-12;
    double tail_bound = 1e-9;  // analytic remainder bound that fixes the cutoff
    W0Options w0;
};

/// The four moment integrals; radial substitution reduces everything to
/// 2 pi \int_0^R f(s) s ds with an analytic tail bound below `tail_bound`
/// (integrands decay like s^-3 up to logs, from e^U <= 64 s^-4).
MomentTable moments(const QuadratureConfig& cfg = {});

}  // namespace lelab
