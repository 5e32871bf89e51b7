#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lelab/green.hpp"
#include "lelab/profiles.hpp"
#include "lelab/solver.hpp"

namespace lelab {

struct PeakData {
    Vec2 x_plus, x_minus;
    double value_plus = 0.0;   // u(x+) > 0
    double value_minus = 0.0;  // u(x-) < 0
    double eps_plus = 0.0;     // (p |u(x+)|^{p-1})^{-1/2}
    double eps_minus = 0.0;
    int vertex_plus = -1;  // argmax vertex (tie-break: lowest index)
    int vertex_minus = -1;
    bool subgrid_fit = false;  // quadratic fit succeeded on both peaks
};

/// Vertex argmax plus a quadratic least-squares fit on the surrounding patch
/// for sub-h localization. Errors out when a peak touches the boundary layer.
PeakData extract_peaks(const Solution& sol);

struct RescaledProfile {
    int peak_sign = +1;
    double R = 5.0;
    double v_at_zero = 0.0;        // exactly 0 by construction
    double sup_v_minus_u = 0.0;    // sup_{|z|<=R} |v - U|
    double sup_w_minus_w0 = 0.0;   // sup |p(v-U) - w0|
    double sup_k = 0.0;            // sup |p(p(v-U) - w0)|
    double envelope_constant = 0.0;  // max (1+v/p)^p (1+|z|^{3.5})
    std::vector<double> sample_radii;
    std::vector<double> v_values;
};

/// Zoom u around peak i (+1 or -1) with the peak scale eps; errors when the
/// mesh cannot resolve eps (names the required h).
RescaledProfile rescale(const Solution& sol, const PeakData& peaks, int sign, double R,
                        const RadialProfile& w0);

struct ExpansionRow {
    double p = 0.0;
    double measured = 0.0;
    double predicted = 0.0;
    double residual = 0.0;  // |measured - predicted|
};

struct ExpansionReport {
    std::string name;
    std::vector<ExpansionRow> rows;
    double fitted_decay_exponent = 0.0;  // of |residual| vs p (log-log fit)
};

/// D_p = p (u(x+)/sqrt(e) - 1 + log p / p)  vs  4 pi Psi_1(x*) + 3 log 2 + 2.
ExpansionReport check_peak_expansion(const ContinuationPath& path, const GreenEvaluator& green);

/// Negative-peak twin of check_peak_expansion (Psi_2 instead of Psi_1).
ExpansionReport check_peak_expansion_negative(const ContinuationPath& path,
                                              const GreenEvaluator& green);

struct ConditionBRow {
    double p = 0.0;
    double series = 0.0;  // p (|u+| - |u-|)
    double bound = 0.0;   // 4 pi sqrt(e) |R(x+) - R(x-)| + 5
    bool within = false;
};
std::vector<ConditionBRow> check_condition_B(const ContinuationPath& path,
                                             const GreenEvaluator& green);

struct EnergyExpansionReport {
    ExpansionReport leading;       // p J_p vs 8 pi e
    ExpansionReport second_order;  // p^2 (J_p - 8 pi e / p) vs expansion
    ExpansionReport mass;          // p int |u|^{p+1} vs 16 pi e
};
EnergyExpansionReport check_energy_expansion(const ContinuationPath& path,
                                             const GreenEvaluator& green);

struct LocalMass {
    double c_plus = 0.0;   // \int_{B_rho(x+)} |u|^p
    double c_minus = 0.0;
};
/// Errors when rho exceeds half the peak separation.
LocalMass local_mass(const Solution& sol, const PeakData& peaks, double rho);

struct PohozaevRow {
    std::string name;  // P1, P2, Q11, Q12, Q21, Q22
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_residual = 0.0;
};
/// Boundary quadratic forms of the solution pair on circles around each peak
/// against the interior integrals produced by integration by parts (the pair
/// (u,u) carries the 2/(p+1) weight on the right-hand side).
std::vector<PohozaevRow> pohozaev_check(const Solution& sol, const PeakData& peaks, double rho,
                                        int circle_nodes = 720);

struct GreenFormRow {
    std::string name;
    double measured = 0.0;
    double predicted = 0.0;
    double abs_error = 0.0;
};
/// Circle quadratic forms of Green-function pairs around x1 against the
/// closed-form table: P1(G1,G1) = -1/(2 pi), the vanishing cases, the
/// Robin-gradient and cross-gradient cases.
std::vector<GreenFormRow> green_quadratic_forms(const GreenEvaluator& green, Vec2 x1, Vec2 x2,
                                                double rho, int nodes = 2000);

struct SpectrumReport {
    std::vector<double> eigenvalues;   // nearest 1 first
    std::vector<double> oddness;       // |x + x o mirror| / (2|x|) per mode (0 = odd)
    double min_gap = 0.0;              // min |mu - 1| over all computed modes
    double nearest_odd_gap = 0.0;      // min |mu - 1| over mirror-odd modes
    double mode_mirror_oddness = 0.0;  // oddness of that mode
};
SpectrumReport nondegeneracy_spectrum(const Solution& sol, int k = 10);

struct NodalLineReport {
    double boundary_distance = 0.0;  // +inf sentinel when u has one sign
    int domain_count = 0;
};
NodalLineReport nodal_line_diag(const Solution& sol);

struct SignBallReport {
    bool pass_positive = true;
    bool pass_negative = true;
    int violations_positive = 0;
    int violations_negative = 0;
};
/// u >= 1/p on B_{2 rho0}(x+) and u <= -1/p on B_{2 rho0}(x-), vertexwise.
SignBallReport sign_ball_check(const Solution& sol, const PeakData& peaks, double rho0);
SignBallReport sign_ball_check_points(const Solution& sol, Vec2 x_plus, Vec2 x_minus,
                                      double rho0);

/// sup over vertices with boundary distance >= bdist and peak distance
/// >= pdist of |p u - 8 pi sqrt(e) (G(.,x+) - G(.,x-))|.
double far_field_error(const Solution& sol, const PeakData& peaks, const GreenEvaluator& green,
                       double bdist = 0.2, double pdist = 0.2);

/// Least-squares slope of log(eps_plus) against p over the final `count`
/// path entries.
double eps_slope(const ContinuationPath& path, int count = 6);

}  // namespace lelab
