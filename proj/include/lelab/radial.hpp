#pragma once

#include <vector>

namespace lelab {

/// Sign-changing radial solution of u'' + u'/r + |u|^{p-1} u = 0 on the unit
/// disk with u(0) = alpha > 0, u'(0) = 0, u(1) = 0 and exactly one interior
/// sign change.
struct RadialSolution {
    double p = 0.0;
    double alpha = 0.0;        // shooting parameter = u(0) = max of u^+
    double node_radius = 0.0;  // interior zero
    double max_positive = 0.0;
    double max_negative = 0.0;  // |min u|
    double residual_at_one = 0.0;
    std::vector<double> radii;   // samples on [0,1]
    std::vector<double> values;
};

struct RadialOptions {
    double local_error = 1e-11;  // adaptive RK tolerance
    double boundary_tol = 1e-10; // |u(1)| target for the alpha bisection
    int profile_samples = 2001;
};

/// Shooting + bisection on alpha. The peak collapses like exp(-p/4), so the
/// ODE is marched in log-radius where the profile varies on an O(1) scale.
RadialSolution solve_radial_nodal(double p, const RadialOptions& opts = {});

/// Positive radial solution (no interior sign change), same machinery.
RadialSolution solve_radial_positive(double p, const RadialOptions& opts = {});

}  // namespace lelab
