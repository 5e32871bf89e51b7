#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lelab/fem.hpp"
#include "lelab/mesh.hpp"

namespace lelab {

struct SeedPeak {
    Vec2 point;
    int sign = +1;
};

/// Converged solution of -lap u = |u|^{p-1} u with zero Dirichlet data.
struct Solution {
    std::shared_ptr<const Mesh> mesh;
    double p = 0.0;
    ScalarField field;
    double residual_norm = 0.0;  // |K u - M f(u)| / |M f(u)| on free vertices
    int newton_iters = 0;
    double energy = 0.0;      // J_p
    double mass = 0.0;        // p \int |u|^{p+1}
    double nehari_gap = 0.0;  // |uKu - int|u|^{p+1}| / uKu
    double max_pos = 0.0;
    double max_neg = 0.0;
};

/// Even/odd vertex-permutation constraints the Newton iterates are projected
/// onto (exact mesh symmetries only).
struct SymmetrySet {
    struct Item {
        std::vector<int> perm;
        int sign = +1;
    };
    std::vector<Item> items;

    bool empty() const { return items.empty(); }
    void project(std::vector<double>& u) const;
};

struct NewtonOptions {
    double tol = 1e-11;          // relative residual target
    int max_iter = 60;
    int warmup_picard = -1;      // -1: automatic (run when the seed is rough)
    SymmetrySet symmetries;
};

double seed_epsilon(double p);

/// Two-bump initial guess: sum of sign * sqrt(e) * max(0, 1 + U((x-a)/eps)/p)
/// with eps = (p e^{(p-1)/2})^{-1/2}; zero on the boundary.
ScalarField seed_guess(const Mesh& mesh, double p, const std::vector<SeedPeak>& peaks);

/// Damped Newton on F(u) = K u - M(|u|^{p-1} u) with backtracking.
/// Throws NumericError on stagnation, divergence, or collapse to zero.
Solution newton_solve(const std::shared_ptr<const Mesh>& mesh, const DirichletSolver& solver,
                      double p, const ScalarField& init, const NewtonOptions& opts = {});

struct StepPolicy {
    double factor = 1.15;
    double min_factor = 1.02;
};

struct ContinuationPath {
    std::vector<Solution> entries;
    StepPolicy policy;
    bool complete = false;
    std::string termination;  // empty when complete

    const Solution& final_entry() const { return entries.back(); }
};

/// Warm-started geometric continuation p -> p*factor with step bisection on
/// failure. Seeding below mesh resolution (eps_seed < 2h) is refused with a
/// suggested h. A path that stops before p_end is returned with
/// complete=false and the termination reason.
ContinuationPath continuation(const std::shared_ptr<const Mesh>& mesh, double p_start,
                              double p_end, const StepPolicy& policy,
                              const std::vector<SeedPeak>& peaks);

/// J_p plus the Nehari-form cross-check (both quadratures must agree to
/// 1e-6 relative on a converged solution).
struct EnergyReport {
    double j_p = 0.0;
    double nehari_form = 0.0;  // (1/2 - 1/(p+1)) \int |u|^{p+1}
    double relative_gap = 0.0;
};
EnergyReport energy(const Solution& sol);

/// Build the symmetry projections applicable to a two-bump configuration on
/// this mesh (odd antipodal map, even mirror), or an empty set.
SymmetrySet detect_symmetries(const Mesh& mesh, const std::vector<SeedPeak>& peaks);

}  // namespace lelab
