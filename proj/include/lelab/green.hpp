#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "lelab/fem.hpp"
#include "lelab/mesh.hpp"

namespace lelab {

struct KirchhoffRouthReport {
    Vec2 a1, a2;
    double psi = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    Eigen::Vector4d grad = Eigen::Vector4d::Zero();
    Eigen::Matrix4d hessian = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d w_matrix = Eigen::Matrix4d::Zero();
    double det_w = 0.0;
    double det_hessian = 0.0;
};

enum class CriticalPointKind { Minimum, Saddle, Maximum, Degenerate };

struct CriticalPoint {
    Vec2 a1, a2;
    double psi_value = 0.0;
    double grad_norm = 0.0;
    CriticalPointKind classification = CriticalPointKind::Degenerate;
    int iterations = 0;
};

enum class SearchMode { Minimize, Newton };

/// Dirichlet Green function G, regular part H, Robin function R, and the
/// two-point Kirchhoff-Routh function Psi = 2G(a1,a2) - R(a1) - R(a2).
///
/// Analytic mode evaluates the unit-disk image formulas; numeric mode solves
/// for H(x,.) as the harmonic extension of (1/2pi) log|x-.| boundary data and
/// caches one solve per source point. Evaluations are const and the cache is
/// internally synchronized.
class GreenEvaluator {
  public:
    static GreenEvaluator analytic_disk();
    static GreenEvaluator numeric(std::shared_ptr<const Mesh> mesh);

    bool analytic() const { return !solver_; }
    const Mesh* mesh() const { return mesh_.get(); }
    double domain_diameter() const;

    double green(Vec2 x, Vec2 y) const;
    double regular_part(Vec2 x, Vec2 y) const;
    double robin(Vec2 x) const;

    /// Gradient of G(x, .) in the second argument (closed form in analytic
    /// mode, interpolated P1 gradient in numeric mode).
    Vec2 grad_y_green(Vec2 x, Vec2 y) const;

    double psi(Vec2 a1, Vec2 a2) const;

    /// Psi, Psi_1, Psi_2 only (no derivatives).
    KirchhoffRouthReport kirchhoff_routh(Vec2 a1, Vec2 a2) const;

    /// Richardson-extrapolated central differences; step 1e-4 * diam(domain).
    /// Errors out when a stencil point leaves the domain.
    void grad_hess_psi(Vec2 a1, Vec2 a2, Eigen::Vector4d& grad, Eigen::Matrix4d& hess) const;

    /// Sign-adjusted second-derivative matrix and its determinant.
    /// Blocks follow the published unit-disk display: diagonal 2x2 blocks are
    /// the negated Hessian blocks, off-diagonal blocks keep their sign, so
    /// |det W| = |det Hess Psi| exactly.
    KirchhoffRouthReport report(Vec2 a1, Vec2 a2) const;

    /// Critical-point search on Omega^2 minus the diagonal. Minimize mode is
    /// damped gradient descent with backtracking plus a Newton polish.
    /// Iterates leaving the safeguard region (pair separation or boundary
    /// distance below 0.01*diam) raise NumericError.
    CriticalPoint find_critical_point(Vec2 init1, Vec2 init2,
                                      SearchMode mode = SearchMode::Minimize) const;

    // Closed-form disk derivatives (available in analytic mode only); used as
    // an independent cross-check of the finite-difference path.
    Vec2 grad_robin_disk(Vec2 x) const;
    Vec2 grad_x_green_disk(Vec2 x, Vec2 y) const;

    /// Gradient of Psi in all four coordinates. Closed forms in analytic
    /// mode; in numeric mode the regular parts are harmonic, so their
    /// gradients come from the exact circle-moment identity
    /// grad h(x) = (1/(pi rho)) \oint h(x + rho nu) nu dtheta.
    Eigen::Vector4d psi_gradient(Vec2 a1, Vec2 a2) const;

  private:
    GreenEvaluator() = default;
    const ScalarField& cached_h(Vec2 x) const;
    double boundary_distance(Vec2 p) const;
    Vec2 harmonic_gradient(const ScalarField& f, Vec2 x) const;

    struct Cache {
        std::unordered_map<uint64_t, ScalarField> fields;
        std::mutex mutex;
    };

    std::shared_ptr<const Mesh> mesh_;
    std::shared_ptr<DirichletSolver> solver_;
    std::shared_ptr<Locator> locator_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace lelab
