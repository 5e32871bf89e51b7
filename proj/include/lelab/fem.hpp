#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <vector>

#include "lelab/mesh.hpp"

namespace lelab {

/// Row-compressed sparse operator. `symmetric` marks structural symmetry.
struct SparseOperator {
    Eigen::SparseMatrix<double> mat;
    bool symmetric = false;

    int rows() const { return static_cast<int>(mat.rows()); }
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return mat * v; }
};

/// P1 stiffness and consistent mass matrices on the full vertex set
/// (no boundary conditions applied).
struct AssembledOperators {
    SparseOperator stiffness;
    SparseOperator mass;
};

AssembledOperators assemble(const Mesh& mesh);

/// Mass matrix weighted by a P1 coefficient field w:  \int w phi_i phi_j,
/// assembled with the edge-midpoint rule (degree-2 exact).
SparseOperator weighted_mass(const Mesh& mesh, const std::vector<double>& w);

Eigen::VectorXd to_vector(const ScalarField& f);
ScalarField to_field(const Eigen::VectorXd& v);

/// Dirichlet elimination plus factorized solves for the Laplacian.
/// Row/column elimination keeps the reduced stiffness SPD; the factorization
/// is computed once and shared by every solve on the mesh.
class DirichletSolver {
  public:
    explicit DirichletSolver(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }
    const SparseOperator& stiffness() const { return ops_.stiffness; }
    const SparseOperator& mass() const { return ops_.mass; }
    const std::vector<int>& free_vertices() const { return free_; }

    /// Solve -lap u = rhs weakly with u = bc on the boundary.
    /// Relative linear residual is driven to <= 1e-12 (Cholesky, then CG
    /// refinement if needed); NumericError otherwise.
    ScalarField solve(const ScalarField& rhs, const ScalarField& bc) const;

    /// Same with zero boundary data.
    ScalarField solve_zero_bc(const ScalarField& rhs) const;

    /// Reduced SPD solve K_ff x = b on free vertices (used by Newton and the
    /// eigensolver plumbing).
    Eigen::VectorXd solve_free(const Eigen::VectorXd& b) const;

    Eigen::VectorXd restrict_free(const Eigen::VectorXd& full) const;
    Eigen::VectorXd extend_zero(const Eigen::VectorXd& freev) const;

    Eigen::SparseMatrix<double> restrict_matrix(const Eigen::SparseMatrix<double>& full) const;

  private:
    const Mesh* mesh_;
    AssembledOperators ops_;
    std::vector<int> free_;
    std::vector<int> full_to_free_;  // -1 for boundary
    Eigen::SparseMatrix<double> kff_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

// Quadrature-backed field integrals.

/// \int_Omega f dx with per-triangle edge-midpoint rule on the P1 interpolant
/// of the nodal samples g(v_i).
double integrate_p1(const Mesh& mesh, const std::vector<double>& nodal);

/// Group-FEM integral \int u * v dx = u^T M v.
double mass_inner(const SparseOperator& mass, const std::vector<double>& u,
                  const std::vector<double>& v);

/// Dirichlet energy \int |grad u|^2 = u^T K u.
double dirichlet_energy(const SparseOperator& stiffness, const std::vector<double>& u);

}  // namespace lelab
