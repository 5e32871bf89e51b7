#include "lelab/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <sstream>

#include "lelab/errors.hpp"

namespace lelab {

AssembledOperators assemble(const Mesh& mesh) {
    const int n = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> tk, tm;
    tk.reserve(static_cast<size_t>(mesh.num_triangles()) * 9);
    tm.reserve(static_cast<size_t>(mesh.num_triangles()) * 9);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        const double area = 0.5 * signed_area2(a, b, c);
        if (area < 1e-14) {
            std::ostringstream os;
            os << "degenerate triangle " << t << " (area " << area << ") with vertices " << tri[0]
               << "," << tri[1] << "," << tri[2];
            throw NumericError(os.str());
        }
        const double bb[3] = {b.y - c.y, c.y - a.y, a.y - b.y};
        const double cc[3] = {c.x - b.x, a.x - c.x, b.x - a.x};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                tk.emplace_back(tri[i], tri[j], (bb[i] * bb[j] + cc[i] * cc[j]) / (4.0 * area));
                tm.emplace_back(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
            }
        }
    }
    AssembledOperators ops;
    ops.stiffness.mat.resize(n, n);
    ops.stiffness.mat.setFromTriplets(tk.begin(), tk.end());
    ops.stiffness.symmetric = true;
    ops.mass.mat.resize(n, n);
    ops.mass.mat.setFromTriplets(tm.begin(), tm.end());
    ops.mass.symmetric = true;
    return ops;
}

SparseOperator weighted_mass(const Mesh& mesh, const std::vector<double>& w) {
    const int n = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> tm;
    tm.reserve(static_cast<size_t>(mesh.num_triangles()) * 9);
    // edge midpoints in barycentric coordinates
    static const double qp[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = mesh.triangle_area(t);
        double we[3];
        for (int q = 0; q < 3; ++q)
            we[q] = qp[q][0] * w[tri[0]] + qp[q][1] * w[tri[1]] + qp[q][2] * w[tri[2]];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int q = 0; q < 3; ++q) s += we[q] * qp[q][i] * qp[q][j];
                tm.emplace_back(tri[i], tri[j], s * area / 3.0);
            }
        }
    }
    SparseOperator op;
    op.mat.resize(n, n);
    op.mat.setFromTriplets(tm.begin(), tm.end());
    op.symmetric = true;
    return op;
}

Eigen::VectorXd to_vector(const ScalarField& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.values.data(), f.size());
}

ScalarField to_field(const Eigen::VectorXd& v) {
    ScalarField f;
    f.values.assign(v.data(), v.data() + v.size());
    return f;
}

DirichletSolver::DirichletSolver(const Mesh& mesh) : mesh_(&mesh), ops_(assemble(mesh)) {
    const int n = mesh.num_vertices();
    full_to_free_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!mesh.boundary[i]) {
            full_to_free_[i] = static_cast<int>(free_.size());
            free_.push_back(i);
        }
    }
    kff_ = restrict_matrix(ops_.stiffness.mat);
    llt_.compute(kff_);
    if (llt_.info() != Eigen::Success)
        throw NumericError("stiffness factorization failed; assembly may be broken");
}

Eigen::SparseMatrix<double> DirichletSolver::restrict_matrix(
    const Eigen::SparseMatrix<double>& full) const {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < full.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(full, k); it; ++it) {
            int i = full_to_free_[it.row()];
            int j = full_to_free_[it.col()];
            if (i >= 0 && j >= 0) trips.emplace_back(i, j, it.value());
        }
    }
    Eigen::SparseMatrix<double> out(free_.size(), free_.size());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Eigen::VectorXd DirichletSolver::restrict_free(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(free_.size());
    for (size_t i = 0; i < free_.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[free_[i]];
    return out;
}

Eigen::VectorXd DirichletSolver::extend_zero(const Eigen::VectorXd& freev) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_->num_vertices());
    for (size_t i = 0; i < free_.size(); ++i) out[free_[i]] = freev[static_cast<Eigen::Index>(i)];
    return out;
}

Eigen::VectorXd DirichletSolver::solve_free(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = llt_.solve(b);
    double rel = (kff_ * x - b).norm() / std::max(b.norm(), 1e-300);
    if (rel > 1e-12) {
        // CG refinement with diagonal preconditioning, same stopping rule
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        cg.setTolerance(1e-13);
        cg.setMaxIterations(20000);
        cg.compute(kff_);
        x = cg.solveWithGuess(b, x);
        rel = (kff_ * x - b).norm() / std::max(b.norm(), 1e-300);
        if (rel > 1e-12)
            throw NumericError("linear solve stalled above the 1e-12 residual rule");
    }
    return x;
}

ScalarField DirichletSolver::solve(const ScalarField& rhs, const ScalarField& bc) const {
    const int n = mesh_->num_vertices();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        if (mesh_->boundary[i]) g[i] = bc[i];
    // load = M*rhs - K*g  restricted to the free set
    Eigen::VectorXd load = ops_.mass.mat * to_vector(rhs) - ops_.stiffness.mat * g;
    Eigen::VectorXd x = solve_free(restrict_free(load));
    Eigen::VectorXd full = extend_zero(x) + g;
    return to_field(full);
}

ScalarField DirichletSolver::solve_zero_bc(const ScalarField& rhs) const {
    Eigen::VectorXd load = ops_.mass.mat * to_vector(rhs);
    return to_field(extend_zero(solve_free(restrict_free(load))));
}

double integrate_p1(const Mesh& mesh, const std::vector<double>& nodal) {
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = mesh.triangle_area(t);
        // edge-midpoint rule on the P1 interpolant (exact)
        double m01 = 0.5 * (nodal[tri[0]] + nodal[tri[1]]);
        double m12 = 0.5 * (nodal[tri[1]] + nodal[tri[2]]);
        double m20 = 0.5 * (nodal[tri[2]] + nodal[tri[0]]);
        s += area * (m01 + m12 + m20) / 3.0;
    }
    return s;
}

double mass_inner(const SparseOperator& mass, const std::vector<double>& u,
                  const std::vector<double>& v) {
    Eigen::Map<const Eigen::VectorXd> uu(u.data(), static_cast<Eigen::Index>(u.size()));
    Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
    return uu.dot(mass.mat * vv);
}

double dirichlet_energy(const SparseOperator& stiffness, const std::vector<double>& u) {
    Eigen::Map<const Eigen::VectorXd> uu(u.data(), static_cast<Eigen::Index>(u.size()));
    return uu.dot(stiffness.mat * uu);
}

}  // namespace lelab
