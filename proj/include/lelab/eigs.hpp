#pragma once

#include <Eigen/Sparse>
#include <vector>

namespace lelab {

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;  // |A x - mu B x| / |A x|
};

/// Eigenvalues of the symmetric pencil A x = mu B x nearest `sigma`,
/// by shift-invert Lanczos in the B-inner product with full
/// reorthogonalization. A must be SPD-ish, B symmetric positive
/// semidefinite (a singular B pushes spurious directions to infinity, which
/// shift-invert never sees).
std::vector<EigenPair> eigs_shift_invert(const Eigen::SparseMatrix<double>& A,
                                         const Eigen::SparseMatrix<double>& B, double sigma,
                                         int k, int max_krylov = 120);

}  // namespace lelab
