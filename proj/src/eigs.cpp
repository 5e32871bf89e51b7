#include "lelab/eigs.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "lelab/errors.hpp"

namespace lelab {

std::vector<EigenPair> eigs_shift_invert(const Eigen::SparseMatrix<double>& A,
                                         const Eigen::SparseMatrix<double>& B, double sigma,
                                         int k, int max_krylov) {
    const Eigen::Index n = A.rows();
    if (B.coeffs().cwiseAbs().sum() == 0.0)
        throw NumericError("eigensolver weight matrix is identically zero");

    Eigen::SparseMatrix<double> Asig = A - sigma * B;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Asig);
    if (ldlt.info() != Eigen::Success)
        throw NumericError("shift-invert factorization failed (sigma hits the spectrum?)");

    auto op = [&](const Eigen::VectorXd& x) { return ldlt.solve(B * x).eval(); };

    const int m = std::min<int>(max_krylov, static_cast<int>(n));
    std::vector<Eigen::VectorXd> V;
    V.reserve(m);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);

    // deterministic start vector, pulled into the operator range
    Eigen::VectorXd v0(n);
    uint64_t state = 0x9e3779b97f4a7c15ull;
    for (Eigen::Index i = 0; i < n; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v0[i] = (static_cast<double>(state >> 11) / 9007199254740992.0) - 0.5;
    }
    v0 = op(v0);
    double bn = std::sqrt(std::abs(v0.dot(B * v0)));
    if (bn == 0.0) throw NumericError("Lanczos start vector has zero B-norm");
    V.push_back(v0 / bn);

    int steps = 0;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd w = op(V[j]);
        alpha[j] = w.dot(B * V[j]);
        w -= alpha[j] * V[j];
        if (j > 0) w -= beta[j - 1] * V[j - 1];
        // full reorthogonalization in the B-inner product
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : V) w -= v.dot(B * w) * v;
        steps = j + 1;
        double b = std::sqrt(std::abs(w.dot(B * w)));
        if (j + 1 < m) {
            if (b < 1e-13) break;  // invariant subspace found
            beta[j] = b;
            V.push_back(w / b);
        }
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
        T(j, j) = alpha[j];
        if (j + 1 < steps) {
            T(j, j + 1) = beta[j];
            T(j + 1, j) = beta[j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

    std::vector<EigenPair> pairs;
    for (int i = 0; i < steps; ++i) {
        const double theta = es.eigenvalues()[i];
        if (std::abs(theta) < 1e-14) continue;  // mapped from infinity
        EigenPair pr;
        pr.value = sigma + 1.0 / theta;
        pr.vector = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < steps; ++j) pr.vector += es.eigenvectors()(j, i) * V[j];
        const double denom = std::max((A * pr.vector).norm(), 1e-300);
        pr.residual = (A * pr.vector - pr.value * (B * pr.vector)).norm() / denom;
        pairs.push_back(std::move(pr));
    }
    std::sort(pairs.begin(), pairs.end(), [&](const EigenPair& a, const EigenPair& b) {
        return std::abs(a.value - sigma) < std::abs(b.value - sigma);
    });
    if (static_cast<int>(pairs.size()) > k) pairs.resize(k);
    return pairs;
}

}  // namespace lelab
