#include "lelab/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "lelab/errors.hpp"
#include "lelab/profiles.hpp"

namespace lelab {

namespace {

Eigen::VectorXd nodal_power(const Eigen::VectorXd& u, double p) {
    Eigen::VectorXd f(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        f[i] = std::pow(std::abs(u[i]), p - 1.0) * u[i];
    return f;
}

Eigen::VectorXd nodal_weight(const Eigen::VectorXd& u, double p) {
    Eigen::VectorXd w(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        w[i] = p * std::pow(std::abs(u[i]), p - 1.0);
    return w;
}

struct Workspace {
    const DirichletSolver& ds;
    const Eigen::SparseMatrix<double>& K;
    const Eigen::SparseMatrix<double>& M;
    double p;

    Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        return ds.restrict_free(K * u - M * nodal_power(u, p));
    }
    double scale(const Eigen::VectorXd& u) const {
        return std::max(ds.restrict_free(M * nodal_power(u, p)).norm(), 1e-300);
    }
};

// per-sign rescaling onto the discrete Nehari set; the standard stabilizer
// for sign-changing states
void nehari_rescale(const Workspace& ws, Eigen::VectorXd& u) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
    for (int sgn : {+1, -1}) {
        Eigen::VectorXd part = u;
        for (Eigen::Index i = 0; i < u.size(); ++i)
            if (sgn * part[i] <= 0.0) part[i] = 0.0;
        const double g2 = part.dot(ws.K * part);
        const double m1 = part.dot(ws.M * nodal_power(part, ws.p));
        if (m1 > 0.0) out += std::pow(g2 / m1, 1.0 / (ws.p - 1.0)) * part;
    }
    u = out;
}

void project(const SymmetrySet& sym, Eigen::VectorXd& u) {
    if (sym.empty()) return;
    std::vector<double> tmp(u.data(), u.data() + u.size());
    sym.project(tmp);
    u = Eigen::Map<Eigen::VectorXd>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
}

}  // namespace

void SymmetrySet::project(std::vector<double>& u) const {
    std::vector<double> v(u.size());
    for (const auto& item : items) {
        for (size_t i = 0; i < u.size(); ++i)
            v[i] = 0.5 * (u[i] + item.sign * u[item.perm[i]]);
        u.swap(v);
    }
}

double seed_epsilon(double p) { return 1.0 / std::sqrt(p * std::exp((p - 1.0) / 2.0)); }

ScalarField seed_guess(const Mesh& mesh, double p, const std::vector<SeedPeak>& peaks) {
    if (p <= 1.0) throw UsageError("seed_guess needs p > 1");
    const double eps = seed_epsilon(p);
    for (const auto& pk : peaks) {
        if (mesh.domain.boundary_distance(pk.point) <= 0.0)
            throw UsageError("seed peak is not interior");
    }
    for (size_t i = 0; i < peaks.size(); ++i) {
        for (size_t j = i + 1; j < peaks.size(); ++j) {
            if (dist(peaks[i].point, peaks[j].point) < 4.0 * eps) {
                std::ostringstream os;
                os << "seed peaks overlap: separation " << dist(peaks[i].point, peaks[j].point)
                   << " < 4*eps_seed = " << 4.0 * eps;
                throw UsageError(os.str());
            }
        }
    }
    ScalarField u = ScalarField::zeros(mesh.num_vertices());
    const double amp = std::sqrt(std::exp(1.0));
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.boundary[i]) continue;
        double v = 0.0;
        for (const auto& pk : peaks) {
            const double z = dist(mesh.vertices[i], pk.point) / eps;
            v += pk.sign * amp * std::max(0.0, 1.0 + limit_profile(z) / p);
        }
        u[i] = v;
    }
    return u;
}

Solution newton_solve(const std::shared_ptr<const Mesh>& mesh, const DirichletSolver& solver,
                      double p, const ScalarField& init, const NewtonOptions& opts) {
    if (p <= 1.0) throw UsageError("newton_solve needs p > 1");
    const Eigen::SparseMatrix<double>& K = solver.stiffness().mat;
    const Eigen::SparseMatrix<double>& M = solver.mass().mat;
    Workspace ws{solver, K, M, p};

    Eigen::VectorXd u = to_vector(init);
    if (u.norm() == 0.0) throw UsageError("newton_solve needs a nonzero initial guess");
    const double init_scale = u.cwiseAbs().maxCoeff();

    int picard = opts.warmup_picard;
    if (picard < 0) {
        const double rel0 = ws.residual(u).norm() / ws.scale(u);
        picard = rel0 > 0.25 ? 12 : 0;
    }
    for (int k = 0; k < picard; ++k) {
        Eigen::VectorXd rhs = ws.ds.restrict_free(M * nodal_power(u, p));
        u = ws.ds.extend_zero(ws.ds.solve_free(rhs));
        nehari_rescale(ws, u);
        project(opts.symmetries, u);
    }

    double best_rel = std::numeric_limits<double>::max();
    int growth_streak = 0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        Eigen::VectorXd F = ws.residual(u);
        const double rel = F.norm() / ws.scale(u);
        if (rel <= opts.tol) break;
        if (rel > 2.0 * best_rel) {
            if (++growth_streak >= 5)
                throw NumericError("Newton diverged: residual grew 5 consecutive steps");
        } else {
            growth_streak = 0;
        }
        best_rel = std::min(best_rel, rel);

        // J = K - M diag(p|u|^{p-1}); unsymmetric, LU-factorized
        Eigen::VectorXd w = nodal_weight(u, p);
        Eigen::SparseMatrix<double> MW = M * w.asDiagonal();
        Eigen::SparseMatrix<double> J = solver.restrict_matrix(K - MW);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
        if (lu.info() != Eigen::Success)
            throw NumericError("Newton Jacobian factorization failed");
        Eigen::VectorXd du_free = lu.solve(-F);
        Eigen::VectorXd du = ws.ds.extend_zero(du_free);

        const double nF = F.norm();
        double t = 1.0;
        Eigen::VectorXd u_next;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            u_next = u + t * du;
            project(opts.symmetries, u_next);
            const double nF2 = ws.residual(u_next).norm();
            if (nF2 < nF * (1.0 - 1e-4 * t) || nF2 <= opts.tol * ws.scale(u_next)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if ((t * du).norm() < 1e-14 * std::max(1.0, u.norm()))
                throw NumericError("Newton stagnated: step below 1e-14");
            throw NumericError("Newton line search failed to reduce the residual");
        }
        u = u_next;
        if (u.cwiseAbs().maxCoeff() < 1e-3 * init_scale)
            throw NumericError("Newton collapsed to the trivial zero solution");
    }
    Eigen::VectorXd F = ws.residual(u);
    const double rel = F.norm() / ws.scale(u);
    if (rel > opts.tol)
        throw NumericError("Newton failed to converge within the iteration cap");

    Solution sol;
    sol.mesh = mesh;
    sol.p = p;
    sol.field = to_field(u);
    sol.residual_norm = rel;
    sol.newton_iters = it;
    const double grad2 = u.dot(K * u);
    const double mass1 = u.dot(M * nodal_power(u, p));  // \int |u|^{p+1}
    sol.mass = p * mass1;
    sol.energy = 0.5 * grad2 - mass1 / (p + 1.0);
    sol.nehari_gap = std::abs(grad2 - mass1) / std::max(grad2, 1e-300);
    sol.max_pos = u.maxCoeff();
    sol.max_neg = -u.minCoeff();
    return sol;
}

SymmetrySet detect_symmetries(const Mesh& mesh, const std::vector<SeedPeak>& peaks) {
    SymmetrySet sym;
    if (peaks.size() != 2 || peaks[0].sign * peaks[1].sign != -1) return sym;
    Vec2 center{0.0, 0.0};
    if (mesh.domain.is_rectangle()) {
        const auto& r = std::get<RectangleDomain>(mesh.domain.shape);
        center = {r.width / 2.0, r.height / 2.0};
    }
    const double tol = 1e-9;
    if (!mesh.antipodal_map.empty()) {
        Vec2 image = center * 2.0 - peaks[0].point;
        if (dist(image, peaks[1].point) < tol)
            sym.items.push_back({mesh.antipodal_map, -1});
    }
    if (!mesh.mirror_map.empty()) {
        auto mirrored = [&](Vec2 v) {
            if (mesh.domain.is_disk()) return Vec2{v.x, -v.y};
            return Vec2{v.y, v.x};  // square main diagonal
        };
        if (dist(mirrored(peaks[0].point), peaks[0].point) < tol &&
            dist(mirrored(peaks[1].point), peaks[1].point) < tol)
            sym.items.push_back({mesh.mirror_map, +1});
    }
    return sym;
}

ContinuationPath continuation(const std::shared_ptr<const Mesh>& mesh, double p_start,
                              double p_end, const StepPolicy& policy,
                              const std::vector<SeedPeak>& peaks) {
    if (p_start < 2.0) throw UsageError("continuation needs p_start >= 2");
    if (p_end < p_start) throw UsageError("continuation needs p_end >= p_start");
    if (policy.factor <= 1.0) throw UsageError("continuation factor must exceed 1");
    const double eps0 = seed_epsilon(p_start);
    if (eps0 < 2.0 * mesh->h) {
        std::ostringstream os;
        os << "seed at p = " << p_start << " is below mesh resolution (eps_seed = " << eps0
           << " < 2h); use h <= " << eps0 / 2.0;
        throw UsageError(os.str());
    }
    DirichletSolver solver(*mesh);
    NewtonOptions opts;
    opts.symmetries = detect_symmetries(*mesh, peaks);

    ContinuationPath path;
    path.policy = policy;

    ScalarField init = seed_guess(*mesh, p_start, peaks);
    Solution sol = newton_solve(mesh, solver, p_start, init, opts);
    path.entries.push_back(sol);

    NewtonOptions warm = opts;
    warm.warmup_picard = 0;

    double p = p_start;
    double factor = policy.factor;
    while (p < p_end) {
        const double p_next = std::min(p * factor, p_end);
        bool ok = false;
        Solution next;
        try {
            next = newton_solve(mesh, solver, p_next, path.entries.back().field, warm);
            ok = true;
        } catch (const NumericError&) {
            ok = false;
        }
        if (ok) {
            p = p_next;
            path.entries.push_back(next);
            factor = std::min(1.0 + (factor - 1.0) * 1.3, policy.factor);
        } else {
            factor = 1.0 + (factor - 1.0) / 2.0;
            if (factor < policy.min_factor) {
                std::ostringstream os;
                os << "continuation step underflow at p = " << p
                   << " (peak scale below mesh resolution); partial path kept";
                path.termination = os.str();
                path.complete = false;
                return path;
            }
        }
    }
    path.complete = true;
    return path;
}

EnergyReport energy(const Solution& sol) {
    EnergyReport rep;
    rep.j_p = sol.energy;
    const double mass1 = sol.mass / sol.p;
    rep.nehari_form = (0.5 - 1.0 / (sol.p + 1.0)) * mass1;
    const double denom = std::max(std::abs(rep.j_p), 1e-300);
    rep.relative_gap = std::abs(rep.j_p - rep.nehari_form) / denom;
    return rep;
}

}  // namespace lelab
