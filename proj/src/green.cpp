#include "lelab/green.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "lelab/errors.hpp"

namespace lelab {

namespace {

constexpr double kSingularPairTol = 1e-12;

uint64_t quantize_key(Vec2 p) {
    // 1e-10 grid; sources that close share one solve
    auto qx = static_cast<int64_t>(std::llround(p.x * 1e10));
    auto qy = static_cast<int64_t>(std::llround(p.y * 1e10));
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<uint64_t>(qx));
    mix(static_cast<uint64_t>(qy));
    return h;
}

double disk_regular_part(Vec2 x, Vec2 y) {
    // H(x,y) = (1/2pi) log|1 - conj(x) y|, continuous at x=0 with H(0,y)=0
    const std::complex<double> zx(x.x, x.y), zy(y.x, y.y);
    return std::log(std::abs(1.0 - std::conj(zx) * zy)) / (2.0 * kPi);
}

}  // namespace

GreenEvaluator GreenEvaluator::analytic_disk() { return GreenEvaluator{}; }

GreenEvaluator GreenEvaluator::numeric(std::shared_ptr<const Mesh> mesh) {
    GreenEvaluator ev;
    ev.mesh_ = std::move(mesh);
    ev.solver_ = std::make_shared<DirichletSolver>(*ev.mesh_);
    ev.locator_ = std::make_shared<Locator>(*ev.mesh_);
    return ev;
}

double GreenEvaluator::domain_diameter() const {
    return analytic() ? 2.0 : mesh_->domain.diameter();
}

double GreenEvaluator::boundary_distance(Vec2 p) const {
    return analytic() ? 1.0 - p.norm() : mesh_->domain.boundary_distance(p);
}

const ScalarField& GreenEvaluator::cached_h(Vec2 x) const {
    const uint64_t key = quantize_key(x);
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->fields.find(key);
        if (it != cache_->fields.end()) return it->second;
    }
    if (boundary_distance(x) < 2.0 * mesh_->h) {
        std::ostringstream os;
        os << "Green source (" << x.x << "," << x.y << ") is closer than 2h to the boundary";
        throw NumericError(os.str());
    }
    const int n = mesh_->num_vertices();
    ScalarField rhs = ScalarField::zeros(n);
    ScalarField bc = ScalarField::zeros(n);
    for (int i = 0; i < n; ++i) {
        if (mesh_->boundary[i])
            bc[i] = std::log(dist(x, mesh_->vertices[i])) / (2.0 * kPi);
    }
    ScalarField hfield = solver_->solve(rhs, bc);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->fields.emplace(key, std::move(hfield)).first->second;
}

double GreenEvaluator::regular_part(Vec2 x, Vec2 y) const {
    if (analytic()) return disk_regular_part(x, y);
    const ScalarField& hf = cached_h(x);
    return interpolate(*mesh_, *locator_, hf, y);
}

double GreenEvaluator::robin(Vec2 x) const { return regular_part(x, x); }

double GreenEvaluator::green(Vec2 x, Vec2 y) const {
    const double d = dist(x, y);
    if (d < kSingularPairTol) throw NumericError("Green function evaluated at a singular pair");
    if (!analytic() && d < 2.0 * mesh_->h) {
        std::ostringstream os;
        os << "numeric Green evaluation needs |x-y| >= 2h, got " << d;
        throw NumericError(os.str());
    }
    return -std::log(d) / (2.0 * kPi) + regular_part(x, y);
}

Vec2 GreenEvaluator::harmonic_gradient(const ScalarField& f, Vec2 x) const {
    // exact circle-moment identity for harmonic functions:
    //   grad f(x) = (1/(pi rho)) \oint_{|y-x|=rho} f(y) nu dtheta
    // valid at every radius inside the harmonicity region; interpolation
    // noise averages out around the circle
    const double bd = mesh_->domain.boundary_distance(x);
    const double rho = std::max(std::min(0.45 * bd, 0.2 * domain_diameter()), 1.5 * mesh_->h);
    const int m = 64;
    Vec2 acc{0.0, 0.0};
    for (int k = 0; k < m; ++k) {
        const double th = 2.0 * kPi * (k + 0.5) / m;
        const Vec2 nu{std::cos(th), std::sin(th)};
        Vec2 pt = x + nu * rho;
        const double bdp = mesh_->domain.boundary_distance(pt);
        if (bdp < 0.0) pt = x + nu * (rho + bdp - 1e-12);  // clamp onto the mesh
        acc += nu * interpolate(*mesh_, *locator_, f, pt);
    }
    return acc * (2.0 / (m * rho));
}

Vec2 GreenEvaluator::grad_y_green(Vec2 x, Vec2 y) const {
    const Vec2 r = y - x;
    const double d2 = r.norm2();
    if (d2 < kSingularPairTol * kSingularPairTol)
        throw NumericError("Green gradient at a singular pair");
    const Vec2 singular = r * (-1.0 / (2.0 * kPi * d2));
    if (analytic()) {
        // grad_y (1/2pi) log|1 - conj(x) y|
        const double a = 1.0 - x.dot(y);
        const double b = x.x * y.y - x.y * y.x;
        const double s = a * a + b * b;
        const Vec2 grad_s{2.0 * (a * (-x.x) + b * (-x.y)), 2.0 * (a * (-x.y) + b * x.x)};
        return singular + grad_s * (1.0 / (4.0 * kPi * s));
    }
    return singular + harmonic_gradient(cached_h(x), y);
}

Vec2 GreenEvaluator::grad_robin_disk(Vec2 x) const {
    // R(x) = (1/2pi) log(1-|x|^2)
    const double s = 1.0 - x.norm2();
    return x * (-1.0 / (kPi * s));
}

Vec2 GreenEvaluator::grad_x_green_disk(Vec2 x, Vec2 y) const {
    const Vec2 r = x - y;
    const Vec2 singular = r * (-1.0 / (2.0 * kPi * r.norm2()));
    const double a = 1.0 - x.dot(y);
    const double b = x.x * y.y - x.y * y.x;
    const double s = a * a + b * b;
    const Vec2 grad_s{2.0 * (a * (-y.x) + b * y.y), 2.0 * (a * (-y.y) + b * (-y.x))};
    return singular + grad_s * (1.0 / (4.0 * kPi * s));
}

double GreenEvaluator::psi(Vec2 a1, Vec2 a2) const {
    return 2.0 * green(a1, a2) - robin(a1) - robin(a2);
}

Eigen::Vector4d GreenEvaluator::psi_gradient(Vec2 a1, Vec2 a2) const {
    Eigen::Vector4d g;
    if (analytic()) {
        const Vec2 g1 = grad_x_green_disk(a1, a2) * 2.0 - grad_robin_disk(a1);
        const Vec2 g2 = grad_x_green_disk(a2, a1) * 2.0 - grad_robin_disk(a2);
        g << g1.x, g1.y, g2.x, g2.y;
        return g;
    }
    // d/da1 Psi = 2 dG/dx(a1,a2) - dR/da1; by the symmetry of H,
    // dR/dx = 2 grad_y H(x,.)|_x while dG/dx(a1,a2) picks the a2-sourced field
    const Vec2 r12 = a1 - a2;
    const Vec2 sing = r12 * (-1.0 / (2.0 * kPi * r12.norm2()));
    const Vec2 gH2_at_1 = harmonic_gradient(cached_h(a2), a1);
    const Vec2 gH1_at_2 = harmonic_gradient(cached_h(a1), a2);
    const Vec2 gR1 = harmonic_gradient(cached_h(a1), a1) * 2.0;
    const Vec2 gR2 = harmonic_gradient(cached_h(a2), a2) * 2.0;
    const Vec2 g1 = (sing + gH2_at_1) * 2.0 - gR1;
    const Vec2 g2 = (sing * -1.0 + gH1_at_2) * 2.0 - gR2;
    g << g1.x, g1.y, g2.x, g2.y;
    return g;
}

KirchhoffRouthReport GreenEvaluator::kirchhoff_routh(Vec2 a1, Vec2 a2) const {
    KirchhoffRouthReport rep;
    rep.a1 = a1;
    rep.a2 = a2;
    const double g = green(a1, a2);
    rep.psi1 = g - robin(a1);
    rep.psi2 = g - robin(a2);
    rep.psi = rep.psi1 + rep.psi2;
    return rep;
}

void GreenEvaluator::grad_hess_psi(Vec2 a1, Vec2 a2, Eigen::Vector4d& grad,
                                   Eigen::Matrix4d& hess) const {
    const double step = 1e-4 * domain_diameter();
    for (Vec2 p : {a1, a2}) {
        if (boundary_distance(p) < 10.0 * step)
            throw NumericError("derivative stencil within 10 steps of the boundary");
    }
    Eigen::Vector4d q0;
    q0 << a1.x, a1.y, a2.x, a2.y;
    auto richardson = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };

    if (analytic()) {
        auto at = [&](const Eigen::Vector4d& q) { return psi({q[0], q[1]}, {q[2], q[3]}); };
        auto central = [&](int i, double h) {
            Eigen::Vector4d qp = q0, qm = q0;
            qp[i] += h;
            qm[i] -= h;
            return (at(qp) - at(qm)) / (2.0 * h);
        };
        auto second = [&](int i, double h) {
            Eigen::Vector4d qp = q0, qm = q0;
            qp[i] += h;
            qm[i] -= h;
            return (at(qp) - 2.0 * at(q0) + at(qm)) / (h * h);
        };
        auto mixed = [&](int i, int j, double h) {
            Eigen::Vector4d qpp = q0, qpm = q0, qmp = q0, qmm = q0;
            qpp[i] += h;
            qpp[j] += h;
            qpm[i] += h;
            qpm[j] -= h;
            qmp[i] -= h;
            qmp[j] += h;
            qmm[i] -= h;
            qmm[j] -= h;
            return (at(qpp) - at(qpm) - at(qmp) + at(qmm)) / (4.0 * h * h);
        };
        for (int i = 0; i < 4; ++i) {
            grad[i] = richardson(central(i, step), central(i, step / 2.0));
            hess(i, i) = richardson(second(i, step), second(i, step / 2.0));
            for (int j = i + 1; j < 4; ++j) {
                const double v = richardson(mixed(i, j, step), mixed(i, j, step / 2.0));
                hess(i, j) = v;
                hess(j, i) = v;
            }
        }
        return;
    }
    // numeric mode: the gradient has a semi-analytic form (harmonic circle
    // moments); the Hessian is a Richardson central difference of it
    grad = psi_gradient(a1, a2);
    auto grad_at = [&](const Eigen::Vector4d& q) {
        return psi_gradient({q[0], q[1]}, {q[2], q[3]});
    };
    auto column = [&](int i, double h) {
        Eigen::Vector4d qp = q0, qm = q0;
        qp[i] += h;
        qm[i] -= h;
        return ((grad_at(qp) - grad_at(qm)) / (2.0 * h)).eval();
    };
    Eigen::Matrix4d coarse, fine;
    for (int i = 0; i < 4; ++i) {
        coarse.col(i) = column(i, step);
        fine.col(i) = column(i, step / 2.0);
    }
    hess = (4.0 * fine - coarse) / 3.0;
    hess = 0.5 * (hess + hess.transpose()).eval();
}

KirchhoffRouthReport GreenEvaluator::report(Vec2 a1, Vec2 a2) const {
    KirchhoffRouthReport rep = kirchhoff_routh(a1, a2);
    grad_hess_psi(a1, a2, rep.grad, rep.hessian);
    // published sign pattern: negate the diagonal 2x2 blocks
    rep.w_matrix = rep.hessian;
    rep.w_matrix.block<2, 2>(0, 0) *= -1.0;
    rep.w_matrix.block<2, 2>(2, 2) *= -1.0;
    rep.det_w = Eigen::FullPivLU<Eigen::Matrix4d>(rep.w_matrix).determinant();
    rep.det_hessian = Eigen::FullPivLU<Eigen::Matrix4d>(rep.hessian).determinant();
    return rep;
}

CriticalPoint GreenEvaluator::find_critical_point(Vec2 init1, Vec2 init2, SearchMode mode) const {
    const double diam = domain_diameter();
    const double delta = 0.01 * diam;
    const double grad_tol = analytic() ? 1e-6 : 1e-4;

    auto safeguard_ok = [&](const Eigen::Vector4d& q) {
        Vec2 p1{q[0], q[1]}, p2{q[2], q[3]};
        if (dist(p1, p2) < delta) return false;
        return boundary_distance(p1) >= delta && boundary_distance(p2) >= delta;
    };
    auto grad_of = [&](const Eigen::Vector4d& q) {
        return psi_gradient({q[0], q[1]}, {q[2], q[3]});
    };
    auto value = [&](const Eigen::Vector4d& q) { return psi({q[0], q[1]}, {q[2], q[3]}); };

    Eigen::Vector4d q;
    q << init1.x, init1.y, init2.x, init2.y;
    if (!safeguard_ok(q)) throw UsageError("initial pair violates the safeguard region");

    Eigen::Vector4d grad = grad_of(q);
    Eigen::Matrix4d hess;
    int iterations = 0;
    const int max_iter = 300;

    for (; iterations < max_iter; ++iterations) {
        if (grad.norm() <= grad_tol) break;
        Eigen::Vector4d dir;
        bool newton_step = false;
        const bool polish = grad.norm() < 1e-2;
        if (mode == SearchMode::Newton || polish) {
            grad_hess_psi({q[0], q[1]}, {q[2], q[3]}, grad, hess);
            Eigen::Vector4d cand = hess.fullPivLu().solve(-grad);
            if (cand.allFinite() && cand.norm() < 0.25 * diam) {
                dir = cand;
                newton_step = true;
            }
        }
        if (!newton_step) dir = -grad;

        // descend on Psi while far out, on |grad Psi| when polishing
        const double f0 = polish ? grad.norm() : value(q);
        double t = newton_step ? 1.0 : std::min(1.0, 0.1 * diam / std::max(dir.norm(), 1e-30));
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            Eigen::Vector4d qn = q + t * dir;
            if (safeguard_ok(qn)) {
                Eigen::Vector4d gn = grad_of(qn);
                const double fn = polish ? gn.norm() : value(qn);
                if (fn < f0) {
                    q = qn;
                    grad = gn;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!moved) {
            if (grad.norm() <= 10.0 * grad_tol) break;  // line-search floor
            throw NumericError(
                "critical-point iterate escaped the safeguard region (pair separation or "
                "boundary margin below 0.01*diam)");
        }
    }
    if (grad.norm() > 10.0 * grad_tol)
        throw NumericError("critical-point search did not reach the gradient tolerance");

    CriticalPoint cp;
    cp.a1 = {q[0], q[1]};
    cp.a2 = {q[2], q[3]};
    // disk minimizers form a rotation orbit; report the representative with
    // a1 on the positive x-axis
    if (analytic()) {
        const double th = std::atan2(cp.a1.y, cp.a1.x);
        const double c = std::cos(-th), s = std::sin(-th);
        auto rot = [&](Vec2 v) { return Vec2{c * v.x - s * v.y, s * v.x + c * v.y}; };
        cp.a1 = rot(cp.a1);
        cp.a2 = rot(cp.a2);
    }
    grad_hess_psi(cp.a1, cp.a2, grad, hess);
    cp.psi_value = psi(cp.a1, cp.a2);
    cp.grad_norm = grad.norm();
    cp.iterations = iterations;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(hess);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(std::abs(ev[0]), std::abs(ev[3]));
    int pos = 0, neg = 0, zero = 0;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(ev[i]) <= 1e-6 * std::max(scale, 1.0))
            ++zero;
        else if (ev[i] > 0)
            ++pos;
        else
            ++neg;
    }
    if (zero > 0)
        cp.classification = CriticalPointKind::Degenerate;
    else if (neg == 0)
        cp.classification = CriticalPointKind::Minimum;
    else if (pos == 0)
        cp.classification = CriticalPointKind::Maximum;
    else
        cp.classification = CriticalPointKind::Saddle;
    return cp;
}

}  // namespace lelab
