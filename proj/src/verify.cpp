#include "lelab/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lelab/eigs.hpp"
#include "lelab/errors.hpp"

namespace lelab {

namespace {

const double kSqrtE = std::sqrt(std::exp(1.0));

std::vector<std::vector<int>> vertex_neighbors(const Mesh& mesh) {
    std::vector<std::vector<int>> nbr(mesh.num_vertices());
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            nbr[t[e]].push_back(t[(e + 1) % 3]);
            nbr[t[e]].push_back(t[(e + 2) % 3]);
        }
    }
    for (auto& v : nbr) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return nbr;
}

// quadratic LSQ fit u ~ c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2 on the
// two-ring patch; returns the stationary point and value if it is a proper
// interior extremum of the patch
std::optional<std::pair<Vec2, double>> quadratic_peak(const Mesh& mesh, const ScalarField& u,
                                                      int center,
                                                      const std::vector<std::vector<int>>& nbr,
                                                      int sign) {
    std::vector<int> patch{center};
    for (int a : nbr[center]) patch.push_back(a);
    size_t one_ring = patch.size();
    for (size_t i = 1; i < one_ring; ++i)
        for (int b : nbr[patch[i]]) patch.push_back(b);
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
    if (patch.size() < 8) return std::nullopt;

    const Vec2 c = mesh.vertices[center];
    Eigen::MatrixXd A(patch.size(), 6);
    Eigen::VectorXd b(patch.size());
    double rad = 0.0;
    for (size_t i = 0; i < patch.size(); ++i) {
        const Vec2 d = mesh.vertices[patch[i]] - c;
        A(i, 0) = 1.0;
        A(i, 1) = d.x;
        A(i, 2) = d.y;
        A(i, 3) = d.x * d.x;
        A(i, 4) = d.x * d.y;
        A(i, 5) = d.y * d.y;
        b(i) = u[patch[i]];
        rad = std::max(rad, d.norm());
    }
    Eigen::VectorXd q = A.colPivHouseholderQr().solve(b);
    Eigen::Matrix2d H;
    H << 2 * q[3], q[4], q[4], 2 * q[5];
    Eigen::Vector2d g(q[1], q[2]);
    // peak needs sign-definite curvature
    const double det = H.determinant();
    if (det <= 0.0 || sign * H(0, 0) >= 0.0) return std::nullopt;
    Eigen::Vector2d s = -H.fullPivLu().solve(g);
    if (s.norm() > 0.8 * rad) return std::nullopt;
    const double val = q[0] + g.dot(s) + 0.5 * s.dot(H * s);
    return std::make_pair(c + Vec2{s[0], s[1]}, val);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::max(n * sxx - sx * sx, 1e-300);
}

double fit_decay_exponent(const std::vector<ExpansionRow>& rows) {
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        if (r.residual > 0 && r.p > 0) {
            lx.push_back(std::log(r.p));
            ly.push_back(std::log(r.residual));
        }
    }
    if (lx.size() < 2) return 0.0;
    return -fit_slope(lx, ly);
}

struct CircleSample {
    Vec2 point;
    Vec2 normal;
};

std::vector<CircleSample> circle_nodes(Vec2 center, double rho, int n) {
    std::vector<CircleSample> out(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * (k + 0.5) / n;
        const Vec2 nu{std::cos(th), std::sin(th)};
        out[k] = {center + rho * nu, nu};
    }
    return out;
}

}  // namespace

PeakData extract_peaks(const Solution& sol) {
    const Mesh& mesh = *sol.mesh;
    const auto& u = sol.field;
    PeakData pk;
    double best_pos = -std::numeric_limits<double>::max();
    double best_neg = std::numeric_limits<double>::max();
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        if (u[i] > best_pos) {
            best_pos = u[i];
            pk.vertex_plus = i;
        }
        if (u[i] < best_neg) {
            best_neg = u[i];
            pk.vertex_minus = i;
        }
    }
    if (best_pos <= 0.0 || mesh.boundary[pk.vertex_plus])
        throw NumericError("positive peak missing or degenerate");
    auto nbr = vertex_neighbors(mesh);
    for (int a : nbr[pk.vertex_plus])
        if (mesh.boundary[a])
            throw NumericError("positive peak sits in the boundary-adjacent layer");

    pk.x_plus = mesh.vertices[pk.vertex_plus];
    pk.value_plus = best_pos;
    auto fit_p = quadratic_peak(mesh, u, pk.vertex_plus, nbr, +1);
    bool both = fit_p.has_value();
    if (fit_p) {
        pk.x_plus = fit_p->first;
        pk.value_plus = fit_p->second;
    }

    if (best_neg < 0.0) {
        if (mesh.boundary[pk.vertex_minus])
            throw NumericError("negative peak on the boundary");
        pk.x_minus = mesh.vertices[pk.vertex_minus];
        pk.value_minus = best_neg;
        auto fit_m = quadratic_peak(mesh, u, pk.vertex_minus, nbr, -1);
        both = both && fit_m.has_value();
        if (fit_m) {
            pk.x_minus = fit_m->first;
            pk.value_minus = fit_m->second;
        }
    } else {
        pk.vertex_minus = -1;
        both = false;
    }
    pk.subgrid_fit = both;
    pk.eps_plus = 1.0 / std::sqrt(sol.p * std::pow(std::abs(pk.value_plus), sol.p - 1.0));
    pk.eps_minus = pk.vertex_minus >= 0
                       ? 1.0 / std::sqrt(sol.p * std::pow(std::abs(pk.value_minus), sol.p - 1.0))
                       : 0.0;
    return pk;
}

RescaledProfile rescale(const Solution& sol, const PeakData& peaks, int sign, double R,
                        const RadialProfile& w0) {
    const Mesh& mesh = *sol.mesh;
    const double eps = sign > 0 ? peaks.eps_plus : peaks.eps_minus;
    const Vec2 x0 = sign > 0 ? peaks.x_plus : peaks.x_minus;
    const double u0 = sign > 0 ? peaks.value_plus : peaks.value_minus;
    if (eps <= 0.0) throw UsageError("rescale needs a valid peak");
    if (eps < mesh.h) {
        std::ostringstream os;
        os << "mesh does not resolve the peak scale: eps = " << eps << " < h = " << mesh.h
           << "; need h <= " << eps;
        throw NumericError(os.str());
    }
    if (eps * R > mesh.domain.boundary_distance(x0))
        throw UsageError("rescale window exceeds the boundary distance of the peak");

    Locator loc(mesh);
    RescaledProfile prof;
    prof.peak_sign = sign;
    prof.R = R;
    const double p = sol.p;
    const int nray = 16, nrad = 64;
    prof.sample_radii.reserve(nrad);
    for (int ir = 1; ir <= nrad; ++ir) {
        const double rz = R * ir / nrad;
        prof.sample_radii.push_back(rz);
        double vmean = 0.0;
        for (int ia = 0; ia < nray; ++ia) {
            const double th = 2.0 * kPi * ia / nray;
            const Vec2 z{rz * std::cos(th), rz * std::sin(th)};
            const double uval = interpolate(mesh, loc, sol.field, x0 + z * eps);
            const double v = p / u0 * (uval - u0);
            vmean += v;
            const double dv = std::abs(v - limit_profile(rz));
            prof.sup_v_minus_u = std::max(prof.sup_v_minus_u, dv);
            const double w = p * (v - limit_profile(rz));
            prof.sup_w_minus_w0 = std::max(prof.sup_w_minus_w0, std::abs(w - w0.value_at(rz)));
            prof.sup_k = std::max(prof.sup_k, std::abs(p * (w - w0.value_at(rz))));
            const double env = std::pow(std::max(0.0, 1.0 + v / p), p) * (1.0 + std::pow(rz, 3.5));
            prof.envelope_constant = std::max(prof.envelope_constant, env);
        }
        prof.v_values.push_back(vmean / nray);
    }
    prof.v_at_zero = 0.0;  // by the definition of the rescaling
    return prof;
}

ExpansionReport peak_expansion_impl(const ContinuationPath& path, const GreenEvaluator& green,
                                    bool positive) {
    ExpansionReport rep;
    rep.name = positive ? "peak_expansion_pos" : "peak_expansion_neg";
    for (const auto& sol : path.entries) {
        PeakData pk = extract_peaks(sol);
        if (pk.vertex_minus < 0) continue;
        const double p = sol.p;
        const double g = green.green(pk.x_plus, pk.x_minus);
        ExpansionRow row;
        row.p = p;
        if (positive) {
            const double psi1 = g - green.robin(pk.x_plus);
            row.predicted = 4.0 * kPi * psi1 + 3.0 * std::log(2.0) + 2.0;
            row.measured = p * (pk.value_plus / kSqrtE - 1.0 + std::log(p) / p);
        } else {
            const double psi2 = g - green.robin(pk.x_minus);
            row.predicted = 4.0 * kPi * psi2 + 3.0 * std::log(2.0) + 2.0;
            row.measured = p * (-pk.value_minus / kSqrtE - 1.0 + std::log(p) / p);
        }
        row.residual = std::abs(row.measured - row.predicted);
        rep.rows.push_back(row);
    }
    rep.fitted_decay_exponent = fit_decay_exponent(rep.rows);
    return rep;
}

ExpansionReport check_peak_expansion(const ContinuationPath& path, const GreenEvaluator& green) {
    return peak_expansion_impl(path, green, true);
}

ExpansionReport check_peak_expansion_negative(const ContinuationPath& path,
                                              const GreenEvaluator& green) {
    return peak_expansion_impl(path, green, false);
}

std::vector<ConditionBRow> check_condition_B(const ContinuationPath& path,
                                             const GreenEvaluator& green) {
    std::vector<ConditionBRow> rows;
    for (const auto& sol : path.entries) {
        PeakData pk = extract_peaks(sol);
        if (pk.vertex_minus < 0) continue;
        ConditionBRow row;
        row.p = sol.p;
        row.series = sol.p * (pk.value_plus - (-pk.value_minus));
        row.bound =
            4.0 * kPi * kSqrtE * std::abs(green.robin(pk.x_plus) - green.robin(pk.x_minus)) + 5.0;
        row.within = std::abs(row.series) <= row.bound;
        rows.push_back(row);
    }
    return rows;
}

EnergyExpansionReport check_energy_expansion(const ContinuationPath& path,
                                             const GreenEvaluator& green) {
    EnergyExpansionReport rep;
    rep.leading.name = "energy_leading";
    rep.second_order.name = "energy_second_order";
    rep.mass.name = "mass_condition_A";
    const double e = std::exp(1.0);
    for (const auto& sol : path.entries) {
        PeakData pk = extract_peaks(sol);
        if (pk.vertex_minus < 0) continue;
        const double p = sol.p;
        const double psi = green.psi(pk.x_plus, pk.x_minus);

        ExpansionRow lead{p, p * sol.energy, 8.0 * kPi * e, 0.0};
        lead.residual = std::abs(lead.measured - lead.predicted);
        rep.leading.rows.push_back(lead);

        ExpansionRow second;
        second.p = p;
        second.measured = p * p * (sol.energy - 8.0 * kPi * e / p);
        second.predicted =
            8.0 * kPi * e * (-2.0 * std::log(p) + 6.0 * std::log(2.0) - 3.0) +
            32.0 * kPi * kPi * e * psi;
        second.residual = std::abs(second.measured - second.predicted);
        rep.second_order.rows.push_back(second);

        ExpansionRow mrow{p, sol.mass, 16.0 * kPi * e, 0.0};
        mrow.residual = std::abs(mrow.measured - mrow.predicted);
        rep.mass.rows.push_back(mrow);
    }
    rep.leading.fitted_decay_exponent = fit_decay_exponent(rep.leading.rows);
    rep.second_order.fitted_decay_exponent = fit_decay_exponent(rep.second_order.rows);
    rep.mass.fitted_decay_exponent = fit_decay_exponent(rep.mass.rows);
    return rep;
}

LocalMass local_mass(const Solution& sol, const PeakData& peaks, double rho) {
    if (peaks.vertex_minus >= 0) {
        const double sep = dist(peaks.x_plus, peaks.x_minus);
        if (rho > 0.5 * sep)
            throw UsageError("local-mass radius exceeds half the peak separation");
    }
    const Mesh& mesh = *sol.mesh;
    const double p = sol.p;
    LocalMass lm;
    // elementwise edge-midpoint quadrature of |u|^p restricted to each ball
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = mesh.triangle_area(t);
        for (int e = 0; e < 3; ++e) {
            const Vec2 mid =
                (mesh.vertices[tri[e]] + mesh.vertices[tri[(e + 1) % 3]]) * 0.5;
            const double uval = 0.5 * (sol.field[tri[e]] + sol.field[tri[(e + 1) % 3]]);
            const double val = std::pow(std::abs(uval), p) * area / 3.0;
            if (dist(mid, peaks.x_plus) <= rho) lm.c_plus += val;
            if (peaks.vertex_minus >= 0 && dist(mid, peaks.x_minus) <= rho) lm.c_minus += val;
        }
    }
    return lm;
}

std::vector<PohozaevRow> pohozaev_check(const Solution& sol, const PeakData& peaks, double rho,
                                        int circle_nodes_n) {
    const Mesh& mesh = *sol.mesh;
    Locator loc(mesh);
    const double p = sol.p;
    std::vector<PohozaevRow> rows;

    std::vector<std::pair<std::string, Vec2>> centers{{"1", peaks.x_plus}};
    if (peaks.vertex_minus >= 0) centers.push_back({"2", peaks.x_minus});

    for (const auto& [tag, x0] : centers) {
        if (mesh.domain.boundary_distance(x0) <= rho)
            throw UsageError("Pohozaev circle exits the domain");
        auto nodes = circle_nodes(x0, rho, circle_nodes_n);
        const double dS = 2.0 * kPi * rho / circle_nodes_n;
        double p_norm2 = 0.0, p_grad2 = 0.0, b_pow = 0.0;
        Vec2 q_acc{0, 0};
        Vec2 b_pow_nu{0, 0};
        double q_cross[2][2] = {{0, 0}, {0, 0}};
        for (const auto& cs : nodes) {
            auto hit = loc.locate(cs.point);
            if (!hit) throw UsageError("Pohozaev circle node left the mesh");
            const Vec2 g = p1_gradient(mesh, sol.field, hit->first);
            const auto& tri = mesh.triangles[hit->first];
            const auto& l = hit->second;
            const double uval =
                l[0] * sol.field[tri[0]] + l[1] * sol.field[tri[1]] + l[2] * sol.field[tri[2]];
            const double gn = g.dot(cs.normal);
            p_norm2 += gn * gn * dS;
            p_grad2 += g.norm2() * dS;
            const double upow = std::pow(std::abs(uval), p + 1.0);
            b_pow += upow * dS;
            b_pow_nu += cs.normal * (upow * dS);
            for (int j = 0; j < 2; ++j) {
                const double gj = j == 0 ? g.x : g.y;
                const double nj = j == 0 ? cs.normal.x : cs.normal.y;
                q_cross[0][j] += (-2.0 * gj * gn + g.norm2() * nj) * dS;
            }
        }
        // interior \int_{B_rho} |u|^{p+1}: midpoint rule on interior
        // elements, 5x5 barycentric subsampling where the circle cuts through
        double ball_int = 0.0;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto& tri = mesh.triangles[t];
            const double area = mesh.triangle_area(t);
            int inside = 0;
            for (int c = 0; c < 3; ++c)
                if (dist(mesh.vertices[tri[c]], x0) <= rho) ++inside;
            if (inside == 0) continue;
            if (inside == 3) {
                for (int e = 0; e < 3; ++e) {
                    const double um =
                        0.5 * (sol.field[tri[e]] + sol.field[tri[(e + 1) % 3]]);
                    ball_int += std::pow(std::abs(um), p + 1.0) * area / 3.0;
                }
            } else {
                const Vec2 A = mesh.vertices[tri[0]], B = mesh.vertices[tri[1]],
                           C = mesh.vertices[tri[2]];
                const int nsub = 5;
                int cnt = 0;
                double acc = 0.0;
                for (int a = 0; a < nsub; ++a) {
                    for (int b = 0; b + a < nsub; ++b) {
                        const double la = (a + 1.0 / 3.0) / nsub;
                        const double lb = (b + 1.0 / 3.0) / nsub;
                        const double lc = 1.0 - la - lb;
                        ++cnt;
                        const Vec2 pt = A * la + B * lb + C * lc;
                        if (dist(pt, x0) > rho) continue;
                        const double uv = la * sol.field[tri[0]] + lb * sol.field[tri[1]] +
                                          lc * sol.field[tri[2]];
                        acc += std::pow(std::abs(uv), p + 1.0);
                    }
                }
                ball_int += acc * area / cnt;
            }
        }
        PohozaevRow pr;
        pr.name = "P" + tag;
        pr.lhs = -2.0 * rho * p_norm2 + rho * p_grad2;
        pr.rhs = 2.0 / (p + 1.0) * (rho * b_pow - 2.0 * ball_int);
        pr.rel_residual = std::abs(pr.lhs - pr.rhs) / std::max(std::abs(pr.lhs), 1e-300);
        rows.push_back(pr);
        for (int j = 0; j < 2; ++j) {
            PohozaevRow qr;
            qr.name = "Q" + tag + (j == 0 ? "1" : "2");
            qr.lhs = q_cross[0][j];
            qr.rhs = 2.0 / (p + 1.0) * (j == 0 ? b_pow_nu.x : b_pow_nu.y);
            // both sides vanish for the exact solution at equilibrium; the
            // residual is meaningful against the P-form scale
            qr.rel_residual = std::abs(qr.lhs - qr.rhs) / std::max(std::abs(pr.lhs), 1e-300);
            rows.push_back(qr);
        }
    }
    return rows;
}

std::vector<GreenFormRow> green_quadratic_forms(const GreenEvaluator& green, Vec2 x1, Vec2 x2,
                                                double rho, int nodes_n) {
    if (dist(x1, x2) <= rho)
        throw UsageError("second source lies on or inside the quadrature circle");
    auto nodes = circle_nodes(x1, rho, nodes_n);
    const double dS = 2.0 * kPi * rho / nodes_n;

    auto gradG1 = [&](Vec2 y) { return green.grad_y_green(x1, y); };
    auto gradG2 = [&](Vec2 y) { return green.grad_y_green(x2, y); };
    // y-gradient of d/dx_h G(x,.) by central differences in the source
    auto gradDh = [&](Vec2 x, int hcomp, Vec2 y) {
        const double hs = 1e-5;
        Vec2 xp = x, xm = x;
        (hcomp == 0 ? xp.x : xp.y) += hs;
        (hcomp == 0 ? xm.x : xm.y) -= hs;
        return (green.grad_y_green(xp, y) - green.grad_y_green(xm, y)) / (2.0 * hs);
    };

    auto P = [&](auto&& fgrad, auto&& ggrad) {
        double s1 = 0.0, s2 = 0.0;
        for (const auto& cs : nodes) {
            const Vec2 gf = fgrad(cs.point);
            const Vec2 gg = ggrad(cs.point);
            s1 += gf.dot(cs.normal) * gg.dot(cs.normal);
            s2 += gf.dot(gg);
        }
        return -2.0 * rho * s1 * dS + rho * s2 * dS;
    };
    auto Q = [&](int j, auto&& fgrad, auto&& ggrad) {
        double s = 0.0;
        for (const auto& cs : nodes) {
            const Vec2 gf = fgrad(cs.point);
            const Vec2 gg = ggrad(cs.point);
            const double fj = j == 0 ? gf.x : gf.y;
            const double gj = j == 0 ? gg.x : gg.y;
            const double nj = j == 0 ? cs.normal.x : cs.normal.y;
            s += (-fj * gg.dot(cs.normal) - gf.dot(cs.normal) * gj + gf.dot(gg) * nj) * dS;
        }
        return s;
    };

    // reference derivatives of R and G at x1 (Richardson FD of the scalar
    // functions; closed forms exist in analytic mode but FD keeps both modes
    // uniform at the 1e-6 level)
    auto dR = [&](int j) {
        const double hs = 1e-5;
        Vec2 xp = x1, xm = x1;
        (j == 0 ? xp.x : xp.y) += hs;
        (j == 0 ? xm.x : xm.y) -= hs;
        return (green.robin(xp) - green.robin(xm)) / (2.0 * hs);
    };
    auto DjG_x2x1 = [&](int j) {
        // derivative in the second argument of G(x2, .), at x1
        const Vec2 g = green.grad_y_green(x2, x1);
        return j == 0 ? g.x : g.y;
    };

    std::vector<GreenFormRow> rows;
    auto add = [&](std::string name, double measured, double predicted) {
        rows.push_back({std::move(name), measured, predicted, std::abs(measured - predicted)});
    };
    add("P1(G1,G1)", P(gradG1, gradG1), -1.0 / (2.0 * kPi));
    add("P1(G2,G2)", P(gradG2, gradG2), 0.0);
    add("P1(G1,G2)", P(gradG1, gradG2), 0.0);
    add("P1(G1,d1G1)", P(gradG1, [&](Vec2 y) { return gradDh(x1, 0, y); }), 0.5 * dR(0));
    add("P1(G1,d2G1)", P(gradG1, [&](Vec2 y) { return gradDh(x1, 1, y); }), 0.5 * dR(1));
    add("P1(G2,d1G2)", P(gradG2, [&](Vec2 y) { return gradDh(x2, 0, y); }), 0.0);
    add("Q11(G1,G1)", Q(0, gradG1, gradG1), dR(0));
    add("Q12(G1,G1)", Q(1, gradG1, gradG1), dR(1));
    add("Q11(G2,G1)", Q(0, gradG2, gradG1), DjG_x2x1(0));
    add("Q12(G2,G1)", Q(1, gradG2, gradG1), DjG_x2x1(1));
    add("Q11(G2,G2)", Q(0, gradG2, gradG2), 0.0);
    return rows;
}

SpectrumReport nondegeneracy_spectrum(const Solution& sol, int k) {
    const Mesh& mesh = *sol.mesh;
    std::vector<double> w(mesh.num_vertices());
    bool any = false;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        w[i] = sol.p * std::pow(std::abs(sol.field[i]), sol.p - 1.0);
        any = any || w[i] != 0.0;
    }
    if (!any) throw NumericError("linearization weight is identically zero");
    DirichletSolver ds(mesh);
    Eigen::SparseMatrix<double> Wp = weighted_mass(mesh, w).mat;
    Eigen::SparseMatrix<double> Kff = ds.restrict_matrix(ds.stiffness().mat);
    Eigen::SparseMatrix<double> Wff = ds.restrict_matrix(Wp);
    auto pairs = eigs_shift_invert(Kff, Wff, 1.0, k);

    SpectrumReport rep;
    rep.min_gap = std::numeric_limits<double>::max();
    rep.nearest_odd_gap = std::numeric_limits<double>::max();
    for (const auto& pr : pairs) {
        rep.eigenvalues.push_back(pr.value);
        rep.min_gap = std::min(rep.min_gap, std::abs(pr.value - 1.0));
        double odd = -1.0;
        if (!mesh.mirror_map.empty()) {
            Eigen::VectorXd full = ds.extend_zero(pr.vector);
            double num = 0.0, den = 0.0;
            for (int i = 0; i < mesh.num_vertices(); ++i) {
                num += std::pow(full[i] + full[mesh.mirror_map[i]], 2.0);
                den += full[i] * full[i];
            }
            odd = std::sqrt(num / std::max(den, 1e-300)) / 2.0;
            if (odd <= 0.5 && std::abs(pr.value - 1.0) < rep.nearest_odd_gap) {
                rep.nearest_odd_gap = std::abs(pr.value - 1.0);
                rep.mode_mirror_oddness = odd;
            }
        }
        rep.oddness.push_back(odd);
    }
    return rep;
}

NodalLineReport nodal_line_diag(const Solution& sol) {
    const Mesh& mesh = *sol.mesh;
    NodalLineReport rep;
    rep.boundary_distance = std::numeric_limits<double>::infinity();
    double umax = 0.0;
    for (double v : sol.field.values) umax = std::max(umax, std::abs(v));
    const double zero_tol = 1e-13 * umax;
    bool has_pos = false, has_neg = false;
    for (double v : sol.field.values) {
        has_pos = has_pos || v > zero_tol;
        has_neg = has_neg || v < -zero_tol;
    }
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e], b = tri[(e + 1) % 3];
            const double ua = sol.field[a], ub = sol.field[b];
            if ((ua > 0 && ub < 0) || (ua < 0 && ub > 0)) {
                const double s = ua / (ua - ub);
                const Vec2 z = mesh.vertices[a] + (mesh.vertices[b] - mesh.vertices[a]) * s;
                rep.boundary_distance =
                    std::min(rep.boundary_distance, mesh.domain.boundary_distance(z));
            }
        }
    }
    if (has_pos && has_neg) {
        // interior vertices where the field vanishes exactly belong to the
        // zero set as well (symmetric families vanish on a mesh line)
        for (int i = 0; i < mesh.num_vertices(); ++i) {
            if (!mesh.boundary[i] && std::abs(sol.field[i]) <= zero_tol)
                rep.boundary_distance = std::min(
                    rep.boundary_distance, mesh.domain.boundary_distance(mesh.vertices[i]));
        }
    }
    // connected sign regions via vertex adjacency within a strict sign class
    std::vector<int> comp(mesh.num_vertices(), -1);
    auto nbr = vertex_neighbors(mesh);
    int count = 0;
    for (int start = 0; start < mesh.num_vertices(); ++start) {
        if (comp[start] >= 0 || sol.field[start] == 0.0) continue;
        const bool pos = sol.field[start] > 0.0;
        ++count;
        std::vector<int> stack{start};
        comp[start] = count;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int a : nbr[v]) {
                if (comp[a] >= 0) continue;
                if ((sol.field[a] > 0.0) == pos && sol.field[a] != 0.0) {
                    comp[a] = count;
                    stack.push_back(a);
                }
            }
        }
    }
    rep.domain_count = count;
    return rep;
}

SignBallReport sign_ball_check_points(const Solution& sol, Vec2 x_plus, Vec2 x_minus,
                                      double rho0) {
    const Mesh& mesh = *sol.mesh;
    SignBallReport rep;
    const double bar = 1.0 / sol.p;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.boundary[i]) continue;
        if (dist(mesh.vertices[i], x_plus) <= 2.0 * rho0 && sol.field[i] < bar)
            ++rep.violations_positive;
        if (dist(mesh.vertices[i], x_minus) <= 2.0 * rho0 && sol.field[i] > -bar)
            ++rep.violations_negative;
    }
    rep.pass_positive = rep.violations_positive == 0;
    rep.pass_negative = rep.violations_negative == 0;
    return rep;
}

SignBallReport sign_ball_check(const Solution& sol, const PeakData& peaks, double rho0) {
    if (peaks.vertex_minus >= 0 && 2.0 * rho0 > 0.5 * dist(peaks.x_plus, peaks.x_minus))
        throw UsageError("sign-ball radius exceeds half the peak separation");
    Vec2 xm = peaks.vertex_minus >= 0 ? peaks.x_minus : peaks.x_plus;
    SignBallReport rep = sign_ball_check_points(sol, peaks.x_plus, xm, rho0);
    if (peaks.vertex_minus < 0) {
        rep.pass_negative = true;
        rep.violations_negative = 0;
    }
    return rep;
}

double far_field_error(const Solution& sol, const PeakData& peaks, const GreenEvaluator& green,
                       double bdist, double pdist) {
    const Mesh& mesh = *sol.mesh;
    const double coef = 8.0 * kPi * kSqrtE;
    double sup = 0.0;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        const Vec2 v = mesh.vertices[i];
        if (mesh.domain.boundary_distance(v) < bdist) continue;
        if (dist(v, peaks.x_plus) < pdist || dist(v, peaks.x_minus) < pdist) continue;
        const double target =
            coef * (green.green(v, peaks.x_plus) - green.green(v, peaks.x_minus));
        sup = std::max(sup, std::abs(sol.p * sol.field[i] - target));
    }
    return sup;
}

double eps_slope(const ContinuationPath& path, int count) {
    std::vector<double> ps, le;
    const int n = static_cast<int>(path.entries.size());
    for (int i = std::max(0, n - count); i < n; ++i) {
        const auto& sol = path.entries[i];
        PeakData pk = extract_peaks(sol);
        ps.push_back(sol.p);
        le.push_back(std::log(pk.eps_plus));
    }
    if (ps.size() < 2) throw UsageError("eps_slope needs at least 2 path entries");
    return fit_slope(ps, le);
}

}  // namespace lelab
