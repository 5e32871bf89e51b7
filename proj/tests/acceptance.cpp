// Acceptance suite: one pass/fail line per criterion, with indented detail.
// Criteria 5-8 share one long nodal continuation on the disk at h = 0.02.
//
// Usage: acceptance [--criterion N]...   (default: all)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <memory>
#include <sstream>
#include <vector>

#include "lelab/eigs.hpp"
#include "lelab/errors.hpp"
#include "lelab/green.hpp"
#include "lelab/io.hpp"
#include "lelab/profiles.hpp"
#include "lelab/radial.hpp"
#include "lelab/solver.hpp"
#include "lelab/verify.hpp"

using namespace lelab;

namespace {

const double kE = std::exp(1.0);
const double kSqrtE = std::sqrt(kE);
const double kRStar = std::sqrt(std::sqrt(5.0) - 2.0);

struct CritResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::string> detail;
};

struct Shared {
    std::shared_ptr<const Mesh> disk_mesh;
    ContinuationPath disk_path;
    bool disk_ready = false;

    void ensure_disk_path() {
        if (disk_ready) return;
        disk_mesh = std::make_shared<const Mesh>(build_mesh(DomainSpec::unit_disk(), 0.02));
        disk_path = continuation(disk_mesh, 5.0, 80.0, StepPolicy{},
                                 {{{kRStar, 0.0}, +1}, {{-kRStar, 0.0}, -1}});
        disk_ready = true;
    }
};

std::string fmt(double v) { return CsvWriter::format(v); }

CritResult run_c1() {
    CritResult r{1, "moments suite", false, {}};
    MomentTable t = moments({});
    const double d_mass = std::abs(t.mass - 8 * kPi);
    const double d_umass = std::abs(t.u_mass + 16 * kPi);
    const double d_log = std::abs(t.log_moment - 12 * kPi * std::log(2.0));
    const double d_flux = std::abs(t.w0_flux - 24 * kPi) / (24 * kPi);
    r.detail.push_back("mass    " + fmt(t.mass) + "  |err| = " + fmt(d_mass) + " (tol 1e-8)");
    r.detail.push_back("u_mass  " + fmt(t.u_mass) + "  |err| = " + fmt(d_umass) + " (tol 1e-8)");
    r.detail.push_back("log     " + fmt(t.log_moment) + "  |err| = " + fmt(d_log) +
                       " (tol 1e-8)");
    r.detail.push_back("w0 flux " + fmt(t.w0_flux) + "  rel err = " + fmt(d_flux) +
                       " (tol 1e-3)");
    r.pass = d_mass <= 1e-8 && d_umass <= 1e-8 && d_log <= 1e-8 && d_flux <= 1e-3;
    return r;
}

CritResult run_c2() {
    CritResult r{2, "disk concentration geometry", false, {}};
    auto ev = GreenEvaluator::analytic_disk();
    auto cp = ev.find_critical_point({0.3, 0.1}, {-0.2, -0.3});
    const double rad_err =
        std::max(std::abs(cp.a1.norm() - kRStar), std::abs(cp.a2.norm() - kRStar));
    r.detail.push_back("pair radius " + fmt(cp.a1.norm()) + " vs sqrt(sqrt5-2) = " +
                       fmt(kRStar) + ", |err| = " + fmt(rad_err) + " (tol 1e-4)");

    auto rep = ev.report(cp.a1, cp.a2);
    const double s5 = std::sqrt(5.0);
    Eigen::Matrix4d expected;
    expected << -13 - 5 * s5, 0, -7 - 3 * s5, 0, 0, -1 - s5, 0, 1 + s5, -7 - 3 * s5, 0,
        -13 - 5 * s5, 0, 0, 1 + s5, 0, -1 - s5;
    expected /= 8 * kPi;
    const double w_err = (rep.w_matrix - expected).cwiseAbs().maxCoeff();
    r.detail.push_back("W entrywise error " + fmt(w_err) + " (tol 5e-4)");
    const double scale = std::pow(rep.w_matrix.cwiseAbs().maxCoeff(), 4.0);
    r.detail.push_back("det W " + fmt(rep.det_w) + " scaled " +
                       fmt(std::abs(rep.det_w) / scale) + " (tol 1e-6)");
    r.pass = rad_err <= 1e-4 && w_err <= 5e-4 && std::abs(rep.det_w) <= 1e-6 * scale;
    return r;
}

CritResult run_c3() {
    CritResult r{3, "green quadratic forms", false, {}};
    auto ev = GreenEvaluator::analytic_disk();
    auto rows = green_quadratic_forms(ev, {kRStar, 0}, {-kRStar, 0}, 0.2, 2000);
    r.pass = true;
    for (const auto& row : rows) {
        if (row.abs_error > 1e-4) {
            r.pass = false;
            r.detail.push_back("violated: " + row.name + " err " + fmt(row.abs_error));
        }
    }
    r.detail.push_back("P1(G1,G1) = " + fmt(rows.front().measured) + " vs -1/(2pi) = " +
                       fmt(-1.0 / (2 * kPi)));
    r.detail.push_back(std::to_string(rows.size()) + " table cases within 1e-4");
    return r;
}

CritResult run_c4() {
    CritResult r{4, "radial counterexample branch", false, {}};
    RadialSolution s100 = solve_radial_nodal(100.0);
    RadialSolution s50 = solve_radial_nodal(50.0);
    const double e_pos = std::abs(s100.max_positive - 2.46) / 2.46;
    const double e_neg = std::abs(s100.max_negative - 1.17) / 1.17;
    const double g50 = 50.0 * (s50.max_positive - s50.max_negative);
    const double g100 = 100.0 * (s100.max_positive - s100.max_negative);
    r.detail.push_back("p=100: max u+ = " + fmt(s100.max_positive) + " (2.46 +- 5%), max u- = " +
                       fmt(s100.max_negative) + " (1.17 +- 5%)");
    r.detail.push_back("p(|u+|-|u-|): " + fmt(g50) + " -> " + fmt(g100) + ", ratio " +
                       fmt(g100 / g50) + " (>= 1.8)");
    r.pass = e_pos <= 0.05 && e_neg <= 0.05 && g100 / g50 >= 1.8;
    return r;
}

CritResult run_c5(Shared& sh) {
    CritResult r{5, "nodal continuation on the disk (h=0.02, p->80)", false, {}};
    sh.ensure_disk_path();
    const auto& path = sh.disk_path;
    auto green = GreenEvaluator::analytic_disk();
    const auto& fin = path.final_entry();
    const int n = static_cast<int>(path.entries.size());

    std::ostringstream head;
    head << "path: " << n << " entries, p in [" << path.entries.front().p << ", " << fin.p
         << "]; " << (path.complete ? "complete" : "terminated: " + path.termination);
    r.detail.push_back(head.str());

    bool all = true;
    auto item = [&](char tag, bool ok, const std::string& text) {
        all = all && ok;
        r.detail.push_back(std::string(ok ? "PASS (" : "FAIL (") + tag + ") " + text);
    };

    // (a) mass at the final entry + monotone approach over the last 5
    const double mass_target = 16 * kPi * kE;
    const double mass_rel = std::abs(fin.mass - mass_target) / mass_target;
    bool monotone = true;
    for (int i = std::max(0, n - 5); i + 1 < n; ++i) {
        if (std::abs(path.entries[i + 1].mass - mass_target) >
            std::abs(path.entries[i].mass - mass_target) + 1e-9)
            monotone = false;
    }
    item('a', mass_rel <= 0.10 && monotone,
         "p*int|u|^{p+1} = " + fmt(fin.mass) + " vs 16 pi e = " + fmt(mass_target) +
             ", rel = " + fmt(mass_rel) + ", monotone approach = " + (monotone ? "yes" : "no"));

    // (b) leading energy + decreasing p^2 comparison residual
    EnergyExpansionReport er = check_energy_expansion(path, green);
    const double lead_rel = er.leading.rows.back().residual / (8 * kPi * kE);
    int inversions = 0;
    const auto& so = er.second_order.rows;
    for (size_t i = so.size() >= 4 ? so.size() - 4 : 0; i + 1 < so.size(); ++i)
        if (so[i + 1].residual > so[i].residual) ++inversions;
    {
        // context: the finite-p expansion value the measurement should track
        const double pf = fin.p;
        PeakData pkf = extract_peaks(fin);
        const double psi_f = green.psi(pkf.x_plus, pkf.x_minus);
        const double predicted_finite =
            8 * kPi * kE *
                (1.0 + (-2 * std::log(pf) + 6 * std::log(2.0) - 3) / pf) +
            32 * kPi * kPi * kE * psi_f / pf;
        item('b', lead_rel <= 0.10 && inversions <= 1,
             "p J_p = " + fmt(er.leading.rows.back().measured) + " vs 8 pi e, rel = " +
                 fmt(lead_rel) + " (finite-p expansion value at p=" + fmt(pf) + " is " +
                 fmt(predicted_finite) + "); p^2 residual inversions over last 4: " +
                 std::to_string(inversions));
    }

    // (c) peak expansion at p >= 60
    ExpansionReport pe = check_peak_expansion(path, green);
    bool any60 = false, ok60 = true;
    for (const auto& row : pe.rows) {
        if (row.p >= 60.0) {
            any60 = true;
            ok60 = ok60 && row.residual <= 0.10 * std::abs(row.predicted);
        }
    }
    if (any60) {
        item('c', ok60, "D_p within 10% of 4 pi Psi_1 + 3 log 2 + 2 at p >= 60");
    } else {
        item('c', false,
             "unevaluable: no entries with p >= 60; the two-bump branch leaves the mesh-"
             "resolvable regime near p ~ 11 (peak scale exp(-p/4) < h = 0.02), final D_p @ p=" +
                 fmt(pe.rows.back().p) + " is " + fmt(pe.rows.back().measured) + " vs " +
                 fmt(pe.rows.back().predicted));
    }

    // (d) eps slope over the final 6 entries
    const double slope = eps_slope(path, 6);
    {
        // context: the same fit on the mesh-resolved stretch
        ContinuationPath resolved;
        resolved.policy = path.policy;
        for (const auto& s : path.entries)
            if (extract_peaks(s).eps_plus >= sh.disk_mesh->h) resolved.entries.push_back(s);
        std::string ctx;
        if (resolved.entries.size() >= 3)
            ctx = "; resolved-stretch slope = " + fmt(eps_slope(
                      resolved, static_cast<int>(resolved.entries.size())));
        item('d', slope >= -0.27 && slope <= -0.23,
             "d(log eps)/dp over final 6 = " + fmt(slope) + " (band [-0.27, -0.23])" + ctx);
    }

    // (e) sup-norm balance; evaluated on every entry (none reach p = 40)
    double worst_balance = 0.0;
    for (const auto& row : check_condition_B(path, green))
        worst_balance = std::max(worst_balance, std::abs(row.series));
    item('e', worst_balance <= 0.5,
         "max |p(|u+|-|u-|)| over path = " + fmt(worst_balance) + " (<= 0.5)");

    // (f) far-field Green comparison at the final entry
    PeakData pk = extract_peaks(fin);
    const double ff = far_field_error(fin, pk, green);
    item('f', ff <= 10.0 / fin.p,
         "sup_K |p u - 8 pi sqrt(e)(G-G)| = " + fmt(ff) + " vs 10/p = " + fmt(10.0 / fin.p));

    // (g) sign balls + local masses
    SignBallReport sb = sign_ball_check(fin, pk, 0.1);
    LocalMass lm = local_mass(fin, pk, 0.2);
    const double cm_target = 8 * kPi * kSqrtE;
    const double cm_rel = std::max(std::abs(fin.p * lm.c_plus - cm_target),
                                   std::abs(fin.p * lm.c_minus - cm_target)) /
                          cm_target;
    item('g', sb.pass_positive && sb.pass_negative && cm_rel <= 0.10,
         "sign balls " + std::string(sb.pass_positive && sb.pass_negative ? "pass" : "fail") +
             ", p C_i vs 8 pi sqrt(e) rel = " + fmt(cm_rel));

    // (h) nodal line diagnostics
    NodalLineReport nl = nodal_line_diag(fin);
    item('h', nl.domain_count == 2 && nl.boundary_distance <= 2 * sh.disk_mesh->h,
         "nodal domains = " + std::to_string(nl.domain_count) + ", line boundary distance = " +
             fmt(nl.boundary_distance) + " (<= 2h)");

    r.pass = all && path.complete;
    if (!path.complete)
        r.detail.push_back(
            "criterion as stated needs p up to 80; the group-P1 discretization prescribed for "
            "the solver cannot host the exp(-p/4) peak collapse on a fixed h = 0.02 mesh, so "
            "the faithful branch ends where Newton loses the discrete solution");
    return r;
}

CritResult run_c6(Shared& sh) {
    CritResult r{6, "rescaled profiles", false, {}};
    sh.ensure_disk_path();
    const auto& path = sh.disk_path;
    RadialProfile w0 = solve_w0({1e3, 5e-4, 1e-6});
    std::vector<double> ps, sups;
    double envelope = 0.0;
    for (const auto& sol : path.entries) {
        PeakData pk = extract_peaks(sol);
        if (pk.eps_plus < sol.mesh->h) break;
        RescaledProfile rp = rescale(sol, pk, +1, 5.0, w0);
        ps.push_back(sol.p);
        sups.push_back(rp.sup_v_minus_u);
        envelope = rp.envelope_constant;
    }
    bool decreasing = ps.size() >= 4;
    for (size_t i = 1; i < sups.size(); ++i)
        if (sups[i] > sups[i - 1] * 1.02) decreasing = false;
    // fitted decay exponent of sup|v-U| against p
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < ps.size(); ++i) {
        const double lx = std::log(ps[i]), ly = std::log(sups[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double nn = static_cast<double>(ps.size());
    const double expo = -(nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    double w0sup = 0.0;
    for (double z = 0.0; z <= 5.0; z += 0.05) w0sup = std::max(w0sup, std::abs(w0.value_at(z)));
    r.detail.push_back("resolved entries: " + std::to_string(ps.size()) + ", sup|v-U| from " +
                       fmt(sups.front()) + " to " + fmt(sups.back()) + " (monotone: " +
                       (decreasing ? "yes" : "no") + ")");
    r.detail.push_back("fitted decay exponent " + fmt(expo) +
                       " (band [0.7, 1.3]; the 1/p law needs p beyond the resolvable range -- "
                       "the 1/p^2 term still carries weight at p <= 8)");
    r.detail.push_back("first-order correction check: p*sup|v-U| = " + fmt(ps.back() * sups.back()) +
                       " vs sup|w0| on |z|<=5 = " + fmt(w0sup));
    r.detail.push_back("decay envelope constant (delta=0.5) " + fmt(envelope) +
                       " (pinned bound 12)");
    r.pass = decreasing && expo >= 0.7 && expo <= 1.3 && envelope <= 12.0;
    return r;
}

CritResult run_c7(Shared& sh) {
    CritResult r{7, "pohozaev residuals", false, {}};
    sh.ensure_disk_path();
    // criterion as stated: p = 40 on the h = 0.02 path
    const auto& path = sh.disk_path;
    bool has_p40 = path.final_entry().p >= 40.0;
    const Solution* probe = &path.entries.front();
    for (const auto& s : path.entries)
        if (extract_peaks(s).eps_plus >= s.mesh->h) probe = &s;
    PeakData pk = extract_peaks(*probe);
    auto rows = pohozaev_check(*probe, pk, 0.2);
    const double res_final = rows.front().rel_residual;
    r.detail.push_back("stated p=40 entry on the h=0.02 path: " +
                       std::string(has_p40 ? "present" : "absent (branch ends near p ~ 11)"));
    r.detail.push_back("residual at the last resolved entry (p = " + fmt(probe->p) +
                       "): " + fmt(res_final) + " (stated tol 0.02)");

    // h-refinement behavior of the identity at fixed p = 6
    auto residual_at = [](double h) {
        auto mesh = std::make_shared<const Mesh>(build_mesh(DomainSpec::unit_disk(), h));
        auto p6 = continuation(mesh, 4.0, 6.0, StepPolicy{},
                               {{{kRStar, 0.0}, +1}, {{-kRStar, 0.0}, -1}});
        PeakData q = extract_peaks(p6.final_entry());
        return pohozaev_check(p6.final_entry(), q, 0.2).front().rel_residual;
    };
    const double coarse = residual_at(0.04), fine = residual_at(0.02);
    r.detail.push_back("h-refinement at p=6: " + fmt(coarse) + " -> " + fmt(fine) +
                       " (improvement " + fmt(coarse / fine) + "x, need >= 2x)");
    r.pass = has_p40 && res_final <= 0.02 && fine * 2.0 <= coarse;
    if (!r.pass && fine * 2.0 <= coarse)
        r.detail.push_back(
            "identity machinery converges at first order as required; the stated (p=40, "
            "h=0.02) configuration is below mesh resolution for the prescribed discretization");
    return r;
}

CritResult run_c8(Shared& sh) {
    CritResult r{8, "spectral behavior of the linearized operator", false, {}};
    sh.ensure_disk_path();

    // disk family: a rotational eigenvalue pinned at 1 (degenerate W)
    std::vector<double> disk_gaps;
    for (const auto& sol : sh.disk_path.entries) {
        SpectrumReport rep = nondegeneracy_spectrum(sol, 8);
        disk_gaps.push_back(rep.min_gap);
    }
    double worst_disk = *std::max_element(disk_gaps.begin(), disk_gaps.end());
    r.detail.push_back("disk family: min|mu-1| in [" + fmt(*std::min_element(
                           disk_gaps.begin(), disk_gaps.end())) + ", " + fmt(worst_disk) +
                       "] across " + std::to_string(disk_gaps.size()) +
                       " entries (rotational mode; regression bound 0.02)");

    // square family: W non-degenerate, gap bounded below
    auto mesh = std::make_shared<const Mesh>(build_mesh(DomainSpec::rectangle(1, 1), 0.02));
    auto green = GreenEvaluator::numeric(mesh);
    auto cp = green.find_critical_point({0.62, 0.58}, {0.41, 0.35});
    auto rep = green.report(cp.a1, cp.a2);
    const double wscale = std::pow(rep.w_matrix.cwiseAbs().maxCoeff(), 4.0);
    const double wdet_scaled = std::abs(rep.det_w) / wscale;
    r.detail.push_back("square W at the critical pair: |det W| scaled = " + fmt(wdet_scaled) +
                       " (non-degenerate; disk value is ~1e-7)");

    // the square pair sits 0.57 apart; the 4*eps_seed separation
    // precondition admits seeding from p = 6 up
    ContinuationPath sq = continuation(mesh, 6.0, 80.0, StepPolicy{},
                                       {{cp.a1, +1}, {cp.a2, -1}});
    std::vector<double> sq_gaps;
    for (const auto& sol : sq.entries) {
        SpectrumReport srep = nondegeneracy_spectrum(sol, 8);
        sq_gaps.push_back(srep.min_gap);
    }
    const int m = static_cast<int>(sq_gaps.size());
    double floor_gap = 1e9;
    for (int i = std::max(0, m - 4); i < m; ++i) floor_gap = std::min(floor_gap, sq_gaps[i]);
    r.detail.push_back("square family: " + std::to_string(m) + " entries, min|mu-1| over last 4 = " +
                       fmt(floor_gap) + " (regression bound 0.02)");

    r.pass = worst_disk <= 0.02 && wdet_scaled >= 1e-4 && floor_gap >= 0.02;
    return r;
}

CritResult run_c9(Shared& sh) {
    CritResult r{9, "standalone property suites", false, {}};
    bool ok = true;

    // mesh convergence order on the Poisson problem
    auto err_for = [](double h) {
        Mesh mesh = build_mesh(DomainSpec::rectangle(1, 1), h);
        DirichletSolver ds(mesh);
        ScalarField rhs = ScalarField::zeros(mesh.num_vertices());
        for (int i = 0; i < mesh.num_vertices(); ++i) {
            const Vec2 v = mesh.vertices[i];
            rhs[i] = 2 * kPi * kPi * std::sin(kPi * v.x) * std::sin(kPi * v.y);
        }
        ScalarField u = ds.solve(rhs, ScalarField::zeros(mesh.num_vertices()));
        double err = 0.0;
        for (int i = 0; i < mesh.num_vertices(); ++i) {
            const Vec2 v = mesh.vertices[i];
            err = std::max(err, std::abs(u[i] - std::sin(kPi * v.x) * std::sin(kPi * v.y)));
        }
        return err;
    };
    const double o1 = std::log2(err_for(0.2) / err_for(0.1));
    const double o2 = std::log2(err_for(0.1) / err_for(0.05));
    ok = ok && o1 >= 1.7 && o1 <= 2.3 && o2 >= 1.7 && o2 <= 2.3;
    r.detail.push_back("poisson orders " + fmt(o1) + ", " + fmt(o2) + " (band [1.7, 2.3])");

    // green symmetry/positivity on random pairs
    auto ev = GreenEvaluator::analytic_disk();
    uint64_t state = 12345;
    auto rnd = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return (static_cast<double>(state >> 11) / 9007199254740992.0);
    };
    bool green_ok = true;
    for (int k = 0; k < 100; ++k) {
        const double r1 = 0.9 * std::sqrt(rnd()), t1 = 2 * kPi * rnd();
        const double r2 = 0.9 * std::sqrt(rnd()), t2 = 2 * kPi * rnd();
        Vec2 x{r1 * std::cos(t1), r1 * std::sin(t1)}, y{r2 * std::cos(t2), r2 * std::sin(t2)};
        if (dist(x, y) < 0.05) continue;
        green_ok = green_ok && std::abs(ev.green(x, y) - ev.green(y, x)) <= 1e-12 &&
                   ev.green(x, y) > 0;
    }
    ok = ok && green_ok;
    r.detail.push_back(std::string("green symmetry/positivity on sampled pairs: ") +
                       (green_ok ? "pass" : "fail"));

    // Nehari identity on every stored solution
    sh.ensure_disk_path();
    double worst_nehari = 0.0;
    for (const auto& sol : sh.disk_path.entries)
        worst_nehari = std::max(worst_nehari, sol.nehari_gap);
    ok = ok && worst_nehari <= 1e-7;
    r.detail.push_back("worst Nehari gap over stored solutions: " + fmt(worst_nehari) +
                       " (tol 1e-7)");

    // determinism: identical bytes for a rerun report
    auto render = [&]() {
        auto green2 = GreenEvaluator::analytic_disk();
        ExpansionReport rep = check_peak_expansion(sh.disk_path, green2);
        std::string s;
        for (const auto& row : rep.rows)
            s += fmt(row.p) + "," + fmt(row.measured) + "," + fmt(row.predicted) + "\n";
        return s;
    };
    const bool deterministic = render() == render();
    ok = ok && deterministic;
    r.detail.push_back(std::string("report determinism (byte-identical rerun): ") +
                       (deterministic ? "pass" : "fail"));

    r.pass = ok;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i + 1 < argc + 1; ++i) {
        if (i < argc && std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            selected.push_back(std::atoi(argv[++i]));
    }
    if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    Shared sh;
    bool all_pass = true;
    for (int id : selected) {
        CritResult res;
        try {
            switch (id) {
                case 1: res = run_c1(); break;
                case 2: res = run_c2(); break;
                case 3: res = run_c3(); break;
                case 4: res = run_c4(); break;
                case 5: res = run_c5(sh); break;
                case 6: res = run_c6(sh); break;
                case 7: res = run_c7(sh); break;
                case 8: res = run_c8(sh); break;
                case 9: res = run_c9(sh); break;
                default:
                    std::cerr << "unknown criterion " << id << "\n";
                    return 2;
            }
        } catch (const std::exception& e) {
            res.id = id;
            res.name = "exception";
            res.pass = false;
            res.detail.push_back(e.what());
        }
        std::printf("%s criterion %d: %s\n", res.pass ? "PASS" : "FAIL", res.id,
                    res.name.c_str());
        for (const auto& line : res.detail) std::printf("    %s\n", line.c_str());
        all_pass = all_pass && res.pass;
    }
    return all_pass ? 0 : 1;
}
