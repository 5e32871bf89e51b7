// Command-line front end: mesh/solve pipelines, Green-function reports,
// limit-profile tables, and the verification suites.
//
// Exit codes: 0 success, 2 usage/precondition, 3 numeric failure,
// 4 missing or corrupt artifact.

#include <Eigen/Core>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "lelab/config.hpp"
#include "lelab/errors.hpp"
#include "lelab/green.hpp"
#include "lelab/io.hpp"
#include "lelab/profiles.hpp"
#include "lelab/radial.hpp"
#include "lelab/solver.hpp"
#include "lelab/verify.hpp"

namespace fs = std::filesystem;
using namespace lelab;

namespace {

struct StageClock {
    RunManifest& manifest;
    std::string stage;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    ~StageClock() {
        manifest.stage_seconds[stage] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::vector<SeedPeak> default_peaks(const DomainSpec& dom, const GreenEvaluator* green) {
    if (dom.is_disk()) {
        const double r = std::sqrt(std::sqrt(5.0) - 2.0);
        return {{{r, 0.0}, +1}, {{-r, 0.0}, -1}};
    }
    if (green) {
        // seed at the Kirchhoff-Routh minimizer
        const double d = dom.diameter();
        Vec2 c{0, 0};
        if (dom.is_rectangle()) {
            const auto& r = std::get<RectangleDomain>(dom.shape);
            c = {r.width / 2, r.height / 2};
        }
        Vec2 off{0.18 * d, 0.15 * d};
        auto cp = green->find_critical_point(c + off, c - off);
        return {{cp.a1, +1}, {cp.a2, -1}};
    }
    throw UsageError("no default seeding for this domain");
}

int cmd_solve(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunManifest manifest;
    manifest.tool_version = tool_version();
    manifest.config = cfg.echo();

    if (cfg.mode == "radial-nodal") {
        StageClock clock{manifest, "radial"};
        RadialSolution sol = solve_radial_nodal(cfg.p.end);
        RadialProfile prof;
        prof.name = "radial_nodal";
        prof.radii = sol.radii;
        prof.values = sol.values;
        prof.derivatives.assign(sol.radii.size(), 0.0);
        std::ostringstream params;
        params << "p=" << sol.p << " u0=" << sol.alpha << " node=" << sol.node_radius
               << " max_neg=" << sol.max_negative << " residual=" << sol.residual_at_one;
        const std::string path = cfg.out_dir + "/radial_nodal.csv";
        save_radial_profile_csv(prof, path, params.str());
        manifest.add_artifact(path);
        manifest.save(cfg.out_dir + "/manifest.json");
        std::cout << "radial-nodal p=" << sol.p << " u(0)=" << sol.alpha
                  << " max|u^-|=" << sol.max_negative << " node=" << sol.node_radius << "\n";
        return 0;
    }

    DomainSpec dom = parse_domain(cfg.domain);
    std::shared_ptr<const Mesh> mesh;
    {
        StageClock clock{manifest, "mesh"};
        mesh = std::make_shared<const Mesh>(build_mesh(dom, cfg.h));
        save_mesh(*mesh, cfg.out_dir + "/mesh.json");
        manifest.add_artifact(cfg.out_dir + "/mesh.json");
    }
    const uint64_t mesh_hash = fnv1a_file(cfg.out_dir + "/mesh.json");

    std::vector<SeedPeak> peaks;
    if (cfg.mode == "positive") {
        Vec2 c{0, 0};
        if (dom.is_rectangle()) {
            const auto& r = std::get<RectangleDomain>(dom.shape);
            c = {r.width / 2, r.height / 2};
        }
        peaks = {{c, +1}};
    } else {
        std::unique_ptr<GreenEvaluator> green;
        if (!dom.is_disk())
            green = std::make_unique<GreenEvaluator>(GreenEvaluator::numeric(mesh));
        peaks = default_peaks(dom, green.get());
    }

    ContinuationPath path;
    {
        StageClock clock{manifest, "continuation"};
        StepPolicy policy;
        policy.factor = cfg.p.factor;
        path = continuation(mesh, cfg.p.start, cfg.p.end, policy, peaks);
    }
    {
        StageClock clock{manifest, "dump"};
        CsvWriter csv(cfg.out_dir + "/path.csv",
                      {"p", "u_max_plus", "u_max_minus", "J_p", "mass", "x_plus_x", "x_plus_y",
                       "x_minus_x", "x_minus_y"});
        for (size_t i = 0; i < path.entries.size(); ++i) {
            const Solution& s = path.entries[i];
            PeakData pk = extract_peaks(s);
            const double vminus = pk.vertex_minus >= 0 ? -pk.value_minus : 0.0;
            const Vec2 xm = pk.vertex_minus >= 0 ? pk.x_minus : Vec2{0, 0};
            csv.row({s.p, pk.value_plus, vminus, s.energy, s.mass, pk.x_plus.x, pk.x_plus.y,
                     xm.x, xm.y});
            char name[64];
            std::snprintf(name, sizeof(name), "solution_%03zu.json", i);
            save_solution(s, mesh_hash, cfg.out_dir + "/" + name);
            manifest.add_artifact(cfg.out_dir + "/" + name);
        }
        csv.close();
        manifest.add_artifact(cfg.out_dir + "/path.csv");
    }
    manifest.save(cfg.out_dir + "/manifest.json");
    std::cout << "path entries: " << path.entries.size() << ", final p = "
              << path.final_entry().p << (path.complete ? "" : " (terminated early)") << "\n";
    if (!path.complete) {
        std::cerr << "continuation: " << path.termination << "\n";
        return 3;
    }
    return 0;
}

nlohmann::json report_json(const KirchhoffRouthReport& rep) {
    nlohmann::json j;
    j["pair"] = {{rep.a1.x, rep.a1.y}, {rep.a2.x, rep.a2.y}};
    j["psi"] = rep.psi;
    j["psi1"] = rep.psi1;
    j["psi2"] = rep.psi2;
    j["grad"] = {rep.grad[0], rep.grad[1], rep.grad[2], rep.grad[3]};
    auto flat = [](const Eigen::Matrix4d& m) {
        std::vector<double> v;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) v.push_back(m(r, c));
        return v;
    };
    j["hessian"] = flat(rep.hessian);
    j["w_matrix"] = flat(rep.w_matrix);
    j["det_w"] = rep.det_w;
    j["det_hessian"] = rep.det_hessian;
    return j;
}

int cmd_green(const RunConfig& cfg, const std::vector<std::string>& pair_text,
              bool find_critical) {
    DomainSpec dom = parse_domain(cfg.domain);
    std::shared_ptr<const Mesh> mesh;
    std::unique_ptr<GreenEvaluator> ev;
    if (dom.is_disk()) {
        ev = std::make_unique<GreenEvaluator>(GreenEvaluator::analytic_disk());
    } else {
        mesh = std::make_shared<const Mesh>(build_mesh(dom, cfg.h));
        ev = std::make_unique<GreenEvaluator>(GreenEvaluator::numeric(mesh));
    }
    nlohmann::json out;
    if (find_critical) {
        Vec2 c{0, 0};
        const double d = dom.diameter();
        if (dom.is_rectangle()) {
            const auto& r = std::get<RectangleDomain>(dom.shape);
            c = {r.width / 2, r.height / 2};
        }
        auto cp = ev->find_critical_point(c + Vec2{0.15 * d, 0.05 * d},
                                          c - Vec2{0.1 * d, 0.15 * d});
        out["critical_point"] = {{"a1", {cp.a1.x, cp.a1.y}},
                                 {"a2", {cp.a2.x, cp.a2.y}},
                                 {"psi", cp.psi_value},
                                 {"grad_norm", cp.grad_norm},
                                 {"iterations", cp.iterations}};
        out["report"] = report_json(ev->report(cp.a1, cp.a2));
    } else {
        if (pair_text.size() != 2) throw UsageError("green wants --pair x1,y1 x2,y2");
        Vec2 a1 = parse_point(pair_text[0]);
        Vec2 a2 = parse_point(pair_text[1]);
        if (dist(a1, a2) < 1e-12) throw UsageError("singular pair: the two points coincide");
        out["green"] = ev->green(a1, a2);
        out["regular_part"] = ev->regular_part(a1, a2);
        out["robin"] = {ev->robin(a1), ev->robin(a2)};
        out["report"] = report_json(ev->report(a1, a2));
    }
    std::cout << out.dump(1) << "\n";
    return 0;
}

int cmd_profiles(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunManifest manifest;
    manifest.tool_version = tool_version();
    manifest.config = cfg.echo();

    QuadratureConfig qcfg;
    MomentTable table;
    {
        StageClock clock{manifest, "moments"};
        table = moments(qcfg);
    }
    RadialProfile w0;
    {
        StageClock clock{manifest, "w0"};
        w0 = solve_w0(qcfg.w0);
    }
    // closed-form profiles on a fixed grid plus the sqrt(8) landmark
    auto sample = [&](const std::string& name, auto&& f, auto&& df) {
        RadialProfile prof;
        prof.name = name;
        const double landmark = std::sqrt(8.0);
        bool inserted = false;
        for (double r = 0.0; r <= 50.0 + 1e-12; r += 0.05) {
            if (!inserted && r > landmark) {
                prof.radii.push_back(landmark);
                prof.values.push_back(f(landmark));
                prof.derivatives.push_back(df(landmark));
                inserted = true;
            }
            prof.radii.push_back(r);
            prof.values.push_back(f(r));
            prof.derivatives.push_back(df(r));
        }
        const std::string path = cfg.out_dir + "/" + name + ".csv";
        save_radial_profile_csv(prof, path, "");
        manifest.add_artifact(path);
    };
    sample("limit_profile", [](double r) { return limit_profile(r); },
           [](double r) { return -4.0 * r / (8.0 + r * r); });
    sample("psi_tilde_1", [](double r) { return fundamental_psi1(r); },
           [](double r) { return fundamental_psi1_deriv(r); });
    sample("psi_tilde_2", [](double r) { return r > 0 ? fundamental_psi2(r) : 0.0; },
           [](double r) { return r > 0 ? fundamental_psi2_deriv(r) : 0.0; });
    {
        const std::string path = cfg.out_dir + "/w0.csv";
        std::ostringstream params;
        params << "r_max=" << qcfg.w0.r_max << " dr=" << qcfg.w0.dr;
        save_radial_profile_csv(w0, path, params.str());
        manifest.add_artifact(path);
    }
    nlohmann::json j;
    j["mass"] = table.mass;
    j["u_mass"] = table.u_mass;
    j["log_moment"] = table.log_moment;
    j["w0_flux"] = table.w0_flux;
    j["tail_cutoff"] = table.tail_cutoff;
    write_text_atomic(cfg.out_dir + "/moments.json", j.dump(1) + "\n");
    manifest.add_artifact(cfg.out_dir + "/moments.json");
    manifest.save(cfg.out_dir + "/manifest.json");

    std::cout << "mass        = " << CsvWriter::format(table.mass)
              << "  (8 pi = " << CsvWriter::format(8 * kPi) << ")\n";
    std::cout << "u_mass      = " << CsvWriter::format(table.u_mass)
              << "  (-16 pi = " << CsvWriter::format(-16 * kPi) << ")\n";
    std::cout << "log_moment  = " << CsvWriter::format(table.log_moment)
              << "  (12 pi log 2 = " << CsvWriter::format(12 * kPi * std::log(2.0)) << ")\n";
    std::cout << "w0_flux     = " << CsvWriter::format(table.w0_flux)
              << "  (24 pi = " << CsvWriter::format(24 * kPi) << ")\n";

    const bool ok = std::abs(table.mass - 8 * kPi) <= 1e-8 &&
                    std::abs(table.u_mass + 16 * kPi) <= 1e-8 &&
                    std::abs(table.log_moment - 12 * kPi * std::log(2.0)) <= 1e-8 &&
                    std::abs(table.w0_flux - 24 * kPi) / (24 * kPi) <= 1e-3;
    if (!ok) {
        std::cerr << "moment tolerance violated\n";
        return 3;
    }
    return 0;
}

struct SuiteOutcome {
    std::string name;
    bool pass = false;
    std::string note;
};

int cmd_verify(const RunConfig& cfg) {
    const std::string dir = cfg.solutions_dir.empty() ? cfg.out_dir : cfg.solutions_dir;
    DomainSpec dom = parse_domain(cfg.domain);
    const bool wants_solutions = cfg.suite != "greenforms";

    std::shared_ptr<const Mesh> mesh;
    ContinuationPath path;
    if (wants_solutions) {
        RunManifest manifest = RunManifest::load(dir + "/manifest.json");
        manifest.verify_artifacts("");
        Mesh loaded = load_mesh(dir + "/mesh.json");
        loaded.domain = dom;  // domain metadata travels in the config
        mesh = std::make_shared<const Mesh>(std::move(loaded));
        for (int i = 0;; ++i) {
            char name[128];
            std::snprintf(name, sizeof(name), "%s/solution_%03d.json", dir.c_str(), i);
            if (!fs::exists(name)) break;
            path.entries.push_back(load_solution(mesh, name));
        }
        if (path.entries.empty()) throw ArtifactError("no solution dumps under " + dir);
        std::sort(path.entries.begin(), path.entries.end(),
                  [](const Solution& a, const Solution& b) { return a.p < b.p; });
    }
    std::unique_ptr<GreenEvaluator> green;
    if (dom.is_disk())
        green = std::make_unique<GreenEvaluator>(GreenEvaluator::analytic_disk());
    else if (mesh)
        green = std::make_unique<GreenEvaluator>(GreenEvaluator::numeric(mesh));

    fs::create_directories(cfg.out_dir);
    std::vector<SuiteOutcome> outcomes;
    auto selected = [&](const std::string& s) { return cfg.suite == "all" || cfg.suite == s; };

    if (selected("expansion")) {
        ExpansionReport rep = check_peak_expansion(path, *green);
        CsvWriter csv(cfg.out_dir + "/check_expansion.csv",
                      {"p", "measured", "predicted", "residual", "pass"});
        SuiteOutcome oc{"expansion", true, ""};
        for (const auto& r : rep.rows) {
            const bool row_pass = r.residual <= 0.10 * std::abs(r.predicted);
            csv.row({r.p, r.measured, r.predicted, r.residual, row_pass ? 1.0 : 0.0});
        }
        csv.close();
        ExpansionReport neg = check_peak_expansion_negative(path, *green);
        CsvWriter ncsv(cfg.out_dir + "/check_expansion_negative.csv",
                       {"p", "measured", "predicted", "residual", "pass"});
        for (const auto& r : neg.rows) {
            const bool row_pass = r.residual <= 0.10 * std::abs(r.predicted);
            ncsv.row({r.p, r.measured, r.predicted, r.residual, row_pass ? 1.0 : 0.0});
        }
        ncsv.close();
        const auto& last = rep.rows.back();
        if (last.p >= 60.0) {
            oc.pass = last.residual <= 0.10 * std::abs(last.predicted);
            oc.note = "final entry within 10%";
        } else {
            oc.pass = false;
            std::ostringstream os;
            os << "no entries with p >= 60; the path ends at p = " << last.p
               << " where the exp(-p/4) peak scale falls below the mesh h";
            oc.note = os.str();
        }
        outcomes.push_back(oc);
    }
    if (selected("energy")) {
        EnergyExpansionReport rep = check_energy_expansion(path, *green);
        CsvWriter csv(cfg.out_dir + "/check_energy.csv",
                      {"p", "pJp", "residual_leading", "p2_comparison_residual"});
        for (size_t i = 0; i < rep.leading.rows.size(); ++i) {
            csv.row({rep.leading.rows[i].p, rep.leading.rows[i].measured,
                     rep.leading.rows[i].residual, rep.second_order.rows[i].residual});
        }
        csv.close();
        const auto& lead = rep.leading.rows.back();
        bool pass = lead.residual <= 0.10 * lead.predicted;
        const auto& so = rep.second_order.rows;
        int bad = 0;
        for (size_t i = so.size() >= 4 ? so.size() - 4 : 0; i + 1 < so.size(); ++i)
            if (so[i + 1].residual > so[i].residual) ++bad;
        pass = pass && bad <= 1;
        outcomes.push_back({"energy", pass, "leading 10% and decreasing p^2 residual"});
    }
    if (selected("conditionB")) {
        auto rows = check_condition_B(path, *green);
        CsvWriter csv(cfg.out_dir + "/check_condition_b.csv",
                      {"p", "series", "bound", "within"});
        bool pass = true;
        for (const auto& r : rows) {
            csv.row({r.p, r.series, r.bound, r.within ? 1.0 : 0.0});
            pass = pass && r.within;
        }
        csv.close();
        outcomes.push_back({"conditionB", pass, "series bounded"});
    }
    if (selected("pohozaev")) {
        const Solution& sol = path.final_entry();
        PeakData pk = extract_peaks(sol);
        auto rows = pohozaev_check(sol, pk, cfg.rho);
        CsvWriter csv(cfg.out_dir + "/check_pohozaev.csv", {"name", "lhs", "rhs", "residual"});
        bool pass = true;
        for (const auto& r : rows) {
            csv.row_mixed({r.name, CsvWriter::format(r.lhs), CsvWriter::format(r.rhs),
                           CsvWriter::format(r.rel_residual)});
            if (r.name[0] == 'P') pass = pass && r.rel_residual <= 0.02;
        }
        csv.close();
        outcomes.push_back({"pohozaev", pass, "P-forms within 2% at the final entry"});
    }
    if (selected("greenforms")) {
        if (!green) {
            mesh = std::make_shared<const Mesh>(build_mesh(dom, cfg.h));
            green = std::make_unique<GreenEvaluator>(GreenEvaluator::numeric(mesh));
        }
        const double r = dom.is_disk() ? std::sqrt(std::sqrt(5.0) - 2.0) : 0.2 * dom.diameter();
        Vec2 c{0, 0};
        if (dom.is_rectangle()) {
            const auto& rect = std::get<RectangleDomain>(dom.shape);
            c = {rect.width / 2, rect.height / 2};
        }
        auto rows = green_quadratic_forms(*green, c + Vec2{r, 0}, c - Vec2{r, 0}, cfg.rho);
        CsvWriter csv(cfg.out_dir + "/check_greenforms.csv",
                      {"name", "measured", "predicted", "abs_error"});
        bool pass = true;
        for (const auto& row : rows) {
            csv.row_mixed({row.name, CsvWriter::format(row.measured),
                           CsvWriter::format(row.predicted), CsvWriter::format(row.abs_error)});
            pass = pass && row.abs_error <= 1e-4;
        }
        csv.close();
        outcomes.push_back({"greenforms", pass, "all table cases within 1e-4"});
    }
    if (selected("spectrum")) {
        CsvWriter csv(cfg.out_dir + "/check_spectrum.csv", {"p", "min_gap", "nearest_mu"});
        std::vector<double> gaps;
        for (const auto& sol : path.entries) {
            SpectrumReport rep = nondegeneracy_spectrum(sol);
            gaps.push_back(rep.min_gap);
            csv.row({sol.p, rep.min_gap,
                     rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues.front()});
        }
        csv.close();
        bool pass = !gaps.empty();
        if (dom.is_disk()) {
            // degenerate W: the rotational mode keeps an eigenvalue pinned
            // at 1 (gap at the discretization floor throughout)
            for (double g : gaps) pass = pass && g <= 0.02;
        } else {
            const double floor_gap = *std::min_element(gaps.begin(), gaps.end());
            pass = pass && floor_gap >= std::min(0.02, 0.25 * gaps.front());
        }
        outcomes.push_back({"spectrum", pass,
                            dom.is_disk() ? "near-1 rotational mode persists"
                                          : "gap bounded below"});
    }
    if (selected("nodal")) {
        const Solution& sol = path.final_entry();
        NodalLineReport rep = nodal_line_diag(sol);
        PeakData pk = extract_peaks(sol);
        SignBallReport sb = sign_ball_check(sol, pk, cfg.rho0);
        LocalMass lm = local_mass(sol, pk, cfg.rho);
        CsvWriter csv(cfg.out_dir + "/check_nodal.csv",
                      {"p", "line_boundary_distance", "domains", "sign_ball", "pC_plus",
                       "pC_minus"});
        csv.row({sol.p, rep.boundary_distance, static_cast<double>(rep.domain_count),
                 (sb.pass_positive && sb.pass_negative) ? 1.0 : 0.0, sol.p * lm.c_plus,
                 sol.p * lm.c_minus});
        csv.close();
        const bool pass = rep.domain_count == 2 && rep.boundary_distance <= 2 * mesh->h &&
                          sb.pass_positive && sb.pass_negative;
        outcomes.push_back({"nodal", pass, "2 domains, line at the boundary, sign balls"});
    }

    std::string summary = "suite,pass,note\n";
    bool all = true;
    for (const auto& oc : outcomes) {
        summary += oc.name + "," + (oc.pass ? "1" : "0") + "," + oc.note + "\n";
        all = all && oc.pass;
        std::cout << (oc.pass ? "PASS " : "FAIL ") << oc.name
                  << (oc.note.empty() ? "" : "  (" + oc.note + ")") << "\n";
    }
    write_text_atomic(cfg.out_dir + "/verify_summary.csv", summary);
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lane-Emden nodal-solution laboratory"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("LEL_THREADS")) cfg.threads = std::atoi(env);

    std::string config_file, domain_flag, p_flag, mode_flag, suite_flag, out_flag, sols_flag;
    double h_flag = -1, rho_flag = -1, rho0_flag = -1;
    std::vector<std::string> pair_text;
    bool find_critical = false;

    auto add_common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print help");
        sub->add_option("--config", config_file, "key=value config file");
        sub->add_option("--domain", domain_flag, "disk | square | rect:WxH | polygon:FILE");
        sub->add_option("--h", h_flag, "target mesh edge length");
        sub->add_option("--p", p_flag, "p or start:end:factor");
        sub->add_option("--out", out_flag, "output directory");
        sub->add_option("--rho", rho_flag, "ball radius for local checks");
        sub->add_option("--rho0", rho0_flag, "sign-ball radius");
    };

    CLI::App* solve = app.add_subcommand("solve", "mesh + continuation run");
    add_common(solve);
    solve->add_option("--mode", mode_flag, "nodal | positive | radial-nodal");

    CLI::App* green = app.add_subcommand("green", "Green/Kirchhoff-Routh report");
    add_common(green);
    green->add_option("--pair", pair_text, "two points x1,y1 x2,y2")->expected(2);
    green->add_flag("--find-critical", find_critical, "run the critical-point search");

    CLI::App* profiles = app.add_subcommand("profiles", "limit profiles and moments");
    add_common(profiles);

    CLI::App* verify = app.add_subcommand("verify", "verification suites on stored runs");
    add_common(verify);
    verify->add_option("--suite", suite_flag,
                       "expansion | energy | conditionB | pohozaev | greenforms | spectrum | "
                       "nodal | all");
    verify->add_option("--solutions", sols_flag, "directory with solve artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (!config_file.empty()) load_config_file(config_file, cfg);
        if (!domain_flag.empty()) cfg.domain = domain_flag;
        if (h_flag > 0) cfg.h = h_flag;
        if (!p_flag.empty()) cfg.p = parse_prange(p_flag);
        if (!mode_flag.empty()) cfg.mode = mode_flag;
        if (!suite_flag.empty()) cfg.suite = suite_flag;
        if (!out_flag.empty()) cfg.out_dir = out_flag;
        if (!sols_flag.empty()) cfg.solutions_dir = sols_flag;
        if (rho_flag > 0) cfg.rho = rho_flag;
        if (rho0_flag > 0) cfg.rho0 = rho0_flag;
        validate(cfg);
        Eigen::setNbThreads(std::max(1, cfg.threads));

        if (solve->parsed()) return cmd_solve(cfg);
        if (green->parsed()) return cmd_green(cfg, pair_text, find_critical);
        if (profiles->parsed()) return cmd_profiles(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ArtifactError& e) {
        std::cerr << "artifact error: " << e.what() << "\n";
        return 4;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
