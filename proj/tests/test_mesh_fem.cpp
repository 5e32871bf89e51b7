#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "lelab/errors.hpp"
#include "lelab/fem.hpp"
#include "lelab/mesh.hpp"

using namespace lelab;

TEST_CASE("disk mesh: boundary vertices on the unit circle") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.1);
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.boundary[i]) CHECK(std::abs(mesh.vertices[i].norm() - 1.0) <= 1e-12);
    }
    CHECK(mesh.max_edge_length() <= 1.5 * 0.1);
}

TEST_CASE("disk mesh: vertex count regression at h=0.05") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.05);
    CHECK(mesh.num_vertices() >= 1000);
    CHECK(mesh.num_vertices() <= 3000);
    CHECK(mesh.num_vertices() == 1261);  // concentric-ring construction
}

TEST_CASE("disk mesh: triangulation carries exact symmetry maps") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.1);
    REQUIRE(!mesh.antipodal_map.empty());
    REQUIRE(!mesh.mirror_map.empty());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        Vec2 a = mesh.vertices[mesh.antipodal_map[i]];
        CHECK(dist(a, -mesh.vertices[i]) <= 1e-13);
        Vec2 m = mesh.vertices[mesh.mirror_map[i]];
        CHECK(dist(m, Vec2{mesh.vertices[i].x, -mesh.vertices[i].y}) <= 1e-13);
    }
}

TEST_CASE("rectangle mesh: vertices inside, boundary mask exact") {
    Mesh mesh = build_mesh(DomainSpec::rectangle(1, 1), 0.25);
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        const Vec2 v = mesh.vertices[i];
        CHECK(v.x >= -1e-15);
        CHECK(v.x <= 1 + 1e-15);
        CHECK(v.y >= -1e-15);
        CHECK(v.y <= 1 + 1e-15);
        const bool on_edge = v.x == 0.0 || v.y == 0.0 || v.x == 1.0 || v.y == 1.0;
        CHECK(static_cast<bool>(mesh.boundary[i]) == on_edge);
    }
}

TEST_CASE("mesh rejections") {
    CHECK_THROWS_AS(build_mesh(DomainSpec::unit_disk(), 0.9), UsageError);
    std::vector<Vec2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_THROWS_AS(build_mesh(DomainSpec::polygon(bowtie), 0.1), UsageError);
}

TEST_CASE("polygon mesh: triangle, conforming and positive") {
    std::vector<Vec2> tri{{0, 0}, {1, 0}, {0.3, 0.9}};
    Mesh mesh = build_mesh(DomainSpec::polygon(tri), 0.07);
    CHECK(mesh.min_triangle_area() > 0.0);
    auto ops = assemble(mesh);
    double total = 0.0;
    for (int k = 0; k < ops.mass.mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(ops.mass.mat, k); it; ++it)
            total += it.value();
    CHECK(total == doctest::Approx(0.45).epsilon(1e-10));  // area of the triangle
}

TEST_CASE("mass matrix sums to the domain area") {
    auto total_mass = [](const Mesh& mesh) {
        auto ops = assemble(mesh);
        double s = 0.0;
        for (int k = 0; k < ops.mass.mat.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(ops.mass.mat, k); it; ++it)
                s += it.value();
        return s;
    };
    CHECK(total_mass(build_mesh(DomainSpec::rectangle(1, 1), 0.2)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(total_mass(build_mesh(DomainSpec::unit_disk(), 0.05)) - kPi) <= 5e-3);
}

TEST_CASE("stiffness row sums vanish before elimination") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.1);
    auto ops = assemble(mesh);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_vertices());
    CHECK((ops.stiffness.mat * ones).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("poisson on the disk: center value and zero rhs") {
    const double h = 0.05;
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), h);
    DirichletSolver ds(mesh);
    ScalarField one = ScalarField::zeros(mesh.num_vertices());
    for (auto& v : one.values) v = 1.0;
    ScalarField zero = ScalarField::zeros(mesh.num_vertices());
    ScalarField u = ds.solve(one, zero);
    CHECK(std::abs(u[0] - 0.25) <= 2 * h * h);  // exact solution (1-|x|^2)/4

    ScalarField u0 = ds.solve(zero, zero);
    for (double v : u0.values) CHECK(v == 0.0);
}

TEST_CASE("harmonic extension of linear boundary data is linear") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.1);
    DirichletSolver ds(mesh);
    ScalarField zero = ScalarField::zeros(mesh.num_vertices());
    ScalarField bc = ScalarField::zeros(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i)
        if (mesh.boundary[i]) bc[i] = mesh.vertices[i].x;
    ScalarField u = ds.solve(zero, bc);
    for (int i = 0; i < mesh.num_vertices(); ++i)
        CHECK(std::abs(u[i] - mesh.vertices[i].x) <= 1e-10);
}

TEST_CASE("interpolation: exact on P1 data, analytic field to O(h^2)") {
    const double h = 0.05;
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), h);
    Locator loc(mesh);
    ScalarField lin = ScalarField::zeros(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i)
        lin[i] = mesh.vertices[i].x + 2 * mesh.vertices[i].y;
    CHECK(interpolate(mesh, loc, lin, {0.3, 0.1}) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(interpolate(mesh, loc, lin, mesh.vertices[17]) ==
          doctest::Approx(lin[17]).epsilon(1e-13));

    DirichletSolver ds(mesh);
    ScalarField one = ScalarField::zeros(mesh.num_vertices());
    for (auto& v : one.values) v = 1.0;
    ScalarField u = ds.solve(one, ScalarField::zeros(mesh.num_vertices()));
    CHECK(std::abs(interpolate(mesh, loc, u, {0.5, 0.0}) - 0.1875) <= 2 * h * h);

    CHECK_THROWS_AS(interpolate(mesh, loc, lin, {2.0, 2.0}), UsageError);
}

TEST_CASE("poisson convergence order lies in [1.7, 2.3]") {
    // manufactured solution u = sin(pi x) sin(pi y) on the unit square
    auto error_for = [](double h) {
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
    const double e1 = error_for(0.2), e2 = error_for(0.1), e3 = error_for(0.05);
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    CHECK(o1 >= 1.7);
    CHECK(o1 <= 2.3);
    CHECK(o2 >= 1.7);
    CHECK(o2 <= 2.3);
}

TEST_CASE("solve_dirichlet is linear") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.1);
    DirichletSolver ds(mesh);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1, 1);
    ScalarField f = ScalarField::zeros(mesh.num_vertices());
    ScalarField g = ScalarField::zeros(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        f[i] = dist(rng);
        g[i] = dist(rng);
    }
    ScalarField zero = ScalarField::zeros(mesh.num_vertices());
    const double a = 1.7, b = -0.4;
    ScalarField fg = ScalarField::zeros(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) fg[i] = a * f[i] + b * g[i];
    ScalarField u1 = ds.solve(fg, zero);
    ScalarField uf = ds.solve(f, zero), ug = ds.solve(g, zero);
    for (int i = 0; i < mesh.num_vertices(); ++i)
        CHECK(std::abs(u1[i] - (a * uf[i] + b * ug[i])) <= 1e-10);
}

TEST_CASE("discrete maximum principle on the disk mesh") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.1);
    DirichletSolver ds(mesh);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0, 1);
    ScalarField f = ScalarField::zeros(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) f[i] = dist(rng);
    ScalarField u = ds.solve(f, ScalarField::zeros(mesh.num_vertices()));
    for (double v : u.values) CHECK(v >= -1e-12);
}

TEST_CASE("mesh JSON round trip") {
    Mesh mesh = build_mesh(DomainSpec::unit_disk(), 0.15);
    const std::string path = "roundtrip_mesh.json";
    save_mesh(mesh, path);
    Mesh back = load_mesh(path);
    REQUIRE(back.num_vertices() == mesh.num_vertices());
    REQUIRE(back.num_triangles() == mesh.num_triangles());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        CHECK(back.vertices[i].x == mesh.vertices[i].x);
        CHECK(back.vertices[i].y == mesh.vertices[i].y);
        CHECK(back.boundary[i] == mesh.boundary[i]);
    }
    std::remove(path.c_str());
}

TEST_CASE("degenerate triangle aborts assembly with diagnostics") {
    Mesh mesh = build_mesh(DomainSpec::rectangle(1, 1), 0.25);
    mesh.vertices[mesh.triangles[0][2]] =
        (mesh.vertices[mesh.triangles[0][0]] + mesh.vertices[mesh.triangles[0][1]]) * 0.5;
    CHECK_THROWS_AS(assemble(mesh), NumericError);
}
