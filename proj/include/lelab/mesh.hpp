#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lelab/geometry.hpp"

namespace lelab {

struct DiskDomain {};

struct RectangleDomain {
    double width = 1.0;
    double height = 1.0;
};

struct PolygonDomain {
    std::vector<Vec2> vertices;  // simple, positively oriented
};

struct DomainSpec {
    std::variant<DiskDomain, RectangleDomain, PolygonDomain> shape;

    static DomainSpec unit_disk() { return {DiskDomain{}}; }
    static DomainSpec rectangle(double w, double h) { return {RectangleDomain{w, h}}; }
    static DomainSpec polygon(std::vector<Vec2> vs) { return {PolygonDomain{std::move(vs)}}; }

    bool is_disk() const { return std::holds_alternative<DiskDomain>(shape); }
    bool is_rectangle() const { return std::holds_alternative<RectangleDomain>(shape); }
    double diameter() const;
    double area() const;
    /// Distance from an interior point to the domain boundary.
    double boundary_distance(Vec2 p) const;
    std::string describe() const;
};

/// Conforming P1 triangle mesh. Vertex permutations for the exact mesh
/// symmetries (when the construction provides them) are kept alongside,
/// since the nonlinear solver uses them to pin orbit degeneracies.
struct Mesh {
    DomainSpec domain;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // CCW
    std::vector<uint8_t> boundary;              // per-vertex flag
    double h = 0.0;                             // target edge length

    // Exact symmetry vertex maps (empty when unavailable).
    std::vector<int> antipodal_map;  // x -> 2c - x about the domain center
    std::vector<int> mirror_map;     // reflection across the principal axis

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        return 0.5 * signed_area2(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    }
    double max_edge_length() const;
    double min_triangle_area() const;
};

/// Build a conforming mesh with max edge length <= 1.5*h.
///
/// Disk meshes use concentric rings with palindromic sector stitching, so the
/// triangulation is exactly invariant under the point reflection and the
/// x-axis mirror (vertex permutations stored on the mesh). Rectangles use a
/// structured grid split along the main diagonal direction.
Mesh build_mesh(const DomainSpec& spec, double h);

/// Vertex-indexed P1 field. Boundary vertices carry Dirichlet data exactly.
struct ScalarField {
    std::vector<double> values;

    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }

    static ScalarField zeros(int n) { return ScalarField{std::vector<double>(n, 0.0)}; }
};

/// Uniform-grid point locator for barycentric queries.
class Locator {
  public:
    explicit Locator(const Mesh& mesh);

    /// Triangle containing p and its barycentric coordinates;
    /// nullopt when p is outside the mesh (tol: slightly tolerant on edges).
    std::optional<std::pair<int, std::array<double, 3>>> locate(Vec2 p) const;

    /// Index of the triangle nearest to p (by centroid), for error messages.
    int nearest_triangle(Vec2 p) const;

  private:
    const Mesh& mesh_;
    double cell_ = 0.0;
    Vec2 lo_, hi_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> bins_;
};

/// P1 interpolation; throws UsageError naming the nearest triangle if p is
/// outside the mesh.
double interpolate(const Mesh& mesh, const Locator& loc, const ScalarField& f, Vec2 p);

/// Constant per-triangle gradient of a P1 field.
Vec2 p1_gradient(const Mesh& mesh, const ScalarField& f, int tri);

// JSON round trip:  {"vertices": [[x,y],...], "triangles": [[a,b,c],...],
//                    "boundary": [0/1,...], "h": h, "domain": "..."}
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

}  // namespace lelab
