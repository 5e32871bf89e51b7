#include "lelab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lelab/errors.hpp"
#include "json.hpp"

namespace lelab {

namespace {

double polygon_area(const std::vector<Vec2>& vs) {
    double a = 0.0;
    const int n = static_cast<int>(vs.size());
    for (int i = 0; i < n; ++i) a += vs[i].cross(vs[(i + 1) % n]);
    return 0.5 * a;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        double v = signed_area2(p, q, r);
        return (v > 0) - (v < 0);
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4;
}

void check_simple_polygon(const std::vector<Vec2>& vs) {
    const int n = static_cast<int>(vs.size());
    if (n < 3) throw UsageError("polygon needs at least 3 vertices");
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // skip adjacent edges (shared endpoint)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(vs[i], vs[(i + 1) % n], vs[j], vs[(j + 1) % n]))
                throw UsageError("polygon is self-intersecting");
        }
    }
    if (polygon_area(vs) <= 0.0)
        throw UsageError("polygon must be positively oriented");
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double t = std::clamp((p - a).dot(ab) / std::max(ab.norm2(), 1e-300), 0.0, 1.0);
    return dist(p, a + ab * t);
}

// Palindromic interleave of (j-1) inner and j outer advances per sector.
// A palindrome keeps the annulus stitch invariant under the mesh mirror.
std::vector<char> sector_word(int j) {
    const int a = j - 1, b = j;
    const int n = a + b;
    const int half = n / 2;
    const char odd_letter = (b % 2 == 1) ? 'O' : 'I';
    const int ca = a / 2, cb = b / 2;
    std::vector<char> w;
    int ei = 0, eo = 0;
    for (int k = 0; k < half; ++k) {
        if (eo * ca <= ei * cb && eo < cb) {
            w.push_back('O');
            ++eo;
        } else if (ei < ca) {
            w.push_back('I');
            ++ei;
        } else {
            w.push_back('O');
            ++eo;
        }
    }
    std::vector<char> full = w;
    full.push_back(odd_letter);
    full.insert(full.end(), w.rbegin(), w.rend());
    return full;
}

Mesh build_disk_mesh(double h) {
    const int m = std::max(2, static_cast<int>(std::ceil(1.0 / h)));
    Mesh mesh;
    mesh.domain = DomainSpec::unit_disk();
    mesh.h = h;
    mesh.vertices.push_back({0.0, 0.0});
    std::vector<std::vector<int>> ring(m + 1);
    ring[0] = {0};
    for (int j = 1; j <= m; ++j) {
        const int n = 6 * j;
        const double r = static_cast<double>(j) / m;
        ring[j].reserve(n);
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * kPi * k / n;
            mesh.vertices.push_back({r * std::cos(th), r * std::sin(th)});
            ring[j].push_back(static_cast<int>(mesh.vertices.size()) - 1);
        }
    }
    // boundary vertices snapped exactly onto the unit circle
    for (int k = 0; k < 6 * m; ++k) {
        Vec2& v = mesh.vertices[ring[m][k]];
        const double r = v.norm();
        v = v / r;
    }
    for (int k = 0; k < 6; ++k)
        mesh.triangles.push_back({0, ring[1][k], ring[1][(k + 1) % 6]});
    for (int j = 2; j <= m; ++j) {
        const auto& inner = ring[j - 1];
        const auto& outer = ring[j];
        const int ni = static_cast<int>(inner.size());
        const int no = static_cast<int>(outer.size());
        const auto word = sector_word(j);
        for (int s = 0; s < 6; ++s) {
            int i1 = s * (j - 1);
            int i2 = s * j;
            for (char ch : word) {
                if (ch == 'O') {
                    mesh.triangles.push_back({inner[i1 % ni], outer[i2 % no], outer[(i2 + 1) % no]});
                    ++i2;
                } else {
                    mesh.triangles.push_back({inner[i1 % ni], outer[i2 % no], inner[(i1 + 1) % ni]});
                    ++i1;
                }
            }
        }
    }
    mesh.boundary.assign(mesh.vertices.size(), 0);
    for (int idx : ring[m]) mesh.boundary[idx] = 1;

    // exact vertex maps from the ring structure
    mesh.antipodal_map.resize(mesh.vertices.size());
    mesh.mirror_map.resize(mesh.vertices.size());
    mesh.antipodal_map[0] = 0;
    mesh.mirror_map[0] = 0;
    for (int j = 1; j <= m; ++j) {
        const int n = 6 * j;
        for (int k = 0; k < n; ++k) {
            mesh.antipodal_map[ring[j][k]] = ring[j][(k + 3 * j) % n];
            mesh.mirror_map[ring[j][k]] = ring[j][(n - k) % n];
        }
    }
    return mesh;
}

Mesh build_rectangle_mesh(double w, double hgt, double h) {
    if (w <= 0 || hgt <= 0) throw UsageError("rectangle sides must be positive");
    const int nx = std::max(2, static_cast<int>(std::ceil(w / h)));
    const int ny = std::max(2, static_cast<int>(std::ceil(hgt / h)));
    Mesh mesh;
    mesh.domain = DomainSpec::rectangle(w, hgt);
    mesh.h = h;
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.push_back({w * i / nx, hgt * j / ny});
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // consistent SW-NE diagonals: symmetric under the 180-degree
            // rotation and (for squares) the main-diagonal mirror
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    mesh.boundary.assign(mesh.vertices.size(), 0);
    for (int i = 0; i <= nx; ++i) {
        mesh.boundary[vid(i, 0)] = 1;
        mesh.boundary[vid(i, ny)] = 1;
    }
    for (int j = 0; j <= ny; ++j) {
        mesh.boundary[vid(0, j)] = 1;
        mesh.boundary[vid(nx, j)] = 1;
    }
    mesh.antipodal_map.resize(mesh.vertices.size());
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.antipodal_map[vid(i, j)] = vid(nx - i, ny - j);
    if (nx == ny && w == hgt) {
        mesh.mirror_map.resize(mesh.vertices.size());
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                mesh.mirror_map[vid(i, j)] = vid(j, i);
    }
    return mesh;
}

// Ear clipping for simple polygons.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& vs) {
    const int n = static_cast<int>(vs.size());
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<std::array<int, 3>> out;
    auto inside = [&](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
        double d1 = signed_area2(p, a, b), d2 = signed_area2(p, b, c), d3 = signed_area2(p, c, a);
        bool neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
        bool pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
        return !(neg && pos);
    };
    int guard = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        const int m = static_cast<int>(idx.size());
        for (int i = 0; i < m; ++i) {
            int ia = idx[(i + m - 1) % m], ib = idx[i], ic = idx[(i + 1) % m];
            if (signed_area2(vs[ia], vs[ib], vs[ic]) <= 1e-14) continue;
            bool ear = true;
            for (int j : idx) {
                if (j == ia || j == ib || j == ic) continue;
                if (inside(vs[j], vs[ia], vs[ib], vs[ic])) {
                    ear = false;
                    break;
                }
            }
            if (ear) {
                out.push_back({ia, ib, ic});
                idx.erase(idx.begin() + i);
                clipped = true;
                break;
            }
        }
        if (!clipped || ++guard > 10 * n)
            throw UsageError("ear clipping failed; polygon may be degenerate");
    }
    out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

Mesh build_polygon_mesh(const std::vector<Vec2>& vs, double h) {
    check_simple_polygon(vs);
    auto base = ear_clip(vs);
    double max_edge = 0.0;
    for (const auto& t : base)
        for (int e = 0; e < 3; ++e)
            max_edge = std::max(max_edge, dist(vs[t[e]], vs[(t[(e + 1) % 3])]));
    const int k = std::max(1, static_cast<int>(std::ceil(max_edge / h)));

    Mesh mesh;
    mesh.domain = DomainSpec::polygon(vs);
    mesh.h = h;
    std::map<std::pair<int64_t, int64_t>, int> seen;
    auto add_vertex = [&](Vec2 p) {
        auto key = std::make_pair(static_cast<int64_t>(std::llround(p.x * 1e10)),
                                  static_cast<int64_t>(std::llround(p.y * 1e10)));
        auto it = seen.find(key);
        if (it != seen.end()) return it->second;
        mesh.vertices.push_back(p);
        int id = static_cast<int>(mesh.vertices.size()) - 1;
        seen[key] = id;
        return id;
    };
    // uniform k-refinement of every base triangle; shared edges match because
    // subdivision points depend only on the edge endpoints
    for (const auto& t : base) {
        Vec2 A = vs[t[0]], B = vs[t[1]], C = vs[t[2]];
        std::vector<std::vector<int>> grid(k + 1);
        for (int i = 0; i <= k; ++i) {
            grid[i].resize(i + 1);
            for (int j = 0; j <= i; ++j) {
                double wa = 1.0 - static_cast<double>(i) / k;
                double wb = static_cast<double>(i - j) / k;
                double wc = static_cast<double>(j) / k;
                grid[i][j] = add_vertex(A * wa + B * wb + C * wc);
            }
        }
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j <= i; ++j) {
                mesh.triangles.push_back({grid[i][j], grid[i + 1][j], grid[i + 1][j + 1]});
                if (j < i)
                    mesh.triangles.push_back({grid[i][j], grid[i + 1][j + 1], grid[i][j + 1]});
            }
        }
    }
    // boundary flags: vertex on any polygon edge
    mesh.boundary.assign(mesh.vertices.size(), 0);
    const int n = static_cast<int>(vs.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        for (int e = 0; e < n; ++e) {
            if (point_segment_distance(mesh.vertices[i], vs[e], vs[(e + 1) % n]) < 1e-12) {
                mesh.boundary[i] = 1;
                break;
            }
        }
    }
    // a few Laplacian smoothing passes on interior vertices
    std::vector<std::vector<int>> nbr(mesh.vertices.size());
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            nbr[t[e]].push_back(t[(e + 1) % 3]);
            nbr[t[e]].push_back(t[(e + 2) % 3]);
        }
    for (int pass = 0; pass < 4; ++pass) {
        auto next = mesh.vertices;
        for (size_t i = 0; i < mesh.vertices.size(); ++i) {
            if (mesh.boundary[i] || nbr[i].empty()) continue;
            Vec2 c{0, 0};
            for (int j : nbr[i]) c += mesh.vertices[j];
            next[i] = c / static_cast<double>(nbr[i].size());
        }
        mesh.vertices = next;
    }
    return mesh;
}

}  // namespace

double DomainSpec::diameter() const {
    if (is_disk()) return 2.0;
    if (is_rectangle()) {
        const auto& r = std::get<RectangleDomain>(shape);
        return std::hypot(r.width, r.height);
    }
    const auto& vs = std::get<PolygonDomain>(shape).vertices;
    double d = 0.0;
    for (size_t i = 0; i < vs.size(); ++i)
        for (size_t j = i + 1; j < vs.size(); ++j) d = std::max(d, dist(vs[i], vs[j]));
    return d;
}

double DomainSpec::area() const {
    if (is_disk()) return kPi;
    if (is_rectangle()) {
        const auto& r = std::get<RectangleDomain>(shape);
        return r.width * r.height;
    }
    return polygon_area(std::get<PolygonDomain>(shape).vertices);
}

double DomainSpec::boundary_distance(Vec2 p) const {
    // signed: negative outside the domain
    if (is_disk()) return 1.0 - p.norm();
    if (is_rectangle()) {
        const auto& r = std::get<RectangleDomain>(shape);
        return std::min({p.x, p.y, r.width - p.x, r.height - p.y});
    }
    const auto& vs = std::get<PolygonDomain>(shape).vertices;
    double d = std::numeric_limits<double>::max();
    const int n = static_cast<int>(vs.size());
    for (int e = 0; e < n; ++e)
        d = std::min(d, point_segment_distance(p, vs[e], vs[(e + 1) % n]));
    // even-odd crossing test
    bool inside = false;
    for (int e = 0; e < n; ++e) {
        const Vec2 a = vs[e], b = vs[(e + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside ? d : -d;
}

std::string DomainSpec::describe() const {
    if (is_disk()) return "unit-disk";
    if (is_rectangle()) {
        const auto& r = std::get<RectangleDomain>(shape);
        std::ostringstream os;
        os << "rectangle(" << r.width << "," << r.height << ")";
        return os.str();
    }
    std::ostringstream os;
    os << "polygon(" << std::get<PolygonDomain>(shape).vertices.size() << ")";
    return os.str();
}

double Mesh::max_edge_length() const {
    double m = 0.0;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e)
            m = std::max(m, dist(vertices[t[e]], vertices[t[(e + 1) % 3]]));
    return m;
}

double Mesh::min_triangle_area() const {
    double m = std::numeric_limits<double>::max();
    for (int t = 0; t < num_triangles(); ++t) m = std::min(m, triangle_area(t));
    return m;
}

Mesh build_mesh(const DomainSpec& spec, double h) {
    if (h <= 0) throw UsageError("mesh size h must be positive");
    if (h >= spec.diameter() / 4.0)
        throw UsageError("mesh size h must be below diameter/4");
    Mesh mesh;
    if (spec.is_disk()) {
        mesh = build_disk_mesh(h);
    } else if (spec.is_rectangle()) {
        const auto& r = std::get<RectangleDomain>(spec.shape);
        mesh = build_rectangle_mesh(r.width, r.height, h);
    } else {
        mesh = build_polygon_mesh(std::get<PolygonDomain>(spec.shape).vertices, h);
    }
    if (mesh.num_vertices() < 25)
        throw UsageError("mesh size h produces fewer than 25 vertices; decrease h");
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.triangle_area(t) <= 0)
            throw NumericError("mesh has a non-positively-oriented triangle");
    }
    return mesh;
}

Locator::Locator(const Mesh& mesh) : mesh_(mesh) {
    lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    hi_ = {-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
    for (const auto& v : mesh.vertices) {
        lo_.x = std::min(lo_.x, v.x);
        lo_.y = std::min(lo_.y, v.y);
        hi_.x = std::max(hi_.x, v.x);
        hi_.y = std::max(hi_.y, v.y);
    }
    cell_ = std::max(mesh.h * 2.0, 1e-8);
    nx_ = std::max(1, static_cast<int>(std::ceil((hi_.x - lo_.x) / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil((hi_.y - lo_.y) / cell_)));
    bins_.resize(static_cast<size_t>(nx_) * ny_);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        double x0 = std::min({a.x, b.x, c.x}), x1 = std::max({a.x, b.x, c.x});
        double y0 = std::min({a.y, b.y, c.y}), y1 = std::max({a.y, b.y, c.y});
        int i0 = std::clamp(static_cast<int>((x0 - lo_.x) / cell_), 0, nx_ - 1);
        int i1 = std::clamp(static_cast<int>((x1 - lo_.x) / cell_), 0, nx_ - 1);
        int j0 = std::clamp(static_cast<int>((y0 - lo_.y) / cell_), 0, ny_ - 1);
        int j1 = std::clamp(static_cast<int>((y1 - lo_.y) / cell_), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                bins_[static_cast<size_t>(j) * nx_ + i].push_back(t);
    }
}

std::optional<std::pair<int, std::array<double, 3>>> Locator::locate(Vec2 p) const {
    int i = std::clamp(static_cast<int>((p.x - lo_.x) / cell_), 0, nx_ - 1);
    int j = std::clamp(static_cast<int>((p.y - lo_.y) / cell_), 0, ny_ - 1);
    const double tol = -1e-12;
    for (int dj = 0; dj <= 1; ++dj) {
        for (int di = 0; di <= 1; ++di) {
            // probe the home cell first, then neighbors (handles cell-edge points)
            int ii = std::clamp(i + (di == 0 ? 0 : (p.x > lo_.x + (i + 0.5) * cell_ ? 1 : -1)), 0, nx_ - 1);
            int jj = std::clamp(j + (dj == 0 ? 0 : (p.y > lo_.y + (j + 0.5) * cell_ ? 1 : -1)), 0, ny_ - 1);
            for (int t : bins_[static_cast<size_t>(jj) * nx_ + ii]) {
                const auto& tri = mesh_.triangles[t];
                Vec2 a = mesh_.vertices[tri[0]], b = mesh_.vertices[tri[1]], c = mesh_.vertices[tri[2]];
                double area = signed_area2(a, b, c);
                double l0 = signed_area2(p, b, c) / area;
                double l1 = signed_area2(a, p, c) / area;
                double l2 = 1.0 - l0 - l1;
                if (l0 >= tol && l1 >= tol && l2 >= tol)
                    return std::make_pair(t, std::array<double, 3>{l0, l1, l2});
            }
        }
    }
    return std::nullopt;
}

int Locator::nearest_triangle(Vec2 p) const {
    int best = 0;
    double bd = std::numeric_limits<double>::max();
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
        const auto& tri = mesh_.triangles[t];
        Vec2 c = (mesh_.vertices[tri[0]] + mesh_.vertices[tri[1]] + mesh_.vertices[tri[2]]) / 3.0;
        double d = dist(c, p);
        if (d < bd) {
            bd = d;
            best = t;
        }
    }
    return best;
}

double interpolate(const Mesh& mesh, const Locator& loc, const ScalarField& f, Vec2 p) {
    auto hit = loc.locate(p);
    if (!hit) {
        std::ostringstream os;
        os << "point (" << p.x << "," << p.y << ") is outside the mesh; nearest triangle "
           << loc.nearest_triangle(p);
        throw UsageError(os.str());
    }
    const auto& tri = mesh.triangles[hit->first];
    const auto& l = hit->second;
    return l[0] * f[tri[0]] + l[1] * f[tri[1]] + l[2] * f[tri[2]];
}

Vec2 p1_gradient(const Mesh& mesh, const ScalarField& f, int t) {
    const auto& tri = mesh.triangles[t];
    Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    double area2 = signed_area2(a, b, c);
    // grad of barycentric functions
    Vec2 g0 = (c - b).perp() / area2;
    Vec2 g1 = (a - c).perp() / area2;
    Vec2 g2 = (b - a).perp() / area2;
    return g0 * f[tri[0]] + g1 * f[tri[1]] + g2 * f[tri[2]];
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    nlohmann::json j;
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (const auto& v : mesh.vertices) vs.push_back({v.x, v.y});
    auto& ts = j["triangles"] = nlohmann::json::array();
    for (const auto& t : mesh.triangles) ts.push_back({t[0], t[1], t[2]});
    j["boundary"] = mesh.boundary;
    j["h"] = mesh.h;
    j["domain"] = mesh.domain.describe();
    std::ofstream os(path);
    if (!os) throw ArtifactError("cannot write mesh file " + path);
    os << j.dump(0) << "\n";
}

Mesh load_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArtifactError("cannot read mesh file " + path);
    nlohmann::json j;
    is >> j;
    Mesh mesh;
    for (const auto& v : j.at("vertices")) mesh.vertices.push_back({v[0], v[1]});
    for (const auto& t : j.at("triangles"))
        mesh.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    mesh.boundary = j.at("boundary").get<std::vector<uint8_t>>();
    mesh.h = j.at("h").get<double>();
    return mesh;
}

}  // namespace lelab
