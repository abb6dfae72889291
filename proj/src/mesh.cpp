#include "wdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "wdg/error.hpp"
#include "wdg/quadrature.hpp"

namespace wdg {

const char* side_name(Side s) {
    switch (s) {
        case Side::Bottom: return "bottom";
        case Side::Right: return "right";
        case Side::Top: return "top";
        case Side::Left: return "left";
        case Side::None: break;
    }
    return "none";
}

std::array<Point, 3> Mesh::element_points(std::size_t k) const {
    const auto& e = elements_[k];
    return {vertices_[e[0]], vertices_[e[1]], vertices_[e[2]]};
}

double Mesh::element_area(std::size_t k) const {
    const auto [a, b, c] = element_points(k);
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::element_inradius(std::size_t k) const {
    const auto [a, b, c] = element_points(k);
    const double perimeter = std::hypot(b.x - a.x, b.y - a.y) + std::hypot(c.x - b.x, c.y - b.y) +
                             std::hypot(a.x - c.x, a.y - c.y);
    return 2.0 * element_area(k) / perimeter;
}

double Mesh::domain_area() const {
    return (bounds_.x1 - bounds_.x0) * (bounds_.y1 - bounds_.y0);
}

void Mesh::classify_boundary(Vec2 v) {
    velocity_ = v;
    for (auto& f : faces_) {
        if (!f.is_boundary()) continue;
        f.tag = dot(v, f.normal) < 0.0 ? BoundaryTag::Inflow : BoundaryTag::Outflow;
    }
}

void Mesh::write_vtk(std::ostream& os) const {
    os << "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << vertices_.size() << " double\n";
    os.precision(17);
    for (const auto& p : vertices_) os << p.x << ' ' << p.y << " 0\n";
    os << "CELLS " << elements_.size() << ' ' << 4 * elements_.size() << '\n';
    for (const auto& e : elements_) os << "3 " << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
    os << "CELL_TYPES " << elements_.size() << '\n';
    for (std::size_t k = 0; k < elements_.size(); ++k) os << "5\n";
}

Mesh build_rect_mesh(Rect domain, int nx, int ny) {
    if (nx < 1 || ny < 1) {
        throw ConfigError("build_rect_mesh: cell counts must be >= 1, got " + std::to_string(nx) +
                          "x" + std::to_string(ny));
    }
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
        throw ConfigError("build_rect_mesh: degenerate domain");
    }
    Mesh mesh;
    mesh.bounds_ = domain;
    const double dx = (domain.x1 - domain.x0) / nx;
    const double dy = (domain.y1 - domain.y0) / ny;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            // Snap the last row/column onto the exact bounds.
            const double x = i == nx ? domain.x1 : domain.x0 + i * dx;
            const double y = j == ny ? domain.y1 : domain.y0 + j * dy;
            mesh.vertices_.push_back({x, y});
        }
    }
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
                      v11 = vid(i + 1, j + 1);
            mesh.elements_.push_back({v00, v10, v11});
            mesh.elements_.push_back({v00, v11, v01});
        }
    }

    const std::size_t ne = mesh.elements_.size();
    mesh.element_faces_.assign(ne, {-1, -1, -1});
    mesh.diameters_.resize(ne);
    std::map<std::pair<int, int>, int> edge_to_face;
    for (std::size_t k = 0; k < ne; ++k) {
        const auto& e = mesh.elements_[k];
        double diam = 0.0;
        for (int i = 0; i < 3; ++i) {
            const int a = e[(i + 1) % 3];
            const int b = e[(i + 2) % 3];
            const Point pa = mesh.vertices_[a], pb = mesh.vertices_[b];
            diam = std::max(diam, std::hypot(pb.x - pa.x, pb.y - pa.y));
            const auto key = std::minmax(a, b);
            auto it = edge_to_face.find(key);
            if (it == edge_to_face.end()) {
                Face f;
                f.vertices = {a, b};
                f.left = static_cast<int>(k);
                f.left_local = i;
                f.length = std::hypot(pb.x - pa.x, pb.y - pa.y);
                f.midpoint = 0.5 * (pa + pb);
                // Counterclockwise element: outward normal of edge a->b is (dy, -dx).
                f.normal = {(pb.y - pa.y) / f.length, -(pb.x - pa.x) / f.length};
                edge_to_face.emplace(key, static_cast<int>(mesh.faces_.size()));
                mesh.element_faces_[k][i] = static_cast<int>(mesh.faces_.size());
                mesh.faces_.push_back(f);
            } else {
                Face& f = mesh.faces_[it->second];
                if (f.right != kNoElement) throw InternalError("build_rect_mesh: edge shared by >2 elements");
                f.right = static_cast<int>(k);
                f.right_local = i;
                mesh.element_faces_[k][i] = it->second;
            }
        }
        mesh.diameters_[k] = diam;
        mesh.h_ = std::max(mesh.h_, diam);
    }

    const double tol = 1e-12 * std::max(domain.x1 - domain.x0, domain.y1 - domain.y0);
    for (auto& f : mesh.faces_) {
        if (!f.is_boundary()) continue;
        const Point m = f.midpoint;
        if (std::abs(m.y - domain.y0) < tol) f.side = Side::Bottom;
        else if (std::abs(m.x - domain.x1) < tol) f.side = Side::Right;
        else if (std::abs(m.y - domain.y1) < tol) f.side = Side::Top;
        else if (std::abs(m.x - domain.x0) < tol) f.side = Side::Left;
        else throw InternalError("build_rect_mesh: boundary face not on the rectangle");
    }

    mesh.neighbors_.assign(ne, {});
    for (const auto& f : mesh.faces_) {
        if (f.is_boundary()) continue;
        mesh.neighbors_[f.left].push_back(f.right);
        mesh.neighbors_[f.right].push_back(f.left);
    }
    for (auto& nb : mesh.neighbors_) std::sort(nb.begin(), nb.end());

    mesh.classify_boundary({0.0, 0.0});
    return mesh;
}

FaceQuadrature segment_quadrature(Point a, Point b, int degree) {
    if (degree < 0 || degree > 2 * kMaxQuadratureDegree) {
        throw ConfigError("segment_quadrature: unsupported degree " + std::to_string(degree));
    }
    const int n = std::max(1, (degree + 2) / 2);
    std::vector<double> s, w;
    gauss_legendre(n, s, w);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    FaceQuadrature q;
    for (int i = 0; i < n; ++i) {
        q.points.push_back(a + s[i] * (b - a));
        q.weights.push_back(w[i] * len);
        q.params.push_back(s[i]);
    }
    return q;
}

FaceQuadrature face_quadrature(const Mesh& mesh, const Face& face, int degree) {
    return segment_quadrature(mesh.vertices()[face.vertices[0]], mesh.vertices()[face.vertices[1]],
                              degree);
}

}  // namespace wdg
