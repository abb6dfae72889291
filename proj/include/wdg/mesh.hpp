#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace wdg {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

using Vec2 = Point;

enum class BoundaryTag { Inflow, Outflow };

/// Geometric side of the bounding rectangle a boundary face lies on.
enum class Side { Bottom, Right, Top, Left, None };

const char* side_name(Side s);

constexpr int kNoElement = -1;

struct Face {
    std::array<int, 2> vertices{};
    /// Interior faces: K1. Boundary faces: the only adjacent element.
    int left = kNoElement;
    /// Interior faces: K2. Boundary faces: kNoElement.
    int right = kNoElement;
    /// Local edge index (0..2) of this face inside `left` / `right`.
    int left_local = -1;
    int right_local = -1;
    /// Unit normal pointing from `left` to `right` (outward on the boundary).
    Vec2 normal;
    double length = 0.0;
    Point midpoint;
    Side side = Side::None;
    BoundaryTag tag = BoundaryTag::Outflow;

    bool is_boundary() const { return right == kNoElement; }
};

struct Rect {
    double x0, x1, y0, y1;
};

/// Affine simplicial triangulation of an axis-aligned rectangle.
///
/// Element k has counterclockwise vertices (a, b, c). Its local edge i is the
/// edge opposite vertex i, i.e. edge 0 = (b, c), edge 1 = (c, a), edge 2 = (a, b).
/// Immutable after construction apart from inflow/outflow classification.
class Mesh {
public:
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_elements() const { return elements_.size(); }
    std::size_t num_faces() const { return faces_.size(); }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& elements() const { return elements_; }
    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(std::size_t f) const { return faces_[f]; }

    std::array<Point, 3> element_points(std::size_t k) const;
    double element_area(std::size_t k) const;
    /// Longest edge of element k.
    double element_diameter(std::size_t k) const { return diameters_[k]; }
    /// Radius of the inscribed circle of element k.
    double element_inradius(std::size_t k) const;
    /// Face index of local edge i of element k.
    int element_face(std::size_t k, int i) const { return element_faces_[k][i]; }
    /// Elements sharing a face with k (excluding k), sorted ascending.
    const std::vector<int>& neighbors(std::size_t k) const { return neighbors_[k]; }

    double mesh_size() const { return h_; }
    const Rect& bounds() const { return bounds_; }
    double domain_area() const;

    /// Tags every boundary face Inflow iff v.n < 0 at its midpoint.
    void classify_boundary(Vec2 v);
    Vec2 classified_velocity() const { return velocity_; }

    /// Writes the mesh as a legacy VTK unstructured grid (triangles).
    void write_vtk(std::ostream& os) const;

    friend Mesh build_rect_mesh(Rect domain, int nx, int ny);

private:
    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> elements_;
    std::vector<Face> faces_;
    std::vector<std::array<int, 3>> element_faces_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<double> diameters_;
    double h_ = 0.0;
    Rect bounds_{};
    Vec2 velocity_{};
};

/// Uniform nx-by-ny grid of cells, each cut into two triangles along the
/// lower-left to upper-right diagonal. Boundary faces start out Outflow.
Mesh build_rect_mesh(Rect domain, int nx, int ny);

/// Gauss-Legendre points and weights on a physical segment.
struct FaceQuadrature {
    std::vector<Point> points;
    std::vector<double> weights;
    /// Parameter s in [0,1] along the segment, one per point.
    std::vector<double> params;
};

/// Rule exact for 1D polynomials of degree <= `degree` on the segment [a, b].
FaceQuadrature segment_quadrature(Point a, Point b, int degree);
FaceQuadrature face_quadrature(const Mesh& mesh, const Face& face, int degree);

}  // namespace wdg
