#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wdg/linalg.hpp"
#include "wdg/mesh.hpp"
#include "wdg/quadrature.hpp"

namespace wdg {

using PointFn = std::function<double(Point)>;

/// Nodal Lagrange basis of P^q on the reference triangle, nodes on the
/// principal lattice (i/q, j/q), i + j <= q.
class ReferenceElement {
public:
    explicit ReferenceElement(int degree);

    int degree() const { return degree_; }
    int num_dofs() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Point>& nodes() const { return nodes_; }

    void eval(Point xi, std::span<double> values) const;
    void eval_grad(Point xi, std::span<double> dxi, std::span<double> deta) const;

private:
    int degree_;
    std::vector<Point> nodes_;
    std::vector<std::array<int, 2>> exponents_;
    // basis_i = sum_j coeffs_(j, i) * monomial_j
    Eigen::MatrixXd coeffs_;
};

/// Affine map x = origin + jacobian * xi of one element.
struct ElementGeometry {
    Point origin;
    Eigen::Matrix2d jacobian;
    Eigen::Matrix2d inverse_transpose;
    double det = 0.0;
};

/// Reference-level tabulation of the basis at a triangle quadrature rule.
struct VolumeTable {
    const QuadRule* rule = nullptr;
    int num_dofs = 0;
    std::vector<double> values;  // [qp * num_dofs + i]
    std::vector<double> dxi;
    std::vector<double> deta;

    std::size_t num_points() const { return rule->size(); }
    const double* row(std::size_t qp) const { return values.data() + qp * num_dofs; }
};

/// Physical-level tabulation of both traces on every mesh face.
struct FaceTable {
    int num_dofs = 0;
    int points_per_face = 0;
    std::vector<Point> points;     // [face * npf + qp]
    std::vector<double> weights;   // includes the segment length
    // Per side (0 = left/K1, 1 = right/K2), [(face * npf + qp) * num_dofs + i].
    std::array<std::vector<double>, 2> values;
    std::array<std::vector<double>, 2> grad_x;
    std::array<std::vector<double>, 2> grad_y;
    // Reference coordinates of each point as seen from each side.
    std::array<std::vector<Point>, 2> ref_points;

    std::size_t index(std::size_t face, int qp) const { return face * points_per_face + qp; }
};

/// Broken polynomial space V_h^q: no continuity is imposed across faces.
/// Global dof of local basis i on element k is k * dofs_per_element + i.
class DgSpace {
public:
    DgSpace(const Mesh& mesh, int degree);

    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return degree_; }
    int dofs_per_element() const { return ref_.num_dofs(); }
    std::size_t num_dofs() const { return mesh_->num_elements() * ref_.num_dofs(); }
    const ReferenceElement& reference() const { return ref_; }
    const ElementGeometry& geometry(std::size_t k) const { return geometry_[k]; }

    Point to_physical(std::size_t k, Point xi) const;
    Point to_reference(std::size_t k, Point x) const;
    Vec2 physical_gradient(std::size_t k, double dxi, double deta) const;

    /// Element-plus-neighbour block pattern shared by all assembled operators.
    std::shared_ptr<const CsrPattern> pattern() const { return pattern_; }
    SparseMatrix zero_matrix() const { return SparseMatrix(pattern_); }

    /// Default exactness for bilinear forms (2q+2) and for loads/norms (2q+4).
    int form_quadrature_degree() const { return 2 * degree_ + 2; }
    int load_quadrature_degree() const { return 2 * degree_ + 4; }

    const VolumeTable& volume_table(int quad_degree) const;
    const FaceTable& face_table(int quad_degree) const;

    /// int_ref phi_i phi_j, row-major nd x nd.
    const std::vector<double>& reference_mass() const { return ref_mass_; }
    /// int_ref phi_l phi_i phi_j at [(l * nd + i) * nd + j].
    const std::vector<double>& reference_triple() const { return ref_triple_; }

private:
    const Mesh* mesh_;
    int degree_;
    ReferenceElement ref_;
    std::vector<ElementGeometry> geometry_;
    std::shared_ptr<const CsrPattern> pattern_;
    std::vector<double> ref_mass_;
    std::vector<double> ref_triple_;
    mutable std::mutex cache_mutex_;
    mutable std::map<int, std::unique_ptr<VolumeTable>> volume_cache_;
    mutable std::map<int, std::unique_ptr<FaceTable>> face_cache_;
};

/// Coefficient vector of a discrete field in a DgSpace.
class FieldVector {
public:
    explicit FieldVector(const DgSpace& space);
    FieldVector(const DgSpace& space, std::vector<double> coefficients);

    const DgSpace& space() const { return *space_; }
    std::size_t size() const { return coeffs_.size(); }
    std::vector<double>& values() { return coeffs_; }
    const std::vector<double>& values() const { return coeffs_; }
    std::span<const double> block(std::size_t k) const;
    std::span<double> block(std::size_t k);

    double eval(std::size_t k, Point xi) const;
    /// Physical gradient of the element-local polynomial.
    Vec2 eval_grad(std::size_t k, Point xi) const;

private:
    const DgSpace* space_;
    std::vector<double> coeffs_;
};

/// Elementwise Lagrange interpolant.
FieldVector interpolate(const DgSpace& space, const PointFn& f);

/// Elementwise L2 projection using a rule of exactness `quad_degree`
/// (default: the space's load degree).
FieldVector l2_project(const DgSpace& space, const PointFn& f, int quad_degree = -1);

/// Local mass matrix of element k for the reference basis.
Eigen::MatrixXd local_mass(const DgSpace& space, std::size_t k, int quad_degree);

}  // namespace wdg
