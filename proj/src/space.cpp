#include "wdg/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wdg/error.hpp"

namespace wdg {

ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
    if (degree < 1 || degree > 3) {
        throw ConfigError("ReferenceElement: degree must be 1, 2 or 3, got " + std::to_string(degree));
    }
    for (int j = 0; j <= degree; ++j) {
        for (int i = 0; i + j <= degree; ++i) {
            nodes_.push_back({static_cast<double>(i) / degree, static_cast<double>(j) / degree});
        }
    }
    for (int total = 0; total <= degree; ++total) {
        for (int b = 0; b <= total; ++b) exponents_.push_back({total - b, b});
    }
    const int n = num_dofs();
    Eigen::MatrixXd vandermonde(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            vandermonde(i, j) =
                std::pow(nodes_[i].x, exponents_[j][0]) * std::pow(nodes_[i].y, exponents_[j][1]);
        }
    }
    coeffs_ = vandermonde.fullPivLu().inverse();
}

void ReferenceElement::eval(Point xi, std::span<double> values) const {
    const int n = num_dofs();
    Eigen::VectorXd mono(n);
    for (int j = 0; j < n; ++j) {
        mono(j) = std::pow(xi.x, exponents_[j][0]) * std::pow(xi.y, exponents_[j][1]);
    }
    for (int i = 0; i < n; ++i) values[i] = coeffs_.col(i).dot(mono);
}

void ReferenceElement::eval_grad(Point xi, std::span<double> dxi, std::span<double> deta) const {
    const int n = num_dofs();
    Eigen::VectorXd mx(n), my(n);
    for (int j = 0; j < n; ++j) {
        const int a = exponents_[j][0], b = exponents_[j][1];
        mx(j) = a == 0 ? 0.0 : a * std::pow(xi.x, a - 1) * std::pow(xi.y, b);
        my(j) = b == 0 ? 0.0 : b * std::pow(xi.x, a) * std::pow(xi.y, b - 1);
    }
    for (int i = 0; i < n; ++i) {
        dxi[i] = coeffs_.col(i).dot(mx);
        deta[i] = coeffs_.col(i).dot(my);
    }
}

namespace {

std::shared_ptr<const CsrPattern> make_block_pattern(const Mesh& mesh, int nd) {
    auto pat = std::make_shared<CsrPattern>();
    const std::size_t ne = mesh.num_elements();
    pat->rows = pat->cols = ne * nd;
    pat->row_ptr.assign(pat->rows + 1, 0);
    for (std::size_t k = 0; k < ne; ++k) {
        std::vector<int> blocks = mesh.neighbors(k);
        blocks.push_back(static_cast<int>(k));
        std::sort(blocks.begin(), blocks.end());
        for (int i = 0; i < nd; ++i) {
            for (int b : blocks)
                for (int j = 0; j < nd; ++j) pat->col_idx.push_back(b * nd + j);
            pat->row_ptr[k * nd + i + 1] = pat->col_idx.size();
        }
    }
    return pat;
}

}  // namespace

DgSpace::DgSpace(const Mesh& mesh, int degree) : mesh_(&mesh), degree_(degree), ref_(degree) {
    geometry_.resize(mesh.num_elements());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto [a, b, c] = mesh.element_points(k);
        ElementGeometry& g = geometry_[k];
        g.origin = a;
        g.jacobian << b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y;
        g.det = g.jacobian.determinant();
        if (!(g.det > 0.0)) throw InternalError("DgSpace: degenerate or clockwise element");
        g.inverse_transpose = g.jacobian.inverse().transpose();
    }
    pattern_ = make_block_pattern(mesh, ref_.num_dofs());

    const int nd = ref_.num_dofs();
    const QuadRule& rule = quad_rule(3 * degree);
    std::vector<double> phi(nd);
    ref_mass_.assign(nd * nd, 0.0);
    ref_triple_.assign(nd * nd * nd, 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        ref_.eval(rule.points[q], phi);
        const double w = rule.weights[q];
        for (int i = 0; i < nd; ++i) {
            for (int j = 0; j < nd; ++j) {
                const double wij = w * phi[i] * phi[j];
                ref_mass_[i * nd + j] += wij;
                for (int l = 0; l < nd; ++l) ref_triple_[(l * nd + i) * nd + j] += wij * phi[l];
            }
        }
    }
}

Point DgSpace::to_physical(std::size_t k, Point xi) const {
    const auto& g = geometry_[k];
    return {g.origin.x + g.jacobian(0, 0) * xi.x + g.jacobian(0, 1) * xi.y,
            g.origin.y + g.jacobian(1, 0) * xi.x + g.jacobian(1, 1) * xi.y};
}

Point DgSpace::to_reference(std::size_t k, Point x) const {
    const auto& g = geometry_[k];
    const Eigen::Vector2d d(x.x - g.origin.x, x.y - g.origin.y);
    // J^{-1} = (J^{-T})^T
    const Eigen::Vector2d xi = g.inverse_transpose.transpose() * d;
    return {xi(0), xi(1)};
}

Vec2 DgSpace::physical_gradient(std::size_t k, double dxi, double deta) const {
    const auto& m = geometry_[k].inverse_transpose;
    return {m(0, 0) * dxi + m(0, 1) * deta, m(1, 0) * dxi + m(1, 1) * deta};
}

const VolumeTable& DgSpace::volume_table(int quad_degree) const {
    std::lock_guard lock(cache_mutex_);
    auto& slot = volume_cache_[quad_degree];
    if (!slot) {
        auto t = std::make_unique<VolumeTable>();
        t->rule = &quad_rule(quad_degree);
        const int nd = ref_.num_dofs();
        t->num_dofs = nd;
        const std::size_t nq = t->rule->size();
        t->values.resize(nq * nd);
        t->dxi.resize(nq * nd);
        t->deta.resize(nq * nd);
        for (std::size_t q = 0; q < nq; ++q) {
            ref_.eval(t->rule->points[q], std::span(t->values).subspan(q * nd, nd));
            ref_.eval_grad(t->rule->points[q], std::span(t->dxi).subspan(q * nd, nd),
                           std::span(t->deta).subspan(q * nd, nd));
        }
        slot = std::move(t);
    }
    return *slot;
}

const FaceTable& DgSpace::face_table(int quad_degree) const {
    std::lock_guard lock(cache_mutex_);
    auto& slot = face_cache_[quad_degree];
    if (!slot) {
        auto t = std::make_unique<FaceTable>();
        const int nd = ref_.num_dofs();
        t->num_dofs = nd;
        const auto& faces = mesh_->faces();
        const FaceQuadrature probe = face_quadrature(*mesh_, faces.front(), quad_degree);
        const int npf = static_cast<int>(probe.weights.size());
        t->points_per_face = npf;
        const std::size_t total = faces.size() * npf;
        t->points.resize(total);
        t->weights.resize(total);
        for (int s = 0; s < 2; ++s) {
            t->values[s].assign(total * nd, 0.0);
            t->grad_x[s].assign(total * nd, 0.0);
            t->grad_y[s].assign(total * nd, 0.0);
            t->ref_points[s].assign(total, Point{});
        }
        std::vector<double> dxi(nd), deta(nd);
        for (std::size_t f = 0; f < faces.size(); ++f) {
            const Face& face = faces[f];
            const FaceQuadrature fq = face_quadrature(*mesh_, face, quad_degree);
            for (int q = 0; q < npf; ++q) {
                const std::size_t idx = f * npf + q;
                t->points[idx] = fq.points[q];
                t->weights[idx] = fq.weights[q];
                for (int s = 0; s < 2; ++s) {
                    const int k = s == 0 ? face.left : face.right;
                    if (k == kNoElement) continue;
                    const Point xi = to_reference(k, fq.points[q]);
                    t->ref_points[s][idx] = xi;
                    ref_.eval(xi, std::span(t->values[s]).subspan(idx * nd, nd));
                    ref_.eval_grad(xi, dxi, deta);
                    for (int i = 0; i < nd; ++i) {
                        const Vec2 g = physical_gradient(k, dxi[i], deta[i]);
                        t->grad_x[s][idx * nd + i] = g.x;
                        t->grad_y[s][idx * nd + i] = g.y;
                    }
                }
            }
        }
        slot = std::move(t);
    }
    return *slot;
}

FieldVector::FieldVector(const DgSpace& space) : space_(&space), coeffs_(space.num_dofs(), 0.0) {}

FieldVector::FieldVector(const DgSpace& space, std::vector<double> coefficients)
    : space_(&space), coeffs_(std::move(coefficients)) {
    if (coeffs_.size() != space.num_dofs()) {
        throw ConfigError("FieldVector: coefficient count does not match the space");
    }
}

std::span<const double> FieldVector::block(std::size_t k) const {
    const std::size_t nd = space_->dofs_per_element();
    return std::span<const double>(coeffs_).subspan(k * nd, nd);
}

std::span<double> FieldVector::block(std::size_t k) {
    const std::size_t nd = space_->dofs_per_element();
    return std::span<double>(coeffs_).subspan(k * nd, nd);
}

double FieldVector::eval(std::size_t k, Point xi) const {
    if (k >= space_->mesh().num_elements()) throw ConfigError("FieldVector::eval: element out of range");
    const int nd = space_->dofs_per_element();
    std::vector<double> phi(nd);
    space_->reference().eval(xi, phi);
    return dot(std::span<const double>(phi), block(k));
}

Vec2 FieldVector::eval_grad(std::size_t k, Point xi) const {
    if (k >= space_->mesh().num_elements()) {
        throw ConfigError("FieldVector::eval_grad: element out of range");
    }
    const int nd = space_->dofs_per_element();
    std::vector<double> dxi(nd), deta(nd);
    space_->reference().eval_grad(xi, dxi, deta);
    const auto c = block(k);
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < nd; ++i) {
        gx += dxi[i] * c[i];
        gy += deta[i] * c[i];
    }
    return space_->physical_gradient(k, gx, gy);
}

FieldVector interpolate(const DgSpace& space, const PointFn& f) {
    FieldVector out(space);
    const auto& nodes = space.reference().nodes();
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        auto blk = out.block(k);
        for (std::size_t i = 0; i < nodes.size(); ++i) blk[i] = f(space.to_physical(k, nodes[i]));
    }
    return out;
}

Eigen::MatrixXd local_mass(const DgSpace& space, std::size_t k, int quad_degree) {
    const VolumeTable& tab = space.volume_table(quad_degree);
    const int nd = tab.num_dofs;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nd, nd);
    const double det = space.geometry(k).det;
    for (std::size_t q = 0; q < tab.num_points(); ++q) {
        const double w = tab.rule->weights[q] * det;
        const double* phi = tab.row(q);
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) m(i, j) += w * phi[i] * phi[j];
    }
    return m;
}

FieldVector l2_project(const DgSpace& space, const PointFn& f, int quad_degree) {
    if (quad_degree < 0) quad_degree = space.load_quadrature_degree();
    const VolumeTable& tab = space.volume_table(quad_degree);
    const int nd = tab.num_dofs;
    FieldVector out(space);
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        const Eigen::MatrixXd m = local_mass(space, k, quad_degree);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nd);
        const double det = space.geometry(k).det;
        for (std::size_t q = 0; q < tab.num_points(); ++q) {
            const double w = tab.rule->weights[q] * det;
            const double fv = f(space.to_physical(k, tab.rule->points[q]));
            const double* phi = tab.row(q);
            for (int i = 0; i < nd; ++i) rhs(i) += w * fv * phi[i];
        }
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success) throw InternalError("l2_project: singular local mass matrix");
        const Eigen::VectorXd c = llt.solve(rhs);
        auto blk = out.block(k);
        for (int i = 0; i < nd; ++i) blk[i] = c(i);
    }
    return out;
}

}  // namespace wdg
