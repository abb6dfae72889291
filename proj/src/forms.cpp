#include "wdg/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "wdg/error.hpp"

namespace wdg {

FacePredicate boundary_all() {
    return [](const Face& f) { return f.is_boundary(); };
}
FacePredicate boundary_none() {
    return [](const Face&) { return false; };
}
FacePredicate boundary_inflow() {
    return [](const Face& f) { return f.is_boundary() && f.tag == BoundaryTag::Inflow; };
}
FacePredicate boundary_outflow() {
    return [](const Face& f) { return f.is_boundary() && f.tag == BoundaryTag::Outflow; };
}
FacePredicate boundary_side(Side side) {
    return [side](const Face& f) { return f.is_boundary() && f.side == side; };
}
FacePredicate boundary_strict_outflow(Vec2 v) {
    const double tol = 1e-14 * std::hypot(v.x, v.y);
    return [v, tol](const Face& f) { return f.is_boundary() && dot(v, f.normal) > tol; };
}

CoefficientField CoefficientField::constant(double c) {
    CoefficientField f;
    f.kind_ = Kind::Constant;
    f.scale_ = c;
    return f;
}

CoefficientField CoefficientField::pointwise(PointFn fn) {
    CoefficientField f;
    f.kind_ = Kind::Pointwise;
    f.fn_ = std::move(fn);
    return f;
}

CoefficientField CoefficientField::westervelt_mass(const FieldVector& p, double kappa) {
    CoefficientField f;
    f.kind_ = Kind::Field;
    f.scale_ = 1.0;
    f.factor_ = kappa;
    f.field_ = &p;
    return f;
}

CoefficientField CoefficientField::pressure_diffusion(const FieldVector& p, double d0, double d1,
                                                      bool absolute) {
    CoefficientField f;
    f.kind_ = Kind::Field;
    f.scale_ = d0;
    f.factor_ = d1;
    f.absolute_ = absolute;
    f.field_ = &p;
    return f;
}

double CoefficientField::from_field_value(double p) const {
    return scale_ * (1.0 + factor_ * (absolute_ ? std::abs(p) : p));
}

void CoefficientField::volume_values(const DgSpace& space, std::size_t k, const VolumeTable& tab,
                                     std::span<double> out) const {
    const std::size_t nq = tab.num_points();
    switch (kind_) {
        case Kind::Constant:
            std::fill(out.begin(), out.begin() + nq, scale_);
            break;
        case Kind::Pointwise:
            for (std::size_t q = 0; q < nq; ++q) out[q] = fn_(space.to_physical(k, tab.rule->points[q]));
            break;
        case Kind::Field: {
            const auto c = field_->block(k);
            const int nd = tab.num_dofs;
            for (std::size_t q = 0; q < nq; ++q) {
                const double* phi = tab.row(q);
                double p = 0.0;
                for (int i = 0; i < nd; ++i) p += phi[i] * c[i];
                out[q] = from_field_value(p);
            }
            break;
        }
    }
}

void CoefficientField::face_values(const DgSpace& space, std::size_t f, int side,
                                   const FaceTable& tab, std::span<double> out) const {
    const int npf = tab.points_per_face;
    switch (kind_) {
        case Kind::Constant:
            std::fill(out.begin(), out.begin() + npf, scale_);
            break;
        case Kind::Pointwise:
            for (int q = 0; q < npf; ++q) out[q] = fn_(tab.points[tab.index(f, q)]);
            break;
        case Kind::Field: {
            const Face& face = space.mesh().face(f);
            const int k = side == 0 ? face.left : face.right;
            const auto c = field_->block(k);
            const int nd = tab.num_dofs;
            for (int q = 0; q < npf; ++q) {
                const double* phi = tab.values[side].data() + tab.index(f, q) * nd;
                double p = 0.0;
                for (int i = 0; i < nd; ++i) p += phi[i] * c[i];
                out[q] = from_field_value(p);
            }
            break;
        }
    }
}

PenaltySpec PenaltySpec::pressure_default(int degree) {
    return {1.0, 10.0 * degree * degree};
}

double measure_trace_constant_sq(const DgSpace& space) {
    const Mesh& mesh = space.mesh();
    const int qd = 2 * space.degree() + 2;
    const FaceTable& ft = space.face_table(qd);
    const int nd = space.dofs_per_element();
    double best = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const Eigen::MatrixXd mk = local_mass(space, k, qd);
        for (int e = 0; e < 3; ++e) {
            const int f = mesh.element_face(k, e);
            const Face& face = mesh.face(f);
            const int side = face.left == static_cast<int>(k) ? 0 : 1;
            Eigen::MatrixXd mf = Eigen::MatrixXd::Zero(nd, nd);
            for (int q = 0; q < ft.points_per_face; ++q) {
                const std::size_t idx = ft.index(f, q);
                const double* phi = ft.values[side].data() + idx * nd;
                for (int i = 0; i < nd; ++i)
                    for (int j = 0; j < nd; ++j) mf(i, j) += ft.weights[idx] * phi[i] * phi[j];
            }
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(mf, mk, Eigen::EigenvaluesOnly);
            best = std::max(best, es.eigenvalues().maxCoeff() * mesh.element_diameter(k));
        }
    }
    return best;
}

double coercivity_threshold(double trace_constant_sq, double d_min, double d_max) {
    constexpr int kDim = 2;
    return trace_constant_sq * (kDim + 1) * d_max * d_max / d_min;
}

CoefficientRange coefficient_range(const DgSpace& space, const CoefficientField& c) {
    CoefficientRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    const int qd = space.form_quadrature_degree();
    const VolumeTable& vt = space.volume_table(qd);
    std::vector<double> vals(std::max<std::size_t>(vt.num_points(), 64));
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        c.volume_values(space, k, vt, vals);
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            r.min = std::min(r.min, vals[q]);
            r.max = std::max(r.max, vals[q]);
        }
    }
    const FaceTable& ft = space.face_table(qd);
    for (std::size_t f = 0; f < space.mesh().num_faces(); ++f) {
        const Face& face = space.mesh().face(f);
        for (int s = 0; s < (face.is_boundary() ? 1 : 2); ++s) {
            c.face_values(space, f, s, ft, vals);
            for (int q = 0; q < ft.points_per_face; ++q) {
                r.min = std::min(r.min, vals[q]);
                r.max = std::max(r.max, vals[q]);
            }
        }
    }
    return r;
}

namespace {

// Coefficient scale (1 + factor p^h) lies in the space, so the weighted mass
// is scale (M_ref + factor sum_l p_l T_l) det exactly.
SparseMatrix assemble_polynomial_mass(const DgSpace& space, const CoefficientField& c) {
    SparseMatrix m = space.zero_matrix();
    const int nd = space.dofs_per_element();
    const auto& mref = space.reference_mass();
    const auto& tref = space.reference_triple();
    const FieldVector& p = *c.field();
    std::vector<double> local(nd * nd);
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        const auto pk = p.block(k);
        for (int ij = 0; ij < nd * nd; ++ij) local[ij] = mref[ij];
        for (int l = 0; l < nd; ++l) {
            const double s = c.factor() * pk[l];
            if (!std::isfinite(s)) throw ModelError("assemble_mass: non-finite coefficient");
            const double* t = tref.data() + l * nd * nd;
            for (int ij = 0; ij < nd * nd; ++ij) local[ij] += s * t[ij];
        }
        const double scale = c.constant_value() * space.geometry(k).det;
        for (double& v : local) v *= scale;
        m.add_block(k * nd, static_cast<int>(k * nd), nd, nd, local.data());
    }
    return m;
}

}  // namespace

SparseMatrix assemble_mass(const DgSpace& space, const CoefficientField& c) {
    if (c.is_polynomial()) return assemble_polynomial_mass(space, c);
    SparseMatrix m = space.zero_matrix();
    const VolumeTable& tab = space.volume_table(space.form_quadrature_degree());
    const int nd = tab.num_dofs;
    const std::size_t nq = tab.num_points();
    std::vector<double> coef(nq), local(nd * nd);
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        c.volume_values(space, k, tab, coef);
        std::fill(local.begin(), local.end(), 0.0);
        const double det = space.geometry(k).det;
        for (std::size_t q = 0; q < nq; ++q) {
            if (!std::isfinite(coef[q])) throw ModelError("assemble_mass: non-finite coefficient");
            const double w = tab.rule->weights[q] * det * coef[q];
            const double* phi = tab.row(q);
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j) local[i * nd + j] += w * phi[i] * phi[j];
        }
        m.add_block(k * nd, static_cast<int>(k * nd), nd, nd, local.data());
    }
    return m;
}

namespace {

[[noreturn]] void throw_nonpositive_diffusion(Point x, double d) {
    std::ostringstream os;
    os << "diffusion coefficient " << d << " <= 0 at (" << x.x << ", " << x.y << ")";
    throw ModelError(os.str());
}

}  // namespace

SparseMatrix assemble_sip(const DgSpace& space, const CoefficientField& diffusion,
                          const PenaltySpec& penalty) {
    if (!(penalty.sigma >= 0.0) || !(penalty.eta > 0.0)) {
        throw ConfigError("assemble_sip: need sigma >= 0 and eta > 0");
    }
    const Mesh& mesh = space.mesh();
    SparseMatrix a = space.zero_matrix();
    const int qd = space.form_quadrature_degree();
    const VolumeTable& vt = space.volume_table(qd);
    const int nd = vt.num_dofs;
    const std::size_t nq = vt.num_points();
    std::vector<double> coef(std::max<std::size_t>(nq, 64)), local(nd * nd), gx(nd), gy(nd);

    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        diffusion.volume_values(space, k, vt, coef);
        std::fill(local.begin(), local.end(), 0.0);
        const double det = space.geometry(k).det;
        for (std::size_t q = 0; q < nq; ++q) {
            if (!(coef[q] > 0.0)) throw_nonpositive_diffusion(space.to_physical(k, vt.rule->points[q]), coef[q]);
            const double w = vt.rule->weights[q] * det * coef[q];
            for (int i = 0; i < nd; ++i) {
                const Vec2 g = space.physical_gradient(k, vt.dxi[q * nd + i], vt.deta[q * nd + i]);
                gx[i] = g.x;
                gy[i] = g.y;
            }
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j) local[i * nd + j] += w * (gx[i] * gx[j] + gy[i] * gy[j]);
        }
        a.add_block(k * nd, static_cast<int>(k * nd), nd, nd, local.data());
    }

    const FaceTable& ft = space.face_table(qd);
    const int npf = ft.points_per_face;
    std::vector<double> d0(npf), d1(npf);
    std::vector<double> blk(4 * nd * nd);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (face.is_boundary()) continue;
        diffusion.face_values(space, f, 0, ft, d0);
        diffusion.face_values(space, f, 1, ft, d1);
        const double pen = penalty.sigma * penalty.eta / face.length;
        const Vec2 n = face.normal;
        std::fill(blk.begin(), blk.end(), 0.0);
        for (int q = 0; q < npf; ++q) {
            const std::size_t idx = ft.index(f, q);
            const double w = ft.weights[idx];
            const double dv[2] = {d0[q], d1[q]};
            for (int s = 0; s < 2; ++s) {
                if (!(dv[s] > 0.0)) throw_nonpositive_diffusion(ft.points[idx], dv[s]);
            }
            const double sign[2] = {1.0, -1.0};
            for (int s = 0; s < 2; ++s) {      // test side
                const double* phi_s = ft.values[s].data() + idx * nd;
                const double* gxs = ft.grad_x[s].data() + idx * nd;
                const double* gys = ft.grad_y[s].data() + idx * nd;
                for (int t = 0; t < 2; ++t) {  // trial side
                    const double* phi_t = ft.values[t].data() + idx * nd;
                    const double* gxt = ft.grad_x[t].data() + idx * nd;
                    const double* gyt = ft.grad_y[t].data() + idx * nd;
                    double* out = blk.data() + (s * 2 + t) * nd * nd;
                    for (int i = 0; i < nd; ++i) {
                        const double jump_w = sign[s] * phi_s[i];
                        const double flux_w = 0.5 * dv[s] * (gxs[i] * n.x + gys[i] * n.y);
                        for (int j = 0; j < nd; ++j) {
                            const double jump_phi = sign[t] * phi_t[j];
                            const double flux_phi = 0.5 * dv[t] * (gxt[j] * n.x + gyt[j] * n.y);
                            out[i * nd + j] += w * (-jump_w * flux_phi - jump_phi * flux_w +
                                                    pen * jump_w * jump_phi);
                        }
                    }
                }
            }
        }
        const int el[2] = {face.left, face.right};
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t)
                a.add_block(static_cast<std::size_t>(el[s]) * nd, el[t] * nd, nd, nd,
                            blk.data() + (s * 2 + t) * nd * nd);
    }
    return a;
}

SparseMatrix assemble_boundary_mass(const DgSpace& space, const FacePredicate& subset) {
    const Mesh& mesh = space.mesh();
    SparseMatrix b = space.zero_matrix();
    const FaceTable& ft = space.face_table(space.form_quadrature_degree());
    const int nd = ft.num_dofs;
    std::vector<double> local(nd * nd);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (!face.is_boundary() || !subset(face)) continue;
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < ft.points_per_face; ++q) {
            const std::size_t idx = ft.index(f, q);
            const double* phi = ft.values[0].data() + idx * nd;
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j) local[i * nd + j] += ft.weights[idx] * phi[i] * phi[j];
        }
        b.add_block(static_cast<std::size_t>(face.left) * nd, face.left * nd, nd, nd, local.data());
    }
    return b;
}

SparseMatrix assemble_upwind(const DgSpace& space, Vec2 v) {
    const Mesh& mesh = space.mesh();
    SparseMatrix b = space.zero_matrix();
    if (v.x == 0.0 && v.y == 0.0) return b;
    const Vec2 cv = mesh.classified_velocity();
    if (cv.x != v.x || cv.y != v.y) {
        throw ConfigError("assemble_upwind: mesh boundary is not classified for this velocity");
    }
    const int qd = space.form_quadrature_degree();
    const VolumeTable& vt = space.volume_table(qd);
    const int nd = vt.num_dofs;
    std::vector<double> local(nd * nd);

    // -int_K phi_j (v . grad phi_i)
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        std::fill(local.begin(), local.end(), 0.0);
        const double det = space.geometry(k).det;
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            const double w = vt.rule->weights[q] * det;
            const double* phi = vt.row(q);
            for (int i = 0; i < nd; ++i) {
                const Vec2 g = space.physical_gradient(k, vt.dxi[q * nd + i], vt.deta[q * nd + i]);
                const double vg = v.x * g.x + v.y * g.y;
                for (int j = 0; j < nd; ++j) local[i * nd + j] -= w * phi[j] * vg;
            }
        }
        b.add_block(k * nd, static_cast<int>(k * nd), nd, nd, local.data());
    }

    const FaceTable& ft = space.face_table(qd);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        const double vn = dot(v, face.normal);
        if (face.is_boundary()) {
            if (face.tag != BoundaryTag::Outflow) continue;
            std::fill(local.begin(), local.end(), 0.0);
            for (int q = 0; q < ft.points_per_face; ++q) {
                const std::size_t idx = ft.index(f, q);
                const double* phi = ft.values[0].data() + idx * nd;
                for (int i = 0; i < nd; ++i)
                    for (int j = 0; j < nd; ++j) local[i * nd + j] += ft.weights[idx] * vn * phi[i] * phi[j];
            }
            b.add_block(static_cast<std::size_t>(face.left) * nd, face.left * nd, nd, nd, local.data());
            continue;
        }
        // int_F phi_up (v.n_F) [w]
        const int up = vn >= 0.0 ? 0 : 1;
        const int up_elem = up == 0 ? face.left : face.right;
        const int el[2] = {face.left, face.right};
        const double sign[2] = {1.0, -1.0};
        for (int s = 0; s < 2; ++s) {
            std::fill(local.begin(), local.end(), 0.0);
            for (int q = 0; q < ft.points_per_face; ++q) {
                const std::size_t idx = ft.index(f, q);
                const double* phi_w = ft.values[s].data() + idx * nd;
                const double* phi_u = ft.values[up].data() + idx * nd;
                const double w = ft.weights[idx] * vn * sign[s];
                for (int i = 0; i < nd; ++i)
                    for (int j = 0; j < nd; ++j) local[i * nd + j] += w * phi_w[i] * phi_u[j];
            }
            b.add_block(static_cast<std::size_t>(el[s]) * nd, up_elem * nd, nd, nd, local.data());
        }
    }
    return b;
}

SparseMatrix assemble_dg_seminorm(const DgSpace& space) {
    // Unit diffusion, no consistency terms, unit jump weight 1/h_F.
    const Mesh& mesh = space.mesh();
    SparseMatrix g = space.zero_matrix();
    const int qd = space.form_quadrature_degree();
    const VolumeTable& vt = space.volume_table(qd);
    const int nd = vt.num_dofs;
    std::vector<double> local(nd * nd), gx(nd), gy(nd);
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        std::fill(local.begin(), local.end(), 0.0);
        const double det = space.geometry(k).det;
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            const double w = vt.rule->weights[q] * det;
            for (int i = 0; i < nd; ++i) {
                const Vec2 gr = space.physical_gradient(k, vt.dxi[q * nd + i], vt.deta[q * nd + i]);
                gx[i] = gr.x;
                gy[i] = gr.y;
            }
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j) local[i * nd + j] += w * (gx[i] * gx[j] + gy[i] * gy[j]);
        }
        g.add_block(k * nd, static_cast<int>(k * nd), nd, nd, local.data());
    }
    const FaceTable& ft = space.face_table(qd);
    std::vector<double> blk(nd * nd);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (face.is_boundary()) continue;
        const int el[2] = {face.left, face.right};
        const double sign[2] = {1.0, -1.0};
        for (int s = 0; s < 2; ++s) {
            for (int t = 0; t < 2; ++t) {
                std::fill(blk.begin(), blk.end(), 0.0);
                for (int q = 0; q < ft.points_per_face; ++q) {
                    const std::size_t idx = ft.index(f, q);
                    const double w = ft.weights[idx] * sign[s] * sign[t] / face.length;
                    const double* ps = ft.values[s].data() + idx * nd;
                    const double* pt = ft.values[t].data() + idx * nd;
                    for (int i = 0; i < nd; ++i)
                        for (int j = 0; j < nd; ++j) blk[i * nd + j] += w * ps[i] * pt[j];
                }
                g.add_block(static_cast<std::size_t>(el[s]) * nd, el[t] * nd, nd, nd, blk.data());
            }
        }
    }
    return g;
}

std::vector<double> assemble_load(const DgSpace& space, const SourceFn& f, double t) {
    std::vector<double> out(space.num_dofs(), 0.0);
    const VolumeTable& vt = space.volume_table(space.load_quadrature_degree());
    const int nd = vt.num_dofs;
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        const double det = space.geometry(k).det;
        double* dst = out.data() + k * nd;
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            const double fv = f(space.to_physical(k, vt.rule->points[q]), t);
            const double w = vt.rule->weights[q] * det * fv;
            const double* phi = vt.row(q);
            for (int i = 0; i < nd; ++i) dst[i] += w * phi[i];
        }
    }
    return out;
}

std::vector<double> assemble_boundary_load(const DgSpace& space, const BoundaryFn& g,
                                           const FacePredicate& subset,
                                           std::optional<Vec2> velocity, double t) {
    std::vector<double> out(space.num_dofs(), 0.0);
    const Mesh& mesh = space.mesh();
    const FaceTable& ft = space.face_table(space.load_quadrature_degree());
    const int nd = ft.num_dofs;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (!face.is_boundary() || !subset(face)) continue;
        const double vn = velocity ? dot(*velocity, face.normal) : 1.0;
        double* dst = out.data() + static_cast<std::size_t>(face.left) * nd;
        for (int q = 0; q < ft.points_per_face; ++q) {
            const std::size_t idx = ft.index(f, q);
            const double w = ft.weights[idx] * vn * g(ft.points[idx], face.normal, t);
            const double* phi = ft.values[0].data() + idx * nd;
            for (int i = 0; i < nd; ++i) dst[i] += w * phi[i];
        }
    }
    return out;
}

void PrecomputedLoad::add_term(TimeFn time, std::vector<double> vector) {
    if (!terms_.empty() && vector.size() != terms_.front().second.size()) {
        throw ConfigError("precomputed load terms differ in size");
    }
    terms_.emplace_back(std::move(time), std::move(vector));
}

void PrecomputedLoad::add_to(std::span<double> out, double t, double scale) const {
    for (const auto& [a, b] : terms_) {
        if (b.size() != out.size()) throw ConfigError("precomputed load size mismatch");
        const double s = scale * a(t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
    }
}

std::vector<double> assemble_westervelt_quadratic(const FieldVector& pdot) {
    const DgSpace& space = pdot.space();
    std::vector<double> out(space.num_dofs(), 0.0);
    // N_i = det * sum_{l,m} v_l v_m int_ref phi_l phi_m phi_i, exact.
    const int nd = space.dofs_per_element();
    const auto& tref = space.reference_triple();
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        const double det = space.geometry(k).det;
        const auto v = pdot.block(k);
        double* dst = out.data() + k * nd;
        for (int l = 0; l < nd; ++l) {
            const double* t = tref.data() + l * nd * nd;
            for (int m = 0; m < nd; ++m) {
                const double w = det * v[l] * v[m];
                for (int i = 0; i < nd; ++i) dst[i] += w * t[m * nd + i];
            }
        }
    }
    return out;
}

}  // namespace wdg
