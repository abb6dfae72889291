#include "wdg/mms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "wdg/error.hpp"

namespace wdg {

namespace {

constexpr double kPi = std::numbers::pi;

void check_close(const char* what, double approx, double exact, Point x, double t) {
    if (std::abs(approx - exact) > 1e-6 * (1.0 + std::abs(exact))) {
        std::ostringstream os;
        os << "exact solution inconsistent: " << what << " at (" << x.x << ", " << x.y << ", " << t
           << "): finite difference " << approx << " vs closure " << exact;
        throw InternalError(os.str());
    }
}

}  // namespace

void ExactSolution::self_check(const Rect& box) const {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> ux(box.x0, box.x1), uy(box.y0, box.y1), ut(0.0, 1.0);
    const double d = 1e-4;
    for (int s = 0; s < 20; ++s) {
        const Point x{ux(rng), uy(rng)};
        const double t = ut(rng);
        const Point ex{d, 0.0}, ey{0.0, d};
        auto dt = [&](const ScalarField& f) { return (f(x, t + d) - f(x, t - d)) / (2 * d); };
        auto lap = [&](const ScalarField& f) {
            return (f(x + ex, t) + f(x - ex, t) + f(x + ey, t) + f(x - ey, t) - 4 * f(x, t)) / (d * d);
        };
        auto grad_check = [&](const char* what, const ScalarField& f, const VectorField& g) {
            const Vec2 gv = g(x, t);
            check_close(what, (f(x + ex, t) - f(x - ex, t)) / (2 * d), gv.x, x, t);
            check_close(what, (f(x + ey, t) - f(x - ey, t)) / (2 * d), gv.y, x, t);
        };
        check_close("p_t", dt(p), p_t(x, t), x, t);
        check_close("p_tt", dt(p_t), p_tt(x, t), x, t);
        check_close("u_t", dt(u), u_t(x, t), x, t);
        grad_check("grad p", p, grad_p);
        grad_check("grad p_t", p_t, grad_p_t);
        grad_check("grad u", u, grad_u);
        // Five-point Laplacian: truncation O(d^2), rounding O(eps / d^2) ~ 1e-8.
        check_close("lap p", lap(p), lap_p(x, t), x, t);
        check_close("lap p_t", lap(p_t), lap_p_t(x, t), x, t);
        check_close("lap u", lap(u), lap_u(x, t), x, t);
    }
}

ExactSolution academic_solution() {
    ExactSolution e;
    const double a = kPi, b = kPi / 2;
    auto s = [=](Point x) { return std::sin(a * x.x) * std::sin(b * x.y); };
    auto g = [=](Point x) {
        return Vec2{a * std::cos(a * x.x) * std::sin(b * x.y), b * std::sin(a * x.x) * std::cos(b * x.y)};
    };
    const double lam = -(a * a + b * b);
    e.p = [=](Point x, double t) { return std::cos(t) * s(x); };
    e.p_t = [=](Point x, double t) { return -std::sin(t) * s(x); };
    e.p_tt = [=](Point x, double t) { return -std::cos(t) * s(x); };
    e.grad_p = [=](Point x, double t) { return std::cos(t) * g(x); };
    e.grad_p_t = [=](Point x, double t) { return -std::sin(t) * g(x); };
    e.lap_p = [=](Point x, double t) { return lam * std::cos(t) * s(x); };
    e.lap_p_t = [=](Point x, double t) { return -lam * std::sin(t) * s(x); };

    e.u = [](Point x, double t) { return std::exp(-t) * std::cos(kPi * x.y); };
    e.u_t = [](Point x, double t) { return -std::exp(-t) * std::cos(kPi * x.y); };
    e.grad_u = [](Point x, double t) { return Vec2{0.0, -kPi * std::exp(-t) * std::sin(kPi * x.y)}; };
    e.lap_u = [](Point x, double t) { return -kPi * kPi * std::exp(-t) * std::cos(kPi * x.y); };
    e.self_check({0.0, 1.0, 0.0, 2.0});
    return e;
}

ExactSolution zero_solution() {
    ExactSolution e;
    auto zs = [](Point, double) { return 0.0; };
    auto zv = [](Point, double) { return Vec2{0.0, 0.0}; };
    e.p = e.p_t = e.p_tt = e.lap_p = e.lap_p_t = e.u = e.u_t = e.lap_u = zs;
    e.grad_p = e.grad_p_t = e.grad_u = zv;
    return e;
}

SourceFn forcing_pressure(const ExactSolution& e, const AcousticParams& a) {
    return [e, a](Point x, double t) {
        const double pt = e.p_t(x, t);
        return (1.0 + a.kappa * e.p(x, t)) * e.p_tt(x, t) + a.kappa * pt * pt -
               a.c * a.c * e.lap_p(x, t) - a.beta * e.lap_p_t(x, t);
    };
}

BoundaryFn boundary_forcing_pressure(const ExactSolution& e, const AcousticParams& a) {
    return [e, a](Point x, Vec2 n, double t) {
        return a.alpha * e.p_t(x, t) + a.c * a.c * dot(e.grad_p(x, t), n) +
               a.beta * dot(e.grad_p_t(x, t), n);
    };
}

SourceFn forcing_concentration(const ExactSolution& e, const TransportParams& tp) {
    return [e, tp](Point x, double t) {
        const double p = e.p(x, t);
        const Vec2 gu = e.grad_u(x, t);
        return e.u_t(x, t) + dot(tp.v, gu) - tp.diffusion_derivative(p) * dot(e.grad_p(x, t), gu) -
               tp.diffusion(p) * e.lap_u(x, t);
    };
}

BoundaryFn inflow_data(const ExactSolution& e, const TransportParams& tp) {
    return [e, tp](Point x, Vec2 n, double t) {
        const double vn = dot(tp.v, n);
        if (vn == 0.0) throw ConfigError("inflow data requested on a face with v.n = 0");
        return e.u(x, t) - tp.diffusion(e.p(x, t)) * dot(e.grad_u(x, t), n) / vn;
    };
}

ErrorNorms error_norms(const FieldVector& uh, const ScalarField& exact, const VectorField& grad,
                       double t, const FacePredicate& boundary) {
    const DgSpace& space = uh.space();
    const Mesh& mesh = space.mesh();
    const int qd = space.load_quadrature_degree();
    const VolumeTable& vt = space.volume_table(qd);
    const int nd = vt.num_dofs;
    double l2 = 0.0, dg = 0.0, bd = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        const auto c = uh.block(k);
        const double det = space.geometry(k).det;
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            const std::size_t o = q * nd;
            double v = 0.0, gx = 0.0, gy = 0.0;
            for (int i = 0; i < nd; ++i) {
                v += c[i] * vt.values[o + i];
                gx += c[i] * vt.dxi[o + i];
                gy += c[i] * vt.deta[o + i];
            }
            const Point x = space.to_physical(k, vt.rule->points[q]);
            const Vec2 gh = space.physical_gradient(k, gx, gy);
            const Vec2 ge = grad(x, t) - gh;
            const double ev = exact(x, t) - v;
            const double w = vt.rule->weights[q] * det;
            l2 += w * ev * ev;
            dg += w * dot(ge, ge);
        }
    }
    const FaceTable& ft = space.face_table(qd);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        const auto cl = uh.block(face.left);
        if (face.is_boundary()) {
            if (!boundary(face)) continue;
            for (int q = 0; q < ft.points_per_face; ++q) {
                const std::size_t idx = ft.index(f, q);
                const double* phi = ft.values[0].data() + idx * nd;
                double v = 0.0;
                for (int i = 0; i < nd; ++i) v += cl[i] * phi[i];
                const double ev = exact(ft.points[idx], t) - v;
                bd += ft.weights[idx] * ev * ev;
            }
            continue;
        }
        const auto cr = uh.block(face.right);
        for (int q = 0; q < ft.points_per_face; ++q) {
            const std::size_t idx = ft.index(f, q);
            const double* p0 = ft.values[0].data() + idx * nd;
            const double* p1 = ft.values[1].data() + idx * nd;
            double jump = 0.0;
            for (int i = 0; i < nd; ++i) jump += cl[i] * p0[i] - cr[i] * p1[i];
            dg += ft.weights[idx] * jump * jump / face.length;
        }
    }
    return {std::sqrt(l2), std::sqrt(dg), std::sqrt(bd)};
}

DiscreteNorms::DiscreteNorms(const DgSpace& space, Projection projection)
    : space_(&space),
      projection_(projection),
      mass_(assemble_mass(space, CoefficientField::constant(1.0))),
      seminorm_(assemble_dg_seminorm(space)),
      boundary_(assemble_boundary_mass(space, boundary_all())) {
    const int nd = space.dofs_per_element();
    const Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        space.reference_mass().data(), nd, nd);
    ref_mass_inverse_ = m.inverse();
}

ErrorNorms DiscreteNorms::of(std::span<const double> e) const {
    // Clamp round-off negatives of the semidefinite forms.
    auto q = [&](const SparseMatrix& m) { return std::sqrt(std::max(0.0, bilinear(m, e, e))); };
    return {q(mass_), q(seminorm_), q(boundary_)};
}

FieldVector DiscreteNorms::project(const ScalarField& exact, double t) const {
    if (projection_ == Projection::Interpolant) return interpolate(*space_, [&](Point x) { return exact(x, t); });
    // The dG mass matrix is block diagonal with blocks |det J_K| M_ref.
    const std::vector<double> b = assemble_load(*space_, exact, t);
    FieldVector u(*space_);
    const int nd = space_->dofs_per_element();
    for (std::size_t k = 0; k < space_->mesh().num_elements(); ++k) {
        const Eigen::Map<const Eigen::VectorXd> bk(b.data() + k * nd, nd);
        Eigen::Map<Eigen::VectorXd> uk(u.values().data() + k * nd, nd);
        uk = ref_mass_inverse_ * bk / std::abs(space_->geometry(k).det);
    }
    return u;
}

ErrorNorms DiscreteNorms::discrete_error(const FieldVector& uh, const ScalarField& exact, double t) const {
    FieldVector e = project(exact, t);
    auto& v = e.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = uh.values()[i] - v[i];
    return of(v);
}

namespace {

std::vector<double> volume_vector(const DgSpace& space, const PointFn& s) {
    return assemble_load(space, [&](Point x, double) { return s(x); }, 0.0);
}

std::vector<double> boundary_vector(const DgSpace& space, const std::function<double(Point, Vec2)>& s,
                                    const FacePredicate& subset) {
    return assemble_boundary_load(space, [&](Point x, Vec2 n, double) { return s(x, n); }, subset,
                                  std::nullopt, 0.0);
}

}  // namespace

// p = T(t) S(x) with T = cos, S = sin(pi x) sin(pi y / 2), lap S = -lam S:
//   f_p = (T'' + lam (c^2 T + beta T')) S - kappa cos(2t) S^2
//   g_abs = alpha T' S + (c^2 T + beta T') grad S . n
PrecomputedLoad academic_pressure_load(const DgSpace& space, const AcousticParams& a) {
    const double lam = 1.25 * kPi * kPi;
    auto s = [](Point x) { return std::sin(kPi * x.x) * std::sin(0.5 * kPi * x.y); };
    auto ds_n = [](Point x, Vec2 n) {
        return kPi * std::cos(kPi * x.x) * std::sin(0.5 * kPi * x.y) * n.x +
               0.5 * kPi * std::sin(kPi * x.x) * std::cos(0.5 * kPi * x.y) * n.y;
    };
    const double c2 = a.c * a.c, beta = a.beta, kappa = a.kappa, alpha = a.alpha;
    PrecomputedLoad load;
    load.add_term([=](double t) { return -std::cos(t) + lam * (c2 * std::cos(t) - beta * std::sin(t)); },
                  volume_vector(space, s));
    load.add_term([=](double t) { return -kappa * std::cos(2 * t); },
                  volume_vector(space, [&](Point x) { return s(x) * s(x); }));
    load.add_term([=](double t) { return -alpha * std::sin(t); },
                  boundary_vector(space, [&](Point x, Vec2) { return s(x); }, boundary_all()));
    load.add_term([=](double t) { return c2 * std::cos(t) - beta * std::sin(t); },
                  boundary_vector(space, ds_n, boundary_all()));
    return load;
}

// u = E(t) C(y) with E = exp(-t), C = cos(pi y); p = T S as above, D = D0 (1 + D1 p):
//   f_u = E ((D0 pi^2 - 1) C + v.grad C) + T E D0 D1 (pi^2 S C - grad S.grad C)
//   g_in v.n = E (C v.n - D0 grad C.n) - T E D0 D1 S grad C.n
PrecomputedLoad academic_transport_load(const DgSpace& space, const TransportParams& tp) {
    if (tp.abs_pressure) throw ConfigError("separable transport load needs the linear diffusion law");
    const double pi2 = kPi * kPi, d0 = tp.d0, d1 = tp.d1;
    const Vec2 v = tp.v;
    auto s = [](Point x) { return std::sin(kPi * x.x) * std::sin(0.5 * kPi * x.y); };
    auto gs = [](Point x) {
        return Vec2{kPi * std::cos(kPi * x.x) * std::sin(0.5 * kPi * x.y),
                    0.5 * kPi * std::sin(kPi * x.x) * std::cos(0.5 * kPi * x.y)};
    };
    auto c = [](Point x) { return std::cos(kPi * x.y); };
    auto gc = [](Point x) { return Vec2{0.0, -kPi * std::sin(kPi * x.y)}; };
    auto e = [](double t) { return std::exp(-t); };
    auto te = [](double t) { return std::cos(t) * std::exp(-t); };
    PrecomputedLoad load;
    load.add_term(e, volume_vector(space, [&](Point x) { return (d0 * pi2 - 1.0) * c(x) + dot(v, gc(x)); }));
    load.add_term(te, volume_vector(space, [&](Point x) {
                      return d0 * d1 * (pi2 * s(x) * c(x) - dot(gs(x), gc(x)));
                  }));
    load.add_term([=](double t) { return -e(t); },
                  boundary_vector(space, [&](Point x, Vec2 n) { return c(x) * dot(v, n) - d0 * dot(gc(x), n); },
                                  boundary_inflow()));
    load.add_term([=](double t) { return te(t); },
                  boundary_vector(space, [&](Point x, Vec2 n) { return d0 * d1 * s(x) * dot(gc(x), n); },
                                  boundary_inflow()));
    return load;
}

void TimeAccumulator::add(double t, double value) {
    const double sq = value * value;
    if (count_ > 0) {
        const double dt = t - last_t_;
        if (!(dt > 0.0)) throw ConfigError("time samples must be strictly increasing");
        left_ += dt * last_sq_;
        trap_ += 0.5 * dt * (last_sq_ + sq);
    }
    max_ = count_ == 0 ? std::abs(value) : std::max(max_, std::abs(value));
    last_t_ = t;
    last_sq_ = sq;
    ++count_;
}

double TimeAccumulator::l2_left() const { return std::sqrt(left_); }

EocTable eoc(const std::vector<double>& errors, const std::vector<double>& hs, std::string name) {
    if (errors.size() != hs.size()) throw ConfigError("eoc: errors and h differ in length");
    if (errors.size() < 2) throw ConfigError("eoc: need at least two levels");
    EocTable table{std::move(name), {}};
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0)) throw ConfigError("eoc: errors must be positive");
        double rate = std::numeric_limits<double>::quiet_NaN();
        if (i > 0) {
            if (!(hs[i] < hs[i - 1])) throw ConfigError("eoc: h must be strictly decreasing");
            rate = std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]);
        }
        table.rows.push_back({hs[i], errors[i], rate});
    }
    return table;
}

void write_eoc_csv(std::ostream& os, const std::vector<EocTable>& tables) {
    const auto old = os.precision(15);
    os << "h,error_name,value,rate\n";
    for (const auto& tab : tables) {
        for (const auto& r : tab.rows) {
            os << r.h << ',' << tab.name << ',' << r.error << ',';
            if (!std::isnan(r.rate)) os << r.rate;
            os << '\n';
        }
    }
    os.precision(old);
}

double boundary_integral(const FieldVector& uh, const FacePredicate& subset) {
    const DgSpace& space = uh.space();
    const Mesh& mesh = space.mesh();
    const FaceTable& ft = space.face_table(space.load_quadrature_degree());
    const int nd = ft.num_dofs;
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (!face.is_boundary() || !subset(face)) continue;
        const auto c = uh.block(face.left);
        for (int q = 0; q < ft.points_per_face; ++q) {
            const std::size_t idx = ft.index(f, q);
            const double* phi = ft.values[0].data() + idx * nd;
            double v = 0.0;
            for (int i = 0; i < nd; ++i) v += c[i] * phi[i];
            total += ft.weights[idx] * v;
        }
    }
    return total;
}

std::vector<double> relative_change_top(const std::vector<double>& top,
                                        const std::vector<double>& top_ref,
                                        const std::vector<double>& outflow_ref) {
    if (top.size() != top_ref.size() || top.size() != outflow_ref.size()) {
        throw ConfigError("relative change: series lengths differ");
    }
    double denom = 0.0;
    for (double v : outflow_ref) denom = std::max(denom, v);
    if (!(denom > 0.0)) throw ModelError("relative change: reference outflow integral is never positive");
    std::vector<double> out(top.size());
    for (std::size_t i = 0; i < top.size(); ++i) out[i] = (top[i] - top_ref[i]) / denom;
    return out;
}

}  // namespace wdg
