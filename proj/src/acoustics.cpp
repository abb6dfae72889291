#include "wdg/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "wdg/error.hpp"

namespace wdg {

double max_abs_kappa_p(const FieldVector& p, double kappa) {
    if (kappa == 0.0) return 0.0;
    const DgSpace& space = p.space();
    // Nodal basis: the coefficients are the lattice-node values.
    double m = 0.0;
    for (double v : p.values()) m = std::max(m, std::abs(v));
    const VolumeTable& vt = space.volume_table(space.form_quadrature_degree());
    const int nd = vt.num_dofs;
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        const auto c = p.block(k);
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            const double* phi = vt.row(q);
            double v = 0.0;
            for (int i = 0; i < nd; ++i) v += c[i] * phi[i];
            m = std::max(m, std::abs(v));
        }
    }
    return std::abs(kappa) * m;
}

double check_nondegenerate(const FieldVector& p, double kappa, double t) {
    const double m = max_abs_kappa_p(p, kappa);
    if (!(m < 1.0)) {
        std::ostringstream os;
        os << "non-degeneracy violated at t = " << t << ": max |kappa p| = " << m;
        throw ModelError(os.str());
    }
    return m;
}

SolverSpec AcousticSolver::default_solver(int dofs_per_element) {
    SolverSpec s;
    s.method = SolverMethod::Iterative;
    s.symmetric = true;
    s.block_size = std::max(1, dofs_per_element);
    return s;
}

AcousticSolver::AcousticSolver(const DgSpace& space, AcousticParams params, NewmarkSpec newmark,
                               std::optional<PenaltySpec> penalty, SolverSpec solver)
    : space_(&space),
      params_(params),
      newmark_(newmark),
      penalty_(penalty.value_or(PenaltySpec::pressure_default(space.degree()))),
      solver_(solver) {
    params_.validate();
    newmark_.validate();
    if (solver_.method == SolverMethod::Iterative && solver_.block_size <= 1) {
        solver_.block_size = space.dofs_per_element();
    }
    solver_.validate();
    a_ = assemble_sip(space, CoefficientField::constant(1.0), penalty_);
    b_ = assemble_boundary_mass(space, boundary_all());
    m_ = assemble_mass(space, CoefficientField::constant(1.0));
}

std::vector<double> AcousticSolver::rhs_sources(const AcousticSources& src, double t) const {
    std::vector<double> r(space_->num_dofs(), 0.0);
    if (src.f) r = assemble_load(*space_, src.f, t);
    if (src.g_abs) {
        const auto g = assemble_boundary_load(*space_, src.g_abs, boundary_all(), std::nullopt, t);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += g[i];
    }
    src.load.add_to(r, t);
    return r;
}

AcousticState AcousticSolver::init_state(const PointFn& p0, const PointFn& p1,
                                         const AcousticSources& src, double t0) const {
    return init_state(interpolate(*space_, p0), interpolate(*space_, p1), src, t0);
}

AcousticState AcousticSolver::init_state(FieldVector p0, FieldVector p1, const AcousticSources& src,
                                         double t0) const {
    AcousticState s{t0, std::move(p0), std::move(p1), FieldVector(*space_)};
    check_nondegenerate(s.p, params_.kappa, t0);
    const double c2 = params_.c * params_.c;
    std::vector<double> rhs = rhs_sources(src, t0);
    a_.multiply_add(-c2, s.p.values(), rhs);
    a_.multiply_add(-params_.beta, s.pdot.values(), rhs);
    b_.multiply_add(-params_.alpha, s.pdot.values(), rhs);
    if (params_.kappa != 0.0) {
        const auto n = assemble_westervelt_quadratic(s.pdot);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= params_.kappa * n[i];
    }
    const SparseMatrix lambda = params_.kappa == 0.0
                                    ? m_
                                    : assemble_mass(*space_, CoefficientField::westervelt_mass(s.p, params_.kappa));
    solve(lambda, rhs, s.pddot.values(), solver_);
    return s;
}

NewmarkStepInfo AcousticSolver::newmark_step(AcousticState& state, double dt, const AcousticSources& src) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    const double bn = newmark_.beta, gn = newmark_.gamma;
    const double c2 = params_.c * params_.c;
    if (dt != k_dt_step_) {
        k_dt_ = space_->zero_matrix();
        k_dt_.add_scaled(gn * dt * params_.beta + bn * dt * dt * c2, a_);
        k_dt_.add_scaled(gn * dt * params_.alpha, b_);
        k_dt_step_ = dt;
    }
    const std::size_t n = space_->num_dofs();
    const auto& p = state.p.values();
    const auto& v = state.pdot.values();
    const auto& acc = state.pddot.values();
    std::vector<double> ps(n), vs(n);
    for (std::size_t i = 0; i < n; ++i) {
        ps[i] = p[i] + dt * v[i] + 0.5 * dt * dt * (1.0 - 2.0 * bn) * acc[i];
        vs[i] = v[i] + dt * (1.0 - gn) * acc[i];
    }
    const double t1 = state.t + dt;
    std::vector<double> base = rhs_sources(src, t1);
    a_.multiply_add(-c2, ps, base);
    a_.multiply_add(-params_.beta, vs, base);
    b_.multiply_add(-params_.alpha, vs, base);

    const bool linear = params_.kappa == 0.0;
    FieldVector pk(*space_), vk(*space_);
    std::vector<double> a = acc, a_new = acc, rhs(n);
    SparseMatrix lhs;
    if (linear) {
        lhs = m_;
        lhs.add_scaled(1.0, k_dt_);
    }
    NewmarkStepInfo info;
    bool converged = false;
    double update = 0.0;
    for (int it = 1; it <= newmark_.max_iter; ++it) {
        info.iterations = it;
        rhs = base;
        if (!linear) {
            for (std::size_t i = 0; i < n; ++i) {
                pk.values()[i] = ps[i] + bn * dt * dt * a[i];
                vk.values()[i] = vs[i] + gn * dt * a[i];
            }
            lhs = assemble_mass(*space_, CoefficientField::westervelt_mass(pk, params_.kappa));
            lhs.add_scaled(1.0, k_dt_);
            const auto quad = assemble_westervelt_quadratic(vk);
            for (std::size_t i = 0; i < n; ++i) rhs[i] -= params_.kappa * quad[i];
        }
        const SolveInfo si = solve(lhs, rhs, a_new, solver_);
        info.solver_iterations += si.iterations;
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += (a_new[i] - a[i]) * (a_new[i] - a[i]);
        update = std::sqrt(diff);
        a = a_new;
        // Linear system: one solve is exact up to the solver tolerance.
        if (linear || update <= newmark_.tolerance * std::max(1.0, norm2(a))) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "fixed-point iteration did not converge at t = " << t1 << " after "
           << newmark_.max_iter << " iterations";
        throw SolverError(os.str(), update);
    }
    auto& pn = state.p.values();
    auto& vn = state.pdot.values();
    for (std::size_t i = 0; i < n; ++i) {
        pn[i] = ps[i] + bn * dt * dt * a[i];
        vn[i] = vs[i] + gn * dt * a[i];
    }
    state.pddot.values() = a;
    state.t = t1;
    info.max_kappa_p = check_nondegenerate(state.p, params_.kappa, t1);
    return info;
}

double AcousticSolver::energy(const AcousticState& state) const {
    const double c2 = params_.c * params_.c;
    return 0.5 * bilinear(m_, state.pdot.values(), state.pdot.values()) +
           0.5 * c2 * bilinear(a_, state.p.values(), state.p.values());
}

TripleNormTracker::TripleNormTracker(const DgSpace& space, const ExactSolution& exact, double beta, Mode mode)
    : exact_(exact), beta_(beta), mode_(mode), norms_(space) {}

TripleNormComponents TripleNormTracker::update(const AcousticState& state) {
    ErrorNorms ep, ev;
    if (mode_ == Mode::Total) {
        ep = error_norms(state.p, exact_.p, exact_.grad_p, state.t);
        ev = error_norms(state.pdot, exact_.p_t, exact_.grad_p_t, state.t);
    } else {
        ep = norms_.discrete_error(state.p, exact_.p, state.t);
        ev = norms_.discrete_error(state.pdot, exact_.p_t, state.t);
    }
    dg_pdot_.add(state.t, ev.dg);
    boundary_pdot_.add(state.t, ev.boundary);
    TripleNormComponents c;
    c.l2_pdot = ev.l2;
    c.dg_p = ep.dg;
    c.boundary_p = ep.boundary;
    c.int_beta_dg_pdot = beta_ * dg_pdot_.integral_sq_trapezoid();
    c.int_boundary_pdot = boundary_pdot_.integral_sq_trapezoid();
    return c;
}

void write_acoustic_log_header(std::ostream& os, bool with_errors) {
    os << "t,fixed_point_iters,max_kappa_p,energy";
    if (with_errors) os << ",l2_pdot,dg_p,boundary_p,int_beta_dg_pdot,int_boundary_pdot";
    os << '\n';
}

void write_acoustic_log_row(std::ostream& os, double t, const NewmarkStepInfo& info, double energy,
                            const TripleNormComponents* e) {
    os << t << ',' << info.iterations << ',' << info.max_kappa_p << ',' << energy;
    if (e) {
        os << ',' << e->l2_pdot << ',' << e->dg_p << ',' << e->boundary_p << ',' << e->int_beta_dg_pdot
           << ',' << e->int_boundary_pdot;
    }
    os << '\n';
}

}  // namespace wdg
