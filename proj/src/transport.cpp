#include "wdg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "wdg/error.hpp"

namespace wdg {

Bounds bounds_monitor(const FieldVector& u) {
    Bounds b{u.values().at(0), u.values().at(0)};
    for (double v : u.values()) {
        b.min = std::min(b.min, v);
        b.max = std::max(b.max, v);
    }
    const DgSpace& space = u.space();
    const VolumeTable& vt = space.volume_table(space.load_quadrature_degree());
    const int nd = vt.num_dofs;
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        const auto c = u.block(k);
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            const double* phi = vt.row(q);
            double v = 0.0;
            for (int i = 0; i < nd; ++i) v += c[i] * phi[i];
            b.min = std::min(b.min, v);
            b.max = std::max(b.max, v);
        }
    }
    return b;
}

double total_mass(const FieldVector& u) {
    const DgSpace& space = u.space();
    const VolumeTable& vt = space.volume_table(space.form_quadrature_degree());
    const int nd = vt.num_dofs;
    double m = 0.0;
    for (std::size_t k = 0; k < space.mesh().num_elements(); ++k) {
        const auto c = u.block(k);
        const double det = space.geometry(k).det;
        for (std::size_t q = 0; q < vt.num_points(); ++q) {
            const double* phi = vt.row(q);
            double v = 0.0;
            for (int i = 0; i < nd; ++i) v += c[i] * phi[i];
            m += vt.rule->weights[q] * det * v;
        }
    }
    return m;
}

SolverSpec TransportSolver::default_solver() {
    SolverSpec s;
    s.method = SolverMethod::Iterative;
    s.symmetric = false;
    return s;
}

TransportSolver::TransportSolver(const DgSpace& space, TransportParams params, SolverSpec solver,
                                 double penalty_factor)
    : space_(&space), params_(params), solver_(solver), penalty_factor_(penalty_factor) {
    params_.validate();
    if (!(penalty_factor_ > 1.0)) throw ConfigError("transport penalty factor must exceed 1");
    if (solver_.method == SolverMethod::Iterative && solver_.block_size <= 1) {
        solver_.block_size = space.dofs_per_element();
    }
    solver_.validate();
    ctr_sq_ = measure_trace_constant_sq(space);
    m_ = assemble_mass(space, CoefficientField::constant(1.0));
    upw_ = assemble_upwind(space, params_.v);
}

TransportState TransportSolver::init_state(const PointFn& u0, double t0) const {
    return {t0, interpolate(*space_, u0)};
}

TransportState TransportSolver::init_state(FieldVector u0, double t0) const { return {t0, std::move(u0)}; }

TransportStepInfo TransportSolver::backward_euler_step(TransportState& state, const FieldVector* pressure,
                                                       double dt, const TransportSources& src) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    const double t1 = state.t + dt;
    const bool constant = pressure == nullptr || params_.d1 == 0.0;
    const CoefficientField d =
        constant ? CoefficientField::constant(params_.d0)
                 : CoefficientField::pressure_diffusion(*pressure, params_.d0, params_.d1, params_.abs_pressure);

    TransportStepInfo info;
    const CoefficientRange range =
        constant ? CoefficientRange{params_.d0, params_.d0} : coefficient_range(*space_, d);
    info.d_min = range.min;
    info.d_max = range.max;
    if (!(range.min > 0.0)) {
        std::ostringstream os;
        os << "diffusion coefficient not positive at t = " << t1 << ": min D = " << range.min;
        throw ModelError(os.str());
    }
    const PenaltySpec penalty{1.0, penalty_factor_ * coercivity_threshold(ctr_sq_, range.min, range.max)};
    info.penalty = penalty.sigma * penalty.eta;

    SparseMatrix sys = m_;
    if (constant) {
        if (!constant_sip_ || constant_sip_penalty_ != info.penalty) {
            constant_sip_ = assemble_sip(*space_, d, penalty);
            constant_sip_penalty_ = info.penalty;
        }
        sys.add_scaled(dt, *constant_sip_);
    } else {
        sys.add_scaled(dt, assemble_sip(*space_, d, penalty));
    }
    sys.add_scaled(dt, upw_);

    std::vector<double> rhs(space_->num_dofs(), 0.0);
    if (src.f) rhs = assemble_load(*space_, src.f, t1);
    if (src.g_in) {
        const auto g = assemble_boundary_load(*space_, src.g_in, boundary_inflow(), params_.v, t1);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= g[i];
    }
    src.load.add_to(rhs, t1);
    for (double& r : rhs) r *= dt;
    m_.multiply_add(1.0, state.u.values(), rhs);

    info.solver_iterations = solve(sys, rhs, state.u.values(), solver_).iterations;
    state.t = t1;
    return info;
}

CoupledStepInfo coupled_step(AcousticSolver& acoustics, AcousticState& pressure, TransportSolver& transport,
                             TransportState& concentration, double dt, const AcousticSources& acoustic_src,
                             const TransportSources& transport_src) {
    if (std::abs(pressure.t - concentration.t) > 1e-12 * std::max(1.0, std::abs(pressure.t))) {
        throw ConfigError("coupled step: acoustic and transport states are at different times");
    }
    CoupledStepInfo info;
    info.acoustic = acoustics.newmark_step(pressure, dt, acoustic_src);
    info.transport = transport.backward_euler_step(concentration, &pressure.p, dt, transport_src);
    // Keep both clocks identical to avoid drift from separate accumulation.
    concentration.t = pressure.t;
    return info;
}

void write_transport_log_header(std::ostream& os, bool with_errors) {
    os << "t,u_min,u_max,mass";
    if (with_errors) os << ",l2_u,dg_u";
    os << '\n';
}

void write_transport_log_row(std::ostream& os, double t, const Bounds& b, double mass, const ErrorNorms* e) {
    os << t << ',' << b.min << ',' << b.max << ',' << mass;
    if (e) os << ',' << e->l2 << ',' << e->dg;
    os << '\n';
}

}  // namespace wdg
