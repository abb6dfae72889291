#pragma once

#include <iosfwd>
#include <optional>

#include "wdg/acoustics.hpp"

namespace wdg {

/// Volume source f_u and inflow datum g_in; empty means zero.
/// `load` holds an already assembled F_u - G_in contribution.
struct TransportSources {
    SourceFn f;
    BoundaryFn g_in;
    PrecomputedLoad load;
};

struct TransportState {
    double t = 0.0;
    FieldVector u;
};

struct TransportStepInfo {
    double d_min = 0.0;
    double d_max = 0.0;
    /// sigma * eta used for the diffusion form in this step.
    double penalty = 0.0;
    int solver_iterations = 0;
};

struct Bounds {
    double min;
    double max;
};

/// Extrema of u^h over lattice nodes and load quadrature points.
Bounds bounds_monitor(const FieldVector& u);

/// Backward Euler for the concentration with D evaluated from a given pressure.
/// The mesh must be classified for params.v before construction.
class TransportSolver {
public:
    /// penalty_factor multiplies the measured coercivity threshold of the
    /// current diffusion range, recomputed every step.
    TransportSolver(const DgSpace& space, TransportParams params, SolverSpec solver = default_solver(),
                    double penalty_factor = 2.0);

    /// BiCGSTAB with element-block Jacobi.
    static SolverSpec default_solver();

    const DgSpace& space() const { return *space_; }
    const TransportParams& params() const { return params_; }
    const SparseMatrix& mass() const { return m_; }
    double trace_constant_sq() const { return ctr_sq_; }

    /// u = I_h u0.
    TransportState init_state(const PointFn& u0, double t0 = 0.0) const;
    TransportState init_state(FieldVector u0, double t0 = 0.0) const;

    /// Solves [M + dt (A_D(p) + B_upw)] u^{n+1} = M u^n + dt (F_u - G_in) in place.
    /// `pressure` is p^{n+1}; nullptr means p = 0, i.e. D = D0.
    TransportStepInfo backward_euler_step(TransportState& state, const FieldVector* pressure, double dt,
                                          const TransportSources& src);

private:
    const DgSpace* space_;
    TransportParams params_;
    SolverSpec solver_;
    double penalty_factor_;
    double ctr_sq_ = 0.0;
    SparseMatrix m_, upw_;
    // A_D for constant D is step independent.
    std::optional<SparseMatrix> constant_sip_;
    double constant_sip_penalty_ = 0.0;
};

struct CoupledStepInfo {
    NewmarkStepInfo acoustic;
    TransportStepInfo transport;
};

/// Newmark step for the pressure, then backward Euler for u with D(p^{n+1}).
CoupledStepInfo coupled_step(AcousticSolver& acoustics, AcousticState& pressure,
                             TransportSolver& transport, TransportState& concentration, double dt,
                             const AcousticSources& acoustic_src, const TransportSources& transport_src);

void write_transport_log_header(std::ostream& os, bool with_errors);
void write_transport_log_row(std::ostream& os, double t, const Bounds& b, double mass,
                             const ErrorNorms* errors);

/// int_Omega u^h.
double total_mass(const FieldVector& u);

}  // namespace wdg
