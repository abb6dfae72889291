#pragma once

#include <iosfwd>
#include <optional>

#include "wdg/forms.hpp"
#include "wdg/linalg.hpp"
#include "wdg/mms.hpp"
#include "wdg/params.hpp"

namespace wdg {

/// Volume source f_p and absorbing-boundary datum g_abs; empty means zero.
/// `load` is added on top of both, for data already available as vectors.
struct AcousticSources {
    SourceFn f;
    BoundaryFn g_abs;
    PrecomputedLoad load;
};

struct AcousticState {
    double t = 0.0;
    FieldVector p;
    FieldVector pdot;
    FieldVector pddot;
};

struct NewmarkStepInfo {
    int iterations = 0;
    double max_kappa_p = 0.0;
    int solver_iterations = 0;
};

/// max |kappa p^h| over the lattice nodes and form quadrature points.
double max_abs_kappa_p(const FieldVector& p, double kappa);

/// Throws ModelError when max |kappa p^h| >= 1; returns the maximum otherwise.
double check_nondegenerate(const FieldVector& p, double kappa, double t);

/// SIP-dG discretisation of the Westervelt equation with absorbing boundary
/// conditions, advanced by Newmark with a fixed-point loop on the acceleration.
class AcousticSolver {
public:
    AcousticSolver(const DgSpace& space, AcousticParams params, NewmarkSpec newmark = {},
                   std::optional<PenaltySpec> penalty = std::nullopt, SolverSpec solver = default_solver(0));

    /// CG with block-Jacobi sized to the element blocks of `space`.
    static SolverSpec default_solver(int dofs_per_element);

    const DgSpace& space() const { return *space_; }
    const AcousticParams& params() const { return params_; }
    const PenaltySpec& penalty() const { return penalty_; }
    const SparseMatrix& stiffness() const { return a_; }
    const SparseMatrix& boundary_mass() const { return b_; }
    const SparseMatrix& mass() const { return m_; }

    /// p = I_h p0, pdot = I_h p1, pddot from the semi-discrete equation at t0.
    AcousticState init_state(const PointFn& p0, const PointFn& p1, const AcousticSources& src,
                             double t0 = 0.0) const;
    /// Same from given discrete initial fields.
    AcousticState init_state(FieldVector p0, FieldVector p1, const AcousticSources& src, double t0 = 0.0) const;

    /// Advances `state` by dt in place.
    NewmarkStepInfo newmark_step(AcousticState& state, double dt, const AcousticSources& src);

    /// 1/2 pdot^T M pdot + 1/2 c^2 p^T A p with the constant mass M.
    double energy(const AcousticState& state) const;

private:
    const DgSpace* space_;
    AcousticParams params_;
    NewmarkSpec newmark_;
    PenaltySpec penalty_;
    SolverSpec solver_;
    SparseMatrix a_, b_, m_;
    // (gamma dt beta + beta_N dt^2 c^2) A + gamma dt alpha B, rebuilt when dt changes.
    SparseMatrix k_dt_;
    double k_dt_step_ = -1.0;

    std::vector<double> rhs_sources(const AcousticSources& src, double t) const;
};

/// Instantaneous error components of Theorem-type energy norms.
struct TripleNormComponents {
    double l2_pdot = 0.0;      ///< ||p_t - pdot^h||
    double dg_p = 0.0;         ///< |p - p^h|_dG
    double boundary_p = 0.0;   ///< ||p - p^h||_Gamma
    double int_beta_dg_pdot = 0.0;   ///< int beta |p_t - pdot^h|^2_dG dt (trapezoid)
    double int_boundary_pdot = 0.0;  ///< int ||p_t - pdot^h||^2_Gamma dt (trapezoid)
};

/// Streams the pressure error of successive states against an exact solution.
/// Total mode measures p - p^h by quadrature of the exact closures; Discrete
/// mode measures e^h = p^h - P_h p, P_h the L2 projection, through Gram matrices.
class TripleNormTracker {
public:
    enum class Mode { Total, Discrete };

    TripleNormTracker(const DgSpace& space, const ExactSolution& exact, double beta, Mode mode);

    TripleNormComponents update(const AcousticState& state);

private:
    ExactSolution exact_;
    double beta_;
    Mode mode_;
    DiscreteNorms norms_;
    TimeAccumulator dg_pdot_;
    TimeAccumulator boundary_pdot_;
};

/// CSV header and row for the per-step acoustic log.
void write_acoustic_log_header(std::ostream& os, bool with_errors);
void write_acoustic_log_row(std::ostream& os, double t, const NewmarkStepInfo& info, double energy,
                            const TripleNormComponents* errors);

}  // namespace wdg
