#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wdg/forms.hpp"
#include "wdg/params.hpp"

namespace wdg {

using ScalarField = std::function<double(Point, double)>;
using VectorField = std::function<Vec2(Point, double)>;

/// Exact pressure and concentration with the derivatives the forcing terms need.
struct ExactSolution {
    ScalarField p, p_t, p_tt;
    VectorField grad_p, grad_p_t;
    ScalarField lap_p, lap_p_t;
    ScalarField u, u_t;
    VectorField grad_u;
    ScalarField lap_u;

    /// Compares central differences in time with p_t, p_tt and u_t at random
    /// points of `box` x [0, 1]. Throws InternalError when inconsistent.
    void self_check(const Rect& box) const;
};

/// p = cos(t) sin(pi x) sin(pi y / 2), u = exp(-t) cos(pi y). Self-checked.
ExactSolution academic_solution();
/// p = u = 0.
ExactSolution zero_solution();

/// f_p = (1 + kappa p) p_tt + kappa p_t^2 - c^2 lap p - beta lap p_t.
SourceFn forcing_pressure(const ExactSolution& e, const AcousticParams& a);
/// g_abs = alpha p_t + c^2 grad p.n + beta grad p_t.n.
BoundaryFn boundary_forcing_pressure(const ExactSolution& e, const AcousticParams& a);
/// f_u = u_t + v.grad u - D'(p) grad p.grad u - D(p) lap u.
SourceFn forcing_concentration(const ExactSolution& e, const TransportParams& tp);
/// g_in = u - D(p) grad u.n / (v.n). Throws ConfigError when v.n = 0.
BoundaryFn inflow_data(const ExactSolution& e, const TransportParams& tp);

struct ErrorNorms {
    double l2 = 0.0;
    /// (sum_K ||grad e||^2 + sum_{F int} ||[u^h]||^2 / h_F)^{1/2}
    double dg = 0.0;
    /// L2 norm of e over the boundary faces selected by the predicate.
    double boundary = 0.0;
};

/// Norms of e = exact - uh at time t, integrated with the space's load rule.
ErrorNorms error_norms(const FieldVector& uh, const ScalarField& exact, const VectorField& grad,
                       double t, const FacePredicate& boundary = boundary_all());

/// Norms of discrete fields through assembled Gram matrices; used for the
/// discrete error e^h = u^h - P_h u, which avoids quadrature of the closures
/// in the norms. P_h is the nodal interpolant or the L2 projection.
class DiscreteNorms {
public:
    enum class Projection { Interpolant, L2 };
    explicit DiscreteNorms(const DgSpace& space, Projection projection = Projection::L2);

    ErrorNorms of(std::span<const double> coefficients) const;
    /// P_h u(., t).
    FieldVector project(const ScalarField& exact, double t) const;
    /// Norms of u^h - P_h u(., t).
    ErrorNorms discrete_error(const FieldVector& uh, const ScalarField& exact, double t) const;

private:
    const DgSpace* space_;
    Projection projection_;
    SparseMatrix mass_, seminorm_, boundary_;
    Eigen::MatrixXd ref_mass_inverse_;
};

/// Loads of the academic solution split into time factors times fixed vectors.
/// Pressure: F + G_abs. Concentration: F_u - G_in, which requires the linear
/// diffusion law (abs_pressure = false) and a mesh classified for v.
/// Both agree with the pointwise assembly of the forcing closures.
PrecomputedLoad academic_pressure_load(const DgSpace& space, const AcousticParams& a);
PrecomputedLoad academic_transport_load(const DgSpace& space, const TransportParams& tp);

/// Streams a scalar sampled at increasing times.
class TimeAccumulator {
public:
    void add(double t, double value);

    double max() const { return max_; }
    /// (int |value|^2 dt)^{1/2} by left rectangles over the samples so far.
    double l2_left() const;
    /// int |value|^2 dt by the composite trapezoid rule.
    double integral_sq_trapezoid() const { return trap_; }
    std::size_t samples() const { return count_; }

private:
    std::size_t count_ = 0;
    double last_t_ = 0.0;
    double last_sq_ = 0.0;
    double max_ = 0.0;
    double left_ = 0.0;
    double trap_ = 0.0;
};

struct EocRow {
    double h;
    double error;
    /// NaN on the first row.
    double rate;
};

struct EocTable {
    std::string name;
    std::vector<EocRow> rows;
};

/// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i). Throws ConfigError when the
/// lengths differ, fewer than two rows are given, h is not strictly
/// decreasing or an error is not positive.
EocTable eoc(const std::vector<double>& errors, const std::vector<double>& hs,
             std::string name = "error");

/// CSV with columns h,error_name,value,rate (rate empty on first rows).
void write_eoc_csv(std::ostream& os, const std::vector<EocTable>& tables);

/// int over the selected boundary faces of uh.
double boundary_integral(const FieldVector& uh, const FacePredicate& subset);

/// delta(t_n) = (top[n] - top_ref[n]) / max_m outflow_ref[m]. Throws ModelError
/// when the denominator vanishes and ConfigError on mismatched lengths.
std::vector<double> relative_change_top(const std::vector<double>& top,
                                        const std::vector<double>& top_ref,
                                        const std::vector<double>& outflow_ref);

}  // namespace wdg
