#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wdg/linalg.hpp"
#include "wdg/space.hpp"

namespace wdg {

/// Space-time source f(x, t).
using SourceFn = std::function<double(Point, double)>;
/// Boundary datum g(x, n, t) with n the outward unit normal.
using BoundaryFn = std::function<double(Point, Vec2, double)>;
using FacePredicate = std::function<bool(const Face&)>;

FacePredicate boundary_all();
FacePredicate boundary_none();
FacePredicate boundary_inflow();
FacePredicate boundary_outflow();
FacePredicate boundary_side(Side side);
/// Boundary faces with v.n > 0, i.e. the outflow tag without tangential faces.
FacePredicate boundary_strict_outflow(Vec2 v);

/// Scalar coefficient evaluable at volume and face quadrature points:
///   constant c, pointwise closure g(x), or scale * (1 + factor * h(p^h))
/// with h the identity or |.| and p^h a discrete field.
class CoefficientField {
public:
    static CoefficientField constant(double c);
    static CoefficientField pointwise(PointFn fn);
    /// 1 + kappa * p^h
    static CoefficientField westervelt_mass(const FieldVector& p, double kappa);
    /// D0 * (1 + D1 * p^h), or D0 * (1 + D1 * |p^h|) when `absolute`.
    static CoefficientField pressure_diffusion(const FieldVector& p, double d0, double d1,
                                               bool absolute);

    bool is_constant() const { return kind_ == Kind::Constant; }
    /// scale * (1 + factor * p^h) without |.|: a member of the discrete space.
    bool is_polynomial() const { return kind_ == Kind::Field && !absolute_; }
    /// Constant value, or the scale of a field-based coefficient.
    double constant_value() const { return scale_; }
    double factor() const { return factor_; }
    const FieldVector* field() const { return field_; }

    /// Values at the points of `tab` on element k.
    void volume_values(const DgSpace& space, std::size_t k, const VolumeTable& tab,
                       std::span<double> out) const;
    /// Values of the side-`side` trace at the points of face f.
    void face_values(const DgSpace& space, std::size_t f, int side, const FaceTable& tab,
                     std::span<double> out) const;

private:
    enum class Kind { Constant, Pointwise, Field };
    Kind kind_ = Kind::Constant;
    double scale_ = 1.0;
    double factor_ = 0.0;
    bool absolute_ = false;
    const FieldVector* field_ = nullptr;
    PointFn fn_;

    double from_field_value(double p) const;
};

/// sigma * eta / h_F weights the jump penalty on interior faces.
struct PenaltySpec {
    double sigma = 1.0;
    double eta = 10.0;

    /// eta = 10 q^2, sigma = 1.
    static PenaltySpec pressure_default(int degree);
};

/// C_tr^2 with ||phi||^2_{L2(F)} <= C_tr^2 h_K^{-1} ||phi||^2_{L2(K)}, maximised
/// over all elements and their faces (generalised eigenvalue problem per element).
double measure_trace_constant_sq(const DgSpace& space);

/// sigma*eta threshold C_tr^2 (d + 1) D_max^2 / D_min of the SIP coercivity bound.
double coercivity_threshold(double trace_constant_sq, double d_min, double d_max);

/// Range of a coefficient over all volume and face quadrature points.
struct CoefficientRange {
    double min;
    double max;
};
CoefficientRange coefficient_range(const DgSpace& space, const CoefficientField& c);

/// M_ij = int_Omega c phi_j phi_i.
SparseMatrix assemble_mass(const DgSpace& space, const CoefficientField& c);

/// Symmetric interior penalty form with interior-face terms only.
/// Throws ModelError when D <= 0 at a quadrature point.
SparseMatrix assemble_sip(const DgSpace& space, const CoefficientField& diffusion,
                          const PenaltySpec& penalty);

/// B_ij = int_subset phi_j phi_i dGamma.
SparseMatrix assemble_boundary_mass(const DgSpace& space, const FacePredicate& subset);

/// Matrix of b_upw(v; phi, w): w^T B phi = b_upw(v; phi, w). The mesh must be
/// classified for v.
SparseMatrix assemble_upwind(const DgSpace& space, Vec2 v);

/// Matrix of the dG seminorm: phi^T G phi = sum_K ||grad phi||^2 + sum_{F int} ||[phi]||^2 / h_F.
SparseMatrix assemble_dg_seminorm(const DgSpace& space);

/// F_i = int_Omega f(., t) phi_i.
std::vector<double> assemble_load(const DgSpace& space, const SourceFn& f, double t);

/// F_i = int_subset g(., n, t) phi_i, times v.n when `velocity` is set.
std::vector<double> assemble_boundary_load(const DgSpace& space, const BoundaryFn& g,
                                           const FacePredicate& subset,
                                           std::optional<Vec2> velocity, double t);

/// Load vector of a space-time separable datum sum_j a_j(t) s_j(x): the
/// spatial vectors are assembled once, evaluation costs one axpy per term.
class PrecomputedLoad {
public:
    using TimeFn = std::function<double(double)>;

    void add_term(TimeFn time, std::vector<double> vector);
    /// out += scale * sum_j a_j(t) b_j
    void add_to(std::span<double> out, double t, double scale = 1.0) const;
    bool empty() const { return terms_.empty(); }

private:
    std::vector<std::pair<TimeFn, std::vector<double>>> terms_;
};

/// N_i = int_Omega (pdot^h)^2 phi_i.
std::vector<double> assemble_westervelt_quadratic(const FieldVector& pdot);

}  // namespace wdg
