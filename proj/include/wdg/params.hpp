#pragma once

#include "wdg/mesh.hpp"

namespace wdg {

/// Coefficients of ((1 + kappa p) p_t)_t - c^2 lap p - beta lap p_t = f_p with
/// alpha p_t + c^2 dp/dn + beta dp_t/dn = g_abs on the boundary.
struct AcousticParams {
    double c = 1.0;
    double beta = 0.1;
    double kappa = 0.1;
    double alpha = 1.0;

    /// c > 0 and beta, alpha >= 0. The zero cases are the lossless limits
    /// used by energy checks; experiment configs demand strict positivity.
    void validate() const;
};

/// u_t + div(v u - D(p) grad u) = f_u with D(p) = D0 (1 + D1 p) or D0 (1 + D1 |p|).
struct TransportParams {
    double d0 = 1.0;
    double d1 = 1.0;
    bool abs_pressure = false;
    Vec2 v{0.0, 1.0};

    double diffusion(double p) const;
    /// dD/dp; for the |p| variant the one-sided derivative sign(p) D0 D1 (0 at p = 0).
    double diffusion_derivative(double p) const;
    void validate() const;
};

struct NewmarkSpec {
    double beta = 0.25;
    double gamma = 0.5;
    /// Relative tolerance on the update of the acceleration iterate.
    double tolerance = 1e-10;
    int max_iter = 50;

    void validate() const;
};

}  // namespace wdg
