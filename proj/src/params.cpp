#include "wdg/params.hpp"

#include <cmath>
#include <string>

#include "wdg/error.hpp"

namespace wdg {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void AcousticParams::validate() const {
    require(std::isfinite(c) && c > 0.0, "acoustic.c must be positive");
    require(std::isfinite(beta) && beta >= 0.0, "acoustic.beta must be non-negative");
    require(std::isfinite(alpha) && alpha >= 0.0, "acoustic.alpha must be non-negative");
    require(std::isfinite(kappa), "acoustic.kappa must be finite");
}

double TransportParams::diffusion(double p) const {
    return d0 * (1.0 + d1 * (abs_pressure ? std::abs(p) : p));
}

double TransportParams::diffusion_derivative(double p) const {
    if (!abs_pressure) return d0 * d1;
    return p > 0.0 ? d0 * d1 : (p < 0.0 ? -d0 * d1 : 0.0);
}

void TransportParams::validate() const {
    require(std::isfinite(d0) && d0 > 0.0, "transport.d0 must be positive");
    require(std::isfinite(d1), "transport.d1 must be finite");
    require(std::isfinite(v.x) && std::isfinite(v.y), "transport.v must be finite");
}

void NewmarkSpec::validate() const {
    require(beta > 0.0 && beta <= 0.5, "newmark.beta must lie in (0, 0.5]");
    require(gamma >= 0.5 && gamma <= 1.0, "newmark.gamma must lie in [0.5, 1]");
    require(tolerance > 0.0, "newmark.tolerance must be positive");
    require(max_iter >= 1, "newmark.max_iter must be at least 1");
}

}  // namespace wdg
