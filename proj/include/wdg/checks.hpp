#pragma once

#include <filesystem>
#include <string>

namespace wdg {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// b_upw(phi, phi) against the jump identity for 100 random fields per mesh,
/// degree and velocity (h in {sqrt2/4, sqrt2/8}, q in {1, 2}).
CheckResult check_upwind_identity(unsigned seed = 1);

/// SIP at twice the coercivity threshold on n = 16, 32, 64 cells per side: smallest
/// a(phi, phi) / |phi|^2_dG over 100 random fields >= 0.1 and within 20% of
/// the coarsest level; |A - A^T|_max <= 1e-12 |A|_max.
CheckResult check_sip_coercivity(unsigned seed = 2);

/// kappa = 0, no sources: relative energy drift per 100 Newmark steps
/// <= 1e-10 with alpha = beta = 0, and non-increasing energy with alpha = c.
CheckResult check_linear_energy();

/// D1 = 0, kappa = 0: the coupled concentration equals a transport-only run
/// to 1e-10 at each of 50 steps.
CheckResult check_decoupled_limit();

/// Forcing closures against the symbolic oracle table at 1e-10 relative.
CheckResult check_oracle(const std::filesystem::path& csv);

}  // namespace wdg
