#include "wdg/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "wdg/error.hpp"

namespace wdg {

namespace {

// Legendre polynomial P_n and its derivative at x in (-1, 1).
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if (n == 0) return {1.0, 0.0};
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ConfigError("gauss_legendre: need at least one point");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Newton iteration on P_n in [-1, 1], mapped to [0, 1].
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
}

namespace {

QuadRule make_rule(int degree) {
    QuadRule rule;
    rule.degree = degree;
    if (degree <= 1) {
        rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
        rule.weights = {0.5};
        return rule;
    }
    // Integral over T of f = int_0^1 int_0^1 f(a, (1-a) b) (1-a) da db.
    // The a-direction integrand has degree degree+1, the b-direction degree.
    const int na = (degree + 2 + 1) / 2;
    const int nb = (degree + 1 + 1) / 2;
    std::vector<double> xa, wa, xb, wb;
    gauss_legendre(na, xa, wa);
    gauss_legendre(nb, xb, wb);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            rule.points.push_back({xa[i], (1.0 - xa[i]) * xb[j]});
            rule.weights.push_back(wa[i] * wb[j] * (1.0 - xa[i]));
        }
    }
    return rule;
}

}  // namespace

const QuadRule& quad_rule(int degree) {
    if (degree < 0 || degree > kMaxQuadratureDegree) {
        throw ConfigError("quad_rule: unsupported exactness degree " + std::to_string(degree));
    }
    static std::array<QuadRule, kMaxQuadratureDegree + 1> table;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int d = 0; d <= kMaxQuadratureDegree; ++d) table[d] = make_rule(d);
    });
    return table[degree];
}

}  // namespace wdg
