#pragma once

#include <vector>

#include "wdg/mesh.hpp"

namespace wdg {

/// Largest exactness degree the triangle rules are shipped for.
constexpr int kMaxQuadratureDegree = 20;

/// Quadrature rule on the reference triangle {(0,0), (1,0), (0,1)}.
struct QuadRule {
    std::vector<Point> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1] (exact to degree 2n-1).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Triangle rule exact for all polynomials of total degree <= `degree`.
/// Degree 0 and 1 give the centroid rule; higher degrees use a collapsed
/// (Duffy) tensor product of Gauss-Legendre rules, which has positive weights.
/// Throws ConfigError beyond kMaxQuadratureDegree.
const QuadRule& quad_rule(int degree);

}  // namespace wdg
