#pragma once

#include "oseen/mesh.hpp"

#include <vector>

namespace oseen {

/// Rule on the reference triangle {(x, y) : x, y >= 0, x + y <= 1}.
/// Weights sum to the reference area 1/2; all points are interior and all
/// weights positive. Degrees 1..9 are fully symmetric, degree 10 is a
/// collapsed Gauss product.
struct QuadratureRule {
    int degree = 0;
    std::vector<Vec2> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }
};

constexpr int kMaxQuadratureDegree = 10;

/// Rule exact for all polynomials of total degree <= `exactness`
/// (1 <= exactness <= 10). Returned references stay valid for the program
/// lifetime.
const QuadratureRule& quadrature_rule(int exactness);

} // namespace oseen
