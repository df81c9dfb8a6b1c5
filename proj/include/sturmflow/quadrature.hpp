#pragma once

#include <vector>

namespace sturmflow {

/// Gauss-Legendre rule on [0, 1]; exact for polynomials of degree <= 2n - 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_legendre(int n);

/// Smallest rule that integrates a polynomial of the given degree exactly.
QuadratureRule gauss_legendre_for_degree(int degree);

}  // namespace sturmflow
