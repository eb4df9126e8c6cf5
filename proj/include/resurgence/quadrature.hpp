#pragma once

#include <cstddef>
#include <vector>

namespace resurgence {

/// Gauss-Legendre rule on [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule (Golub-Welsch), cached per n.
const QuadratureRule& gauss_legendre(std::size_t n);

}  // namespace resurgence
