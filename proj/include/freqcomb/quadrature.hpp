#pragma once

#include <cstddef>
#include <vector>

namespace freqcomb {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(std::size_t n);

// Composite Gauss-Legendre rule on [a, b] with n_points total nodes: panels of
// at most kMaxPanelOrder nodes. For n_points <= kMaxPanelOrder this is a
// single panel.
inline constexpr std::size_t kMaxPanelOrder = 16;
QuadratureRule composite_gauss_legendre(double a, double b, std::size_t n_points);

}  // namespace freqcomb
