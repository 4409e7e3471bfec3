#include "freqcomb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "freqcomb/core_state.hpp"

namespace freqcomb {

QuadratureRule gauss_legendre(std::size_t n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on the three-term recurrence.
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pn_1 = (n == 1) ? 1.0 : p0;
      dp = dn * (x * pn - pn_1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t n_points) {
  if (n_points < 1) throw std::invalid_argument("composite_gauss_legendre: need n_points >= 1");
  const std::size_t order = std::min(n_points, kMaxPanelOrder);
  const std::size_t panels = (n_points + order - 1) / order;
  const QuadratureRule base = gauss_legendre(order);
  QuadratureRule rule;
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < order; ++i) {
      rule.nodes.push_back(lo + half * (base.nodes[i] + 1.0));
      rule.weights.push_back(half * base.weights[i]);
    }
  }
  return rule;
}

}  // namespace freqcomb
