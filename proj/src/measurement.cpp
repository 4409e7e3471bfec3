#include "freqcomb/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "freqcomb/parallel.hpp"
#include "freqcomb/quadrature.hpp"

namespace freqcomb {
namespace {

void check_square(const FrequencyComb& comb, const ComplexMatrix& m, const char* who) {
  const auto n = static_cast<Eigen::Index>(comb.n_modes());
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument(std::string(who) + ": matrix must be N x N");
  }
}

double hermiticity_error(const ComplexMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

// Frequency difference omega_k - omega_l; omega0 cancels exactly.
double line_gap(const FrequencyComb& comb, Eigen::Index k, Eigen::Index l) {
  return static_cast<double>(k - l) * comb.delta_omega();
}

}  // namespace

Projector::Projector(FrequencyComb comb, ComplexMatrix matrix) : comb_(comb), matrix_(std::move(matrix)) {
  check_square(comb_, matrix_, "Projector");
  if (hermiticity_error(matrix_) > 1e-12) throw std::invalid_argument("Projector: matrix is not Hermitian");
  if (std::abs(matrix_.trace() - 1.0) > 1e-10) throw std::invalid_argument("Projector: trace must be 1");
  if ((matrix_ * matrix_ - matrix_).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("Projector: matrix is not idempotent");
  }
}

Projector Projector::from_vector(FrequencyComb comb, const ComplexVector& v) {
  return Projector(comb, v * v.adjoint());
}

DetectionWindow::DetectionWindow(double t, double t_width) : t_center(t), width(t_width) {
  if (!(t_width >= 0.0) || !std::isfinite(t_width)) {
    throw std::invalid_argument("DetectionWindow: width must be finite and >= 0");
  }
}

EffectiveProjector::EffectiveProjector(FrequencyComb comb, DetectionWindow window, ComplexMatrix matrix)
    : comb_(comb), window_(window), matrix_(std::move(matrix)) {
  check_square(comb_, matrix_, "EffectiveProjector");
  if (hermiticity_error(matrix_) > 1e-12) {
    throw std::invalid_argument("EffectiveProjector: matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - 1.0) > 1e-10) {
    throw std::invalid_argument("EffectiveProjector: trace must be 1");
  }
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(matrix_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("EffectiveProjector: matrix is not positive semidefinite");
  }
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

Projector projector_from_row(const UnitaryMap& u, std::size_t j, const FrequencyComb& comb) {
  if (u.dimension() != comb.n_modes()) throw std::invalid_argument("projector_from_row: dimension mismatch");
  if (j >= u.dimension()) throw std::out_of_range("projector_from_row: row index out of range");
  const ComplexVector row = u.matrix().row(static_cast<Eigen::Index>(j)).transpose();
  return Projector::from_vector(comb, row);
}

Projector evolve_projector(const Projector& m, double tau) {
  const FrequencyComb& comb = m.comb();
  ComplexMatrix out = m.matrix();
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    for (Eigen::Index l = 0; l < out.cols(); ++l) {
      if (k != l) out(k, l) *= std::polar(1.0, line_gap(comb, k, l) * tau);
    }
  }
  return Projector(comb, std::move(out));
}

EffectiveProjector effective_projector(const Projector& m, const DetectionWindow& window) {
  const FrequencyComb& comb = m.comb();
  ComplexMatrix out = m.matrix();
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    for (Eigen::Index l = 0; l < out.cols(); ++l) {
      if (k == l) continue;
      const double gap = line_gap(comb, k, l);
      out(k, l) *= std::polar(sinc(0.5 * gap * window.width), gap * window.t_center);
    }
  }
  return EffectiveProjector(comb, window, std::move(out));
}

EffectiveProjector effective_projector_quadrature(const Projector& m, const DetectionWindow& window,
                                                  std::size_t n_points) {
  if (n_points < 2) throw std::invalid_argument("effective_projector_quadrature: need n_points >= 2");
  if (window.width == 0.0) {
    return EffectiveProjector(m.comb(), window, evolve_projector(m, window.t_center).matrix());
  }
  const double lo = window.t_center - 0.5 * window.width;
  const double hi = window.t_center + 0.5 * window.width;
  const QuadratureRule rule = composite_gauss_legendre(lo, hi, n_points);
  const auto n = static_cast<Eigen::Index>(m.comb().n_modes());
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * evolve_projector(m, rule.nodes[i]).matrix();
  }
  acc /= window.width;
  // Symmetrize away rounding so the Hermitian check is about the integrand.
  acc = 0.5 * (acc + acc.adjoint()).eval();
  return EffectiveProjector(m.comb(), window, std::move(acc));
}

double detection_probability(const SinglePhotonState& state, const EffectiveProjector& m_eff,
                             double efficiency) {
  if (!state.comb().compatible_with(m_eff.comb())) {
    throw std::invalid_argument("detection_probability: comb mismatch");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("detection_probability: efficiency must be in (0, 1]");
  }
  const ComplexVector& c = state.amplitudes();
  return efficiency * c.dot(m_eff.matrix() * c).real();
}

double projection_fidelity(const Projector& m, const DetectionWindow& window) {
  const ComplexMatrix ideal = evolve_projector(m, window.t_center).matrix();
  const ComplexMatrix averaged = effective_projector(m, window).matrix();
  // Tr(A^dag B) is the Frobenius inner product sum conj(A_kl) B_kl.
  const Complex overlap = (averaged.conjugate().cwiseProduct(ideal)).sum();
  const double norm_avg = averaged.squaredNorm();
  const double norm_ideal = ideal.squaredNorm();
  return std::norm(overlap) / (norm_avg * norm_ideal);
}

FidelityBasis parse_fidelity_basis(std::string_view name) {
  if (name == "pair") return FidelityBasis::pair;
  if (name == "fourier") return FidelityBasis::fourier;
  if (name == "computational") return FidelityBasis::computational;
  throw std::invalid_argument("unknown fidelity basis '" + std::string(name) + "'");
}

std::string_view to_string(FidelityBasis basis) {
  switch (basis) {
    case FidelityBasis::pair: return "pair";
    case FidelityBasis::fourier: return "fourier";
    case FidelityBasis::computational: return "computational";
  }
  return "unknown";
}

ComplexVector fidelity_basis_vector(FidelityBasis basis, std::size_t n_modes) {
  const auto n = static_cast<Eigen::Index>(n_modes);
  if (n < 1) throw std::invalid_argument("fidelity_basis_vector: need at least one mode");
  ComplexVector v = ComplexVector::Zero(n);
  switch (basis) {
    case FidelityBasis::pair:
      if (n < 2) throw std::invalid_argument("fidelity_basis_vector: pair basis needs N >= 2");
      v(0) = v(n - 1) = 1.0 / std::sqrt(2.0);
      break;
    case FidelityBasis::fourier:
      v.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
      break;
    case FidelityBasis::computational:
      v(0) = 1.0;
      break;
  }
  return v;
}

std::vector<FidelityRow> fidelity_sweep(FidelityBasis basis, const std::vector<std::size_t>& n_values,
                                        const std::vector<double>& response_times,
                                        const FrequencyComb& comb) {
  if (n_values.empty() || response_times.empty()) {
    throw std::invalid_argument("fidelity_sweep: ranges must be non-empty");
  }
  std::vector<FidelityRow> rows(n_values.size() * response_times.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    const std::size_t n = n_values[idx / response_times.size()];
    const double t = response_times[idx % response_times.size()];
    const FrequencyComb c(comb.omega0(), comb.delta_omega(), n);
    const Projector m = Projector::from_vector(c, fidelity_basis_vector(basis, n));
    rows[idx] = FidelityRow{n, t, projection_fidelity(m, DetectionWindow(0.0, t))};
  });
  return rows;
}

}  // namespace freqcomb
