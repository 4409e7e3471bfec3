#include "freqcomb/core_state.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace freqcomb {

FrequencyComb::FrequencyComb(double omega0, double delta_omega, std::size_t n_modes)
    : omega0_(omega0), delta_omega_(delta_omega), n_modes_(n_modes) {
  if (!std::isfinite(omega0)) throw std::invalid_argument("FrequencyComb: omega0 must be finite");
  if (!(delta_omega > 0.0) || !std::isfinite(delta_omega)) {
    throw std::invalid_argument("FrequencyComb: delta_omega must be positive");
  }
  if (n_modes < 1) throw std::invalid_argument("FrequencyComb: n_modes must be >= 1");
}

double FrequencyComb::mode_frequency(std::size_t k) const {
  if (k >= n_modes_) throw std::out_of_range("FrequencyComb: mode index out of range");
  return omega0_ + static_cast<double>(k) * delta_omega_;
}

bool FrequencyComb::compatible_with(const FrequencyComb& other) const {
  return n_modes_ == other.n_modes_ && delta_omega_ == other.delta_omega_;
}

FrequencyComb comb_from_ghz(std::size_t n_modes, double fsr_ghz, double offset_ghz) {
  return FrequencyComb(kTwoPi * offset_ghz * 1e9, kTwoPi * fsr_ghz * 1e9, n_modes);
}

SinglePhotonState::SinglePhotonState(FrequencyComb comb, ComplexVector amplitudes)
    : comb_(comb), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != comb_.n_modes()) {
    throw std::invalid_argument("SinglePhotonState: amplitude count does not match comb");
  }
  const double norm = amplitudes_.squaredNorm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("SinglePhotonState: amplitudes not normalized (|c|^2 = " +
                                std::to_string(norm) + ")");
  }
}

SinglePhotonState SinglePhotonState::normalized(FrequencyComb comb, ComplexVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("SinglePhotonState: zero amplitude vector");
  amplitudes /= norm;
  return SinglePhotonState(comb, std::move(amplitudes));
}

SinglePhotonState SinglePhotonState::basis_mode(FrequencyComb comb, std::size_t k) {
  if (k >= comb.n_modes()) throw std::out_of_range("SinglePhotonState: mode index out of range");
  ComplexVector c = ComplexVector::Zero(static_cast<Eigen::Index>(comb.n_modes()));
  c(static_cast<Eigen::Index>(k)) = 1.0;
  return SinglePhotonState(comb, std::move(c));
}

BipartitePhotonState::BipartitePhotonState(FrequencyComb comb, ComplexMatrix amplitudes)
    : comb_(comb), amplitudes_(std::move(amplitudes)) {
  const auto n = static_cast<Eigen::Index>(comb_.n_modes());
  if (amplitudes_.rows() != n || amplitudes_.cols() != n) {
    throw std::invalid_argument("BipartitePhotonState: amplitude matrix must be N x N");
  }
  const double norm = amplitudes_.squaredNorm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("BipartitePhotonState: amplitudes not normalized (|c|^2 = " +
                                std::to_string(norm) + ")");
  }
}

BipartitePhotonState BipartitePhotonState::product(const SinglePhotonState& a,
                                                   const SinglePhotonState& b) {
  if (!a.comb().compatible_with(b.comb())) {
    throw std::invalid_argument("BipartitePhotonState::product: comb mismatch");
  }
  ComplexMatrix c = a.amplitudes() * b.amplitudes().transpose();
  // Rounding in the outer product can push the norm off by a few ulp.
  c /= c.norm();
  return BipartitePhotonState(a.comb(), std::move(c));
}

double unitarity_deviation(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

UnitaryMap::UnitaryMap(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0) throw std::invalid_argument("UnitaryMap: empty matrix");
  const double dev = unitarity_deviation(matrix_);
  if (!(dev <= kUnitaryTolerance)) {
    throw std::invalid_argument("UnitaryMap: matrix is not unitary (deviation " +
                                std::to_string(dev) + ")");
  }
}

UnitaryMap UnitaryMap::identity(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return UnitaryMap(ComplexMatrix::Identity(m, m));
}

UnitaryMap UnitaryMap::dft(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  ComplexMatrix f(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      // Reduce j*k mod N first so the phase stays exact for large N.
      const double phase = kTwoPi * static_cast<double>((j * k) % m) / static_cast<double>(n);
      f(j, k) = std::polar(scale, phase);
    }
  }
  return UnitaryMap(std::move(f));
}

ComplexMatrix haar_random_unitary(std::size_t n, std::mt19937_64& rng) {
  const auto m = static_cast<Eigen::Index>(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix z(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity of QR so the distribution is exactly Haar.
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

BipartitePhotonState make_bell_state(const FrequencyComb& comb) {
  const auto n = static_cast<Eigen::Index>(comb.n_modes());
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index k = 0; k < n; ++k) c(k, n - 1 - k) = amp;
  return BipartitePhotonState(comb, std::move(c));
}

SinglePhotonState apply_unitary(const SinglePhotonState& state, const UnitaryMap& u) {
  if (u.dimension() != state.dimension()) {
    throw std::invalid_argument("apply_unitary: dimension mismatch");
  }
  ComplexVector out = u.matrix() * state.amplitudes();
  // Absorb the O(eps * N) drift so chained applications stay within tolerance.
  out /= out.norm();
  return SinglePhotonState(state.comb(), std::move(out));
}

Complex inner_product(const SinglePhotonState& a, const SinglePhotonState& b) {
  if (!a.comb().compatible_with(b.comb())) {
    throw std::invalid_argument("inner_product: comb mismatch");
  }
  return a.amplitudes().dot(b.amplitudes());
}

}  // namespace freqcomb
