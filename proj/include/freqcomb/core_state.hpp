#pragma once

#include <complex>
#include <cstddef>
#include <random>

#include <Eigen/Dense>

namespace freqcomb {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Evenly spaced comb lines omega_k = omega0 + k * delta_omega (rad/s).
class FrequencyComb {
 public:
  FrequencyComb(double omega0, double delta_omega, std::size_t n_modes);

  double omega0() const { return omega0_; }
  double delta_omega() const { return delta_omega_; }
  std::size_t n_modes() const { return n_modes_; }

  double mode_frequency(std::size_t k) const;
  double beat_period() const { return kTwoPi / delta_omega_; }

  // Same comb spacing and size, the omega0 offset is ignored.
  bool compatible_with(const FrequencyComb& other) const;

  friend bool operator==(const FrequencyComb&, const FrequencyComb&) = default;

 private:
  double omega0_;
  double delta_omega_;
  std::size_t n_modes_;
};

// Comb from ordinary units: FSR in GHz, offset in GHz.
FrequencyComb comb_from_ghz(std::size_t n_modes, double fsr_ghz, double offset_ghz = 0.0);

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

// Single photon spread over the comb: sum_k c_k a^dag_{omega_k} |0>.
class SinglePhotonState {
 public:
  SinglePhotonState(FrequencyComb comb, ComplexVector amplitudes);

  // Normalizes the amplitudes before validating.
  static SinglePhotonState normalized(FrequencyComb comb, ComplexVector amplitudes);
  static SinglePhotonState basis_mode(FrequencyComb comb, std::size_t k);

  const FrequencyComb& comb() const { return comb_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  std::size_t dimension() const { return comb_.n_modes(); }

 private:
  FrequencyComb comb_;
  ComplexVector amplitudes_;
};

// Two photons a and b on the same comb; amplitudes(k, l) multiplies a^dag_k b^dag_l.
class BipartitePhotonState {
 public:
  BipartitePhotonState(FrequencyComb comb, ComplexMatrix amplitudes);

  static BipartitePhotonState product(const SinglePhotonState& a, const SinglePhotonState& b);

  const FrequencyComb& comb() const { return comb_; }
  const ComplexMatrix& amplitudes() const { return amplitudes_; }
  std::size_t dimension() const { return comb_.n_modes(); }

 private:
  FrequencyComb comb_;
  ComplexMatrix amplitudes_;
};

class UnitaryMap {
 public:
  explicit UnitaryMap(ComplexMatrix matrix);

  static UnitaryMap identity(std::size_t n);
  // Unitary DFT with entries exp(2 pi i j k / N) / sqrt(N).
  static UnitaryMap dft(std::size_t n);

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  ComplexMatrix matrix_;
};

// Frobenius norm of U U^dag - I; infinity for non-square input.
double unitarity_deviation(const ComplexMatrix& u);

// Haar-distributed unitary via QR of a complex Ginibre matrix.
ComplexMatrix haar_random_unitary(std::size_t n, std::mt19937_64& rng);

BipartitePhotonState make_bell_state(const FrequencyComb& comb);

SinglePhotonState apply_unitary(const SinglePhotonState& state, const UnitaryMap& u);

Complex inner_product(const SinglePhotonState& a, const SinglePhotonState& b);

}  // namespace freqcomb
