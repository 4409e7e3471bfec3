#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "freqcomb/core_state.hpp"

namespace freqcomb {

// Rank-1 frequency-basis projector |M><M| with M(k, l) = v_k conj(v_l).
class Projector {
 public:
  Projector(FrequencyComb comb, ComplexMatrix matrix);

  static Projector from_vector(FrequencyComb comb, const ComplexVector& v);

  const FrequencyComb& comb() const { return comb_; }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  FrequencyComb comb_;
  ComplexMatrix matrix_;
};

// Box response window [t_center - width/2, t_center + width/2].
struct DetectionWindow {
  double t_center = 0.0;  // s
  double width = 0.0;     // s, detector response time T

  DetectionWindow() = default;
  DetectionWindow(double t, double t_width);
};

// Time-window average of the Heisenberg-evolved projector. Hermitian, PSD,
// unit trace, and with the same diagonal as its source.
class EffectiveProjector {
 public:
  EffectiveProjector(FrequencyComb comb, DetectionWindow window, ComplexMatrix matrix);

  const FrequencyComb& comb() const { return comb_; }
  const DetectionWindow& window() const { return window_; }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  FrequencyComb comb_;
  DetectionWindow window_;
  ComplexMatrix matrix_;
};

// sin(x) / x with the removable singularity filled in.
double sinc(double x);

Projector projector_from_row(const UnitaryMap& u, std::size_t j, const FrequencyComb& comb);

// M(tau)_{kl} = M_{kl} exp(+i (omega_k - omega_l) tau).
Projector evolve_projector(const Projector& m, double tau);

// Closed form: M_{kl} exp(+i d t) sinc(d T / 2) with d = (k - l) delta_omega.
EffectiveProjector effective_projector(const Projector& m, const DetectionWindow& window);

// Reference route: composite Gauss-Legendre integration of evolve_projector
// over the window. T = 0 returns the pointwise value.
EffectiveProjector effective_projector_quadrature(const Projector& m, const DetectionWindow& window,
                                                  std::size_t n_points);

// <psi| M~ |psi>, scaled by the detector efficiency.
double detection_probability(const SinglePhotonState& state, const EffectiveProjector& m_eff,
                             double efficiency = 1.0);

// Overlap fidelity between the averaged projector M~(t; T) and the ideal
// projector evolved to the same instant, M(t). Independent of t for rank-1 M.
double projection_fidelity(const Projector& m, const DetectionWindow& window);

enum class FidelityBasis { pair, fourier, computational };

FidelityBasis parse_fidelity_basis(std::string_view name);
std::string_view to_string(FidelityBasis basis);

// Target vector for the sweep: (a_0 + a_{N-1})/sqrt2, the uniform Fourier
// row, or the single mode 0.
ComplexVector fidelity_basis_vector(FidelityBasis basis, std::size_t n_modes);

struct FidelityRow {
  std::size_t n_modes = 0;
  double response_time = 0.0;  // s
  double fidelity = 0.0;
};

// Grid in N-major order. The comb supplies delta_omega and omega0; its mode
// count is replaced by each entry of n_values.
std::vector<FidelityRow> fidelity_sweep(FidelityBasis basis, const std::vector<std::size_t>& n_values,
                                        const std::vector<double>& response_times,
                                        const FrequencyComb& comb);

}  // namespace freqcomb
