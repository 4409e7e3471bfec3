#pragma once

#include <cstddef>
#include <vector>

#include "freqcomb/core_state.hpp"

namespace freqcomb {

enum class Party { a, b };

// Detection times for the two settings of each party plus the shared
// response time T.
struct BellSettings {
  double t_a = 0.0;
  double t_a_prime = 0.0;
  double t_b = 0.0;
  double t_b_prime = 0.0;
  double response_time = 0.0;

  BellSettings() = default;
  BellSettings(double ta, double ta_prime, double tb, double tb_prime, double t_response);

  BellSettings shifted(double offset) const;
};

// Time-delayed Fourier basis vector for output j.
//   party a: exp(i 2 pi j k / N) / sqrt(N) on mode k,
//   party b: exp(-i 2 pi j k / N) / sqrt(N) on mode N-1-k,
// each evolved to time t under the comb Hamiltonian (phase exp(i omega_m t) on
// mode m, with omega_0 and the resulting global phase removed). For party a
// this is the factor exp(i delta_omega t k); for party b, exp(-i delta_omega t k)
// relative to mode N-1.
SinglePhotonState fourier_basis_vector(const FrequencyComb& comb, std::size_t j, double t, Party party);

// N x N table: entry (l, j) is the probability that photon a exits port l and
// photon b exits port j, both detectors averaging over a box of width T.
Eigen::MatrixXd coincidence_table(const BipartitePhotonState& state, double t_a, double t_b,
                                  double response_time);

// Same quantity by direct double Gauss-Legendre integration of the pointwise
// probabilities; n_points per axis. Reference route for tests.
Eigen::MatrixXd coincidence_table_quadrature(const BipartitePhotonState& state, double t_a, double t_b,
                                             double response_time, std::size_t n_points);

// Pointwise probabilities at exact detection instants (T = 0).
Eigen::MatrixXd instantaneous_coincidences(const BipartitePhotonState& state, double t_a, double t_b);

// P(t_a, t_b, k) = sum_l table(l, (l + k) mod N) for k = 0..N-1.
std::vector<double> joint_probabilities(const Eigen::MatrixXd& table);
std::vector<double> joint_probabilities(const BipartitePhotonState& state, double t_a, double t_b,
                                        double response_time);

// Single entry; k may be negative and is reduced mod N.
double joint_probability(const BipartitePhotonState& state, double t_a, double t_b, long k,
                         double response_time);

// Entanglement indicator with weights (1 - 2k/(N-1)), k < floor(N/2).
double s_n(const BipartitePhotonState& state, const BellSettings& settings);

// Combination used by s_n, exposed for callers that already hold the four
// P(., ., k) vectors (order: (a,b), (a',b), (a',b'), (a,b')).
double s_n_from_joint(const std::vector<double>& p_ab, const std::vector<double>& p_apb,
                      const std::vector<double>& p_apbp, const std::vector<double>& p_abp);

// t_a = 0, t_b - t_a = pi/(2 N dw), t'_a - t_a = t'_b - t_b = pi/(N dw).
BellSettings optimal_settings(const FrequencyComb& comb, double response_time = 0.0);

// Rule above with both setting rotations negated. In this basis convention it
// is the assignment that reaches the optimum of s_n.
BellSettings mirrored_settings(const FrequencyComb& comb, double response_time = 0.0);

// Normalized 2 x 2 table for N = 2 (entries sum to 1).
Eigen::Matrix2d chsh_coincidences(const BipartitePhotonState& state, double t_a, double t_b,
                                  double response_time);

// (C11 + C22 - C12 - C21) / (C11 + C22 + C12 + C21).
double chsh_correlation(const Eigen::Matrix2d& coincidences);

// S2 = E(a,b) - E(a,b') + E(a',b) + E(a',b').
double chsh_s2(const BipartitePhotonState& state, const BellSettings& settings);

// Closed-form maximum of S2 for the two-mode Bell state: 2 sqrt2 sinc^2(dw T/2).
double chsh_s2_bound(double delta_omega, double response_time);

// Response time where chsh_s2_bound falls to 2, i.e. sinc^2(dw T0/2) = 1/sqrt2.
double chsh_threshold_response_time(double delta_omega);

enum class BellIndicator { chsh, cglmp };

struct SearchConfig {
  std::size_t grid_steps = 64;  // per axis over one beat period
  int max_sweeps = 200;
  double tolerance = 1e-15;
};

struct SearchResult {
  BellSettings settings;
  double value = 0.0;
};

double evaluate_indicator(const BipartitePhotonState& state, const BellSettings& settings,
                          BellIndicator indicator);

// Grid search over (t_b - t_a, t'_a - t_a, t'_b - t_b) in one beat period with
// t_a = 0, followed by coordinate-wise Brent refinement.
SearchResult maximize_indicator(const BipartitePhotonState& state, double response_time,
                                BellIndicator indicator, const SearchConfig& config = {});

SearchResult maximize_s2(const BipartitePhotonState& state, double response_time,
                         const SearchConfig& config = {});

SearchResult maximize_s_n(const BipartitePhotonState& state, double response_time,
                          const SearchConfig& config = {});

// Root of maximize_s2(T) - 2 inside [t_lo, t_hi]; the endpoints must bracket it.
double locate_classical_crossing(const BipartitePhotonState& state, double t_lo, double t_hi,
                                 const SearchConfig& config = {});

}  // namespace freqcomb
