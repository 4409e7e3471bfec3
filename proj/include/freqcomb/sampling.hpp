#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "freqcomb/core_state.hpp"

namespace freqcomb {

// Counter-based uniform stream: draw d of event i depends only on
// (seed, i, d), so results do not depend on how events are split over threads.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t event, std::uint64_t draw) const;
  double uniform(std::uint64_t event, std::uint64_t draw) const;  // [0, 1)
  CounterRng substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

struct CoincidenceEvent {
  std::size_t id = 0;
  double jitter_a = 0.0;  // s
  double jitter_b = 0.0;  // s
  std::size_t port_a = 0;
  std::size_t port_b = 0;
  bool kept = true;
};

struct SamplingConfig {
  std::size_t n_events = 0;
  std::uint64_t seed = 0;
  double efficiency_a = 1.0;
  double efficiency_b = 1.0;
};

// Per event: uniform jitter in [-T/2, T/2] for each detector, an output-port
// pair drawn from the instantaneous joint distribution at the jittered
// instants, then independent efficiency thinning per party.
std::vector<CoincidenceEvent> sample_coincidence_events(const BipartitePhotonState& state, double t_a,
                                                        double t_b, double response_time,
                                                        const SamplingConfig& config);

struct EmpiricalCoincidences {
  std::size_t kept = 0;
  Eigen::MatrixXd frequencies;  // normalized over kept events
  Eigen::MatrixXd std_errors;   // binomial, sqrt(p (1 - p) / kept)
  double correlation = 0.0;     // two-port E, only filled for N = 2
  double correlation_error = 0.0;
};

EmpiricalCoincidences tally_events(const std::vector<CoincidenceEvent>& events, std::size_t n_ports);

}  // namespace freqcomb
