#include "freqcomb/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "freqcomb/bell.hpp"
#include "freqcomb/parallel.hpp"

namespace freqcomb {
namespace {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum Draw : std::uint64_t { kJitterA = 0, kJitterB = 1, kOutcome = 2, kKeepA = 3, kKeepB = 4 };

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t event, std::uint64_t draw) const {
  return mix64(mix64(seed_ ^ mix64(event)) + draw);
}

double CounterRng::uniform(std::uint64_t event, std::uint64_t draw) const {
  return static_cast<double>(bits(event, draw) >> 11) * 0x1.0p-53;
}

CounterRng CounterRng::substream(std::uint64_t index) const { return CounterRng(mix64(seed_ + mix64(~index))); }

std::vector<CoincidenceEvent> sample_coincidence_events(const BipartitePhotonState& state, double t_a,
                                                        double t_b, double response_time,
                                                        const SamplingConfig& config) {
  if (config.n_events < 1) throw std::invalid_argument("sample_coincidence_events: n_events must be >= 1");
  for (double eta : {config.efficiency_a, config.efficiency_b}) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("sample_coincidence_events: efficiency must be in (0, 1]");
    }
  }
  if (!(response_time >= 0.0)) throw std::invalid_argument("sample_coincidence_events: response time must be >= 0");

  const CounterRng rng(config.seed);
  const std::size_t n = state.dimension();
  std::vector<CoincidenceEvent> events(config.n_events);
  parallel_for(config.n_events, [&](std::size_t i) {
    CoincidenceEvent ev;
    ev.id = i;
    if (response_time > 0.0) {
      ev.jitter_a = (rng.uniform(i, kJitterA) - 0.5) * response_time;
      ev.jitter_b = (rng.uniform(i, kJitterB) - 0.5) * response_time;
    }
    const Eigen::MatrixXd p = instantaneous_coincidences(state, t_a + ev.jitter_a, t_b + ev.jitter_b);
    const double target = rng.uniform(i, kOutcome) * p.sum();
    double acc = 0.0;
    std::size_t pick = n * n - 1;
    for (std::size_t c = 0; c < n * n; ++c) {
      acc += p(static_cast<Eigen::Index>(c / n), static_cast<Eigen::Index>(c % n));
      if (target < acc) {
        pick = c;
        break;
      }
    }
    ev.port_a = pick / n;
    ev.port_b = pick % n;
    ev.kept = rng.uniform(i, kKeepA) < config.efficiency_a && rng.uniform(i, kKeepB) < config.efficiency_b;
    events[i] = ev;
  });
  return events;
}

EmpiricalCoincidences tally_events(const std::vector<CoincidenceEvent>& events, std::size_t n_ports) {
  const auto n = static_cast<Eigen::Index>(n_ports);
  EmpiricalCoincidences out;
  out.frequencies = Eigen::MatrixXd::Zero(n, n);
  out.std_errors = Eigen::MatrixXd::Zero(n, n);
  for (const CoincidenceEvent& ev : events) {
    if (!ev.kept) continue;
    if (ev.port_a >= n_ports || ev.port_b >= n_ports) throw std::invalid_argument("tally_events: port out of range");
    out.frequencies(static_cast<Eigen::Index>(ev.port_a), static_cast<Eigen::Index>(ev.port_b)) += 1.0;
    ++out.kept;
  }
  if (out.kept == 0) return out;
  const double kept = static_cast<double>(out.kept);
  out.frequencies /= kept;
  out.std_errors = (out.frequencies.array() * (1.0 - out.frequencies.array()) / kept).sqrt().matrix();
  if (n_ports == 2) {
    const auto& f = out.frequencies;
    out.correlation = f(0, 0) + f(1, 1) - f(0, 1) - f(1, 0);
    out.correlation_error = std::sqrt(std::max(0.0, 1.0 - out.correlation * out.correlation) / kept);
  }
  return out;
}

}  // namespace freqcomb
