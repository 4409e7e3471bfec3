#include "freqcomb/bell.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "freqcomb/measurement.hpp"
#include "freqcomb/parallel.hpp"
#include "freqcomb/quadrature.hpp"

namespace freqcomb {
namespace {

std::size_t wrap_index(long k, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

ComplexMatrix basis_columns(const FrequencyComb& comb, double t, Party party) {
  const auto n = static_cast<Eigen::Index>(comb.n_modes());
  ComplexMatrix cols(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    cols.col(j) = fourier_basis_vector(comb, static_cast<std::size_t>(j), t, party).amplitudes();
  }
  return cols;
}

// sinc((k - k') dw T / 2), the box-average damping of each coherence.
Eigen::MatrixXd damping_matrix(const FrequencyComb& comb, double response_time) {
  const auto n = static_cast<Eigen::Index>(comb.n_modes());
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      s(k, l) = sinc(0.5 * static_cast<double>(k - l) * comb.delta_omega() * response_time);
    }
  }
  return s;
}

std::vector<ComplexMatrix> averaged_projectors(const ComplexMatrix& basis, const Eigen::MatrixXd& damping) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const ComplexMatrix outer = basis.col(j) * basis.col(j).adjoint();
    out.push_back(outer.cwiseProduct(damping.cast<Complex>()));
  }
  return out;
}

void require_two_modes(const BipartitePhotonState& state, const char* who) {
  if (state.dimension() != 2) throw std::invalid_argument(std::string(who) + ": requires N = 2");
}

double correlation_from_joint(const std::vector<double>& p) {
  const double total = p[0] + p[1];
  if (!(total > 0.0)) throw std::invalid_argument("chsh correlation: empty coincidence table");
  return (p[0] - p[1]) / total;
}

double indicator_from_joint(BellIndicator indicator, const std::vector<double>& p_ab,
                            const std::vector<double>& p_apb, const std::vector<double>& p_apbp,
                            const std::vector<double>& p_abp) {
  if (indicator == BellIndicator::cglmp) return s_n_from_joint(p_ab, p_apb, p_apbp, p_abp);
  return correlation_from_joint(p_ab) - correlation_from_joint(p_abp) + correlation_from_joint(p_apb) +
         correlation_from_joint(p_apbp);
}

// Search coordinates: (t_b - t_a, t'_a - t_a, t'_b - t_b) with t_a = 0, in
// units of the beat period. Boost's Brent search uses an absolute tolerance
// floor, so it must not see raw times of order 1e-10 s.
BellSettings settings_from(const std::array<double, 3>& x, double period, double response_time) {
  return BellSettings(0.0, x[1] * period, x[0] * period, (x[0] + x[2]) * period, response_time);
}

}  // namespace

BellSettings::BellSettings(double ta, double ta_prime, double tb, double tb_prime, double t_response)
    : t_a(ta), t_a_prime(ta_prime), t_b(tb), t_b_prime(tb_prime), response_time(t_response) {
  if (!(t_response >= 0.0) || !std::isfinite(t_response)) {
    throw std::invalid_argument("BellSettings: response time must be finite and >= 0");
  }
}

BellSettings BellSettings::shifted(double offset) const {
  return BellSettings(t_a + offset, t_a_prime + offset, t_b + offset, t_b_prime + offset, response_time);
}

SinglePhotonState fourier_basis_vector(const FrequencyComb& comb, std::size_t j, double t, Party party) {
  const std::size_t n = comb.n_modes();
  if (j >= n) throw std::out_of_range("fourier_basis_vector: output index out of range");
  const auto m = static_cast<Eigen::Index>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexVector v(m);
  for (std::size_t k = 0; k < n; ++k) {
    const double index_phase = kTwoPi * static_cast<double>((j * k) % n) / static_cast<double>(n);
    const double time_phase = comb.delta_omega() * t * static_cast<double>(k);
    if (party == Party::a) {
      v(static_cast<Eigen::Index>(k)) = std::polar(scale, index_phase + time_phase);
    } else {
      v(static_cast<Eigen::Index>(n - 1 - k)) = std::polar(scale, -index_phase - time_phase);
    }
  }
  return SinglePhotonState(comb, std::move(v));
}

Eigen::MatrixXd coincidence_table(const BipartitePhotonState& state, double t_a, double t_b,
                                  double response_time) {
  if (!(response_time >= 0.0)) throw std::invalid_argument("coincidence_table: response time must be >= 0");
  const FrequencyComb& comb = state.comb();
  const Eigen::MatrixXd damping = damping_matrix(comb, response_time);
  const auto proj_a = averaged_projectors(basis_columns(comb, t_a, Party::a), damping);
  const auto proj_b = averaged_projectors(basis_columns(comb, t_b, Party::b), damping);
  const ComplexMatrix& c = state.amplitudes();
  const auto n = static_cast<Eigen::Index>(comb.n_modes());
  Eigen::MatrixXd table(n, n);
  // <psi| Ma (x) Mb |psi> = sum_{km} conj(c_km) (Ma C Mb^T)_km.
  for (Eigen::Index l = 0; l < n; ++l) {
    const ComplexMatrix left = proj_a[static_cast<std::size_t>(l)] * c;
    for (Eigen::Index j = 0; j < n; ++j) {
      const ComplexMatrix full = left * proj_b[static_cast<std::size_t>(j)].transpose();
      table(l, j) = c.conjugate().cwiseProduct(full).sum().real();
    }
  }
  return table;
}

Eigen::MatrixXd instantaneous_coincidences(const BipartitePhotonState& state, double t_a, double t_b) {
  const FrequencyComb& comb = state.comb();
  const ComplexMatrix amps =
      basis_columns(comb, t_a, Party::a).adjoint() * state.amplitudes() * basis_columns(comb, t_b, Party::b).conjugate();
  return amps.cwiseAbs2();
}

Eigen::MatrixXd coincidence_table_quadrature(const BipartitePhotonState& state, double t_a, double t_b,
                                             double response_time, std::size_t n_points) {
  if (response_time == 0.0) return instantaneous_coincidences(state, t_a, t_b);
  const QuadratureRule rule = composite_gauss_legendre(-0.5 * response_time, 0.5 * response_time, n_points);
  const auto n = static_cast<Eigen::Index>(state.dimension());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      acc += rule.weights[i] * rule.weights[j] *
             instantaneous_coincidences(state, t_a + rule.nodes[i], t_b + rule.nodes[j]);
    }
  }
  return acc / (response_time * response_time);
}

std::vector<double> joint_probabilities(const Eigen::MatrixXd& table) {
  const auto n = static_cast<std::size_t>(table.rows());
  std::vector<double> p(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      p[k] += table(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>((l + k) % n));
    }
  }
  return p;
}

std::vector<double> joint_probabilities(const BipartitePhotonState& state, double t_a, double t_b,
                                        double response_time) {
  return joint_probabilities(coincidence_table(state, t_a, t_b, response_time));
}

double joint_probability(const BipartitePhotonState& state, double t_a, double t_b, long k,
                         double response_time) {
  return joint_probabilities(state, t_a, t_b, response_time)[wrap_index(k, state.dimension())];
}

double s_n_from_joint(const std::vector<double>& p_ab, const std::vector<double>& p_apb,
                      const std::vector<double>& p_apbp, const std::vector<double>& p_abp) {
  const std::size_t n = p_ab.size();
  if (n < 2) throw std::invalid_argument("s_n: requires N >= 2");
  auto at = [n](const std::vector<double>& p, long k) { return p[wrap_index(k, n)]; };
  double total = 0.0;
  for (long k = 0; k < static_cast<long>(n / 2); ++k) {
    const double weight = 1.0 - 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
    const double plus = at(p_ab, k) + at(p_apb, -k - 1) + at(p_apbp, k) + at(p_abp, -k);
    const double minus = at(p_ab, -k - 1) + at(p_apb, k) + at(p_apbp, -k - 1) + at(p_abp, k + 1);
    total += weight * (plus - minus);
  }
  return total;
}

double s_n(const BipartitePhotonState& state, const BellSettings& s) {
  if (state.dimension() < 2) throw std::invalid_argument("s_n: requires N >= 2");
  const double t = s.response_time;
  return s_n_from_joint(joint_probabilities(state, s.t_a, s.t_b, t),
                        joint_probabilities(state, s.t_a_prime, s.t_b, t),
                        joint_probabilities(state, s.t_a_prime, s.t_b_prime, t),
                        joint_probabilities(state, s.t_a, s.t_b_prime, t));
}

BellSettings optimal_settings(const FrequencyComb& comb, double response_time) {
  if (comb.n_modes() < 2) throw std::invalid_argument("optimal_settings: requires N >= 2");
  const double unit = kPi / (static_cast<double>(comb.n_modes()) * comb.delta_omega());
  const double t_b = 0.5 * unit;
  return BellSettings(0.0, unit, t_b, t_b + unit, response_time);
}

BellSettings mirrored_settings(const FrequencyComb& comb, double response_time) {
  const BellSettings rule = optimal_settings(comb, response_time);
  return BellSettings(0.0, -rule.t_a_prime, rule.t_b, rule.t_b - (rule.t_b_prime - rule.t_b),
                      response_time);
}

Eigen::Matrix2d chsh_coincidences(const BipartitePhotonState& state, double t_a, double t_b,
                                  double response_time) {
  require_two_modes(state, "chsh_coincidences");
  Eigen::Matrix2d table = coincidence_table(state, t_a, t_b, response_time);
  const double total = table.sum();
  if (!(total > 0.0)) throw std::invalid_argument("chsh_coincidences: zero coincidence rate");
  return table / total;
}

double chsh_correlation(const Eigen::Matrix2d& c) {
  const double total = c.sum();
  if (!(total > 0.0)) throw std::invalid_argument("chsh_correlation: all-zero coincidence table");
  return (c(0, 0) + c(1, 1) - c(0, 1) - c(1, 0)) / total;
}

double chsh_s2(const BipartitePhotonState& state, const BellSettings& s) {
  require_two_modes(state, "chsh_s2");
  const double t = s.response_time;
  auto e = [&](double ta, double tb) { return chsh_correlation(chsh_coincidences(state, ta, tb, t)); };
  return e(s.t_a, s.t_b) - e(s.t_a, s.t_b_prime) + e(s.t_a_prime, s.t_b) + e(s.t_a_prime, s.t_b_prime);
}

double chsh_s2_bound(double delta_omega, double response_time) {
  const double s = sinc(0.5 * delta_omega * response_time);
  return 2.0 * std::sqrt(2.0) * s * s;
}

double chsh_threshold_response_time(double delta_omega) {
  if (!(delta_omega > 0.0)) throw std::invalid_argument("chsh_threshold_response_time: delta_omega must be > 0");
  const double target = std::pow(2.0, -0.25);
  auto f = [target](double x) { return sinc(x) - target; };
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(f, 1e-6, kPi, boost::math::tools::eps_tolerance<double>(50),
                                                      iterations);
  return (root.first + root.second) / delta_omega;
}

double evaluate_indicator(const BipartitePhotonState& state, const BellSettings& settings,
                          BellIndicator indicator) {
  return indicator == BellIndicator::chsh ? chsh_s2(state, settings) : s_n(state, settings);
}

SearchResult maximize_indicator(const BipartitePhotonState& state, double response_time,
                                BellIndicator indicator, const SearchConfig& config) {
  if (state.dimension() < 2) throw std::invalid_argument("maximize_indicator: requires N >= 2");
  if (indicator == BellIndicator::chsh) require_two_modes(state, "maximize_s2");
  if (config.grid_steps < 2) throw std::invalid_argument("maximize_indicator: grid_steps must be >= 2");

  const double period = state.comb().beat_period();
  const std::size_t g = config.grid_steps;
  const double step = period / static_cast<double>(g);

  // All lattice settings share the times {i * step}, so P(x, y, .) is
  // tabulated once per lattice pair and the 3-D grid only combines entries.
  std::vector<std::vector<double>> joint(g * g);
  parallel_for(g * g, [&](std::size_t idx) {
    joint[idx] = joint_probabilities(state, step * static_cast<double>(idx / g),
                                     step * static_cast<double>(idx % g), response_time);
  });
  auto lattice = [&](std::size_t ia, std::size_t ib) -> const std::vector<double>& { return joint[ia * g + ib]; };

  struct Best {
    double value = -std::numeric_limits<double>::infinity();
    std::array<std::size_t, 3> at{};
  };
  std::vector<Best> per_d(g);
  parallel_for(g, [&](std::size_t d) {
    Best best;
    for (std::size_t ra = 0; ra < g; ++ra) {
      for (std::size_t rb = 0; rb < g; ++rb) {
        const std::size_t bp = (d + rb) % g;
        const double v = indicator_from_joint(indicator, lattice(0, d), lattice(ra, d), lattice(ra, bp),
                                              lattice(0, bp));
        if (v > best.value) best = Best{v, {d, ra, rb}};
      }
    }
    per_d[d] = best;
  });
  Best best;
  for (const Best& b : per_d) {
    if (b.value > best.value) best = b;
  }

  std::array<double, 3> x{};
  const double unit_step = 1.0 / static_cast<double>(g);
  for (std::size_t i = 0; i < 3; ++i) x[i] = unit_step * static_cast<double>(best.at[i]);
  double value = evaluate_indicator(state, settings_from(x, period, response_time), indicator);

  // Powell's direction-set refinement with Brent line searches; plain
  // coordinate steps stall on the diagonal ridges of this objective.
  using Point = std::array<double, 3>;
  std::array<Point, 3> dirs{Point{1, 0, 0}, Point{0, 1, 0}, Point{0, 0, 1}};
  auto along = [](const Point& p, const Point& d, double s) {
    return Point{p[0] + s * d[0], p[1] + s * d[1], p[2] + s * d[2]};
  };
  auto objective = [&](const Point& p) {
    return evaluate_indicator(state, settings_from(p, period, response_time), indicator);
  };
  auto line_max = [&](Point& p, const Point& d, double& v) {
    auto negated = [&](double s) { return -objective(along(p, d, s)); };
    const auto r = boost::math::tools::brent_find_minima(negated, -unit_step, unit_step,
                                                         std::numeric_limits<double>::digits);
    if (-r.second > v) {
      v = -r.second;
      p = along(p, d, r.first);
    }
  };
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    const Point start = x;
    const double before = value;
    std::size_t biggest = 0;
    double biggest_gain = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double v0 = value;
      line_max(x, dirs[i], value);
      if (value - v0 > biggest_gain) {
        biggest_gain = value - v0;
        biggest = i;
      }
    }
    Point shift{x[0] - start[0], x[1] - start[1], x[2] - start[2]};
    const double len = std::sqrt(shift[0] * shift[0] + shift[1] * shift[1] + shift[2] * shift[2]);
    if (len > 0.0) {
      for (double& c : shift) c /= len;
      line_max(x, shift, value);
      dirs[biggest] = dirs[2];
      dirs[2] = shift;
    }
    if (value - before <= config.tolerance) break;
  }
  return SearchResult{settings_from(x, period, response_time), value};
}

SearchResult maximize_s2(const BipartitePhotonState& state, double response_time, const SearchConfig& config) {
  return maximize_indicator(state, response_time, BellIndicator::chsh, config);
}

SearchResult maximize_s_n(const BipartitePhotonState& state, double response_time, const SearchConfig& config) {
  return maximize_indicator(state, response_time, BellIndicator::cglmp, config);
}

double locate_classical_crossing(const BipartitePhotonState& state, double t_lo, double t_hi,
                                 const SearchConfig& config) {
  auto excess = [&](double t) { return maximize_s2(state, t, config).value - 2.0; };
  const double f_lo = excess(t_lo);
  const double f_hi = excess(t_hi);
  if (f_lo * f_hi > 0.0) {
    throw std::invalid_argument("locate_classical_crossing: interval does not bracket S2 = 2");
  }
  std::uintmax_t iterations = 100;
  const auto root = boost::math::tools::toms748_solve(excess, t_lo, t_hi, f_lo, f_hi,
                                                      boost::math::tools::eps_tolerance<double>(40), iterations);
  return 0.5 * (root.first + root.second);
}

}  // namespace freqcomb
