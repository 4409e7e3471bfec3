#include "freqcomb/circuit_synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

namespace freqcomb {
namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t node_index(int level, std::size_t position) {
  return ((std::size_t{1} << (level - 1)) - 1) + position;
}

std::size_t bit_reverse(std::size_t value, int bits) {
  std::size_t out = 0;
  for (int b = 0; b < bits; ++b) {
    out = (out << 1) | ((value >> b) & 1U);
  }
  return out;
}

int levels_for(std::size_t n_modes) {
  int n = 0;
  while ((std::size_t{1} << n) < n_modes) ++n;
  return n;
}

double wrap_phase(double phase) {
  double w = std::fmod(phase, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

// Upper-arm phase of a node for a line at omega, reduced mod 2 pi.
double node_phase(const MziNode& node, double omega) {
  return wrap_phase(std::fmod(omega * node.delay, kTwoPi) + node.trim_phase);
}

void check_tree(const DemuxTree& tree) {
  if (tree.levels < 1 || tree.nodes.size() != (std::size_t{1} << tree.levels) - 1) {
    throw std::invalid_argument("DemuxTree: node count does not match level count");
  }
}

}  // namespace

const MziNode& DemuxTree::node(int level, std::size_t position) const {
  return nodes.at(node_index(level, position));
}

MziNode& DemuxTree::node(int level, std::size_t position) {
  return nodes.at(node_index(level, position));
}

double level_delay(const FrequencyComb& comb, int level) {
  if (level < 1) throw std::invalid_argument("level_delay: level must be >= 1");
  return kPi / (std::ldexp(1.0, level - 1) * comb.delta_omega());
}

Eigen::Matrix2cd mzi_transfer(double phase) {
  Eigen::Matrix2cd coupler;
  coupler << 1.0, kI, kI, 1.0;
  coupler /= std::sqrt(2.0);
  Eigen::Matrix2cd arm = Eigen::Matrix2cd::Zero();
  arm(0, 0) = std::polar(1.0, phase);
  arm(1, 1) = 1.0;
  return coupler * arm * coupler;
}

DemuxTree synthesize_demux(const FrequencyComb& comb) {
  if (comb.n_modes() < 2) throw std::invalid_argument("synthesize_demux: need at least 2 modes");
  DemuxTree tree{comb, levels_for(comb.n_modes()), {}, {}};
  const int n = tree.levels;

  // At level j the lines reaching node p share k mod 2^{j-1} = bitrev(p); the
  // next bit of k must select the output. Choosing the trim so that the even
  // lines see phase pi (bar state) keeps omega_0 on the upper path throughout.
  for (int j = 1; j <= n; ++j) {
    const double tau = level_delay(comb, j);
    const std::size_t width = std::size_t{1} << (j - 1);
    for (std::size_t p = 0; p < width; ++p) {
      const std::size_t residue = bit_reverse(p, j - 1);
      const double line_phase = std::fmod(comb.omega0() * tau, kTwoPi) +
                                kPi * static_cast<double>(residue) / static_cast<double>(width);
      tree.nodes.push_back(MziNode{tau, wrap_phase(kPi - line_phase), j, p});
    }
  }

  for (std::size_t k = comb.n_modes(); k < tree.port_count(); ++k) {
    tree.dropped_ports.push_back(bit_reverse(k, n));
  }
  std::sort(tree.dropped_ports.begin(), tree.dropped_ports.end());

  try {
    verify_demux(tree);
  } catch (const RoutingError&) {
    refine_trims_numerically(tree);
    verify_demux(tree);
  }
  return tree;
}

void refine_trims_numerically(DemuxTree& tree) {
  check_tree(tree);
  const FrequencyComb& comb = tree.comb;
  const std::size_t lines = tree.port_count();
  for (MziNode& node : tree.nodes) {
    const std::size_t width = std::size_t{1} << (node.level - 1);
    const std::size_t residue = bit_reverse(node.position, node.level - 1);
    std::vector<double> phases;
    std::vector<int> targets;
    for (std::size_t k = residue; k < lines; k += width) {
      const double omega = comb.omega0() + static_cast<double>(k) * comb.delta_omega();
      phases.push_back(std::fmod(omega * node.delay, kTwoPi));
      targets.push_back(static_cast<int>((k >> (node.level - 1)) & 1U));
    }
    auto misrouted = [&](double trim) {
      double loss = 0.0;
      for (std::size_t i = 0; i < phases.size(); ++i) {
        const Eigen::Matrix2cd t = mzi_transfer(phases[i] + trim);
        loss += 1.0 - std::norm(t(targets[i], 0));
      }
      return loss;
    };
    constexpr int kGrid = 720;
    double best_trim = 0.0;
    double best_loss = misrouted(0.0);
    for (int g = 1; g < kGrid; ++g) {
      const double trim = kTwoPi * g / kGrid;
      const double loss = misrouted(trim);
      if (loss < best_loss) {
        best_loss = loss;
        best_trim = trim;
      }
    }
    const double step = kTwoPi / kGrid;
    const auto refined = boost::math::tools::brent_find_minima(
        misrouted, best_trim - step, best_trim + step, std::numeric_limits<double>::digits);
    node.trim_phase = wrap_phase(refined.first);
  }
}

ComplexMatrix demux_transfer_matrix(const DemuxTree& tree, double omega) {
  check_tree(tree);
  const auto ports = static_cast<Eigen::Index>(tree.port_count());
  // Row r of `inputs` holds the amplitude entering that node input as a
  // function of the external input index.
  std::vector<ComplexMatrix> node_inputs(tree.nodes.size(), ComplexMatrix::Zero(2, ports));
  node_inputs[0](0, 0) = 1.0;
  node_inputs[0](1, 1) = 1.0;
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    node_inputs[i](1, static_cast<Eigen::Index>(1 + i)) = 1.0;
  }

  ComplexMatrix out = ComplexMatrix::Zero(ports, ports);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const MziNode& node = tree.nodes[i];
    const ComplexMatrix outputs = mzi_transfer(node_phase(node, omega)) * node_inputs[i];
    for (Eigen::Index b = 0; b < 2; ++b) {
      const std::size_t child = 2 * node.position + static_cast<std::size_t>(b);
      if (node.level == tree.levels) {
        out.row(static_cast<Eigen::Index>(child)) = outputs.row(b);
      } else {
        node_inputs[node_index(node.level + 1, child)].row(0) = outputs.row(b);
      }
    }
  }
  return out;
}

RoutingMap route_frequencies(const DemuxTree& tree, const std::vector<double>& omegas) {
  RoutingMap map;
  std::vector<bool> used(tree.port_count(), false);
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    const ComplexMatrix t = demux_transfer_matrix(tree, omegas[k]);
    const Eigen::VectorXd power = t.col(0).cwiseAbs2();
    Eigen::Index port = 0;
    const double routed = power.maxCoeff(&port);
    if (routed < 1.0 - kRoutingTolerance) {
      throw RoutingError("demux routing failed: line " + std::to_string(k) +
                         " splits across ports (max power " + std::to_string(routed) + ")");
    }
    if (used[static_cast<std::size_t>(port)]) {
      throw RoutingError("demux routing failed: line " + std::to_string(k) +
                         " collides on port " + std::to_string(port));
    }
    used[static_cast<std::size_t>(port)] = true;
    for (Eigen::Index p = 0; p < power.size(); ++p) {
      if (p != port) map.leakage = std::max(map.leakage, power(p));
    }
    map.min_routed = std::min(map.min_routed, routed);
    map.port_of_mode.push_back(static_cast<std::size_t>(port));
  }
  return map;
}

RoutingMap verify_demux(const DemuxTree& tree) {
  check_tree(tree);
  std::vector<double> omegas;
  for (std::size_t k = 0; k < tree.comb.n_modes(); ++k) omegas.push_back(tree.comb.mode_frequency(k));
  RoutingMap map = route_frequencies(tree, omegas);
  for (std::size_t k = 0; k < map.port_of_mode.size(); ++k) {
    const std::size_t port = map.port_of_mode[k];
    if (std::find(tree.dropped_ports.begin(), tree.dropped_ports.end(), port) !=
        tree.dropped_ports.end()) {
      throw RoutingError("demux routing failed: line " + std::to_string(k) +
                         " exits dropped port " + std::to_string(port));
    }
  }
  return map;
}

Eigen::Matrix2cd mesh_element_matrix(const MeshElement& e) {
  const double c = std::cos(e.theta);
  const double s = std::sin(e.theta);
  const Complex ph = std::polar(1.0, e.phi);
  Eigen::Matrix2cd t;
  t << ph * c, -s, ph * s, c;
  return t;
}

namespace {

void apply_rows(ComplexMatrix& u, const MeshElement& e) {
  const auto p = static_cast<Eigen::Index>(e.p);
  const Eigen::Matrix2cd t = mesh_element_matrix(e);
  const ComplexMatrix block = u.middleRows(p, 2);
  u.middleRows(p, 2) = t * block;
}

void apply_cols_inverse(ComplexMatrix& u, const MeshElement& e) {
  const auto p = static_cast<Eigen::Index>(e.p);
  const Eigen::Matrix2cd t_inv = mesh_element_matrix(e).adjoint();
  const ComplexMatrix block = u.middleCols(p, 2);
  u.middleCols(p, 2) = block * t_inv;
}

}  // namespace

InterferometerMesh decompose_unitary(const ComplexMatrix& input) {
  if (input.rows() == 0 || input.rows() != input.cols()) {
    throw std::invalid_argument("decompose_unitary: matrix must be square and non-empty");
  }
  const double dev = unitarity_deviation(input);
  if (!(dev <= 1e-8)) {
    throw std::invalid_argument("decompose_unitary: input is not unitary (deviation " +
                                std::to_string(dev) + ")");
  }
  const auto n = static_cast<std::size_t>(input.rows());
  ComplexMatrix u = input;
  std::vector<MeshElement> from_right;
  std::vector<MeshElement> from_left;

  // Null the lower triangle along anti-diagonals, alternating between column
  // operations (even diagonals) and row operations (odd diagonals).
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (i % 2 == 0) {
        const std::size_t m = i - j;
        const auto r = static_cast<Eigen::Index>(n - 1 - j);
        const Complex a = u(r, static_cast<Eigen::Index>(m));
        const Complex b = u(r, static_cast<Eigen::Index>(m + 1));
        MeshElement e{m, std::atan2(std::abs(a), std::abs(b)), 0.0};
        if (a != 0.0) e.phi = std::arg(a) - std::arg(b);
        apply_cols_inverse(u, e);
        from_right.push_back(e);
      } else {
        const std::size_t m = n - 2 - i + j;
        const auto c = static_cast<Eigen::Index>(j);
        const Complex a = u(static_cast<Eigen::Index>(m), c);
        const Complex b = u(static_cast<Eigen::Index>(m + 1), c);
        MeshElement e{m, std::atan2(std::abs(b), std::abs(a)), 0.0};
        if (b != 0.0) e.phi = kPi + std::arg(b) - std::arg(a);
        apply_rows(u, e);
        from_left.push_back(e);
      }
    }
  }

  ComplexVector d = u.diagonal();
  InterferometerMesh mesh{n, from_right, {}};
  // Commute each inverse left element through the diagonal:
  // T^{-1}(theta, phi) D = D' T(theta, phi').
  for (auto it = from_left.rbegin(); it != from_left.rend(); ++it) {
    const auto m = static_cast<Eigen::Index>(it->p);
    const Complex dm = d(m);
    const Complex dn = d(m + 1);
    MeshElement moved{it->p, it->theta, 0.0};
    if (it->theta == 0.0) {
      d(m) = dm * std::polar(1.0, -it->phi);
    } else {
      moved.phi = std::arg(-dm / dn);
      d(m) = -std::polar(1.0, -it->phi) * dn;
    }
    mesh.layers.push_back(moved);
  }
  mesh.output_phases.resize(n);
  for (std::size_t k = 0; k < n; ++k) mesh.output_phases[k] = std::arg(d(static_cast<Eigen::Index>(k)));
  return mesh;
}

InterferometerMesh decompose_unitary(const UnitaryMap& u) { return decompose_unitary(u.matrix()); }

UnitaryMap reconstruct_mesh(const InterferometerMesh& mesh) {
  if (mesh.n_modes == 0 || mesh.output_phases.size() != mesh.n_modes) {
    throw std::invalid_argument("reconstruct_mesh: output phase count must equal n_modes");
  }
  const auto n = static_cast<Eigen::Index>(mesh.n_modes);
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  for (const MeshElement& e : mesh.layers) {
    if (e.p + 1 >= mesh.n_modes) throw std::invalid_argument("reconstruct_mesh: element out of range");
    apply_rows(u, e);
  }
  for (Eigen::Index k = 0; k < n; ++k) u.row(k) *= std::polar(1.0, mesh.output_phases[static_cast<std::size_t>(k)]);
  return UnitaryMap(std::move(u));
}

double phase_shifter_length(double group_index, double delta_omega) {
  if (!(group_index > 0.0) || !(delta_omega > 0.0)) {
    throw std::invalid_argument("phase_shifter_length: inputs must be positive");
  }
  return kTwoPi * kSpeedOfLight / (group_index * delta_omega);
}

}  // namespace freqcomb
