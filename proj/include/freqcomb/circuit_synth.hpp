#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "freqcomb/core_state.hpp"

namespace freqcomb {

// Unbalanced Mach-Zehnder interferometer. Delay and trim sit on the upper arm
// between two symmetric 50/50 couplers (1/sqrt2)[[1, i], [i, 1]].
struct MziNode {
  double delay = 0.0;       // s
  double trim_phase = 0.0;  // rad
  int level = 1;            // 1-based
  std::size_t position = 0;

  friend bool operator==(const MziNode&, const MziNode&) = default;
};

// Frequency-to-space demultiplexer: 2^n - 1 MZIs in n levels. Output b of node
// (j, p) feeds the upper input of node (j + 1, 2p + b); output b of the last
// level node p is port 2p + b.
struct DemuxTree {
  FrequencyComb comb;
  int levels = 0;
  std::vector<MziNode> nodes;  // level-major, position ascending
  std::vector<std::size_t> dropped_ports;

  std::size_t port_count() const { return std::size_t{1} << levels; }
  const MziNode& node(int level, std::size_t position) const;
  MziNode& node(int level, std::size_t position);
};

// Adjacent-mode Givens element acting on modes (p, p + 1):
// [[e^{i phi} cos theta, -sin theta], [e^{i phi} sin theta, cos theta]].
struct MeshElement {
  std::size_t p = 0;
  double theta = 0.0;  // rad
  double phi = 0.0;    // rad

  friend bool operator==(const MeshElement&, const MeshElement&) = default;
};

// Elements are listed in the order light traverses them; the reconstructed
// unitary is diag(e^{i output_phases}) * E_last * ... * E_first.
struct InterferometerMesh {
  std::size_t n_modes = 0;
  std::vector<MeshElement> layers;
  std::vector<double> output_phases;  // rad

  friend bool operator==(const InterferometerMesh&, const InterferometerMesh&) = default;
};

struct RoutingMap {
  std::vector<std::size_t> port_of_mode;
  double leakage = 0.0;      // largest squared amplitude outside the routed port
  double min_routed = 1.0;   // smallest squared amplitude on a routed port
};

class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kRoutingTolerance = 1e-9;

// Level j delay pi / (2^{j-1} delta_omega).
double level_delay(const FrequencyComb& comb, int level);

// Node transfer C diag(e^{i phase}, 1) C for total upper-arm phase.
Eigen::Matrix2cd mzi_transfer(double phase);

DemuxTree synthesize_demux(const FrequencyComb& comb);

// Re-solves every trim phase by a 1-D search on routing contrast, ignoring
// the current trims. Used when the constructive trims fail verification.
void refine_trims_numerically(DemuxTree& tree);

// 2^n x 2^n map from external inputs to output ports at angular frequency omega.
// Input 0/1 are the root's upper/lower inputs; input 1 + i is the lower input
// of the i-th non-root node in level-major order.
ComplexMatrix demux_transfer_matrix(const DemuxTree& tree, double omega);

// Routes every comb line entering root input 0; throws RoutingError when any
// line splits across ports, lands on a dropped port, or collides with another.
RoutingMap verify_demux(const DemuxTree& tree);

// Same, evaluated at an arbitrary set of line frequencies.
RoutingMap route_frequencies(const DemuxTree& tree, const std::vector<double>& omegas);

Eigen::Matrix2cd mesh_element_matrix(const MeshElement& e);

// Rectangular (Clements) decomposition. Throws std::invalid_argument when the
// input deviates from unitarity by more than 1e-8 (Frobenius).
InterferometerMesh decompose_unitary(const ComplexMatrix& u);
InterferometerMesh decompose_unitary(const UnitaryMap& u);

UnitaryMap reconstruct_mesh(const InterferometerMesh& mesh);

// Waveguide length 2 pi c / (n_g delta_omega) in metres.
double phase_shifter_length(double group_index, double delta_omega);

}  // namespace freqcomb
