#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "freqcomb/circuit_synth.hpp"
#include "test_support.hpp"

using namespace freqcomb;

namespace {

std::size_t reverse_bits(std::size_t v, int bits) {
  std::size_t r = 0;
  for (int b = 0; b < bits; ++b) r |= ((v >> b) & 1U) << (bits - 1 - b);
  return r;
}

FrequencyComb ghz_comb(std::size_t n, double fsr_ghz = 1.0, double offset_ghz = 0.0) {
  return comb_from_ghz(n, fsr_ghz, offset_ghz);
}

}  // namespace

TEST_CASE("two-mode demux is a single MZI with half-period delay") {
  const DemuxTree tree = synthesize_demux(ghz_comb(2));
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.levels == 1);
  CHECK(tree.nodes[0].delay == doctest::Approx(0.5e-9).epsilon(1e-14));
  CHECK(tree.dropped_ports.empty());
}

TEST_CASE("four-mode demux halves the delay per level") {
  const FrequencyComb comb = ghz_comb(4);
  const DemuxTree tree = synthesize_demux(comb);
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.node(1, 0).delay == doctest::Approx(kPi / comb.delta_omega()).epsilon(1e-14));
  CHECK(tree.node(2, 0).delay == doctest::Approx(kPi / (2 * comb.delta_omega())).epsilon(1e-14));
  CHECK(tree.node(2, 1).delay == tree.node(2, 0).delay);
}

TEST_CASE("three-mode demux reuses the four-port tree and drops one port") {
  const DemuxTree tree = synthesize_demux(ghz_comb(3));
  CHECK(tree.nodes.size() == 3);
  REQUIRE(tree.dropped_ports.size() == 1);
  const RoutingMap map = verify_demux(tree);
  std::set<std::size_t> used(map.port_of_mode.begin(), map.port_of_mode.end());
  CHECK(used.size() == 3);
  CHECK(used.count(tree.dropped_ports[0]) == 0);
  // The dropped port stays dark for every real line.
  for (std::size_t k = 0; k < 3; ++k) {
    const ComplexMatrix t = demux_transfer_matrix(tree, tree.comb.mode_frequency(k));
    CHECK(std::norm(t(static_cast<Eigen::Index>(tree.dropped_ports[0]), 0)) <= 1e-9);
  }
}

TEST_CASE("synthesize_demux rejects a single mode") {
  CHECK_THROWS_AS(synthesize_demux(ghz_comb(1)), std::invalid_argument);
}

TEST_CASE("single MZI routes by total upper-arm phase") {
  const Eigen::Matrix2cd cross = mzi_transfer(0.0);
  const Eigen::Matrix2cd bar = mzi_transfer(kPi);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double a = std::abs(cross(r, c));
      const double b = std::abs(bar(r, c));
      CHECK((std::abs(a) < 1e-15 || std::abs(a - 1.0) < 1e-15));
      CHECK((std::abs(b) < 1e-15 || std::abs(b - 1.0) < 1e-15));
      // Complementary routing.
      CHECK(std::abs(a + b - 1.0) < 1e-15);
    }
  }
  // Phase 0 is i * swap under this coupler convention.
  CHECK(std::abs(cross(0, 1) - Complex(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(cross(1, 0) - Complex(0.0, 1.0)) < 1e-15);
}

TEST_CASE("demux transfer matrices are unitary at every frequency") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> freq(-50.0, 50.0);
  for (std::size_t n : {2U, 3U, 5U, 8U, 13U, 16U}) {
    DemuxTree tree = synthesize_demux(ghz_comb(n));
    for (MziNode& node : tree.nodes) node.trim_phase = phase(rng);  // random tree
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix t = demux_transfer_matrix(tree, kTwoPi * 1e9 * freq(rng));
      CHECK(unitarity_deviation(t) < 1e-10);
      const ComplexMatrix gram = t.adjoint() * t;
      CHECK(testing::max_abs(gram - ComplexMatrix::Identity(t.rows(), t.cols())) < 1e-12);
    }
  }
}

TEST_CASE("demux routing is a bit-reversal bijection for N = 2..16") {
  for (std::size_t n = 2; n <= 16; ++n) {
    const DemuxTree tree = synthesize_demux(ghz_comb(n, 25.0, 193.0e3));
    const RoutingMap map = verify_demux(tree);
    CHECK(map.leakage <= 1e-9);
    std::set<std::size_t> ports;
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(map.port_of_mode[k] == reverse_bits(k, tree.levels));
      ports.insert(map.port_of_mode[k]);
    }
    CHECK(ports.size() == n);
    CHECK(tree.dropped_ports.size() == tree.port_count() - n);
  }
}

TEST_CASE("eight-line demux, brute-force evaluation of every line") {
  const DemuxTree tree = synthesize_demux(ghz_comb(8));
  std::vector<int> hits(8, 0);
  for (std::size_t k = 0; k < 8; ++k) {
    const ComplexMatrix t = demux_transfer_matrix(tree, tree.comb.mode_frequency(k));
    int bright = 0;
    for (Eigen::Index p = 0; p < 8; ++p) {
      const double power = std::norm(t(p, 0));
      if (power >= 1.0 - 1e-9) {
        ++bright;
        ++hits[static_cast<std::size_t>(p)];
      } else {
        CHECK(power <= 1e-9);
      }
    }
    CHECK(bright == 1);
  }
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("routing repeats when omega0 shifts by 2^n comb spacings") {
  for (std::size_t n : {2U, 5U, 8U, 11U}) {
    const DemuxTree tree = synthesize_demux(ghz_comb(n));
    const RoutingMap base = verify_demux(tree);
    for (int m : {-3, 1, 7}) {
      const double shift = static_cast<double>(m) * tree.comb.delta_omega() * static_cast<double>(tree.port_count());
      std::vector<double> omegas;
      for (std::size_t k = 0; k < n; ++k) omegas.push_back(tree.comb.mode_frequency(k) + shift);
      CHECK(route_frequencies(tree, omegas).port_of_mode == base.port_of_mode);
    }
  }
}

TEST_CASE("numeric trim search recovers a working tree from zero trims") {
  for (std::size_t n : {2U, 4U, 6U, 9U}) {
    DemuxTree tree = synthesize_demux(ghz_comb(n, 1.0, 0.37));
    const RoutingMap reference = verify_demux(tree);
    for (MziNode& node : tree.nodes) node.trim_phase = 0.0;
    CHECK_THROWS_AS(verify_demux(tree), RoutingError);
    refine_trims_numerically(tree);
    const RoutingMap recovered = verify_demux(tree);
    CHECK(recovered.leakage <= 1e-9);
    CHECK(recovered.port_of_mode == reference.port_of_mode);
  }
}

TEST_CASE("decompose_unitary") {
  SUBCASE("identity maps to bar elements and zero output phases") {
    const InterferometerMesh mesh = decompose_unitary(UnitaryMap::identity(6));
    CHECK(mesh.layers.size() == 15);
    for (const MeshElement& e : mesh.layers) CHECK(e.theta == 0.0);
    for (double p : mesh.output_phases) CHECK(p == 0.0);
  }
  SUBCASE("two-mode DFT is one balanced element") {
    const UnitaryMap f = UnitaryMap::dft(2);
    const InterferometerMesh mesh = decompose_unitary(f);
    REQUIRE(mesh.layers.size() == 1);
    CHECK(mesh.layers[0].theta == doctest::Approx(kPi / 4).epsilon(1e-14));
    CHECK((reconstruct_mesh(mesh).matrix() - f.matrix()).norm() < 1e-12);
  }
  SUBCASE("Haar N = 8") {
    std::mt19937_64 rng(8);
    const ComplexMatrix u = haar_random_unitary(8, rng);
    const InterferometerMesh mesh = decompose_unitary(u);
    CHECK((reconstruct_mesh(mesh).matrix() - u).norm() < 1e-9);
    for (const MeshElement& e : mesh.layers) CHECK(e.p + 1 < 8);
  }
  SUBCASE("single mode") {
    ComplexMatrix u(1, 1);
    u(0, 0) = std::polar(1.0, 0.3);
    const InterferometerMesh mesh = decompose_unitary(u);
    CHECK(mesh.layers.empty());
    CHECK(mesh.output_phases[0] == doctest::Approx(0.3));
  }
  SUBCASE("non-unitary input is rejected") {
    ComplexMatrix u = ComplexMatrix::Identity(3, 3);
    u(0, 1) = 1e-6;
    CHECK_THROWS_AS(decompose_unitary(u), std::invalid_argument);
  }
}

TEST_CASE("round trip over 100 Haar unitaries per size") {
  std::mt19937_64 rng(2024);
  for (std::size_t n : {2U, 4U, 8U, 16U}) {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexMatrix u = haar_random_unitary(n, rng);
      const InterferometerMesh mesh = decompose_unitary(u);
      CHECK(mesh.layers.size() == n * (n - 1) / 2);
      worst = std::max(worst, (reconstruct_mesh(mesh).matrix() - u).norm());
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("reconstruct_mesh edge cases") {
  CHECK((reconstruct_mesh(InterferometerMesh{4, {}, {0, 0, 0, 0}}).matrix() - ComplexMatrix::Identity(4, 4)).norm() ==
        0.0);
  const UnitaryMap u = reconstruct_mesh(InterferometerMesh{3, {MeshElement{1, 0.0, 0.7}}, {0.1, 0.2, 0.3}});
  ComplexMatrix off = u.matrix();
  off.diagonal().setZero();
  CHECK(testing::max_abs(off) == 0.0);
  CHECK(std::arg(u.matrix()(1, 1)) == doctest::Approx(0.9));
  CHECK_THROWS_AS(reconstruct_mesh(InterferometerMesh{3, {MeshElement{2, 0.1, 0.0}}, {0, 0, 0}}),
                  std::invalid_argument);
}

TEST_CASE("phase shifter length") {
  CHECK(phase_shifter_length(1.0, kTwoPi) == doctest::Approx(kSpeedOfLight).epsilon(1e-15));
  CHECK(phase_shifter_length(2.0, kTwoPi * 1e9) == doctest::Approx(0.149896229).epsilon(1e-12));
  CHECK(phase_shifter_length(4.2, kTwoPi * 1e9) == doctest::Approx(0.07137915666666667).epsilon(1e-12));
  CHECK_THROWS_AS(phase_shifter_length(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(phase_shifter_length(1.0, -1.0), std::invalid_argument);
}
