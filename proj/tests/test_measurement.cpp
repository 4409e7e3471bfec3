#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "freqcomb/measurement.hpp"
#include "test_support.hpp"

using namespace freqcomb;

namespace {

double pair_closed_form(std::size_t n, double delta_omega, double t_width) {
  const double s = sinc(0.5 * static_cast<double>(n - 1) * delta_omega * t_width);
  return (1.0 + s) * (1.0 + s) / (2.0 * (1.0 + s * s));
}

// exp(iH tau) M exp(-iH tau) with H = diag(omega_k + zero_point).
ComplexMatrix evolve_by_exponential(const Projector& m, double tau, double zero_point) {
  const FrequencyComb& c = m.comb();
  const auto n = static_cast<Eigen::Index>(c.n_modes());
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) h(k, k) = c.mode_frequency(static_cast<std::size_t>(k)) + zero_point;
  const ComplexMatrix u = (Complex(0.0, tau) * h).exp();
  return u * m.matrix() * u.adjoint();
}

Projector random_projector(const FrequencyComb& comb, std::mt19937_64& rng) {
  return Projector::from_vector(comb, testing::random_unit_vector(comb.n_modes(), rng));
}

}  // namespace

TEST_CASE("sinc") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(kPi) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sinc(0.5 * kPi) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
  for (double x : {1e-9, 5e-5, 9.9e-5, 1.01e-4, 1e-3}) {
    CHECK(sinc(x) == doctest::Approx(std::sin(x) / x).epsilon(1e-15));
    CHECK(sinc(-x) == sinc(x));
  }
}

TEST_CASE("projector_from_row") {
  const FrequencyComb c3(0.0, 1.0, 3);
  const Projector p = projector_from_row(UnitaryMap::identity(3), 0, c3);
  ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK(testing::max_abs(p.matrix() - expected) == 0.0);

  const FrequencyComb c2(0.0, 1.0, 2);
  const Projector f = projector_from_row(UnitaryMap::dft(2), 0, c2);
  CHECK(testing::max_abs(f.matrix() - ComplexMatrix::Constant(2, 2, 0.5)) < 1e-15);

  std::mt19937_64 rng(3);
  for (std::size_t n : {2U, 5U, 9U}) {
    const FrequencyComb c(0.0, 1.0, n);
    const UnitaryMap u(haar_random_unitary(n, rng));
    ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) sum += projector_from_row(u, j, c).matrix();
    CHECK(testing::max_abs(sum - ComplexMatrix::Identity(sum.rows(), sum.cols())) < 1e-12);
  }
  CHECK_THROWS_AS(projector_from_row(UnitaryMap::identity(3), 3, c3), std::out_of_range);
  CHECK_THROWS_AS(projector_from_row(UnitaryMap::identity(2), 0, c3), std::invalid_argument);
}

TEST_CASE("projector validation") {
  const FrequencyComb c(0.0, 1.0, 2);
  CHECK_THROWS_AS(Projector(c, ComplexMatrix::Identity(2, 2)), std::invalid_argument);
  ComplexMatrix skew = ComplexMatrix::Constant(2, 2, 0.5);
  skew(0, 1) = Complex(0.5, 0.1);
  CHECK_THROWS_AS(Projector(c, skew), std::invalid_argument);
  CHECK_THROWS_AS(Projector(c, ComplexMatrix::Identity(3, 3) / 3.0), std::invalid_argument);
  CHECK_THROWS_AS(DetectionWindow(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("evolve_projector") {
  const FrequencyComb c(2.0 * kPi * 193e12, 2.0 * kPi * 1e9, 2);
  const Projector uniform = Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::fourier, 2));
  CHECK(testing::max_abs(evolve_projector(uniform, 0.0).matrix() - uniform.matrix()) == 0.0);

  const double half_turn = kPi / c.delta_omega();
  const ComplexMatrix flipped = evolve_projector(uniform, half_turn).matrix();
  CHECK(std::abs(flipped(0, 1) + 0.5) < 1e-15);
  CHECK(std::abs(flipped(1, 0) + 0.5) < 1e-15);
  CHECK(flipped(0, 0) == uniform.matrix()(0, 0));

  const Projector diag = Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::computational, 2));
  CHECK(testing::max_abs(evolve_projector(diag, 0.123e-9).matrix() - diag.matrix()) == 0.0);
}

TEST_CASE("evolve_projector matches matrix-exponential conjugation, zero-point term drops out") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> tau(-3.0, 3.0);
  for (std::size_t n : {2U, 4U, 7U}) {
    const FrequencyComb c(0.3, 1.1, n);
    for (int trial = 0; trial < 5; ++trial) {
      const Projector m = random_projector(c, rng);
      const double t = tau(rng);
      const ComplexMatrix fast = evolve_projector(m, t).matrix();
      CHECK(testing::max_abs(fast - evolve_by_exponential(m, t, 0.0)) < 1e-12);
      CHECK(testing::max_abs(fast - evolve_by_exponential(m, t, 0.5 * c.omega0() + 2.7)) < 1e-12);
      // Still a rank-1 projector.
      CHECK(testing::max_abs(fast * fast - fast) < 1e-12);
    }
  }
}

TEST_CASE("effective_projector closed form") {
  const FrequencyComb c(0.0, kTwoPi, 2);
  const Projector uniform = Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::fourier, 2));

  SUBCASE("T = 0 is the evolved projector") {
    const double t = 0.37;
    const ComplexMatrix m = effective_projector(uniform, DetectionWindow(t, 0.0)).matrix();
    CHECK(testing::max_abs(m - evolve_projector(uniform, t).matrix()) == 0.0);
  }
  SUBCASE("one full beat period leaves only the diagonal") {
    const ComplexMatrix m = effective_projector(uniform, DetectionWindow(0.2, 1.0)).matrix();
    CHECK(std::abs(m(0, 1)) < 1e-15);
    CHECK(m(0, 0) == uniform.matrix()(0, 0));
    const ComplexMatrix q = effective_projector_quadrature(uniform, DetectionWindow(0.2, 1.0), 64).matrix();
    CHECK(std::abs(q(0, 1)) < 1e-12);
  }
  SUBCASE("half period gives 1/pi off the diagonal") {
    const ComplexMatrix m = effective_projector(uniform, DetectionWindow(0.0, 0.5)).matrix();
    CHECK(m(0, 1).real() == doctest::Approx(1.0 / kPi).epsilon(1e-15));
    CHECK(std::abs(m(0, 1).imag()) < 1e-16);
    const ComplexMatrix q = effective_projector_quadrature(uniform, DetectionWindow(0.0, 0.5), 64).matrix();
    CHECK(testing::max_abs(q - m) <= 1e-10);
  }
}

TEST_CASE("analytic effective projector agrees with quadrature") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 8; ++n) {
    const FrequencyComb c(1.7, 0.9, n);
    for (int trial = 0; trial < 20; ++trial) {
      const Projector m = random_projector(c, rng);
      const double t_width = 4.0 * kPi * frac(rng) / c.delta_omega();
      const DetectionWindow w(10.0 * (frac(rng) - 0.5), t_width);
      const ComplexMatrix a = effective_projector(m, w).matrix();
      const ComplexMatrix q = effective_projector_quadrature(m, w, 64).matrix();
      worst = std::max(worst, testing::max_abs(a - q));
    }
  }
  CHECK(worst <= 1e-8);
  const FrequencyComb c(0.0, 1.0, 2);
  CHECK_THROWS_AS(effective_projector_quadrature(Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::pair, 2)),
                                                 DetectionWindow(0.0, 1.0), 1),
                  std::invalid_argument);
}

TEST_CASE("quadrature error shrinks as points double") {
  const FrequencyComb c(0.0, 1.0, 8);
  std::mt19937_64 rng(9);
  const Projector m = random_projector(c, rng);
  const DetectionWindow w(0.4, 4.0 * kPi);
  const ComplexMatrix exact = effective_projector(m, w).matrix();
  double previous = 1.0;
  for (std::size_t pts : {8U, 16U, 32U, 64U, 128U}) {
    const double err = testing::max_abs(effective_projector_quadrature(m, w, pts).matrix() - exact);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-12);
}

TEST_CASE("averaging keeps completeness, PSD and unit trace") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (std::size_t n : {2U, 3U, 6U, 10U}) {
    const FrequencyComb c(0.0, kTwoPi * 1e9, n);
    const UnitaryMap u(haar_random_unitary(n, rng));
    for (int trial = 0; trial < 10; ++trial) {
      const DetectionWindow w(frac(rng) * 1e-9, 3.0 * frac(rng) * c.beat_period());
      const SinglePhotonState psi = testing::random_state(c, rng);
      ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const EffectiveProjector m = effective_projector(projector_from_row(u, j, c), w);
        sum += m.matrix();
        CHECK(std::abs(m.matrix().trace() - 1.0) <= 1e-10);
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(m.matrix(), Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
        const double p = detection_probability(psi, m);
        CHECK(p >= -1e-12);
        CHECK(p <= 1.0 + 1e-12);
        total += p;
      }
      CHECK(testing::max_abs(sum - ComplexMatrix::Identity(sum.rows(), sum.cols())) <= 1e-12);
      CHECK(std::abs(total - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("detection_probability examples") {
  const std::size_t n = 5;
  const FrequencyComb c(0.0, 2.0, n);
  std::mt19937_64 rng(1);
  for (std::size_t k = 0; k < n; ++k) {
    const SinglePhotonState mode = SinglePhotonState::basis_mode(c, k);
    for (std::size_t j = 0; j < n; ++j) {
      const EffectiveProjector m = effective_projector(projector_from_row(UnitaryMap::identity(n), j, c),
                                                       DetectionWindow(0.3, 0.7));
      CHECK(detection_probability(mode, m) == (j == k ? 1.0 : 0.0));
    }
    const Projector fourier = projector_from_row(UnitaryMap::dft(n), 0, c);
    const DetectionWindow w(1.3, 0.4);
    CHECK(detection_probability(mode, effective_projector(fourier, w)) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(detection_probability(mode, effective_projector_quadrature(fourier, w, 64)) ==
          doctest::Approx(0.2).epsilon(1e-12));
  }
  const UnitaryMap f = UnitaryMap::dft(n);
  for (std::size_t j = 0; j < n; ++j) {
    const SinglePhotonState row(c, f.matrix().row(static_cast<Eigen::Index>(j)).transpose());
    const EffectiveProjector m = effective_projector(projector_from_row(f, j, c), DetectionWindow(0.0, 0.0));
    CHECK(detection_probability(row, m) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(detection_probability(row, m, 0.25) == doctest::Approx(0.25).epsilon(1e-14));
  }
  const SinglePhotonState psi = testing::random_state(c, rng);
  const EffectiveProjector m = effective_projector(projector_from_row(f, 1, c), DetectionWindow(0.0, 0.1));
  CHECK_THROWS_AS(detection_probability(psi, m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(detection_probability(psi, m, 1.5), std::invalid_argument);
  const FrequencyComb other(0.0, 3.0, n);
  CHECK_THROWS_AS(detection_probability(SinglePhotonState::basis_mode(other, 0), m), std::invalid_argument);
}

TEST_CASE("probabilities approach the instantaneous value as T -> 0") {
  std::mt19937_64 rng(12);
  for (std::size_t n : {2U, 4U, 8U}) {
    const FrequencyComb c(0.0, kTwoPi * 1e9, n);
    const UnitaryMap u(haar_random_unitary(n, rng));
    const SinglePhotonState psi = testing::random_state(c, rng);
    const double t = 0.21e-9;
    for (std::size_t j = 0; j < n; ++j) {
      const Projector m = projector_from_row(u, j, c);
      const ComplexMatrix ideal = evolve_projector(m, t).matrix();
      const double exact = psi.amplitudes().dot(ideal * psi.amplitudes()).real();
      const double avg = detection_probability(psi, effective_projector(m, DetectionWindow(t, 1e-6 * c.beat_period())));
      CHECK(std::abs(avg - exact) < 1e-9);
    }
  }
}

TEST_CASE("observables do not depend on the evolution sign convention") {
  // The conjugate convention exp(-iH tau) M exp(+iH tau) is M(-tau); conjugating
  // both the state and the projector maps one convention onto the other.
  std::mt19937_64 rng(31);
  const FrequencyComb c(0.0, 1.0, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexVector v = testing::random_unit_vector(5, rng);
    const SinglePhotonState psi = testing::random_state(c, rng);
    const Projector m = Projector::from_vector(c, v);
    const Projector m_conj = Projector::from_vector(c, v.conjugate());
    const SinglePhotonState psi_conj(c, psi.amplitudes().conjugate());
    const DetectionWindow w(0.8, 1.9);
    const DetectionWindow mirrored(-0.8, 1.9);
    CHECK(detection_probability(psi, effective_projector(m, w)) ==
          doctest::Approx(detection_probability(psi_conj, effective_projector(m_conj, mirrored))).epsilon(1e-13));
    CHECK(projection_fidelity(m, w) == doctest::Approx(projection_fidelity(m, mirrored)).epsilon(1e-13));
  }
}

TEST_CASE("projection fidelity") {
  const double dw = kTwoPi * 1e9;
  SUBCASE("T = 0 gives 1 for every projector") {
    std::mt19937_64 rng(2);
    for (std::size_t n : {1U, 2U, 6U}) {
      const Projector m = random_projector(FrequencyComb(0.0, dw, n), rng);
      CHECK(projection_fidelity(m, DetectionWindow(0.4e-9, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("computational basis is untouched by averaging") {
    for (double t_width : {0.0, 1e-12, 3e-10, 2e-9}) {
      const FrequencyComb c(0.0, dw, 7);
      const Projector m = Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::computational, 7));
      CHECK(projection_fidelity(m, DetectionWindow(0.0, t_width)) == 1.0);
    }
  }
  SUBCASE("pair basis closed form, including s = 0") {
    for (std::size_t n : {2U, 3U, 9U}) {
      const FrequencyComb c(0.0, dw, n);
      const Projector m = Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::pair, n));
      for (double frac : {0.0, 0.1, 0.5, 1.0, 1.7}) {
        const double t_width = frac * kTwoPi / (static_cast<double>(n - 1) * dw);
        CHECK(projection_fidelity(m, DetectionWindow(0.0, t_width)) ==
              doctest::Approx(pair_closed_form(n, dw, t_width)).epsilon(1e-13));
      }
      const double zero_t = kTwoPi / (static_cast<double>(n - 1) * dw);
      CHECK(projection_fidelity(m, DetectionWindow(0.0, zero_t)) == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  SUBCASE("pair-basis closed form against quadrature projector") {
    for (std::size_t n : {2U, 4U, 8U}) {
      const FrequencyComb c(0.0, dw, n);
      const Projector m = Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::pair, n));
      const double t_width = 0.6 * kTwoPi / (static_cast<double>(n - 1) * dw);
      const DetectionWindow w(0.0, t_width);
      const ComplexMatrix q = effective_projector_quadrature(m, w, 64).matrix();
      const ComplexMatrix ideal = m.matrix();
      const double f = std::norm(q.conjugate().cwiseProduct(ideal).sum()) / (q.squaredNorm() * ideal.squaredNorm());
      CHECK(std::abs(f - pair_closed_form(n, dw, t_width)) <= 1e-10);
    }
  }
  SUBCASE("independent of the detection instant") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> t(-5e-9, 5e-9);
    for (int trial = 0; trial < 50; ++trial) {
      const Projector m = random_projector(FrequencyComb(0.0, dw, 1 + static_cast<std::size_t>(trial % 8)), rng);
      const double t_width = 0.3e-9;
      const double f0 = projection_fidelity(m, DetectionWindow(0.0, t_width));
      CHECK(std::abs(projection_fidelity(m, DetectionWindow(t(rng), t_width)) - f0) <= 1e-12);
    }
  }
  SUBCASE("pair fidelity is non-increasing over the first lobe") {
    const std::size_t n = 5;
    const FrequencyComb c(0.0, dw, n);
    const Projector m = Projector::from_vector(c, fidelity_basis_vector(FidelityBasis::pair, n));
    const double span = kTwoPi / (static_cast<double>(n - 1) * dw);
    double previous = 2.0;
    for (int i = 0; i <= 200; ++i) {
      const double f = projection_fidelity(m, DetectionWindow(0.0, span * i / 200.0));
      CHECK(f <= previous + 1e-15);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0 + 1e-15);
      previous = f;
    }
  }
  SUBCASE("omega0 does not enter") {
    std::mt19937_64 rng(10);
    const ComplexVector v = testing::random_unit_vector(4, rng);
    const DetectionWindow w(0.2e-9, 0.15e-9);
    const double base = projection_fidelity(Projector::from_vector(FrequencyComb(0.0, dw, 4), v), w);
    const double shifted = projection_fidelity(Projector::from_vector(FrequencyComb(kTwoPi * 193.4e12, dw, 4), v), w);
    CHECK(base == shifted);
  }
}

TEST_CASE("fidelity sweep") {
  const FrequencyComb comb = comb_from_ghz(2, 1.0);
  SUBCASE("85-mode Fourier basis at 3 ps") {
    const auto rows = fidelity_sweep(FidelityBasis::fourier, {85}, {3e-12}, comb);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fidelity >= 0.9);
    CHECK(rows[0].fidelity == doctest::Approx(0.9995576786377933).epsilon(1e-12));
  }
  SUBCASE("row order is N-major and T = 0 rows are 1") {
    const std::vector<std::size_t> ns{2, 3, 5};
    const std::vector<double> ts{0.0, 1e-11, 1e-10};
    const auto rows = fidelity_sweep(FidelityBasis::pair, ns, ts, comb);
    REQUIRE(rows.size() == 9);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].n_modes == ns[i / 3]);
      CHECK(rows[i].response_time == ts[i % 3]);
      if (rows[i].response_time == 0.0) CHECK(rows[i].fidelity == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("pair basis depends only on (N-1) T") {
    const double t2 = 0.2e-9;
    const auto a = fidelity_sweep(FidelityBasis::pair, {2}, {t2}, comb);
    const auto b = fidelity_sweep(FidelityBasis::pair, {3}, {t2 / 2.0}, comb);
    CHECK(std::abs(a[0].fidelity - b[0].fidelity) <= 1e-10);
  }
  SUBCASE("result does not depend on the thread count") {
    const std::vector<std::size_t> ns{2, 4, 8, 16, 32};
    const std::vector<double> ts{1e-12, 5e-12, 2e-11, 1e-10};
    setenv("FREQCOMB_THREADS", "1", 1);
    const auto serial = fidelity_sweep(FidelityBasis::fourier, ns, ts, comb);
    setenv("FREQCOMB_THREADS", "4", 1);
    const auto threaded = fidelity_sweep(FidelityBasis::fourier, ns, ts, comb);
    unsetenv("FREQCOMB_THREADS");
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].fidelity == threaded[i].fidelity);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fidelity_sweep(FidelityBasis::pair, {}, {0.0}, comb), std::invalid_argument);
    CHECK_THROWS_AS(fidelity_sweep(FidelityBasis::pair, {2}, {}, comb), std::invalid_argument);
    CHECK_THROWS_AS(fidelity_sweep(FidelityBasis::pair, {1}, {0.0}, comb), std::invalid_argument);
    CHECK_THROWS_AS(parse_fidelity_basis("polar"), std::invalid_argument);
    CHECK(parse_fidelity_basis(to_string(FidelityBasis::fourier)) == FidelityBasis::fourier);
  }
}
