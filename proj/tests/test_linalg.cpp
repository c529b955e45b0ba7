#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

using namespace qsl;
using namespace qsl::test;
using Catch::Approx;

namespace {

// Real roots of the characteristic polynomial of a 3x3 Hermitian matrix via
// the trigonometric cubic formula, polished with Newton steps.
std::vector<double> cubic_eigenvalues(const ComplexMatrix& m) {
  const double tr = m.trace().real();
  double minors = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) minors += (m(i, i) * m(j, j) - m(i, j) * m(j, i)).real();
  const complex det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                      m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                      m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  // lambda^3 + a lambda^2 + b lambda + c
  const double a = -tr, b = minors, c = -det.real();
  const double p = b - a * a / 3, q = 2 * a * a * a / 27 - a * b / 3 + c;
  const double r = 2 * std::sqrt(-p / 3);
  const double phi = std::acos(std::clamp(3 * q / (p * r), -1.0, 1.0)) / 3;
  std::vector<double> roots;
  for (int k = 0; k < 3; ++k) {
    double x = r * std::cos(phi - 2 * std::numbers::pi * k / 3) - a / 3;
    for (int it = 0; it < 5; ++it) {
      const double f = ((x + a) * x + b) * x + c;
      const double df = (3 * x + 2 * a) * x + b;
      if (df != 0) x -= f / df;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Eigenvectors of a random Hermitian matrix form a random unitary.
ComplexMatrix random_unitary(std::size_t d, std::uint64_t seed) {
  return random_hermitian(d, seed).eigenvectors();
}

}  // namespace

TEST_CASE("eig_hermitian on diagonal and identity", "[linalg]") {
  const auto g = eig_hermitian(ComplexMatrix::diagonal(std::vector<double>{1.0, -1.0}));
  REQUIRE(g.eigenvalues()[0] == Approx(-1.0));
  REQUIRE(g.eigenvalues()[1] == Approx(1.0));
  CHECK(g.k_min() == -1.0);
  CHECK(g.k_max() == 1.0);

  const auto id = eig_hermitian(ComplexMatrix::identity(3));
  for (double l : id.eigenvalues()) CHECK(l == Approx(1.0));
  CHECK(id.orthonormality_defect() <= 1e-12);
}

TEST_CASE("eig_hermitian reconstructs a random 4x4", "[linalg]") {
  const auto g = random_hermitian(4, 17);
  CHECK(g.reconstruction_residual() <= 1e-10);
  CHECK(g.orthonormality_defect() <= 1e-10);
  CHECK(std::is_sorted(g.eigenvalues().begin(), g.eigenvalues().end()));
}

TEST_CASE("eig_hermitian rejects non-Hermitian input", "[linalg]") {
  ComplexMatrix m(2);
  m(0, 1) = 1.0;
  CHECK(error_code_of([&] { eig_hermitian(m); }) == errc::not_hermitian);
  m(1, 0) = complex(1.0, 1e-3);
  CHECK(error_code_of([&] { eig_hermitian(m); }) == errc::not_hermitian);
  ComplexMatrix bad(2);
  bad(0, 0) = std::nan("");
  CHECK(error_code_of([&] { eig_hermitian(bad); }) == errc::not_hermitian);
}

TEST_CASE("eig_hermitian accepts the zero matrix and complex phases", "[linalg]") {
  const auto zero = eig_hermitian(ComplexMatrix(3));
  for (double l : zero.eigenvalues()) CHECK(l == 0.0);

  // sigma_y: eigenvalues -1, 1 with complex eigenvectors
  ComplexMatrix sy(2);
  sy(0, 1) = complex(0, -1);
  sy(1, 0) = complex(0, 1);
  const auto g = eig_hermitian(sy);
  CHECK(g.eigenvalues()[0] == Approx(-1.0));
  CHECK(g.eigenvalues()[1] == Approx(1.0));
  CHECK(g.reconstruction_residual() <= 1e-14);
}

TEST_CASE("eig_hermitian handles degenerate spectra", "[linalg]") {
  const auto u = random_unitary(5, 99);
  const std::vector<double> spectrum{1.0, 1.0, 2.0, 2.0, 2.0};
  const auto m = u * ComplexMatrix::diagonal(spectrum) * u.adjoint();
  // enforce exact Hermiticity
  ComplexMatrix h(5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  const auto g = eig_hermitian(h);
  for (std::size_t k = 0; k < 5; ++k) CHECK(g.eigenvalues()[k] == Approx(spectrum[k]).margin(1e-12));
  CHECK(g.orthonormality_defect() <= 1e-10);
}

TEST_CASE("spectral_function on diagonal generators", "[linalg]") {
  const auto g = qubit();
  const auto same = spectral_function(g, [](double l) { return complex(l); });
  CHECK(max_abs_diff(same, ComplexMatrix::diagonal(std::vector<double>{-1.0, 1.0})) <= 1e-15);

  const auto u = spectral_function(
      g, [](double l) { return std::polar(1.0, -l * std::numbers::pi / 2); });
  CHECK(std::abs(u(0, 0) - complex(0, 1)) <= 1e-15);
  CHECK(std::abs(u(1, 1) - complex(0, -1)) <= 1e-15);
  CHECK(std::abs(u(0, 1)) <= 1e-15);

  const auto a = spectral_function(diag_generator({-1.0, 0.0, 2.0}),
                                   [](double l) { return complex(std::abs(l - 0.0)); });
  CHECK(max_abs_diff(a, ComplexMatrix::diagonal(std::vector<double>{1.0, 0.0, 2.0})) <= 1e-15);
}

TEST_CASE("random_hermitian is deterministic and Hermitian", "[linalg][random]") {
  CHECK(random_hermitian_matrix(2, 7) == random_hermitian_matrix(2, 7));
  CHECK_FALSE(random_hermitian_matrix(2, 7) == random_hermitian_matrix(2, 8));
  const auto m = random_hermitian_matrix(4, 12345);
  CHECK(m.hermiticity_defect() == 0.0);
  CHECK(error_code_of([] { random_hermitian(1, 0); }) == errc::invalid_argument);
}

TEST_CASE("random_hermitian eigenvalues match the characteristic polynomial", "[linalg][oracle]") {
  const auto m = random_hermitian_matrix(3, 1);
  const auto g = eig_hermitian(m);
  const auto roots = cubic_eigenvalues(m);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(g.eigenvalues()[k] - roots[k]) <= 1e-8);
}

TEST_CASE("random_pure_state is normalized and deterministic", "[linalg][random]") {
  const auto a = random_pure_state(2, 3);
  CHECK(std::abs(norm(a.amplitudes()) - 1.0) <= 1e-12);
  CHECK(random_pure_state(2, 3) == a);
  const auto b = random_pure_state(8, 11);
  for (const auto& z : b.amplitudes()) CHECK((std::isfinite(z.real()) && std::isfinite(z.imag())));
}

TEST_CASE("Jacobi invariants over 200 random Hermitian matrices", "[linalg][property]") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t d = 2 + seed % 7;
    const auto g = random_hermitian(d, mix_seed(seed));
    double lam = 0;
    for (double l : g.eigenvalues()) lam = std::max(lam, std::abs(l));
    INFO("seed " << seed << " dim " << d);
    CHECK(g.reconstruction_residual() <= 1e-10 * (1 + lam));
    CHECK(g.orthonormality_defect() <= 1e-10);
  }
}

TEST_CASE("exp(-i K theta / hbar) is unitary", "[linalg][property]") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_hermitian(2 + seed % 7, seed);
    const double theta = 0.37 * static_cast<double>(seed + 1);
    const auto u = spectral_function(g, [&](double l) { return std::polar(1.0, -l * theta); });
    CHECK(max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(g.dim())) <= 1e-10);
  }
}

TEST_CASE("Config validation", "[linalg]") {
  Config cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.sing_margin = 2.0;
  CHECK(error_code_of([&] { cfg.validate(); }) == errc::invalid_config);
  cfg = Config{};
  cfg.hbar = 0;
  CHECK(error_code_of([&] { cfg.validate(); }) == errc::invalid_config);
}
