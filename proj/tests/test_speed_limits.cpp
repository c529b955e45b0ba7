#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace qsl;
using namespace qsl::test;
using Catch::Approx;
using std::numbers::pi;

TEST_CASE("mt_time examples", "[speed_limits]") {
  const Config cfg;
  CHECK(mt_time(qubit(), optimal_state(qubit(), 0.0), cfg) == Approx(pi / 2).epsilon(1e-14));
  CHECK(mt_time(qutrit(), uniform(3), cfg) == Approx(1.9238247452).epsilon(1e-9));
  CHECK(mt_time(qutrit(), uniform(3), cfg) ==
        Approx(pi / 2 / std::sqrt(2.0 / 3.0)).epsilon(1e-14));
  CHECK(error_code_of([] { mt_time(qubit(), PureState::basis(2, 1), Config{}); }) ==
        errc::zero_variance);
}

TEST_CASE("new_qsl_time and ml_time examples", "[speed_limits]") {
  const Config cfg;
  const auto psi = optimal_state(qubit(), 0.0);
  CHECK(new_qsl_time(qubit(), psi, cfg) == Approx(1.0).epsilon(1e-15));
  CHECK(new_qsl_time(qutrit(), uniform(3), cfg) == Approx(1.0).epsilon(1e-15));
  CHECK(ml_time(qubit(), psi, cfg) == Approx(pi / 2).epsilon(1e-15));
  CHECK(ml_time(qutrit(), uniform(3), cfg) == Approx(pi / 2).epsilon(1e-15));
  CHECK(ml_time(qutrit(), uniform(3), cfg) <= 2 * pi / 3);
  CHECK(error_code_of([] { new_qsl_time(qubit(), PureState::basis(2, 0), Config{}); }) ==
        errc::zero_energy);
  CHECK(error_code_of([] { ml_time(qubit(), PureState::basis(2, 0), Config{}); }) ==
        errc::zero_energy);
  // the excited state has zero spread but energy 2 above the ground
  CHECK(new_qsl_time(qubit(), PureState::basis(2, 1), cfg) == Approx(0.5));
}

TEST_CASE("ml_time is pi/2 times new_qsl_time", "[speed_limits][property]") {
  Config cfg;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    cfg.hbar = 0.3 + 0.1 * static_cast<double>(seed % 10);
    const std::size_t d = 2 + seed % 7;
    const auto g = random_hermitian(d, derive_seed(seed, 0));
    const auto psi = random_pure_state(d, derive_seed(seed, 1));
    CHECK(std::abs(ml_time(g, psi, cfg) / new_qsl_time(g, psi, cfg) - pi / 2) <= 1e-12);
    CHECK(std::abs(generalized_qsl(g, psi, pi, cfg) - new_qsl_time(g, psi, cfg)) <=
          1e-12 * new_qsl_time(g, psi, cfg));
  }
}

TEST_CASE("generalized_qsl examples", "[speed_limits]") {
  const Config cfg;
  const auto g = qubit();
  const auto psi = optimal_state(g, 0.0);
  CHECK(generalized_qsl(g, psi, pi, cfg) == Approx(1.0).epsilon(1e-15));
  CHECK(generalized_qsl(g, psi, 1e-9, cfg) == Approx(0.0).margin(1e-18));
  const double half = generalized_qsl(g, psi, pi / 2, cfg);
  CHECK(half == Approx(2 * std::pow(std::sin(pi / 8), 2)).epsilon(1e-14));
  CHECK(half == Approx(0.29289).margin(1e-5));
  CHECK(pi / 4 >= half);

  CHECK(error_code_of([&] { generalized_qsl(g, psi, 0.0, cfg); }) == errc::invalid_distance);
  CHECK(error_code_of([&] { generalized_qsl(g, psi, 3.5, cfg); }) == errc::invalid_distance);
  CHECK(error_code_of([&] { generalized_qsl(g, PureState::basis(2, 0), 1.0, cfg); }) ==
        errc::zero_energy);

  double prev = 0;
  for (int k = 1; k <= 200; ++k) {
    const double t = generalized_qsl(g, psi, pi * k / 200, cfg);
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("optimal_state examples", "[speed_limits]") {
  const auto psi = optimal_state(qubit(), 0.0);
  CHECK(max_diff(psi.amplitudes(), uniform(2).amplitudes()) <= 1e-15);

  const auto t = optimal_state(qutrit(), 0.0);
  const ComplexVector expected{1 / std::sqrt(2.0), 0.0, 1 / std::sqrt(2.0)};
  CHECK(max_diff(t.amplitudes(), expected) <= 1e-15);
  CHECK(std_dev(qutrit(), t) == Approx(1.0).epsilon(1e-14));
  CHECK(mean_above_ground(qutrit(), t) == Approx(1.0).epsilon(1e-14));

  const auto g = random_hermitian(5, 3);
  const double gap = g.k_max() - g.k_min();
  for (double phi : {0.0, 0.7, 2.5, -1.0}) {
    const auto p = optimal_state(g, phi);
    CHECK(std_dev(g, p) == Approx(gap / 2).epsilon(1e-12));
    CHECK(mean_above_ground(g, p) == Approx(gap / 2).epsilon(1e-12));
  }

  CHECK(error_code_of([] {
          optimal_state(eig_hermitian(ComplexMatrix::identity(3)), 0.0);
        }) == errc::degenerate_spectrum);
  CHECK(error_code_of([] { optimal_state(diag_generator({0.0, 0.0, 1.0}), 0.0); }) ==
        errc::degenerate_spectrum);
}

TEST_CASE("orthogonality_time examples", "[speed_limits]") {
  const Config cfg;
  const auto q = orthogonality_time(qubit(), uniform(2), 2 * pi, 256, cfg);
  REQUIRE(q);
  CHECK(std::abs(*q - pi / 2) <= 1e-8);

  const auto t = orthogonality_time(qutrit(), uniform(3), 2 * pi, 256, cfg);
  REQUIRE(t);
  CHECK(std::abs(*t - 2 * pi / 3) <= 1e-7);

  CHECK_FALSE(orthogonality_time(qubit(), PureState::basis(2, 0), 2 * pi, 256, cfg));

  // populations 0.6/0.4 never reach zero overlap: the minimum is 0.2
  const auto skewed = PureState::normalized(ComplexVector{std::sqrt(0.6), std::sqrt(0.4)});
  CHECK_FALSE(orthogonality_time(qubit(), skewed, 2 * pi, 256, cfg));

  CHECK(error_code_of([&] { orthogonality_time(qubit(), uniform(2), 1.0, 8, cfg); }) ==
        errc::invalid_argument);
  CHECK(error_code_of([&] { orthogonality_time(qubit(), uniform(2), 0.0, 64, cfg); }) ==
        errc::invalid_argument);
}

TEST_CASE("orthogonality_time scales with hbar", "[speed_limits]") {
  Config cfg;
  cfg.hbar = 3.0;
  const auto q = orthogonality_time(qubit(), uniform(2), 6 * pi, 256, cfg);
  REQUIRE(q);
  CHECK(std::abs(*q - 3 * pi / 2) <= 1e-8);
}

TEST_CASE("check_saturation examples", "[speed_limits]") {
  const Config cfg;
  const auto q = check_saturation(qubit(), optimal_state(qubit(), 0.0), cfg);
  CHECK(q.saturates_mt);
  CHECK(q.geodesic);

  const auto t = check_saturation(qutrit(), uniform(3), cfg);
  CHECK_FALSE(t.saturates_mt);
  CHECK_FALSE(t.geodesic);

  const auto g = random_hermitian(6, 17);
  const auto r = check_saturation(g, optimal_state(g, 1.1), cfg);
  CHECK(r.saturates_mt);
  CHECK(r.geodesic);

  CHECK(error_code_of([] { check_saturation(qubit(), PureState::basis(2, 0), Config{}); }) ==
        errc::zero_variance);
}

TEST_CASE("optimal states saturate both limits", "[speed_limits][property]") {
  const Config cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t d = 2 + seed % 7;
    const auto g = random_hermitian(d, derive_seed(seed, 50));
    const auto psi = optimal_state(g, 0.1 * static_cast<double>(seed));
    const double t_mt = mt_time(g, psi, cfg);
    const auto t = orthogonality_time(g, psi, 2 * t_mt, 256, cfg);
    REQUIRE(t);
    CHECK(std::abs(*t - t_mt) <= 1e-6);
    CHECK(std::abs(*t - ml_time(g, psi, cfg)) <= 1e-6);
  }
}

TEST_CASE("observed orthogonality times respect every limit", "[speed_limits][property]") {
  const Config cfg;
  int found = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = random_hermitian(2, derive_seed(seed, 60));
    // two-level states reach orthogonality only with equal populations; mix
    // in random ones as well
    const auto psi = seed % 2 ? optimal_state(g, 0.2) : random_pure_state(2, derive_seed(seed, 61));
    const auto r = speed_limit_report(g, psi, 4 * mt_time(g, psi, cfg), 256, cfg);
    if (!r.t_orthogonal) continue;
    ++found;
    CHECK(*r.t_orthogonal >= *r.t_mt - 1e-8);
    CHECK(*r.t_orthogonal >= *r.t_ml - 1e-8);
    CHECK(*r.t_orthogonal >= *r.t_new - 1e-8);
  }
  CHECK(found >= 100);
}

TEST_CASE("speed_limit_report examples", "[speed_limits]") {
  const Config cfg;
  const auto q = speed_limit_report(qubit(), uniform(2), 2 * pi, 256, cfg);
  CHECK(*q.t_mt == Approx(pi / 2));
  CHECK(*q.t_new == Approx(1.0));
  CHECK(*q.t_ml == Approx(pi / 2));
  CHECK(*q.t_orthogonal == Approx(pi / 2).margin(1e-8));
  CHECK(q.saturates_mt);
  CHECK(q.saturates_ml);
  CHECK(q.s_max == pi);
  CHECK(*q.t_generalized == Approx(1.0));
  CHECK(*q.ratio_ml_new() == Approx(pi / 2).epsilon(1e-12));

  const auto t = speed_limit_report(qutrit(), uniform(3), 2 * pi, 256, cfg);
  CHECK(*t.t_mt == Approx(1.9238).margin(1e-4));
  CHECK(*t.t_new == Approx(1.0));
  CHECK(*t.t_ml == Approx(1.5708).margin(1e-4));
  CHECK(*t.t_orthogonal == Approx(2.0944).margin(1e-4));
  CHECK_FALSE(t.saturates_mt);
  CHECK_FALSE(t.saturates_ml);

  const auto ground = speed_limit_report(qubit(), PureState::basis(2, 0), 2 * pi, 256, cfg);
  CHECK_FALSE(ground.t_mt);
  CHECK_FALSE(ground.t_new);
  CHECK_FALSE(ground.t_ml);
  CHECK_FALSE(ground.t_orthogonal);
  CHECK_FALSE(ground.t_generalized);
  CHECK(ground.reasons.at("t_new") == "zero energy above ground");
  CHECK(ground.reasons.at("t_mt") == "zero variance");
}
