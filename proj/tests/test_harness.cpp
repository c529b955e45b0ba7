#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include "test_support.hpp"

using namespace qsl;
using namespace qsl::test;
using Catch::Approx;
using std::numbers::pi;

namespace {

CampaignSpec small_spec(std::size_t n, std::size_t grid = 64) {
  CampaignSpec spec;
  spec.n_instances = n;
  spec.grid_points = grid;
  spec.seed = 7;
  return spec;
}

}  // namespace

TEST_CASE("CampaignSpec validation", "[harness]") {
  CampaignSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.n_instances = 0;
  CHECK(error_code_of([&] { spec.validate(); }) == errc::invalid_argument);
  spec = {};
  spec.grid_points = 15;
  CHECK(error_code_of([&] { spec.validate(); }) == errc::invalid_argument);
  spec = {};
  spec.dims = {2, 1};
  CHECK(error_code_of([&] { spec.validate(); }) == errc::invalid_argument);
  spec = {};
  spec.theta_span = FixedSpan{-1.0};
  CHECK(error_code_of([&] { spec.validate(); }) == errc::invalid_argument);
}

TEST_CASE("qubit optimal instance has no violations", "[harness]") {
  const Config cfg;
  auto spec = small_spec(1, 256);
  const std::vector<Instance> instances{{qubit(), uniform(2)}};
  const auto r = run_bound_campaign(instances, spec, cfg);
  CHECK(r.violations.empty());
  CHECK(r.summary.violation_count == 0);
  REQUIRE(r.instances.size() == 1);
  REQUIRE(r.instances[0].reports.size() == 256);
  for (const auto& rep : r.instances[0].reports) {
    if (rep.theta >= r.instances[0].theta_max) continue;  // s = pi: the kink
    CHECK(std::abs(rep.rate - rep.mt_bound) <= 1e-5);
  }
  CHECK(r.instances[0].theta_max == Approx(pi / 2));
}

TEST_CASE("random instances are reproducible and indexed", "[harness]") {
  const auto spec = small_spec(10);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto a = random_instance(spec, i);
    const auto b = random_instance(spec, i);
    CHECK(a.generator.dim() == spec.dims[i % spec.dims.size()]);
    CHECK(a.generator.matrix() == b.generator.matrix());
    CHECK(a.state == b.state);
  }
  CHECK_FALSE(random_instance(spec, 0).state == random_instance(spec, 7).state);
}

TEST_CASE("bound campaign on random instances", "[harness]") {
  const Config cfg;
  const auto r = run_bound_campaign(small_spec(30), cfg);
  CHECK(r.summary.violation_count == 0);
  CHECK(r.summary.instances == 30);
  CHECK(r.summary.samples == 30 * 64);
  CHECK(r.summary.worst_mt_margin <= cfg.tol_bound);
  CHECK(r.summary.worst_rate_gap <= 0);
  CHECK(r.summary.min_path_excess >= -path_tolerance);
}

TEST_CASE("grids of different resolution give consistent results", "[harness]") {
  const Config cfg;
  const auto coarse = run_bound_campaign(small_spec(12, 16), cfg);
  const auto fine = run_bound_campaign(small_spec(12, 256), cfg);
  REQUIRE(coarse.instances.size() == fine.instances.size());
  for (std::size_t i = 0; i < coarse.instances.size(); ++i) {
    const auto& c = coarse.instances[i];
    const auto& f = fine.instances[i];
    CHECK(c.std_dev == f.std_dev);
    CHECK(c.theta_max == f.theta_max);
    for (std::size_t k = 0; k < c.reports.size(); ++k) {
      const auto& rc = c.reports[k];
      const auto& rf = f.reports[16 * k + 15];
      CHECK(rc.theta == rf.theta);
      CHECK(rc.rate == rf.rate);
      CHECK(rc.holds_mt == rf.holds_mt);
      CHECK(rc.holds_ml == rf.holds_ml);
    }
  }
  std::set<std::tuple<std::size_t, double, std::string>> fine_set;
  for (const auto& v : fine.violations) fine_set.emplace(v.instance, v.theta, v.bound);
  for (const auto& v : coarse.violations) CHECK(fine_set.contains({v.instance, v.theta, v.bound}));
}

TEST_CASE("campaign output does not depend on the thread count", "[harness]") {
  const Config cfg;
  auto spec = small_spec(24, 32);
  const auto one = to_json(run_bound_campaign(spec, cfg), true).dump();
  spec.threads = 4;
  const auto four = to_json(run_bound_campaign(spec, cfg), true).dump();
  CHECK(one == four);

  spec.threads = 1;
  const auto s1 = to_json(run_counterexample_campaign(spec, cfg)).dump();
  spec.threads = 3;
  CHECK(s1 == to_json(run_counterexample_campaign(spec, cfg)).dump());
}

TEST_CASE("counterexample campaign examples", "[harness]") {
  const Config cfg;
  auto spec = small_spec(3, 256);
  spec.theta_span = FixedSpan{pi};
  const std::vector<Instance> instances{
      {qubit(), uniform(2)}, {qubit(), PureState::basis(2, 0)}, {qutrit(), uniform(3)}};
  const auto r = run_counterexample_campaign(instances, spec, cfg);
  CHECK(r.violations.empty());
  REQUIRE(r.counterexample_records.size() == 2);
  CHECK(r.counterexample_records[0].instance == 0);
  CHECK(r.counterexample_records[0].derivative == Approx(-std::sin(1e-4)).epsilon(1e-8));
  CHECK(r.instances[1].skipped);
  CHECK(r.instances[1].note == "stationary");
  CHECK(r.summary.skipped == 1);
  CHECK(r.summary.negative_count == 2);
  CHECK(r.summary.counterexample_complete);

  // the qubit overlap |cos theta| starts rising right after pi/2
  REQUIRE_FALSE(r.positive_records.empty());
  CHECK(r.positive_records[0].instance == 0);
  CHECK(r.positive_records[0].theta > pi / 2);
  CHECK(overlap_derivative(qubit(), uniform(2), 3 * pi / 4, cfg) > 0);
}

TEST_CASE("counterexample campaign on random instances", "[harness]") {
  const Config cfg;
  const auto r = run_counterexample_campaign(small_spec(40), cfg);
  CHECK(r.summary.violation_count == 0);
  CHECK(r.summary.negative_count == 40 - r.summary.skipped);
  CHECK(r.summary.positive_count >= 1);
  CHECK(r.summary.counterexample_complete);
}

TEST_CASE("purified campaign examples", "[harness][purification]") {
  const Config cfg;
  auto spec = small_spec(1, 64);

  const auto g = random_hermitian(3, 91);
  const auto psi = random_pure_state(3, 92);
  const auto pure = run_bound_campaign(std::vector<Instance>{{g, psi}}, spec, cfg);
  const auto lifted = run_purified_campaign({{g, MixedState::from_pure(psi)}}, spec, cfg);
  CHECK(lifted.summary.violation_count == 0);
  const auto& a = pure.instances[0];
  const auto& b = lifted.instances[0];
  CHECK(b.std_dev == Approx(a.std_dev).margin(1e-9));
  CHECK(b.energy == Approx(a.energy).margin(1e-9));
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t k = 0; k < a.reports.size(); ++k) {
    CHECK(std::abs(a.reports[k].s - b.reports[k].s) <= 1e-9);
    CHECK(std::abs(a.reports[k].mt_bound - b.reports[k].mt_bound) <= 1e-9);
  }

  const auto mm = purify(MixedState::maximally_mixed(2));
  const auto big = lift_generator(qubit(), 2);
  CHECK(mean(big, mm) == Approx(0.0).margin(1e-15));
  CHECK(std_dev(big, mm) * std_dev(big, mm) == Approx(1.0).epsilon(1e-14));
  const auto r = run_purified_campaign({{qubit(), MixedState::maximally_mixed(2)}}, spec, cfg);
  CHECK(r.summary.violation_count == 0);
  CHECK(r.summary.max_moment_error <= 1e-10);
}

TEST_CASE("purified campaign on random mixtures", "[harness][purification]") {
  const Config cfg;
  auto spec = small_spec(20, 32);
  spec.dims = {2, 3, 4};
  const auto r = run_purified_campaign(spec, cfg);
  CHECK(r.summary.violation_count == 0);
  CHECK(r.summary.max_moment_error <= moment_tolerance);
  CHECK(r.instances[1].dim == 3);
  CHECK(r.instances[1].reports.size() == 32);
}

TEST_CASE("campaigns surface worker exceptions", "[harness]") {
  CHECK_THROWS_AS(detail::run_indexed(8, 4,
                                      [](std::size_t i) -> detail::InstanceOutcome {
                                        if (i == 5) throw error(errc::invalid_argument, "boom");
                                        return {};
                                      }),
                  error);
}
