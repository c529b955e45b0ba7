#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "bounds.hpp"
#include "evolution.hpp"
#include "metrics.hpp"
#include "moments.hpp"
#include "random.hpp"

namespace qsl {

enum class KappaAnchor { k_min, zero, mean, k_max };
using KappaChoice = std::variant<double, KappaAnchor>;

struct MtPeriod {};  // theta_max = pi hbar / (2 Delta K)
struct FixedSpan {
  double value;
};
using ThetaSpan = std::variant<MtPeriod, FixedSpan>;

struct CampaignSpec {
  std::size_t n_instances = 500;
  std::vector<std::size_t> dims = {2, 3, 4, 5, 6, 7, 8};
  std::size_t grid_points = 256;
  ThetaSpan theta_span = MtPeriod{};
  std::vector<KappaChoice> kappa_choices = {KappaAnchor::k_min, KappaAnchor::zero,
                                            KappaAnchor::mean, KappaAnchor::k_max};
  std::uint64_t seed = 42;
  /// Worker threads. Results do not depend on it.
  unsigned threads = 1;

  void validate() const {
    detail::require(n_instances >= 1, errc::invalid_argument, "n_instances must be >= 1");
    detail::require(grid_points >= 16, errc::invalid_argument, "grid_points must be >= 16");
    detail::require(!dims.empty(), errc::invalid_argument, "dims must not be empty");
    for (auto d : dims) detail::require(d >= 2, errc::invalid_argument, "dims must be >= 2");
    if (const auto* fixed = std::get_if<FixedSpan>(&theta_span))
      detail::require(fixed->value > 0, errc::invalid_argument, "fixed theta span must be > 0");
    detail::require(threads >= 1, errc::invalid_argument, "threads must be >= 1");
  }
};

struct Instance {
  Generator generator;
  PureState state;
};

/// Instance `index` of a seeded campaign; independent of every other index.
inline Instance random_instance(const CampaignSpec& spec, std::size_t index) {
  const std::size_t d = spec.dims[index % spec.dims.size()];
  return {random_hermitian(d, derive_seed(spec.seed, index, 0)),
          random_pure_state(d, derive_seed(spec.seed, index, 1))};
}

struct Violation {
  std::size_t instance = 0;
  double theta = 0;
  std::string bound;
  double margin = 0;
};

struct SignRecord {
  std::size_t instance = 0;
  double theta = 0;
  double derivative = 0;
};

struct InstanceResult {
  std::size_t instance = 0;
  std::size_t dim = 0;
  double std_dev = 0;
  double energy = 0;
  double theta_max = 0;
  bool skipped = false;
  std::string note;
  std::vector<BoundReport> reports;
  double worst_mt_margin = -std::numeric_limits<double>::infinity();
  double worst_ml_margin = -std::numeric_limits<double>::infinity();
  double worst_generalized_margin = -std::numeric_limits<double>::infinity();
  /// max of |analytic - fd| - max(1e-5, 1e-4 |fd|) over admissible samples
  double worst_rate_gap = -std::numeric_limits<double>::infinity();
  /// min of L(theta) - s(theta)
  double min_path_excess = std::numeric_limits<double>::infinity();
  double moment_error = 0;
};

struct CampaignSummary {
  std::size_t instances = 0;
  std::size_t skipped = 0;
  std::size_t samples = 0;
  std::size_t violation_count = 0;
  double worst_mt_margin = -std::numeric_limits<double>::infinity();
  double worst_ml_margin = -std::numeric_limits<double>::infinity();
  double worst_generalized_margin = -std::numeric_limits<double>::infinity();
  double worst_rate_gap = -std::numeric_limits<double>::infinity();
  double min_path_excess = std::numeric_limits<double>::infinity();
  double max_moment_error = 0;
  std::size_t negative_count = 0;
  std::size_t positive_count = 0;
  bool counterexample_complete = false;
};

struct CampaignResult {
  std::string kind;
  std::vector<InstanceResult> instances;
  std::vector<Violation> violations;
  /// derivative of |<psi0|psi_theta>| at small theta, one per non-stationary instance
  std::vector<SignRecord> counterexample_records;
  /// first grid point with increasing overlap, per instance where one exists
  std::vector<SignRecord> positive_records;
  CampaignSummary summary;
};

inline constexpr double counterexample_theta = 1e-4;
inline constexpr double stationary_spread = 1e-6;
inline constexpr double moment_tolerance = 1e-10;
inline constexpr double path_tolerance = 1e-8;

namespace detail {

inline double resolve_kappa(const KappaChoice& choice, const Generator& g, const PureState& psi) {
  if (const auto* value = std::get_if<double>(&choice)) return *value;
  switch (std::get<KappaAnchor>(choice)) {
    case KappaAnchor::k_min: return g.k_min();
    case KappaAnchor::zero: return 0.0;
    case KappaAnchor::mean: return mean(g, psi);
    case KappaAnchor::k_max: return g.k_max();
  }
  return 0.0;
}

inline double theta_span(const CampaignSpec& spec, double std_dev, const Config& cfg) {
  if (const auto* fixed = std::get_if<FixedSpan>(&spec.theta_span)) return fixed->value;
  return std_dev > 1e-12 ? std::numbers::pi * cfg.hbar / (2 * std_dev) : 1.0;
}

struct InstanceOutcome {
  InstanceResult result;
  std::vector<Violation> violations;
  std::vector<SignRecord> negative;
  std::vector<SignRecord> positive;
};

/// Runs `work(i)` for i in [0, n) on `threads` workers; output slot i belongs to i.
template <class Work>
std::vector<InstanceOutcome> run_indexed(std::size_t n, unsigned threads, Work&& work) {
  std::vector<InstanceOutcome> out(n);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    for (unsigned t = 0; t < count; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            out[i] = work(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline CampaignResult merge(std::string kind, std::vector<InstanceOutcome> outcomes) {
  CampaignResult r;
  r.kind = std::move(kind);
  auto& s = r.summary;
  for (auto& o : outcomes) {
    auto& inst = o.result;
    ++s.instances;
    if (inst.skipped) ++s.skipped;
    s.samples += inst.reports.size();
    s.worst_mt_margin = std::max(s.worst_mt_margin, inst.worst_mt_margin);
    s.worst_ml_margin = std::max(s.worst_ml_margin, inst.worst_ml_margin);
    s.worst_generalized_margin = std::max(s.worst_generalized_margin, inst.worst_generalized_margin);
    s.worst_rate_gap = std::max(s.worst_rate_gap, inst.worst_rate_gap);
    s.min_path_excess = std::min(s.min_path_excess, inst.min_path_excess);
    s.max_moment_error = std::max(s.max_moment_error, inst.moment_error);
    r.violations.insert(r.violations.end(), o.violations.begin(), o.violations.end());
    r.counterexample_records.insert(r.counterexample_records.end(), o.negative.begin(),
                                    o.negative.end());
    r.positive_records.insert(r.positive_records.end(), o.positive.begin(), o.positive.end());
    r.instances.push_back(std::move(inst));
  }
  s.violation_count = r.violations.size();
  s.negative_count = static_cast<std::size_t>(
      std::count_if(r.counterexample_records.begin(), r.counterexample_records.end(),
                    [](const SignRecord& rec) { return rec.derivative < 0; }));
  s.positive_count = r.positive_records.size();
  return r;
}

/// Bound, rate-agreement and path-length checks on one (K, psi0) pair.
inline InstanceOutcome check_bound_instance(std::size_t index, const Generator& g,
                                            const PureState& psi0, const CampaignSpec& spec,
                                            const Config& cfg) {
  InstanceOutcome out;
  auto& r = out.result;
  r.instance = index;
  r.dim = g.dim();
  r.std_dev = std_dev(g, psi0);
  r.energy = mean_above_ground(g, psi0);
  r.theta_max = theta_span(spec, r.std_dev, cfg);

  std::vector<double> kappas;
  kappas.reserve(spec.kappa_choices.size());
  for (const auto& choice : spec.kappa_choices) kappas.push_back(resolve_kappa(choice, g, psi0));

  const auto flag = [&](double theta, std::string which, double margin) {
    out.violations.push_back({index, theta, std::move(which), margin});
  };

  for (double theta : theta_grid(r.theta_max, spec.grid_points)) {
    auto report = check_bounds(g, psi0, theta, kappas, cfg);

    const double mt_margin = report.rate - report.mt_bound;
    r.worst_mt_margin = std::max(r.worst_mt_margin, mt_margin);
    if (!report.holds_mt) flag(theta, "mt", mt_margin);

    if (report.in_band) {
      const double ml_margin = report.ml_bound.margin(report.rate);
      r.worst_ml_margin = std::max(r.worst_ml_margin, ml_margin);
      if (!report.holds_ml) flag(theta, "ml", ml_margin);
      for (const auto& gen : report.generalized) {
        const double m = gen.bound.margin(report.rate);
        r.worst_generalized_margin = std::max(r.worst_generalized_margin, m);
        if (!gen.holds) flag(theta, "generalized", m);
      }
      const double analytic = distance_rate_analytic(g, psi0, theta, cfg);
      const double gap = std::abs(analytic - report.rate) -
                         std::max(1e-5, 1e-4 * std::abs(report.rate));
      r.worst_rate_gap = std::max(r.worst_rate_gap, gap);
      if (gap > 0) flag(theta, "analytic_fd", gap);
    }

    const double excess = fs_path_length(g, psi0, theta, cfg) - report.s;
    r.min_path_excess = std::min(r.min_path_excess, excess);
    if (excess < -path_tolerance) flag(theta, "path_length", -excess);

    r.reports.push_back(std::move(report));
  }
  return out;
}

/// Sign of d|<psi0|psi_theta>|/dtheta near zero and along the grid.
inline InstanceOutcome check_sign_instance(std::size_t index, const Generator& g,
                                           const PureState& psi0, const CampaignSpec& spec,
                                           const Config& cfg) {
  InstanceOutcome out;
  auto& r = out.result;
  r.instance = index;
  r.dim = g.dim();
  r.std_dev = std_dev(g, psi0);
  r.energy = mean_above_ground(g, psi0);
  r.theta_max = theta_span(spec, r.std_dev, cfg);
  if (r.std_dev <= stationary_spread) {
    r.skipped = true;
    r.note = "stationary";
    return out;
  }
  const double d0 = overlap_derivative(g, psi0, counterexample_theta, cfg);
  out.negative.push_back({index, counterexample_theta, d0});
  if (!(d0 < 0)) out.violations.push_back({index, counterexample_theta, "sign", d0});

  for (double theta : theta_grid(r.theta_max, spec.grid_points)) {
    double d = 0;
    try {
      d = overlap_derivative(g, psi0, theta, cfg);
    } catch (const error& e) {
      if (e.code() != errc::singular_overlap) throw;
      continue;
    }
    if (d > 0) {
      out.positive.push_back({index, theta, d});
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Checks the rate bounds on explicit instances.
inline CampaignResult run_bound_campaign(const std::vector<Instance>& instances,
                                         const CampaignSpec& spec, const Config& cfg) {
  spec.validate();
  cfg.validate();
  auto outcomes = detail::run_indexed(instances.size(), spec.threads, [&](std::size_t i) {
    return detail::check_bound_instance(i, instances[i].generator, instances[i].state, spec, cfg);
  });
  return detail::merge("bound", std::move(outcomes));
}

/// Checks 2 Delta K / hbar everywhere and the sine-weighted bounds on the
/// admissible band for spec.n_instances seeded random instances. Also checks
/// analytic/finite-difference rate agreement and L(theta) >= s(theta).
inline CampaignResult run_bound_campaign(const CampaignSpec& spec, const Config& cfg) {
  spec.validate();
  cfg.validate();
  auto outcomes = detail::run_indexed(spec.n_instances, spec.threads, [&](std::size_t i) {
    const auto inst = random_instance(spec, i);
    return detail::check_bound_instance(i, inst.generator, inst.state, spec, cfg);
  });
  return detail::merge("bound", std::move(outcomes));
}

namespace detail {

inline void finish_counterexample(CampaignResult& r) {
  auto& s = r.summary;
  const std::size_t active = s.instances - s.skipped;
  s.counterexample_complete = s.negative_count == active && s.positive_count >= 1;
}

}  // namespace detail

inline CampaignResult run_counterexample_campaign(const std::vector<Instance>& instances,
                                                  const CampaignSpec& spec, const Config& cfg) {
  spec.validate();
  cfg.validate();
  auto outcomes = detail::run_indexed(instances.size(), spec.threads, [&](std::size_t i) {
    return detail::check_sign_instance(i, instances[i].generator, instances[i].state, spec, cfg);
  });
  auto r = detail::merge("counterexample", std::move(outcomes));
  detail::finish_counterexample(r);
  return r;
}

/// Every instance with Delta K > 1e-6 must have a decreasing overlap at
/// theta = 1e-4; the grid is searched for places where it increases.
inline CampaignResult run_counterexample_campaign(const CampaignSpec& spec, const Config& cfg) {
  spec.validate();
  cfg.validate();
  auto outcomes = detail::run_indexed(spec.n_instances, spec.threads, [&](std::size_t i) {
    const auto inst = random_instance(spec, i);
    return detail::check_sign_instance(i, inst.generator, inst.state, spec, cfg);
  });
  auto r = detail::merge("counterexample", std::move(outcomes));
  detail::finish_counterexample(r);
  return r;
}

namespace detail {

inline InstanceOutcome check_purified_instance(std::size_t index, const Generator& g,
                                               const MixedState& rho, const CampaignSpec& spec,
                                               const Config& cfg) {
  const auto psi = purify(rho);
  const auto lifted = lift_generator(g, rho.dim());
  auto out = check_bound_instance(index, lifted, psi, spec, cfg);

  const auto& k = g.matrix();
  const double tr1 = (rho.density() * k).trace().real();
  const double tr2 = (rho.density() * k * k).trace().real();
  const auto& kl = lifted.matrix();
  const double m1 = expectation(kl, psi).real();
  const double m2 = expectation(kl * kl, psi).real();
  const double err = std::max(std::abs(m1 - tr1), std::abs(m2 - tr2));
  out.result.moment_error = err;
  out.result.dim = rho.dim();
  if (err > moment_tolerance) out.violations.push_back({index, 0.0, "moment", err});
  return out;
}

}  // namespace detail

/// Moment identities and bound checks for K (x) I on the canonical
/// purification of each rho.
inline CampaignResult run_purified_campaign(
    const std::vector<std::pair<Generator, MixedState>>& cases, const CampaignSpec& spec,
    const Config& cfg) {
  spec.validate();
  cfg.validate();
  auto outcomes = detail::run_indexed(cases.size(), spec.threads, [&](std::size_t i) {
    return detail::check_purified_instance(i, cases[i].first, cases[i].second, spec, cfg);
  });
  return detail::merge("purified", std::move(outcomes));
}

/// Seeded version: K random, rho a Dirichlet(1,1,1) mixture of three random pure states.
inline CampaignResult run_purified_campaign(const CampaignSpec& spec, const Config& cfg) {
  spec.validate();
  cfg.validate();
  auto outcomes = detail::run_indexed(spec.n_instances, spec.threads, [&](std::size_t i) {
    const std::size_t d = spec.dims[i % spec.dims.size()];
    const auto g = random_hermitian(d, derive_seed(spec.seed, i, 0));
    const auto rho = random_mixed_state(d, derive_seed(spec.seed, i, 2));
    return detail::check_purified_instance(i, g, rho, spec, cfg);
  });
  return detail::merge("purified", std::move(outcomes));
}

}  // namespace qsl
