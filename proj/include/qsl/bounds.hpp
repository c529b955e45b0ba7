#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "metrics.hpp"
#include "moments.hpp"

namespace qsl {

/// Upper bound on ds/dtheta. `infinite` tags the 1/sin(s/2) singularity; the
/// value is meaningless when it is set.
struct RateBound {
  double value = 0;
  bool infinite = false;

  static constexpr RateBound unbounded() { return {std::numeric_limits<double>::infinity(), true}; }

  bool holds(double rate, double tol) const { return infinite || rate <= value + tol; }
  /// rate - bound; positive means violated
  double margin(double rate) const {
    return infinite ? -std::numeric_limits<double>::infinity() : rate - value;
  }
};

/// 2 Delta K / hbar
inline double mt_rate_bound(const Generator& g, const PureState& psi, const Config& cfg) {
  return 2 * std_dev(g, psi) / cfg.hbar;
}

namespace detail {

inline RateBound sine_weighted_bound(double s, double numerator, const Config& cfg) {
  if (s < cfg.sing_margin) return RateBound::unbounded();
  return {2 / std::sin(s / 2) * numerator / cfg.hbar, false};
}

}  // namespace detail

/// (2 / sin(s/2)) (<K> - K_min) / hbar, with s = s(theta).
inline RateBound ml_rate_bound(const Generator& g, const PureState& psi0, double theta,
                               const Config& cfg) {
  detail::require_same_dim(g.dim(), psi0.dim());
  return detail::sine_weighted_bound(distance_at(g, psi0, theta, cfg), mean_above_ground(g, psi0),
                                     cfg);
}

/// (2 / sin(s/2)) <|K - kappa|> / hbar; reduces to ml_rate_bound at kappa = K_min.
inline RateBound generalized_rate_bound(const Generator& g, const PureState& psi0, double theta,
                                        double kappa, const Config& cfg) {
  detail::require_same_dim(g.dim(), psi0.dim());
  return detail::sine_weighted_bound(distance_at(g, psi0, theta, cfg),
                                     mean_abs_shifted(g, psi0, kappa), cfg);
}

struct GeneralizedBoundCheck {
  double kappa = 0;
  RateBound bound;
  bool holds = true;
};

/// Comparison of the measured (finite-difference) rate against both bounds at one theta.
struct BoundReport {
  double theta = 0;
  double s = 0;
  double rate = 0;
  double mt_bound = 0;
  RateBound ml_bound;
  std::vector<GeneralizedBoundCheck> generalized;
  bool holds_mt = true;
  bool holds_ml = true;
  /// s in (sing_margin, pi - sing_margin)
  bool in_band = false;
};

inline bool in_admissible_band(double s, const Config& cfg) {
  return s > cfg.sing_margin && s < std::numbers::pi - cfg.sing_margin;
}

inline BoundReport check_bounds(const Generator& g, const PureState& psi0, double theta,
                                std::span<const double> kappas, const Config& cfg) {
  BoundReport r;
  r.theta = theta;
  r.s = distance_at(g, psi0, theta, cfg);
  r.in_band = in_admissible_band(r.s, cfg);
  r.rate = distance_rate_fd(g, psi0, theta, cfg);
  r.mt_bound = mt_rate_bound(g, psi0, cfg);
  r.holds_mt = r.rate <= r.mt_bound + cfg.tol_bound;
  r.ml_bound = detail::sine_weighted_bound(r.s, mean_above_ground(g, psi0), cfg);
  r.holds_ml = r.ml_bound.holds(r.rate, cfg.tol_bound);
  r.generalized.reserve(kappas.size());
  for (double kappa : kappas) {
    const auto b = detail::sine_weighted_bound(r.s, mean_abs_shifted(g, psi0, kappa), cfg);
    r.generalized.push_back({kappa, b, b.holds(r.rate, cfg.tol_bound)});
  }
  return r;
}

}  // namespace qsl
