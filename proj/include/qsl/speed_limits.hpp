#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "bounds.hpp"
#include "evolution.hpp"
#include "metrics.hpp"
#include "moments.hpp"

namespace qsl {

inline constexpr double zero_spread = 1e-12;

/// Mandelstam-Tamm time (pi/2) hbar / Delta K.
inline double mt_time(const Generator& g, const PureState& psi, const Config& cfg) {
  const double dk = std_dev(g, psi);
  if (dk <= zero_spread) throw error(errc::zero_variance, "Delta K <= 1e-12");
  return std::numbers::pi / 2 * cfg.hbar / dk;
}

namespace detail {

inline double energy_above_ground_checked(const Generator& g, const PureState& psi) {
  const double e = mean_above_ground(g, psi);
  if (e <= zero_spread) throw error(errc::zero_energy, "<K> - K_min <= 1e-12");
  return e;
}

}  // namespace detail

/// hbar / E with E = <K> - K_min.
inline double new_qsl_time(const Generator& g, const PureState& psi, const Config& cfg) {
  return cfg.hbar / detail::energy_above_ground_checked(g, psi);
}

/// Margolus-Levitin time (pi/2) hbar / E; exactly (pi/2) * new_qsl_time.
inline double ml_time(const Generator& g, const PureState& psi, const Config& cfg) {
  return std::numbers::pi / 2 * new_qsl_time(g, psi, cfg);
}

/// 2 sin^2(s_max / 4) hbar / E: least parameter needed to cover distance s_max.
inline double generalized_qsl(const Generator& g, const PureState& psi, double s_max,
                              const Config& cfg) {
  if (!(s_max > 0 && s_max <= std::numbers::pi))
    throw error(errc::invalid_distance, "s_max must lie in (0, pi]");
  const double e = detail::energy_above_ground_checked(g, psi);
  const double half = std::sin(s_max / 4);
  return 2 * half * half * cfg.hbar / e;
}

/// (|k_min> + e^{i phi} |k_max>) / sqrt(2). Both extreme eigenvalues must be
/// simple so the extreme eigenvectors are determined up to phase.
inline PureState optimal_state(const Generator& g, double phi) {
  const auto lambda = g.eigenvalues();
  const std::size_t d = lambda.size();
  detail::require(d >= 2, errc::invalid_argument, "dimension must be at least 2");
  const double scale = std::max({1.0, std::abs(lambda.front()), std::abs(lambda.back())});
  if (lambda.back() - lambda.front() <= 1e-12 * scale)
    throw error(errc::degenerate_spectrum, "K_max - K_min <= 1e-12");
  if (lambda[1] - lambda[0] <= 1e-12 * scale || lambda[d - 1] - lambda[d - 2] <= 1e-12 * scale)
    throw error(errc::degenerate_spectrum,
                "extreme eigenvalue is degenerate; pre-rotate the eigenbasis to pick a vector");
  const auto vmin = g.eigenvector(0);
  const auto vmax = g.eigenvector(d - 1);
  const complex phase = std::polar(1.0, phi);
  ComplexVector psi(d);
  for (std::size_t i = 0; i < d; ++i) psi[i] = (vmin[i] + phase * vmax[i]) / std::numbers::sqrt2;
  return PureState::normalized(std::move(psi));
}

namespace detail {

inline constexpr double orthogonality_trigger = 1e-3;
inline constexpr double orthogonality_accept = 1e-6;

template <class F>
double golden_section_min(F&& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace detail

/// First theta in (0, theta_max] where psi_theta is orthogonal to psi0, or
/// nothing when no grid minimum refines below 1e-6.
///
/// |z| can cross zero linearly, so a grid point can sit up to
/// (Delta K / hbar) * spacing / 2 above a true zero. Grid minima below that
/// (or below 1e-3, whichever is larger) are refined by golden section.
inline std::optional<double> orthogonality_time(const Generator& g, const PureState& psi0,
                                                double theta_max, std::size_t grid_points,
                                                const Config& cfg) {
  detail::require(theta_max > 0, errc::invalid_argument, "theta_max must be positive");
  detail::require(grid_points >= 16, errc::invalid_argument, "grid_points must be >= 16");
  const auto grid = theta_grid(theta_max, grid_points);
  const auto ov = [&](double theta) { return overlap(psi0, evolve(g, psi0, theta, cfg)); };
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), ov);

  const double spacing = theta_max / static_cast<double>(grid_points);
  const double trigger =
      std::max(detail::orthogonality_trigger, std_dev(g, psi0) / cfg.hbar * spacing);
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double prev = k == 0 ? 1.0 : values[k - 1];
    const double next = k + 1 < n ? values[k + 1] : std::numeric_limits<double>::infinity();
    if (values[k] >= trigger || values[k] > prev || values[k] > next) continue;
    const double lo = k == 0 ? 0.0 : grid[k - 1];
    const double hi = k + 1 < n ? grid[k + 1] : grid[k];
    const double theta = detail::golden_section_min(ov, lo, hi);
    if (ov(theta) < detail::orthogonality_accept) return theta;
  }
  return std::nullopt;
}

struct SaturationCheck {
  bool saturates_mt = false;
  bool geodesic = false;
};

/// Rate saturation of 2 Delta K / hbar and L = s along 64 interior points of
/// (0, pi hbar / (2 Delta K)).
inline SaturationCheck check_saturation(const Generator& g, const PureState& psi0,
                                        const Config& cfg) {
  const double dk = std_dev(g, psi0);
  if (dk <= zero_spread) throw error(errc::zero_variance, "Delta K <= 1e-12");
  const double theta_max = std::numbers::pi * cfg.hbar / (2 * dk);
  const double bound = 2 * dk / cfg.hbar;
  SaturationCheck out{true, true};
  constexpr int points = 64;
  for (int k = 1; k <= points; ++k) {
    const double theta = theta_max * k / (points + 1);
    if (std::abs(distance_rate_fd(g, psi0, theta, cfg) - bound) > 1e-5) out.saturates_mt = false;
    if (std::abs(fs_path_length(g, psi0, theta, cfg) - distance_at(g, psi0, theta, cfg)) > 1e-6)
      out.geodesic = false;
  }
  return out;
}

struct SpeedLimitReport {
  std::optional<double> t_mt;
  std::optional<double> t_new;
  std::optional<double> t_ml;
  std::optional<double> t_generalized;
  /// largest s reached on the grid (pi when orthogonality is found)
  double s_max = 0;
  std::optional<double> t_orthogonal;
  bool saturates_mt = false;
  bool saturates_ml = false;
  /// field name -> why it is absent
  std::map<std::string, std::string> reasons;

  std::optional<double> ratio_ml_new() const {
    if (t_ml && t_new) return *t_ml / *t_new;
    return std::nullopt;
  }
};

inline constexpr double saturation_tolerance = 1e-6;

inline SpeedLimitReport speed_limit_report(const Generator& g, const PureState& psi0,
                                           double theta_max, std::size_t grid_points,
                                           const Config& cfg) {
  SpeedLimitReport r;
  try {
    r.t_mt = mt_time(g, psi0, cfg);
  } catch (const error&) {
    r.reasons["t_mt"] = "zero variance";
  }
  try {
    r.t_new = new_qsl_time(g, psi0, cfg);
    r.t_ml = ml_time(g, psi0, cfg);
  } catch (const error&) {
    r.reasons["t_new"] = "zero energy above ground";
    r.reasons["t_ml"] = "zero energy above ground";
  }
  r.t_orthogonal = orthogonality_time(g, psi0, theta_max, grid_points, cfg);
  if (r.t_orthogonal) {
    r.s_max = std::numbers::pi;
  } else {
    r.reasons["t_orthogonal"] = "no orthogonal state reached";
    for (double theta : theta_grid(theta_max, grid_points))
      r.s_max = std::max(r.s_max, distance_at(g, psi0, theta, cfg));
  }
  if (!r.t_new) {
    r.reasons["t_generalized"] = "zero energy above ground";
  } else if (r.s_max <= 0) {
    r.reasons["t_generalized"] = "no distance traversed";
  } else {
    r.t_generalized = generalized_qsl(g, psi0, r.s_max, cfg);
  }
  if (r.t_orthogonal) {
    r.saturates_mt = r.t_mt && std::abs(*r.t_orthogonal - *r.t_mt) <= saturation_tolerance;
    r.saturates_ml = r.t_ml && std::abs(*r.t_orthogonal - *r.t_ml) <= saturation_tolerance;
  }
  return r;
}

}  // namespace qsl
