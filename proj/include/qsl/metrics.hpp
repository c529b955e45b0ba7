#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "evolution.hpp"
#include "linalg.hpp"
#include "moments.hpp"
#include "state.hpp"

namespace qsl {

namespace detail {

// (|<a|b>|, ||b - <a|b> a||) = (cos s_W, sin s_W) for unit vectors, without
// the cancellation of sqrt(1 - |z|^2) near |z| = 1.
struct Angle {
  double cos;
  double sin;
};

// Both residuals estimate the same sine; taking the smaller keeps the result
// symmetric in a and b to the last bit.
inline Angle angle_between(const PureState& a, const PureState& b) {
  detail::require_same_dim(a.dim(), b.dim());
  const complex z = inner(a.amplitudes(), b.amplitudes());
  double perp_b = 0, perp_a = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    perp_b += std::norm(b[i] - z * a[i]);
    perp_a += std::norm(a[i] - std::conj(z) * b[i]);
  }
  return {std::clamp(std::abs(z), 0.0, 1.0), std::sqrt(std::min(perp_a, perp_b))};
}

}  // namespace detail

/// |<a|b>| clamped to [0, 1].
inline double overlap(const PureState& a, const PureState& b) {
  detail::require_same_dim(a.dim(), b.dim());
  return std::clamp(std::abs(inner(a.amplitudes(), b.amplitudes())), 0.0, 1.0);
}

/// arccos |<a|b>| in [0, pi/2], evaluated as atan2(sin, cos).
inline double wootters_distance(const PureState& a, const PureState& b) {
  const auto angle = detail::angle_between(a, b);
  return std::atan2(angle.sin, angle.cos);
}

/// s = 2 arccos |<a|b>| in [0, pi].
inline double statistical_distance(const PureState& a, const PureState& b) {
  return 2 * wootters_distance(a, b);
}

/// s(theta) between psi0 and its evolution.
inline double distance_at(const Generator& g, const PureState& psi0, double theta,
                          const Config& cfg) {
  return statistical_distance(psi0, evolve(g, psi0, theta, cfg));
}

/// d/dtheta |<psi0|psi_theta>| = Im(<psi0|K|psi_theta><psi_theta|psi0>) / (hbar |z|).
///
/// The numerator is evaluated in the eigenbasis after antisymmetrizing:
///   Im(...) = -sum_{i<j} p_i p_j (l_i - l_j) sin((l_i - l_j) theta / hbar),
/// which keeps the sign exact for small theta where every term is positive.
inline double overlap_derivative(const Generator& g, const PureState& psi0, double theta,
                                 const Config& cfg) {
  detail::require_same_dim(g.dim(), psi0.dim());
  const auto p = g.populations(psi0.amplitudes());
  const auto lambda = g.eigenvalues();
  const double rate = theta / cfg.hbar;
  complex z{};
  for (std::size_t k = 0; k < p.size(); ++k) z += p[k] * std::polar(1.0, -lambda[k] * rate);
  const double mag = std::abs(z);
  if (mag <= 1e-10) throw error(errc::singular_overlap, "|<psi0|psi_theta>| <= 1e-10");
  double im = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double gap = lambda[i] - lambda[j];
      im -= p[i] * p[j] * gap * std::sin(gap * rate);
    }
  return im / (cfg.hbar * mag);
}

/// ds/dtheta = -2 (d|z|/dtheta) / sqrt(1 - |z|^2), admissible only for
/// s in (sing_margin, pi - sing_margin).
inline double distance_rate_analytic(const Generator& g, const PureState& psi0, double theta,
                                     const Config& cfg) {
  const auto psi = evolve(g, psi0, theta, cfg);
  const auto angle = detail::angle_between(psi0, psi);
  const double s = 2 * std::atan2(angle.sin, angle.cos);
  if (!(s > cfg.sing_margin && s < std::numbers::pi - cfg.sing_margin))
    throw error(errc::near_singular, "s outside the admissible band");
  return -2 * overlap_derivative(g, psi0, theta, cfg) / angle.sin;
}

/// Central difference of s(theta); one-sided forward difference when
/// theta < fd_step, where s(-theta) = s(theta) would fold the kink at 0.
inline double distance_rate_fd(const Generator& g, const PureState& psi0, double theta,
                               const Config& cfg) {
  const double h = cfg.fd_step;
  if (theta >= h)
    return (distance_at(g, psi0, theta + h, cfg) - distance_at(g, psi0, theta - h, cfg)) / (2 * h);
  return (distance_at(g, psi0, theta + h, cfg) - distance_at(g, psi0, theta, cfg)) / h;
}

/// Fubini-Study length of the path theta' in [0, theta]: 2 Delta K theta / hbar.
/// Delta K is conserved for a theta-independent generator; that is checked at
/// theta/2 and theta before the closed form is used.
inline double fs_path_length(const Generator& g, const PureState& psi0, double theta,
                             const Config& cfg) {
  detail::require(theta >= 0, errc::invalid_argument, "theta must be non-negative");
  const double dk = std_dev(g, psi0);
  for (double t : {0.5 * theta, theta}) {
    const double dk_t = std_dev(g, evolve(g, psi0, t, cfg));
    if (std::abs(dk_t - dk) > 1e-10)
      throw error(errc::invariant_violation, "Delta K not conserved along the evolution");
  }
  return 2 * dk * theta / cfg.hbar;
}

/// theta_k = theta_max * k / points for k = 1..points. A coarser grid whose
/// point count divides a finer one is a subset of it.
inline std::vector<double> theta_grid(double theta_max, std::size_t points) {
  detail::require(points > 0, errc::invalid_argument, "grid needs at least one point");
  std::vector<double> grid(points);
  for (std::size_t k = 1; k <= points; ++k)
    grid[k - 1] = theta_max * static_cast<double>(k) / static_cast<double>(points);
  return grid;
}

/// One row of a distance sweep.
struct DistanceSample {
  double theta = 0;
  double overlap = 1;
  double s_w = 0;
  double s = 0;
  std::optional<double> ds_dtheta_analytic;  // empty at singular samples
  double ds_dtheta_fd = 0;
  double path_length = 0;
};

inline DistanceSample sample_distance(const Generator& g, const PureState& psi0, double theta,
                                      const Config& cfg) {
  DistanceSample out;
  out.theta = theta;
  const auto psi = evolve(g, psi0, theta, cfg);
  const auto angle = detail::angle_between(psi0, psi);
  out.overlap = angle.cos;
  out.s_w = std::atan2(angle.sin, angle.cos);
  out.s = 2 * out.s_w;
  out.ds_dtheta_fd = distance_rate_fd(g, psi0, theta, cfg);
  if (out.s > cfg.sing_margin && out.s < std::numbers::pi - cfg.sing_margin)
    out.ds_dtheta_analytic = distance_rate_analytic(g, psi0, theta, cfg);
  out.path_length = fs_path_length(g, psi0, theta, cfg);
  return out;
}

}  // namespace qsl
