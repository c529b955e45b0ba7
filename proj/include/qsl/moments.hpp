#pragma once

#include <algorithm>
#include <cmath>

#include "linalg.hpp"
#include "state.hpp"

namespace qsl {

/// <K> in the eigenbasis.
inline double mean(const Generator& g, const PureState& psi) {
  detail::require_same_dim(g.dim(), psi.dim());
  const auto p = g.populations(psi.amplitudes());
  double m = 0;
  for (std::size_t k = 0; k < p.size(); ++k) m += p[k] * g.eigenvalues()[k];
  return m;
}

/// Delta K = sqrt(<K^2> - <K>^2), evaluated as sqrt(sum p_k (lambda_k - <K>)^2).
inline double std_dev(const Generator& g, const PureState& psi) {
  detail::require_same_dim(g.dim(), psi.dim());
  const auto p = g.populations(psi.amplitudes());
  double m = 0;
  for (std::size_t k = 0; k < p.size(); ++k) m += p[k] * g.eigenvalues()[k];
  double var = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double dev = g.eigenvalues()[k] - m;
    var += p[k] * dev * dev;
  }
  return std::sqrt(std::max(var, 0.0));
}

/// E = <K> - K_min >= 0.
inline double mean_above_ground(const Generator& g, const PureState& psi) {
  detail::require_same_dim(g.dim(), psi.dim());
  const auto p = g.populations(psi.amplitudes());
  double e = 0;
  for (std::size_t k = 0; k < p.size(); ++k) e += p[k] * (g.eigenvalues()[k] - g.k_min());
  return e;
}

/// <|K - kappa|> = sum_k |lambda_k - kappa| p_k.
inline double mean_abs_shifted(const Generator& g, const PureState& psi, double kappa) {
  detail::require_same_dim(g.dim(), psi.dim());
  const auto p = g.populations(psi.amplitudes());
  double e = 0;
  for (std::size_t k = 0; k < p.size(); ++k) e += p[k] * std::abs(g.eigenvalues()[k] - kappa);
  return e;
}

}  // namespace qsl
