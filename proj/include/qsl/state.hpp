#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace qsl {

/// Normalized amplitude vector.
class PureState {
 public:
  static constexpr double norm_tolerance = 1e-10;

  explicit PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    detail::require(!amplitudes_.empty(), errc::invalid_argument, "empty state");
    detail::require(std::abs(norm(amplitudes_) - 1.0) <= norm_tolerance, errc::not_normalized,
                    "state norm differs from 1 by more than 1e-10");
  }

  /// Divides by the norm; rejects the zero vector.
  static PureState normalized(ComplexVector v) {
    const double n = norm(v);
    detail::require(n > 0 && std::isfinite(n), errc::not_normalized, "cannot normalize vector");
    for (auto& x : v) x /= n;
    return PureState(std::move(v));
  }

  static PureState basis(std::size_t dim, std::size_t k) {
    ComplexVector v(dim);
    v.at(k) = 1.0;
    return PureState(std::move(v));
  }

  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::span<const complex> amplitudes() const noexcept { return amplitudes_; }
  const complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  friend bool operator==(const PureState&, const PureState&) = default;

 private:
  ComplexVector amplitudes_;
};

/// Positive-semidefinite, unit-trace density matrix.
class MixedState {
 public:
  explicit MixedState(ComplexMatrix density) : density_(std::move(density)) {
    detail::require(density_.dim() > 0, errc::not_density_matrix, "empty density matrix");
    detail::require(density_.all_finite(), errc::not_density_matrix, "non-finite entries");
    detail::require(density_.hermiticity_defect() <= 1e-12, errc::not_density_matrix,
                    "density matrix is not Hermitian");
    const complex tr = density_.trace();
    detail::require(std::abs(tr.real() - 1.0) <= 1e-10 && std::abs(tr.imag()) <= 1e-10,
                    errc::not_density_matrix, "trace differs from 1");
    const auto spectrum = eig_hermitian(density_);
    detail::require(spectrum.k_min() >= -1e-10, errc::not_density_matrix,
                    "density matrix has a negative eigenvalue");
  }

  static MixedState from_pure(const PureState& psi) {
    return MixedState(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()));
  }

  /// sum_k w_k |psi_k><psi_k|; weights must be non-negative and sum to 1.
  static MixedState mixture(std::span<const double> weights, std::span<const PureState> states) {
    detail::require(!states.empty() && weights.size() == states.size(), errc::invalid_argument,
                    "weights and states must have equal non-zero length");
    const std::size_t d = states.front().dim();
    ComplexMatrix rho(d);
    for (std::size_t k = 0; k < states.size(); ++k) {
      detail::require(weights[k] >= 0, errc::not_density_matrix, "negative mixture weight");
      rho = rho + complex(weights[k]) *
                      ComplexMatrix::outer(states[k].amplitudes(), states[k].amplitudes());
    }
    return MixedState(std::move(rho));
  }

  static MixedState maximally_mixed(std::size_t dim) {
    return MixedState(complex(1.0 / static_cast<double>(dim)) * ComplexMatrix::identity(dim));
  }

  std::size_t dim() const noexcept { return density_.dim(); }
  const ComplexMatrix& density() const noexcept { return density_; }

 private:
  ComplexMatrix density_;
};

/// Expectation <psi|M|psi>.
inline complex expectation(const ComplexMatrix& m, const PureState& psi) {
  return inner(psi.amplitudes(), m.apply(psi.amplitudes()));
}

}  // namespace qsl
