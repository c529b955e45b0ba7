#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "linalg.hpp"
#include "state.hpp"

namespace qsl {

/// splitmix64 finalizer; used to derive independent per-instance streams.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` of instance `index` under a campaign seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t stream = 0) noexcept {
  return mix_seed(mix_seed(mix_seed(seed) ^ index) ^ (stream + 1));
}

namespace detail {

// Standard complex Gaussian: E|z|^2 = 1.
inline complex complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace detail

/// GUE-style (A + A^dagger)/2 with independent standard complex Gaussian A.
inline ComplexMatrix random_hermitian_matrix(std::size_t dim, std::uint64_t seed) {
  detail::require(dim >= 2, errc::invalid_argument, "dimension must be at least 2");
  std::mt19937_64 rng(seed);
  ComplexMatrix a(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = detail::complex_gaussian(rng);
  return complex(0.5) * (a + a.adjoint());
}

inline Generator random_hermitian(std::size_t dim, std::uint64_t seed) {
  return eig_hermitian(random_hermitian_matrix(dim, seed));
}

/// Haar-distributed pure state (normalized complex Gaussian vector).
inline PureState random_pure_state(std::size_t dim, std::uint64_t seed) {
  detail::require(dim >= 2, errc::invalid_argument, "dimension must be at least 2");
  std::mt19937_64 rng(seed);
  ComplexVector v(dim);
  for (auto& x : v) x = detail::complex_gaussian(rng);
  return PureState::normalized(std::move(v));
}

/// Flat Dirichlet(1, ..., 1) weights.
inline std::vector<double> random_simplex_weights(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(count);
  double total = 0;
  for (auto& x : w) total += (x = expo(rng));
  for (auto& x : w) x /= total;
  return w;
}

/// Mixture of `components` seeded pure states with Dirichlet weights.
inline MixedState random_mixed_state(std::size_t dim, std::uint64_t seed,
                                     std::size_t components = 3) {
  std::vector<PureState> states;
  states.reserve(components);
  for (std::size_t k = 0; k < components; ++k)
    states.push_back(random_pure_state(dim, derive_seed(seed, k, 1)));
  const auto w = random_simplex_weights(components, derive_seed(seed, 0, 2));
  return MixedState::mixture(w, states);
}

}  // namespace qsl
