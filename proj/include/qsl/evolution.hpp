#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "linalg.hpp"
#include "state.hpp"

namespace qsl {

/// Phase freedom f(K, theta) = h(K) + g(theta). h acts eigenvalue-wise.
struct PhaseShift {
  std::function<double(double)> h = [](double) { return 0.0; };
  std::function<double(double)> g = [](double) { return 0.0; };
  double kappa = 0.0;

  static PhaseShift none() { return {}; }

  /// g(theta) = kappa * theta / hbar, i.e. evolution under K - kappa.
  static PhaseShift constant(double kappa, const Config& cfg) {
    const double hbar = cfg.hbar;
    return {[](double) { return 0.0; }, [kappa, hbar](double theta) { return kappa * theta / hbar; },
            kappa};
  }

  /// kappa = K_min: evolution under K - K_min.
  static PhaseShift ground(const Generator& gen, const Config& cfg) {
    return constant(gen.k_min(), cfg);
  }
};

/// exp(-i K theta / hbar) as a matrix.
inline ComplexMatrix propagator(const Generator& g, double theta, const Config& cfg) {
  const double rate = theta / cfg.hbar;
  return spectral_function(g, [rate](double lambda) { return std::polar(1.0, -lambda * rate); });
}

/// psi_theta = exp(-i K theta / hbar) psi_0
inline PureState evolve(const Generator& g, const PureState& psi0, double theta,
                        const Config& cfg) {
  detail::require_same_dim(g.dim(), psi0.dim());
  const double rate = theta / cfg.hbar;
  return PureState(apply_spectral_function(
      g, [rate](double lambda) { return std::polar(1.0, -lambda * rate); }, psi0.amplitudes()));
}

/// e^{i(h(K) + g(theta))} exp(-i K theta / hbar) psi_0
inline PureState evolve_shifted(const Generator& g, const PureState& psi0, double theta,
                                const PhaseShift& shift, const Config& cfg) {
  detail::require_same_dim(g.dim(), psi0.dim());
  const double rate = theta / cfg.hbar;
  const double global = shift.g(theta);
  const auto op = spectral_function(g, [&](double lambda) {
    return std::polar(1.0, shift.h(lambda) + global - lambda * rate);
  });
  return PureState(op.apply(psi0.amplitudes()));
}

/// rho_theta = U rho_0 U^dagger
inline MixedState evolve_mixed(const Generator& g, const MixedState& rho0, double theta,
                               const Config& cfg) {
  detail::require_same_dim(g.dim(), rho0.dim());
  const auto u = propagator(g, theta, cfg);
  auto rho = u * rho0.density() * u.adjoint();
  // restore exact Hermiticity lost to round-off
  const std::size_t d = rho.dim();
  for (std::size_t i = 0; i < d; ++i) {
    rho(i, i) = rho(i, i).real();
    for (std::size_t j = i + 1; j < d; ++j) {
      const complex avg = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
      rho(i, j) = avg;
      rho(j, i) = std::conj(avg);
    }
  }
  return MixedState(std::move(rho));
}

/// Canonical purification |Psi> = sum_i sqrt(p_i) |i> (x) |i> over the
/// eigenbasis of rho, eigenvalues descending. Index of |a>(x)|b> is a*d + b.
inline PureState purify(const MixedState& rho) {
  const std::size_t d = rho.dim();
  const auto spectrum = eig_hermitian(rho.density());
  ComplexVector psi(d * d);
  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t k = d - 1 - r;  // descending
    double p = spectrum.eigenvalues()[k];
    if (p < -1e-10 || p > 1 + 1e-10)
      throw error(errc::not_density_matrix, "eigenvalue outside [0, 1]");
    p = std::clamp(p, 0.0, 1.0);
    if (p < 1e-14) continue;
    const double amp = std::sqrt(p);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        psi[a * d + b] += amp * spectrum.eigenvectors()(a, k) * spectrum.eigenvectors()(b, k);
  }
  // Dropped sub-1e-14 weights can leave the norm a hair below one.
  return PureState::normalized(std::move(psi));
}

/// Tr_2 |Psi><Psi| for |Psi> in C^d (x) C^m.
inline ComplexMatrix partial_trace_second(const PureState& psi, std::size_t d) {
  detail::require(d > 0 && psi.dim() % d == 0, errc::dimension_mismatch,
                  "state dimension not divisible by first factor");
  const std::size_t m = psi.dim() / d;
  ComplexMatrix rho(d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      complex acc{};
      for (std::size_t k = 0; k < m; ++k) acc += psi[a * m + k] * std::conj(psi[b * m + k]);
      rho(a, b) = acc;
    }
  return rho;
}

/// K (x) I_ancilla, with its spectral decomposition assembled from that of K.
inline Generator lift_generator(const Generator& g, std::size_t ancilla_dim) {
  detail::require(ancilla_dim > 0, errc::invalid_argument, "ancilla dimension must be positive");
  const std::size_t d = g.dim(), m = ancilla_dim, n = d * m;
  auto matrix = kron(g.matrix(), ComplexMatrix::identity(m));
  std::vector<double> evals(n);
  ComplexMatrix evecs(n);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t col = k * m + j;
      evals[col] = g.eigenvalues()[k];
      for (std::size_t a = 0; a < d; ++a) evecs(a * m + j, col) = g.eigenvectors()(a, k);
    }
  return Generator::from_spectrum(std::move(matrix), std::move(evals), std::move(evecs));
}

}  // namespace qsl
