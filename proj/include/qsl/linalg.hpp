#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"

namespace qsl {

using complex = std::complex<double>;
using ComplexVector = std::vector<complex>;

/// Global numerical settings. hbar enters every formula explicitly.
struct Config {
  double hbar = 1.0;
  double fd_step = 1e-6;
  /// exclusion band around s = 0 and s = pi for the singular expressions
  double sing_margin = 0.01;
  double tol_bound = 1e-4;
  unsigned long long rng_seed = 0;

  void validate() const {
    detail::require(std::isfinite(hbar) && hbar > 0, errc::invalid_config, "hbar must be positive");
    detail::require(std::isfinite(fd_step) && fd_step > 0, errc::invalid_config,
                    "fd_step must be positive");
    detail::require(sing_margin > 0 && sing_margin < std::numbers::pi / 2, errc::invalid_config,
                    "sing_margin must lie in (0, pi/2)");
    detail::require(std::isfinite(tol_bound) && tol_bound > 0, errc::invalid_config,
                    "tol_bound must be positive");
  }
};

// ---------------------------------------------------------------------------
// Vectors

inline complex inner(std::span<const complex> a, std::span<const complex> b) {
  detail::require_same_dim(a.size(), b.size());
  complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double norm(std::span<const complex> v) {
  double acc = 0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Dense square complex matrix, row-major.

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, ComplexVector entries) : dim_(dim), data_(std::move(entries)) {
    detail::require(data_.size() == dim * dim, errc::dimension_mismatch,
                    "entry count does not match dim*dim");
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static ComplexMatrix outer(std::span<const complex> a, std::span<const complex> b) {
    detail::require_same_dim(a.size(), b.size());
    ComplexMatrix m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::span<const complex> entries() const noexcept { return data_; }

  complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  complex trace() const {
    complex t{};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  double frobenius() const {
    double acc = 0;
    for (const auto& x : data_) acc += std::norm(x);
    return std::sqrt(acc);
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const complex& x) {
      return std::isfinite(x.real()) && std::isfinite(x.imag());
    });
  }

  /// max |M_ij - conj(M_ji)|
  double hermiticity_defect() const {
    double d = 0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
  }

  ComplexVector apply(std::span<const complex> v) const {
    detail::require_same_dim(dim_, v.size());
    ComplexVector r(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      complex acc{};
      for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[j];
      r[i] = acc;
    }
    return r;
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_dim(a.dim_, b.dim_);
    const std::size_t n = a.dim_;
    ComplexMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const complex aik = a(i, k);
        for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    detail::require_same_dim(a.dim_, b.dim_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    detail::require_same_dim(a.dim_, b.dim_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend ComplexMatrix operator*(complex s, ComplexMatrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  ComplexVector data_;
};

/// Kronecker product a (x) b, first factor major.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim(), m = b.dim();
  ComplexMatrix r(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) r(i * m + k, j * m + l) = a(i, j) * b(k, l);
  return r;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_dim(a.dim(), b.dim());
  double d = 0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    d = std::max(d, std::abs(a.entries()[i] - b.entries()[i]));
  return d;
}

// ---------------------------------------------------------------------------
// Generator: Hermitian operator with its spectral decomposition.

namespace tolerance {
inline constexpr double hermiticity = 1e-12;     // relative to max|M|
inline constexpr double reconstruction = 1e-10;  // scaled by (1 + max|lambda|)
inline constexpr double orthonormality = 1e-10;
inline constexpr double jacobi_off_diagonal = 1e-14;
inline constexpr int jacobi_max_sweeps = 100;
}  // namespace tolerance

class Generator {
 public:
  /// Builds from a known decomposition; the columns of `eigenvectors` are the
  /// eigenvectors, eigenvalues must be ascending. All invariants are checked.
  static Generator from_spectrum(ComplexMatrix matrix, std::vector<double> eigenvalues,
                                 ComplexMatrix eigenvectors) {
    Generator g(std::move(matrix), std::move(eigenvalues), std::move(eigenvectors));
    g.check_invariants();
    return g;
  }

  std::size_t dim() const noexcept { return matrix_.dim(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  /// Column-wise eigenvectors.
  const ComplexMatrix& eigenvectors() const noexcept { return eigenvectors_; }
  double k_min() const noexcept { return eigenvalues_.front(); }
  double k_max() const noexcept { return eigenvalues_.back(); }

  ComplexVector eigenvector(std::size_t k) const {
    ComplexVector v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = eigenvectors_(i, k);
    return v;
  }

  /// Components <v_k|psi> in the eigenbasis.
  ComplexVector to_eigenbasis(std::span<const complex> psi) const {
    detail::require_same_dim(dim(), psi.size());
    const std::size_t n = dim();
    ComplexVector c(n);
    for (std::size_t k = 0; k < n; ++k) {
      complex acc{};
      for (std::size_t i = 0; i < n; ++i) acc += std::conj(eigenvectors_(i, k)) * psi[i];
      c[k] = acc;
    }
    return c;
  }

  /// sum_k c_k v_k
  ComplexVector from_eigenbasis(std::span<const complex> coeffs) const {
    detail::require_same_dim(dim(), coeffs.size());
    const std::size_t n = dim();
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
      complex acc{};
      for (std::size_t k = 0; k < n; ++k) acc += eigenvectors_(i, k) * coeffs[k];
      v[i] = acc;
    }
    return v;
  }

  /// Populations |<v_k|psi>|^2.
  std::vector<double> populations(std::span<const complex> psi) const {
    const auto c = to_eigenbasis(psi);
    std::vector<double> p(c.size());
    std::transform(c.begin(), c.end(), p.begin(), [](const complex& x) { return std::norm(x); });
    return p;
  }

  double reconstruction_residual() const {
    const std::size_t n = dim();
    ComplexMatrix r(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        const complex vik = eigenvalues_[k] * eigenvectors_(i, k);
        for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(eigenvectors_(j, k));
      }
    return max_abs_diff(r, matrix_);
  }

  double orthonormality_defect() const {
    const auto gram = eigenvectors_.adjoint() * eigenvectors_;
    return max_abs_diff(gram, ComplexMatrix::identity(dim()));
  }

 private:
  Generator(ComplexMatrix m, std::vector<double> evals, ComplexMatrix evecs)
      : matrix_(std::move(m)), eigenvalues_(std::move(evals)), eigenvectors_(std::move(evecs)) {}

  void check_invariants() const {
    detail::require(dim() > 0, errc::invalid_argument, "empty generator");
    detail::require(eigenvalues_.size() == dim() && eigenvectors_.dim() == dim(),
                    errc::dimension_mismatch, "spectrum size does not match matrix");
    detail::require(std::is_sorted(eigenvalues_.begin(), eigenvalues_.end()),
                    errc::invariant_violation, "eigenvalues not ascending");
    double lam = 0;
    for (double l : eigenvalues_) lam = std::max(lam, std::abs(l));
    detail::require(reconstruction_residual() <= tolerance::reconstruction * (1 + lam),
                    errc::invariant_violation, "spectral reconstruction residual too large");
    detail::require(orthonormality_defect() <= tolerance::orthonormality,
                    errc::invariant_violation, "eigenvectors not orthonormal");
  }

  ComplexMatrix matrix_;
  std::vector<double> eigenvalues_;
  ComplexMatrix eigenvectors_;
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double acc = 0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) acc += std::norm(a(i, j));
  return std::sqrt(acc);
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of a_pq with a diagonal unitary and
/// then applies a real Givens rotation, so one step is the unitary
///   J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]   on rows/cols (p, q)
/// with a_pq = |a_pq| e^{i phi}. Sweeps stop once the off-diagonal Frobenius
/// norm drops below 1e-14 ||M||_F.
inline Generator eig_hermitian(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  detail::require(n > 0, errc::invalid_argument, "empty matrix");
  detail::require(m.all_finite(), errc::not_hermitian, "matrix has non-finite entries");
  const double scale = m.max_abs();
  if (m.hermiticity_defect() > tolerance::hermiticity * scale)
    throw error(errc::not_hermitian, "max |M_ij - conj(M_ji)| exceeds 1e-12 * max|M|");

  // Work on the exact Hermitian part.
  ComplexMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  ComplexMatrix herm = a;
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double target = tolerance::jacobi_off_diagonal * a.frobenius();
  double previous_off = detail::off_diagonal_norm(a);
  bool converged = previous_off <= target;

  for (int sweep = 0; sweep < tolerance::jacobi_max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const complex phase_conj = std::conj(apq / mag);
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double tau = (aqq - app) / (2 * mag);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1 / std::sqrt(1 + t * t);
        const double s = t * c;
        const complex jpp = c, jpq = s, jqp = -s * phase_conj, jqq = c * phase_conj;

        for (std::size_t k = 0; k < n; ++k) {
          const complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;

        for (std::size_t k = 0; k < n; ++k) {
          const complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
    const double off = detail::off_diagonal_norm(a);
    // Round-off floor: no further progress but already at working accuracy.
    converged = off <= target || (off >= previous_off && off <= 1e2 * target);
    previous_off = off;
  }
  if (!converged) throw error(errc::no_convergence, "Jacobi sweep cap reached");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });
  std::vector<double> evals(n);
  ComplexMatrix evecs(n);
  for (std::size_t k = 0; k < n; ++k) {
    evals[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) evecs(i, k) = v(i, order[k]);
  }
  return Generator::from_spectrum(std::move(herm), std::move(evals), std::move(evecs));
}

/// sum_k f(lambda_k) v_k v_k^dagger
template <class F>
ComplexMatrix spectral_function(const Generator& g, F&& f) {
  const std::size_t n = g.dim();
  const auto& vecs = g.eigenvectors();
  ComplexMatrix r(n);
  for (std::size_t k = 0; k < n; ++k) {
    const complex fk = f(g.eigenvalues()[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const complex left = fk * vecs(i, k);
      for (std::size_t j = 0; j < n; ++j) r(i, j) += left * std::conj(vecs(j, k));
    }
  }
  return r;
}

/// f(K) psi without forming f(K): O(d^2).
template <class F>
ComplexVector apply_spectral_function(const Generator& g, F&& f, std::span<const complex> psi) {
  auto c = g.to_eigenbasis(psi);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= complex(f(g.eigenvalues()[k]));
  return g.from_eigenbasis(c);
}

}  // namespace qsl
