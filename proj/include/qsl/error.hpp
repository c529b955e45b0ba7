#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsl {

enum class errc {
  not_hermitian,
  no_convergence,
  dimension_mismatch,
  not_normalized,
  not_density_matrix,
  singular_overlap,
  near_singular,
  zero_variance,
  zero_energy,
  invalid_distance,
  degenerate_spectrum,
  invalid_config,
  invalid_argument,
  invariant_violation,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::not_hermitian: return "NotHermitian";
    case errc::no_convergence: return "NoConvergence";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::not_normalized: return "NotNormalized";
    case errc::not_density_matrix: return "NotDensityMatrix";
    case errc::singular_overlap: return "SingularOverlap";
    case errc::near_singular: return "NearSingular";
    case errc::zero_variance: return "ZeroVariance";
    case errc::zero_energy: return "ZeroEnergy";
    case errc::invalid_distance: return "InvalidDistance";
    case errc::degenerate_spectrum: return "DegenerateSpectrum";
    case errc::invalid_config: return "InvalidConfig";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::invariant_violation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

namespace detail {

inline void require(bool condition, errc code, const char* what) {
  if (!condition) throw error(code, what);
}

inline void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b)
    throw error(errc::dimension_mismatch,
                "dimensions " + std::to_string(a) + " and " + std::to_string(b) + " differ");
}

}  // namespace detail
}  // namespace qsl
