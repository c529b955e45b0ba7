// Prints the speed limits and the measured orthogonality time for a qubit
// and a qutrit, then the first few rows of the qubit distance sweep.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "qsl/qsl.hpp"

namespace {

void report(const char* name, const qsl::Generator& g, const qsl::PureState& psi) {
  const qsl::Config cfg;
  const auto r = qsl::speed_limit_report(g, psi, 2 * std::numbers::pi, 256, cfg);
  std::printf("%s: t_mt=%.6f t_new=%.6f t_ml=%.6f t_orth=%.6f\n", name, *r.t_mt, *r.t_new, *r.t_ml,
              r.t_orthogonal ? *r.t_orthogonal : NAN);
}

}  // namespace

int main() {
  const auto qubit = qsl::eig_hermitian(qsl::ComplexMatrix::diagonal(std::vector{-1.0, 1.0}));
  const auto qutrit = qsl::eig_hermitian(qsl::ComplexMatrix::diagonal(std::vector{0.0, 1.0, 2.0}));
  report("qubit", qubit, qsl::optimal_state(qubit, 0.0));
  report("qutrit", qutrit, qsl::PureState::normalized(qsl::ComplexVector(3, 1.0)));

  const qsl::Config cfg;
  const auto psi0 = qsl::optimal_state(qubit, 0.0);
  std::printf("\ntheta      s          ds/dtheta  2dK/hbar\n");
  for (double theta : qsl::theta_grid(std::numbers::pi / 2, 8)) {
    const auto row = qsl::sample_distance(qubit, psi0, theta, cfg);
    std::printf("%-10.6f %-10.6f %-10.6f %-10.6f\n", theta, row.s, row.ds_dtheta_fd,
                qsl::mt_rate_bound(qubit, psi0, cfg));
  }
}
