#pragma once

// Command implementations behind the `qsl` tool. Each returns the process
// exit code: 0 success, 1 bound violation found, 2 input or usage error.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "speed_limits.hpp"

namespace qsl::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_violation = 1;
inline constexpr int exit_input_error = 2;

inline constexpr const char* sweep_header =
    "theta,overlap,s_w,s,ds_dtheta_fd,ds_dtheta_analytic,mt_bound,ml_bound,fs_path_length";
inline constexpr const char* counterexample_header = "theta,overlap,d_overlap_dtheta,note";

namespace detail {

/// Runs `body` with the output stream for `path` ("-" or empty is stdout) and
/// maps library and parse errors to exit code 2.
inline int guarded(const std::string& path, std::ostream& err,
                   const std::function<int(std::ostream&)>& body) {
  try {
    if (path.empty() || path == "-") return body(std::cout);
    std::ofstream out(path);
    if (!out) {
      err << "error: cannot write " << path << "\n";
      return exit_input_error;
    }
    const int code = body(out);
    out.flush();
    if (!out) {
      err << "error: failed writing " << path << "\n";
      return exit_input_error;
    }
    return code;
  } catch (const qsl::error& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }
}

struct LoadedProblem {
  ProblemFile file;
  Config cfg;
  Generator generator;
};

inline LoadedProblem load(const std::string& path, std::optional<double> hbar) {
  auto file = load_problem(path);
  auto cfg = config_for(file, hbar);
  auto g = eig_hermitian(file.k);
  return {std::move(file), cfg, std::move(g)};
}

}  // namespace detail

/// Per-theta table of overlap, distances, rates, both bounds and path length.
inline int cmd_sweep(const std::string& problem_path, const std::string& out_path,
                     std::optional<double> hbar, std::ostream& err = std::cerr) {
  return detail::guarded(out_path, err, [&](std::ostream& out) {
    const auto p = detail::load(problem_path, hbar);
    const auto psi0 = initial_state(p.file, p.generator);
    const double theta_max = default_theta_max(p.file, p.generator, psi0, p.cfg);
    const std::size_t points = p.file.grid_points.value_or(default_grid_points);
    const double energy = mean_above_ground(p.generator, psi0);
    const double mt = mt_rate_bound(p.generator, psi0, p.cfg);

    bool violated = false;
    out << sweep_header << "\n";
    for (double theta : theta_grid(theta_max, points)) {
      const auto row = sample_distance(p.generator, psi0, theta, p.cfg);
      const auto ml = qsl::detail::sine_weighted_bound(row.s, energy, p.cfg);
      if (row.ds_dtheta_fd > mt + p.cfg.tol_bound) violated = true;
      if (in_admissible_band(row.s, p.cfg) && !ml.holds(row.ds_dtheta_fd, p.cfg.tol_bound))
        violated = true;
      out << format_number(row.theta) << ',' << format_number(row.overlap) << ','
          << format_number(row.s_w) << ',' << format_number(row.s) << ','
          << format_number(row.ds_dtheta_fd) << ','
          << (row.ds_dtheta_analytic ? format_number(*row.ds_dtheta_analytic) : "") << ','
          << format_number(mt) << ',' << (ml.infinite ? "inf" : format_number(ml.value)) << ','
          << format_number(row.path_length) << "\n";
    }
    return violated ? exit_violation : exit_ok;
  });
}

/// JSON speed-limit report; exit 1 if an observed orthogonality time beats a limit.
inline int cmd_speed_limits(const std::string& problem_path, const std::string& out_path,
                            std::optional<double> hbar, std::ostream& err = std::cerr) {
  return detail::guarded(out_path, err, [&](std::ostream& out) {
    const auto p = detail::load(problem_path, hbar);
    const auto psi0 = initial_state(p.file, p.generator);
    const double theta_max = default_theta_max(p.file, p.generator, psi0, p.cfg);
    const std::size_t points = std::max<std::size_t>(
        16, p.file.grid_points.value_or(default_grid_points));
    const auto report = speed_limit_report(p.generator, psi0, theta_max, points, p.cfg);
    out << to_json(report).dump(2) << "\n";
    if (report.t_orthogonal) {
      for (const auto& limit : {report.t_mt, report.t_new, report.t_ml})
        if (limit && *report.t_orthogonal < *limit - 1e-8) return exit_violation;
    }
    return exit_ok;
  });
}

struct VerifyOptions {
  std::size_t instances = 500;
  std::vector<std::size_t> dims = {2, 3, 4, 5, 6, 7, 8};
  std::uint64_t seed = 42;
  std::size_t grid = 256;
  std::size_t mixed_instances = 100;
  unsigned threads = 1;
  std::optional<double> hbar;
};

/// Runs the bound, counterexample and purified campaigns. The JSON does not
/// depend on the thread count.
inline int cmd_verify(const VerifyOptions& opts, const std::string& out_path,
                      std::ostream& err = std::cerr) {
  if (opts.instances == 0) {
    err << "error: --instances must be at least 1\n";
    return exit_input_error;
  }
  return detail::guarded(out_path, err, [&](std::ostream& out) {
    Config cfg;
    if (opts.hbar) cfg.hbar = *opts.hbar;
    cfg.rng_seed = opts.seed;
    cfg.validate();

    CampaignSpec spec;
    spec.n_instances = opts.instances;
    spec.dims = opts.dims;
    spec.grid_points = opts.grid;
    spec.seed = opts.seed;
    spec.threads = opts.threads;
    spec.validate();

    const auto bound = run_bound_campaign(spec, cfg);
    const auto sign = run_counterexample_campaign(spec, cfg);
    CampaignSpec mixed = spec;
    mixed.n_instances = opts.mixed_instances;
    std::optional<CampaignResult> purified;
    if (mixed.n_instances > 0) purified = run_purified_campaign(mixed, cfg);

    const bool passed = bound.summary.violation_count == 0 &&
                        sign.summary.violation_count == 0 &&
                        sign.summary.counterexample_complete &&
                        (!purified || purified->summary.violation_count == 0);

    json j;
    j["config"] = {{"instances", opts.instances},   {"dims", opts.dims},
                   {"seed", opts.seed},             {"grid", opts.grid},
                   {"mixed_instances", opts.mixed_instances}, {"hbar", cfg.hbar},
                   {"fd_step", cfg.fd_step},        {"sing_margin", cfg.sing_margin},
                   {"tol_bound", cfg.tol_bound}};
    j["bound"] = to_json(bound);
    j["counterexample"] = to_json(sign);
    j["purified"] = purified ? to_json(*purified) : json(nullptr);
    j["passed"] = passed;
    out << j.dump(2) << "\n";
    return passed ? exit_ok : exit_violation;
  });
}

struct CounterexampleSource {
  std::optional<std::string> problem_path;
  std::uint64_t seed = 1;
  std::size_t dim = 4;
  std::size_t grid = default_grid_points;
};

/// Log-spaced table of d|<psi0|psi_theta>|/dtheta from theta = 1e-5.
/// Exit 1 if a non-stationary state starts with a non-negative derivative.
inline int cmd_counterexample(const CounterexampleSource& src, const std::string& out_path,
                              std::optional<double> hbar, std::ostream& err = std::cerr) {
  return detail::guarded(out_path, err, [&](std::ostream& out) {
    std::optional<Generator> g;
    std::optional<PureState> psi0;
    Config cfg;
    std::optional<double> theta_max;
    std::size_t points = src.grid;
    if (src.problem_path) {
      auto p = detail::load(*src.problem_path, hbar);
      psi0 = initial_state(p.file, p.generator);
      theta_max = default_theta_max(p.file, p.generator, *psi0, p.cfg);
      if (p.file.grid_points) points = *p.file.grid_points;
      cfg = p.cfg;
      g = std::move(p.generator);
    } else {
      if (hbar) cfg.hbar = *hbar;
      cfg.validate();
      g = random_hermitian(src.dim, derive_seed(src.seed, 0, 0));
      psi0 = random_pure_state(src.dim, derive_seed(src.seed, 0, 1));
    }
    const double dk = std_dev(*g, *psi0);
    if (!theta_max) theta_max = dk > zero_spread ? std::numbers::pi * cfg.hbar / dk : 1.0;
    constexpr double theta_min = 1e-5;
    qsl::detail::require(*theta_max > theta_min, errc::invalid_argument, "theta_max must exceed 1e-5");
    qsl::detail::require(points >= 2, errc::invalid_argument, "need at least two grid points");
    const bool stationary = dk <= stationary_spread;

    out << counterexample_header << "\n";
    bool first = true, sign_ok = true;
    const double ratio = std::log(*theta_max / theta_min);
    for (std::size_t k = 0; k < points; ++k) {
      const double theta =
          k + 1 == points ? *theta_max
                          : theta_min * std::exp(ratio * static_cast<double>(k) /
                                                 static_cast<double>(points - 1));
      const double ov = overlap(*psi0, evolve(*g, *psi0, theta, cfg));
      std::string deriv, note;
      if (stationary) {
        deriv = format_number(0.0);
        note = "stationary";
      } else {
        try {
          const double d = overlap_derivative(*g, *psi0, theta, cfg);
          deriv = format_number(d);
          if (first && !(d < 0)) sign_ok = false;
        } catch (const qsl::error& e) {
          if (e.code() != errc::singular_overlap) throw;
          note = "singular";
        }
      }
      first = false;
      out << format_number(theta) << ',' << format_number(ov) << ',' << deriv << ',' << note
          << "\n";
    }
    return sign_ok ? exit_ok : exit_violation;
  });
}

/// Builds the equal superposition of extreme eigenvectors and reports its
/// saturation flags and speed limits.
inline int cmd_optimal(const std::string& problem_path, double phi, const std::string& out_path,
                       std::optional<double> hbar, std::ostream& err = std::cerr) {
  return detail::guarded(out_path, err, [&](std::ostream& out) {
    const auto p = detail::load(problem_path, hbar);
    const auto psi = optimal_state(p.generator, phi);
    const auto sat = check_saturation(p.generator, psi, p.cfg);
    const double theta_max = p.file.theta_max.value_or(
        std::numbers::pi * p.cfg.hbar / std_dev(p.generator, psi));
    const std::size_t points = std::max<std::size_t>(
        16, p.file.grid_points.value_or(default_grid_points));
    const auto report = speed_limit_report(p.generator, psi, theta_max, points, p.cfg);
    json j;
    j["phi"] = phi;
    j["state"] = to_json(psi);
    j["saturates_mt"] = sat.saturates_mt;
    j["geodesic"] = sat.geodesic;
    j["speed_limits"] = to_json(report);
    out << j.dump(2) << "\n";
    return exit_ok;
  });
}

}  // namespace qsl::cli
