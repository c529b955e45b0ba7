#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "harness.hpp"
#include "moments.hpp"
#include "speed_limits.hpp"

namespace qsl {

using json = nlohmann::json;

/// Instance description read by the command-line tool.
struct ProblemFile {
  double hbar = 1.0;
  std::size_t dim = 0;
  ComplexMatrix k;
  /// explicit initial state; otherwise `optimal` or `seed` selects one
  std::optional<ComplexVector> psi0;
  bool psi0_optimal = false;
  double phi = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<double> theta_max;
  std::optional<std::size_t> grid_points;
};

namespace detail {

inline const std::set<std::string>& problem_keys() {
  static const std::set<std::string> keys = {"hbar", "dim",  "k",         "psi0",
                                             "phi",  "seed", "theta_max", "grid_points"};
  return keys;
}

inline complex parse_complex(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw error(errc::invalid_argument, std::string(what) + ": expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_to_json(const complex& z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

inline constexpr double load_hermiticity_tolerance = 1e-10;
inline constexpr double load_norm_tolerance = 1e-6;

/// Parses and validates a problem. `k` may be given as d rows of d pairs or as
/// d*d pairs in row-major order. Unknown keys are rejected.
inline ProblemFile parse_problem(const json& j) {
  using detail::require;
  require(j.is_object(), errc::invalid_argument, "problem must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!detail::problem_keys().contains(key))
      throw error(errc::invalid_argument, "unknown field '" + key + "'");

  ProblemFile p;
  if (j.contains("hbar")) {
    require(j["hbar"].is_number(), errc::invalid_argument, "hbar must be a number");
    p.hbar = j["hbar"].get<double>();
    require(std::isfinite(p.hbar) && p.hbar > 0, errc::invalid_argument, "hbar must be positive");
  }
  require(j.contains("dim") && j["dim"].is_number_unsigned(), errc::invalid_argument,
          "dim must be a positive integer");
  p.dim = j["dim"].get<std::size_t>();
  require(p.dim >= 1, errc::invalid_argument, "dim must be a positive integer");

  require(j.contains("k") && j["k"].is_array(), errc::invalid_argument, "k must be an array");
  const auto& k = j["k"];
  ComplexVector entries;
  entries.reserve(p.dim * p.dim);
  if (k.size() == p.dim && p.dim > 0 && k[0].is_array() && !k[0].empty() && k[0][0].is_array()) {
    for (const auto& row : k) {
      require(row.is_array() && row.size() == p.dim, errc::invalid_argument,
              "k rows must have dim entries");
      for (const auto& z : row) entries.push_back(detail::parse_complex(z, "k"));
    }
  } else {
    require(k.size() == p.dim * p.dim, errc::invalid_argument, "k must have dim*dim entries");
    for (const auto& z : k) entries.push_back(detail::parse_complex(z, "k"));
  }
  ComplexMatrix m(p.dim, std::move(entries));
  require(m.all_finite(), errc::invalid_argument, "k has non-finite entries");
  if (m.hermiticity_defect() > load_hermiticity_tolerance * std::max(1.0, m.max_abs()))
    throw error(errc::not_hermitian, "k is not Hermitian within 1e-10");
  for (std::size_t a = 0; a < p.dim; ++a) {
    m(a, a) = complex(m(a, a).real(), 0.0);
    for (std::size_t b = a + 1; b < p.dim; ++b) {
      const complex avg = 0.5 * (m(a, b) + std::conj(m(b, a)));
      m(a, b) = avg;
      m(b, a) = std::conj(avg);
    }
  }
  p.k = std::move(m);

  if (j.contains("psi0")) {
    const auto& s = j["psi0"];
    if (s.is_string()) {
      require(s.get<std::string>() == "optimal", errc::invalid_argument,
              "psi0 must be an amplitude list or \"optimal\"");
      p.psi0_optimal = true;
    } else {
      require(s.is_array() && s.size() == p.dim, errc::invalid_argument,
              "psi0 must have dim entries");
      ComplexVector v;
      for (const auto& z : s) v.push_back(detail::parse_complex(z, "psi0"));
      const double n = norm(v);
      require(std::isfinite(n) && std::abs(n - 1.0) <= load_norm_tolerance, errc::not_normalized,
              "psi0 norm differs from 1 by more than 1e-6");
      // Leave vectors that are already unit to the last bits untouched so
      // files written by this tool read back identically.
      if (std::abs(n - 1.0) > 4 * std::numeric_limits<double>::epsilon())
        for (auto& x : v) x /= n;
      p.psi0 = std::move(v);
    }
  }
  if (j.contains("phi")) {
    require(j["phi"].is_number(), errc::invalid_argument, "phi must be a number");
    p.phi = j["phi"].get<double>();
  }
  if (j.contains("seed")) {
    require(j["seed"].is_number_unsigned(), errc::invalid_argument,
            "seed must be a non-negative integer");
    p.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("theta_max")) {
    require(j["theta_max"].is_number() && j["theta_max"].get<double>() > 0,
            errc::invalid_argument, "theta_max must be positive");
    p.theta_max = j["theta_max"].get<double>();
  }
  if (j.contains("grid_points")) {
    require(j["grid_points"].is_number_unsigned() && j["grid_points"].get<std::size_t>() >= 1,
            errc::invalid_argument, "grid_points must be a positive integer");
    p.grid_points = j["grid_points"].get<std::size_t>();
  }
  return p;
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::invalid_argument, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw error(errc::invalid_argument, std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(j);
}

inline json to_json(const ProblemFile& p) {
  json j;
  j["hbar"] = p.hbar;
  j["dim"] = p.dim;
  json rows = json::array();
  for (std::size_t a = 0; a < p.dim; ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < p.dim; ++b) row.push_back(detail::complex_to_json(p.k(a, b)));
    rows.push_back(std::move(row));
  }
  j["k"] = std::move(rows);
  if (p.psi0) {
    json s = json::array();
    for (const auto& z : *p.psi0) s.push_back(detail::complex_to_json(z));
    j["psi0"] = std::move(s);
  } else if (p.psi0_optimal) {
    j["psi0"] = "optimal";
  }
  if (p.psi0_optimal || p.phi != 0.0) j["phi"] = p.phi;
  if (p.seed) j["seed"] = *p.seed;
  if (p.theta_max) j["theta_max"] = *p.theta_max;
  if (p.grid_points) j["grid_points"] = *p.grid_points;
  return j;
}

inline Config config_for(const ProblemFile& p, std::optional<double> hbar_override = {}) {
  Config cfg;
  cfg.hbar = hbar_override.value_or(p.hbar);
  cfg.validate();
  return cfg;
}

/// The initial state the problem describes.
inline PureState initial_state(const ProblemFile& p, const Generator& g) {
  if (p.psi0) return PureState(*p.psi0);
  if (p.psi0_optimal) return optimal_state(g, p.phi);
  if (p.seed) return random_pure_state(p.dim, *p.seed);
  throw error(errc::invalid_argument, "problem gives no psi0, \"optimal\" or seed");
}

/// theta_max from the file, else pi hbar / Delta K (twice the MT time), else 2 pi.
inline double default_theta_max(const ProblemFile& p, const Generator& g, const PureState& psi,
                                const Config& cfg) {
  if (p.theta_max) return *p.theta_max;
  const double dk = std_dev(g, psi);
  return dk > zero_spread ? std::numbers::pi * cfg.hbar / dk : 2 * std::numbers::pi;
}

inline constexpr std::size_t default_grid_points = 256;

// ---------------------------------------------------------------------------
// Text formatting

/// 17 significant digits; round-trips every double.
inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json optional_number(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

inline json to_json(const SpeedLimitReport& r) {
  json j;
  j["t_mt"] = optional_number(r.t_mt);
  j["t_new"] = optional_number(r.t_new);
  j["t_ml"] = optional_number(r.t_ml);
  j["t_generalized"] = optional_number(r.t_generalized);
  j["s_max"] = r.s_max;
  j["t_orthogonal"] = optional_number(r.t_orthogonal);
  j["ratio_ml_new"] = optional_number(r.ratio_ml_new());
  j["saturates_mt"] = r.saturates_mt;
  j["saturates_ml"] = r.saturates_ml;
  j["reasons"] = r.reasons;
  return j;
}

inline json to_json(const PureState& psi) {
  json a = json::array();
  for (const auto& z : psi.amplitudes()) a.push_back(detail::complex_to_json(z));
  return a;
}

inline json to_json(const Violation& v) {
  return {{"instance", v.instance}, {"theta", v.theta}, {"bound", v.bound}, {"margin", v.margin}};
}

inline json to_json(const SignRecord& r) {
  return {{"instance", r.instance}, {"theta", r.theta}, {"derivative", r.derivative}};
}

inline json to_json(const CampaignSummary& s) {
  return {{"instances", s.instances},
          {"skipped", s.skipped},
          {"samples", s.samples},
          {"violation_count", s.violation_count},
          {"worst_mt_margin", s.worst_mt_margin},
          {"worst_ml_margin", s.worst_ml_margin},
          {"worst_generalized_margin", s.worst_generalized_margin},
          {"worst_rate_gap", s.worst_rate_gap},
          {"min_path_excess", s.min_path_excess},
          {"max_moment_error", s.max_moment_error},
          {"negative_count", s.negative_count},
          {"positive_count", s.positive_count},
          {"counterexample_complete", s.counterexample_complete}};
}

/// Canonical serialization: instance summaries in index order; per-theta
/// reports only when requested.
inline json to_json(const CampaignResult& r, bool include_reports = false) {
  json j;
  j["kind"] = r.kind;
  j["summary"] = to_json(r.summary);
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back(to_json(v));
  j["violations"] = std::move(violations);
  if (r.kind == "counterexample") {
    json neg = json::array(), pos = json::array();
    for (const auto& rec : r.counterexample_records) neg.push_back(to_json(rec));
    for (const auto& rec : r.positive_records) pos.push_back(to_json(rec));
    j["counterexample_records"] = std::move(neg);
    j["positive_records"] = std::move(pos);
  }
  json instances = json::array();
  for (const auto& inst : r.instances) {
    json ji = {{"instance", inst.instance},
               {"dim", inst.dim},
               {"std_dev", inst.std_dev},
               {"energy", inst.energy},
               {"theta_max", inst.theta_max},
               {"skipped", inst.skipped}};
    if (!inst.note.empty()) ji["note"] = inst.note;
    if (r.kind != "counterexample") {
      ji["worst_mt_margin"] = inst.worst_mt_margin;
      ji["worst_ml_margin"] = inst.worst_ml_margin;
      ji["worst_generalized_margin"] = inst.worst_generalized_margin;
      ji["worst_rate_gap"] = inst.worst_rate_gap;
      ji["min_path_excess"] = inst.min_path_excess;
    }
    if (r.kind == "purified") ji["moment_error"] = inst.moment_error;
    if (include_reports) {
      json reports = json::array();
      for (const auto& rep : inst.reports)
        reports.push_back({{"theta", rep.theta},
                           {"s", rep.s},
                           {"rate", rep.rate},
                           {"mt_bound", rep.mt_bound},
                           {"ml_bound", rep.ml_bound.infinite ? json("inf") : json(rep.ml_bound.value)},
                           {"holds_mt", rep.holds_mt},
                           {"holds_ml", rep.holds_ml},
                           {"in_band", rep.in_band}});
      ji["reports"] = std::move(reports);
    }
    instances.push_back(std::move(ji));
  }
  j["instances"] = std::move(instances);
  return j;
}

}  // namespace qsl
