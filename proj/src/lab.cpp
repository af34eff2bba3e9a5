#include "bclab/lab.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace bclab {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs a number, got '" +
                      value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs an integer, got '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "' needs true or false, got '" +
                    value + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not 'key = value': " + stripped);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        " has an empty key");
    }
    if (key == "scenario") {
      cfg.scenario = value;
    } else if (key == "n") {
      cfg.n = static_cast<int>(parse_int(key, value));
    } else if (key == "length") {
      cfg.length = parse_double(key, value);
    } else if (key == "t_final") {
      cfg.t_final = parse_double(key, value);
    } else if (key == "dt") {
      cfg.dt = parse_double(key, value);
    } else if (key == "potential_scalar") {
      cfg.potential_scalar = parse_double(key, value);
    } else if (key == "bump_shape") {
      if (value == "sin2") {
        cfg.bump_shape = BumpShape::sin2;
      } else if (value == "sin4") {
        cfg.bump_shape = BumpShape::sin4;
      } else {
        throw ConfigError("bump_shape must be sin2 or sin4, got '" + value +
                          "'");
      }
    } else if (key == "bump_start") {
      cfg.bump_start = parse_double(key, value);
    } else if (key == "bump_end") {
      cfg.bump_end = parse_double(key, value);
    } else if (key == "bump_amplitude") {
      cfg.bump_amplitude = parse_double(key, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<unsigned long long>(parse_int(key, value));
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "allow_guard_violation") {
      cfg.allow_guard_violation = parse_bool(key, value);
    } else if (key.rfind("tol_", 0) == 0) {
      cfg.tolerance_overrides[key] = parse_double(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

void ExperimentConfig::validate() const {
  if (n < 32) {
    throw ConfigError("n must be at least 32, got " + std::to_string(n));
  }
  if (!(length > 0.0)) throw ConfigError("length must be positive");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (dt < 0.0) throw ConfigError("dt must be nonnegative");
  if (!(bump_end > bump_start)) {
    throw ConfigError("bump_end must exceed bump_start");
  }
  if (bump_start < 0.0) {
    throw ConfigError("bump_start must be nonnegative");
  }
  if (t_final > length && !allow_guard_violation) {
    throw ConfigError(
        "t_final exceeds the domain length, so the controlled front would "
        "reach the far boundary; set allow_guard_violation = true to force");
  }
}

std::filesystem::path ExperimentConfig::resolved_output_dir() const {
  if (const char* env = std::getenv("LAB_OUTPUT_ROOT");
      env != nullptr && env[0] != '\0') {
    return std::filesystem::path(env);
  }
  return std::filesystem::path(output_dir);
}

std::string iso_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

double tol_or(const ExperimentConfig& cfg, const std::string& key,
              double fallback) {
  const auto it = cfg.tolerance_overrides.find(key);
  return it == cfg.tolerance_overrides.end() ? fallback : it->second;
}

ControlSignal config_bump(const ExperimentConfig& cfg) {
  ControlSignal f;
  f.shape = cfg.bump_shape;
  f.t_start = cfg.bump_start;
  f.t_end = cfg.bump_end;
  f.amplitude = cfg.bump_amplitude;
  return f;
}

json base_report(const ExperimentConfig& cfg, const std::string& anchor) {
  json j;
  j["scenario"] = cfg.scenario;
  j["anchor"] = anchor;
  j["parameters"] = {
      {"n", cfg.n},
      {"length", cfg.length},
      {"t_final", cfg.t_final},
      {"dt", cfg.dt},
      {"potential_scalar", cfg.potential_scalar},
      {"bump_shape", cfg.bump_shape == BumpShape::sin2 ? "sin2" : "sin4"},
      {"bump_start", cfg.bump_start},
      {"bump_end", cfg.bump_end},
      {"bump_amplitude", cfg.bump_amplitude},
      {"seed", cfg.seed},
  };
  j["warnings"] = json::array();
  return j;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::array<double, 4>>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write trace file: " + path.string());
  }
  out << "t,x,re,im\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", r[0], r[1],
                  r[2], r[3]);
    out << buf;
  }
}

/// One CSV per field component, rows (t, x_j, re, im).
void write_state_csv(const std::filesystem::path& root,
                     const std::string& stem, double t, const Grid& grid,
                     const Vec& u, std::vector<std::string>& names) {
  for (int comp = 0; comp < 2; ++comp) {
    std::vector<std::array<double, 4>> rows;
    rows.reserve(grid.n);
    for (int j = 0; j < grid.n; ++j) {
      const Complex v = u(2 * j + comp);
      rows.push_back({t, grid.nodes(j), v.real(), v.imag()});
    }
    const std::string name = stem + "_c" + std::to_string(comp + 1) + ".csv";
    write_csv(root / name, rows);
    names.push_back(name);
  }
}

void write_time_trace_csv(const std::filesystem::path& root,
                          const std::string& stem, const RealVec& times,
                          const Vec& values, double x,
                          std::vector<std::string>& names) {
  std::vector<std::array<double, 4>> rows;
  rows.reserve(times.size());
  for (Eigen::Index j = 0; j < times.size(); ++j) {
    rows.push_back({times(j), x, values(j).real(), values(j).imag()});
  }
  const std::string name = stem + ".csv";
  write_csv(root / name, rows);
  names.push_back(name);
}

// ---------------------------------------------------------------------------
// scenarios

struct ScenarioOutcome {
  bool pass = false;
  json report;
  std::vector<std::string> csv_names;
};

using ScenarioFn = ScenarioOutcome (*)(const ExperimentConfig&,
                                       const std::filesystem::path&);

Vec random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec u(dim);
  for (int k = 0; k < dim; ++k) u(k) = Complex(gauss(rng), gauss(rng));
  return u;
}

ScenarioOutcome run_green_identity(const ExperimentConfig& cfg,
                                   const std::filesystem::path&) {
  const Grid grid = Grid::uniform(cfg.n, cfg.length);
  const double tol = tol_or(cfg, "tol_green_identity", 1e-12);

  const auto max_residual = [&](const Potential& v) {
    const DiscreteGreenSystem sys = build_dirac(grid, v);
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Vec u = random_state(sys.state_dim(), rng);
      const Vec w = random_state(sys.state_dim(), rng);
      const double scale =
          weighted_norm(sys.op * u, sys.state_weights) *
              weighted_norm(w, sys.state_weights) +
          weighted_norm(u, sys.state_weights) *
              weighted_norm(sys.op * w, sys.state_weights) +
          1.0;
      worst = std::max(worst, std::abs(green_residual(sys, u, w)) / scale);
    }
    return worst;
  };

  const double res_free = max_residual(Potential::scalar(cfg.potential_scalar));
  const double res_scalar = max_residual(Potential::scalar(1.0));

  ScenarioOutcome out;
  out.report = base_report(
      cfg,
      "(A u, v)_W - (u, A v)_W = (G1 u, G2 v)_B - (G2 u, G1 v)_B exactly on "
      "the grid, with G1 u = (u1(0), u1(X)) and G2 u = (u2(0), -u2(X))");
  out.report["measured"] = {
      {"max_residual_config_potential", res_free},
      {"max_residual_scalar_one", res_scalar},
      {"n_pairs", 100},
  };
  out.report["tolerances"] = {{"tol_green_identity", tol}};
  out.pass = res_free <= tol && res_scalar <= tol;
  out.report["pass"] = out.pass;
  return out;
}

ScenarioOutcome run_duhamel_consistency(const ExperimentConfig& cfg,
                                        const std::filesystem::path&) {
  const Grid grid = Grid::uniform(cfg.n, cfg.length);
  const DiscreteGreenSystem sys =
      build_dirac(grid, Potential::scalar(cfg.potential_scalar));
  const SelfAdjointExtension ext = extend_self_adjoint(sys);
  const double t1 = 0.75 * cfg.t_final;

  const double tol_closed = tol_or(cfg, "tol_closed_form", 1e-10);
  const double tol_trap = tol_or(cfg, "tol_trapezoid", 1e-8);
  const double tol_forms = tol_or(cfg, "tol_forms_agreement", 1e-6);
  const double tol_series = tol_or(cfg, "tol_series_branch", 1e-6);

  // eigenvector with eigenvalue nearest 2: low enough for the trapezoid
  // budget, away from the kernel
  int k_mid = 0;
  for (int k = 0; k < ext.reduced_dim(); ++k) {
    if (std::abs(ext.spectrum.eigenvalues(k) - 2.0) <
        std::abs(ext.spectrum.eigenvalues(k_mid) - 2.0)) {
      k_mid = k;
    }
  }
  const double lam_k = ext.spectrum.eigenvalues(k_mid);
  const Vec ek = ext.prolong_state(ext.spectrum.eigenvectors.col(k_mid));
  const double ek_norm = weighted_norm(ek, sys.state_weights);

  // closed form for the constant source e_k
  const Complex u_arg(0.0, t1 * lam_k);
  const Complex phi_exact =
      std::abs(t1 * lam_k) < 1e-6
          ? Complex(0.0, -t1)
          : (1.0 - std::exp(u_arg)) / lam_k;
  const Vec w_exact = phi_exact * ek;

  const auto const_src = [&](double) { return ek; };
  const auto zero_src = [&](double) { return Vec(Vec::Zero(sys.state_dim())); };

  const Vec w_reg = duhamel_regularized(ext, const_src, zero_src, 0.0, t1, 64);
  const double err_reg =
      weighted_norm(w_reg - w_exact, sys.state_weights) / ek_norm;

  const Vec w_trap = duhamel(ext, const_src, 0.0, t1, 10000);
  const double err_trap =
      weighted_norm(w_trap - w_exact, sys.state_weights) / ek_norm;

  // smooth compactly supported source mixing low modes and the kernel
  ControlSignal env;
  env.shape = BumpShape::sin2;
  env.t_start = 0.05 * t1;
  env.t_end = 0.95 * t1;
  env.amplitude = 1.0;
  Vec mix = Vec::Zero(sys.state_dim());
  int added = 0;
  int kernel_added = 0;
  for (int k = 0; k < ext.reduced_dim() && added < 3; ++k) {
    if (std::abs(ext.spectrum.eigenvalues(k)) < 1e-8 && kernel_added == 0) {
      mix += ext.prolong_state(ext.spectrum.eigenvectors.col(k));
      ++kernel_added;
      continue;
    }
    if (ext.spectrum.eigenvalues(k) > 0.3 &&
        ext.spectrum.eigenvalues(k) < 6.0) {
      mix += ext.prolong_state(ext.spectrum.eigenvectors.col(k));
      ++added;
    }
  }
  const double mix_norm = weighted_norm(mix, sys.state_weights);
  const auto smooth_src = [&](double s) { return Vec(env.value(s) * mix); };
  const auto smooth_src_prime = [&](double s) {
    return Vec(env.derivative(s) * mix);
  };
  const int m_smooth = 4000;
  const Vec via_trap = duhamel(ext, smooth_src, 0.0, t1, m_smooth);
  const Vec via_reg =
      duhamel_regularized(ext, smooth_src, smooth_src_prime, 0.0, t1, m_smooth);
  const double err_forms =
      weighted_norm(via_trap - via_reg, sys.state_weights) / mix_norm;

  // continuity of the regularized form across the small-eigenvalue branch
  const DiscreteGreenSystem sys_shift =
      build_dirac(grid, Potential::scalar(cfg.potential_scalar + 1e-9));
  const SelfAdjointExtension ext_shift = extend_self_adjoint(sys_shift);
  const Vec w_shift =
      duhamel_regularized(ext_shift, const_src, zero_src, 0.0, t1, 64);
  const double err_series =
      weighted_norm(w_shift - w_reg, sys.state_weights) / ek_norm;

  ScenarioOutcome out;
  out.report = base_report(
      cfg,
      "w(t) = (1/i) int_0^t exp(i (t-s) L) g(s) ds equals the regularized "
      "form phi(t, L) g(0) + int_0^t phi(t-s, L) g'(s) ds with "
      "phi(s, lambda) = (1 - exp(i s lambda)) / lambda, finite across "
      "lambda = 0");
  out.report["measured"] = {
      {"regularized_vs_closed_form", err_reg},
      {"trapezoid_vs_closed_form", err_trap},
      {"forms_agreement_smooth_source", err_forms},
      {"series_branch_continuity", err_series},
      {"probe_eigenvalue", lam_k},
  };
  out.report["tolerances"] = {
      {"tol_closed_form", tol_closed},
      {"tol_trapezoid", tol_trap},
      {"tol_forms_agreement", tol_forms},
      {"tol_series_branch", tol_series},
  };
  out.pass = err_reg <= tol_closed && err_trap <= tol_trap &&
             err_forms <= tol_forms && err_series <= tol_series;
  out.report["pass"] = out.pass;
  return out;
}

ScenarioOutcome run_oracle_agreement(const ExperimentConfig& cfg,
                                     const std::filesystem::path& root) {
  const Grid grid = Grid::uniform(cfg.n, cfg.length);
  const DiscreteGreenSystem sys = build_dirac(grid);
  const SelfAdjointExtension ext = extend_self_adjoint(sys);
  const ControlSignal f = config_bump(cfg);
  const double tol_solver = tol_or(cfg, "tol_solver", 5e-3);
  const double tol_gauge = tol_or(cfg, "tol_gauge", 1e-8);

  const Vec u_oracle = transport_oracle(grid, f, cfg.t_final);
  const double oracle_norm = weighted_norm(u_oracle, sys.state_weights);

  const Trajectory direct = solve_bc_direct(sys, f, cfg.t_final, cfg.dt);
  const Vec u_direct = direct.at_final();
  const double err_direct =
      weighted_norm(u_direct - u_oracle, sys.state_weights) / oracle_norm;

  LiftOptions lopt;
  lopt.dt = cfg.dt;
  const LiftedSolution lift = solve_bc_lift(sys, ext, f, cfg.t_final, lopt);
  const double err_lift =
      weighted_norm(lift.state - u_oracle, sys.state_weights) / oracle_norm;

  lopt.gauge = LiftGauge::plus_only;
  const LiftedSolution lift_plus = solve_bc_lift(sys, ext, f, cfg.t_final, lopt);
  lopt.gauge = LiftGauge::minus_only;
  const LiftedSolution lift_minus =
      solve_bc_lift(sys, ext, f, cfg.t_final, lopt);
  const double gauge_diff = std::max(
      weighted_norm(lift.state - lift_plus.state, sys.state_weights),
      weighted_norm(lift.state - lift_minus.state, sys.state_weights)) /
      std::max(oracle_norm, 1e-300);

  ScenarioOutcome out;
  out.report = base_report(
      cfg,
      "the state driven through the port by f is u(x, t) = f(t - x) (1, i) "
      "while the front stays inside the domain; the lift and direct solvers "
      "reproduce it at second order, and the lifted state does not depend "
      "on the gauge of the boundary lift");
  for (const auto& w : direct.warnings) out.report["warnings"].push_back(w);
  for (const auto& w : lift.warnings) out.report["warnings"].push_back(w);
  out.report["measured"] = {
      {"direct_rel_error", err_direct},
      {"lift_rel_error", err_lift},
      {"max_gauge_difference", gauge_diff},
  };
  out.report["tolerances"] = {
      {"tol_solver", tol_solver},
      {"tol_gauge", tol_gauge},
  };
  out.pass =
      err_direct <= tol_solver && err_lift <= tol_solver &&
      gauge_diff <= tol_gauge;
  out.report["pass"] = out.pass;
  write_state_csv(root, cfg.scenario + "_state_direct", cfg.t_final, grid,
                  u_direct, out.csv_names);
  write_state_csv(root, cfg.scenario + "_state_lift", cfg.t_final, grid,
                  lift.state, out.csv_names);
  write_state_csv(root, cfg.scenario + "_state_oracle", cfg.t_final, grid,
                  u_oracle, out.csv_names);
  return out;
}

enum class DualityKind { pointwise, integrated, negative_time };

ScenarioOutcome run_duality(const ExperimentConfig& cfg,
                            const std::filesystem::path& root,
                            DualityKind kind) {
  const Grid grid = Grid::uniform(cfg.n, cfg.length);
  const DiscreteGreenSystem sys = build_dirac(grid);
  const SelfAdjointExtension ext = extend_self_adjoint(sys);
  const ControlSignal f = config_bump(cfg);
  const Vec y = smooth_constrained_profile(grid);
  const double tol = tol_or(cfg, "tol_rel_residual", 1e-3);
  const double t_eval = -0.3 * cfg.t_final;

  DualityCheck check;
  std::string anchor;
  switch (kind) {
    case DualityKind::pointwise:
      check = check_auxiliary(sys, ext, f, y, cfg.t_final, cfg.dt);
      anchor =
          "(u^f(T), y)_W = i int_0^T f(t) conj((G2 exp(i (t-T) L) y)_0) dt "
          "for y satisfying the domain constraints";
      break;
    case DualityKind::integrated:
      check = check_aux1(sys, ext, f, y, cfg.t_final, cfg.dt);
      anchor =
          "int_0^T (y, u^f(t))_W dt = i int_0^T ((G2 w^{y,T})(t))_0 "
          "conj(f(t)) dt with w^{y,T}(t) = int_T^t exp(i (s-T) L) y ds";
      break;
    case DualityKind::negative_time:
      check = check_aux2(sys, ext, f, y, cfg.t_final, t_eval, cfg.dt);
      anchor =
          "(u^f(T), w^y(t))_W = int_0^T (u^f(s), y)_W ds + i int_0^T f(s) "
          "conj((G2 w^y)(s + t - T)_0) ds for t <= 0, with w^y(t) = "
          "int_0^t exp(i s L) y ds";
      break;
  }

  ScenarioOutcome out;
  out.report = base_report(cfg, anchor);
  out.report["measured"] = {
      {"lhs_re", check.lhs.real()},
      {"lhs_im", check.lhs.imag()},
      {"rhs_re", check.rhs.real()},
      {"rhs_im", check.rhs.imag()},
      {"residual", check.residual},
      {"rel_residual", check.rel_residual},
      {"scale", check.scale},
  };
  if (kind == DualityKind::negative_time) {
    out.report["parameters"]["t_eval"] = t_eval;
  }
  out.report["tolerances"] = {{"tol_rel_residual", tol}};
  out.pass = check.rel_residual <= tol;
  out.report["pass"] = out.pass;

  // trace files: the control and the port trace entering the pairing
  const int m = 257;
  RealVec times = RealVec::LinSpaced(m, 0.0, cfg.t_final);
  Vec control_vals = f.sample(times);
  write_time_trace_csv(root, cfg.scenario + "_control", times, control_vals,
                       0.0, out.csv_names);
  Vec port_vals(m);
  for (int j = 0; j < m; ++j) {
    const double t = times(j);
    Vec state;
    switch (kind) {
      case DualityKind::pointwise:
        state = propagate(ext, y, 0.0, t - cfg.t_final);
        break;
      case DualityKind::integrated:
        state = integrated_trajectory(ext, y, cfg.t_final, t);
        break;
      case DualityKind::negative_time:
        state = integrated_trajectory(ext, y, 0.0, t + t_eval - cfg.t_final);
        break;
    }
    port_vals(j) = sys.gamma2(state)(0);
  }
  write_time_trace_csv(root, cfg.scenario + "_port_trace", times, port_vals,
                       0.0, out.csv_names);
  return out;
}

ScenarioOutcome run_duality_auxiliary(const ExperimentConfig& cfg,
                                      const std::filesystem::path& root) {
  return run_duality(cfg, root, DualityKind::pointwise);
}

ScenarioOutcome run_duality_aux1(const ExperimentConfig& cfg,
                                 const std::filesystem::path& root) {
  return run_duality(cfg, root, DualityKind::integrated);
}

ScenarioOutcome run_duality_aux2(const ExperimentConfig& cfg,
                                 const std::filesystem::path& root) {
  return run_duality(cfg, root, DualityKind::negative_time);
}

json reachability_json(const ReachabilityReport& r) {
  json j;
  j["direction"] = r.direction;
  j["n_controls"] = r.n_controls;
  j["rank"] = r.rank;
  j["rank_at_loose_tol"] = r.rank_at_loose_tol;
  j["rank_at_tight_tol"] = r.rank_at_tight_tol;
  j["max_polarization_residual"] = r.max_polarization_residual;
  j["max_tail_mass"] = r.max_tail_mass;
  j["max_unreachable_overlap_deg"] = r.max_unreachable_overlap_deg;
  json sv = json::array();
  for (int k = 0; k < r.singular_values.size(); ++k) {
    sv.push_back(r.singular_values(k));
  }
  j["singular_values"] = sv;
  return j;
}

ScenarioOutcome run_reachability(const ExperimentConfig& cfg,
                                 const std::filesystem::path& root,
                                 bool backward) {
  const Grid grid = Grid::uniform(cfg.n, cfg.length);
  const DiscreteGreenSystem sys = build_dirac(grid);
  const std::vector<ControlSignal> family = default_bump_family(20);

  ReachabilityOptions opts;
  opts.t_final = cfg.t_final;
  opts.dt = cfg.dt;
  opts.backward = backward;
  const ReachabilityReport report = snapshot_reachable(sys, family, opts);

  const double tol_pol = tol_or(cfg, "tol_polarization", 1e-3);
  const double tol_tail = tol_or(cfg, "tol_tail", 1e-6);
  const double tol_angle = tol_or(cfg, "tol_angle_deg", 5.0);
  const int expected_rank =
      static_cast<int>(tol_or(cfg, "tol_expected_rank", 6));

  ScenarioOutcome out;
  std::string anchor =
      "states reachable from rest through the port in time T are "
      "(1, i)-polarized profiles supported in x < T; the snapshot span has "
      "the rank of the control family and misses the orthogonal "
      "polarization";
  if (backward) {
    anchor =
        "states reachable from rest through the port in negative time are "
        "(1, -i)-polarized profiles supported in x < |T|, orthogonal in "
        "polarization to the forward reachable set";
  }
  out.report = base_report(cfg, anchor);
  out.report["measured"] = reachability_json(report);
  out.report["direction"] = report.direction;

  bool pass = report.max_polarization_residual <= tol_pol &&
              report.max_tail_mass <= tol_tail &&
              report.max_unreachable_overlap_deg <= tol_angle &&
              report.rank == expected_rank &&
              report.rank_at_loose_tol == report.rank &&
              report.rank_at_tight_tol == report.rank;

  out.report["tolerances"] = {
      {"tol_polarization", tol_pol},
      {"tol_tail", tol_tail},
      {"tol_angle_deg", tol_angle},
      {"tol_expected_rank", expected_rank},
  };

  if (backward) {
    ReachabilityOptions fwd_opts = opts;
    fwd_opts.backward = false;
    const ReachabilityReport fwd = snapshot_reachable(sys, family, fwd_opts);
    const double cross = smallest_principal_angle_deg(
        fwd.span, report.span, sys.state_weights);
    const double tol_cross = tol_or(cfg, "tol_cross_angle_deg", 80.0);
    out.report["measured"]["cross_span_angle_deg"] = cross;
    out.report["tolerances"]["tol_cross_angle_deg"] = tol_cross;
    pass = pass && cross >= tol_cross;
  }

  out.pass = pass;
  out.report["pass"] = pass;

  // trace of the first snapshot for inspection
  const Trajectory traj =
      backward ? solve_bc_backward(sys, family[0], -cfg.t_final, cfg.dt)
               : solve_bc_direct(sys, family[0], cfg.t_final, cfg.dt);
  write_state_csv(root, cfg.scenario + "_snapshot_first",
                  backward ? -cfg.t_final : cfg.t_final, grid,
                  traj.at_final(), out.csv_names);
  return out;
}

ScenarioOutcome run_reachability_forward(const ExperimentConfig& cfg,
                                         const std::filesystem::path& root) {
  return run_reachability(cfg, root, false);
}

ScenarioOutcome run_reachability_backward(const ExperimentConfig& cfg,
                                          const std::filesystem::path& root) {
  return run_reachability(cfg, root, true);
}

ScenarioOutcome run_deficiency_table(const ExperimentConfig& cfg,
                                     const std::filesystem::path&) {
  struct Row {
    OperatorSpec spec;
    int expected_plus;
    int expected_minus;
  };
  const std::vector<Row> rows = {
      {OperatorSpec::minimal(), 1, 1},
      {OperatorSpec::whole_line_selfadjoint(), 0, 0},
      {OperatorSpec::polarized_part(), 0, 1},
      {OperatorSpec::polarized_mirror(), 1, 0},
  };

  ScenarioOutcome out;
  out.report = base_report(
      cfg,
      "deficiency indices count square-integrable solutions of the mode "
      "equation admitted by the adjoint boundary conditions: (1,1) for the "
      "minimal operator, (0,0) for the self-adjoint condition, (0,1) and "
      "(1,0) for the two polarized scalar parts");

  bool pass = true;
  json table = json::array();
  for (const auto& row : rows) {
    const DeficiencyIndices sym = deficiency_indices(row.spec);
    const DeficiencyIndices shot = shooting_deficiency_indices(row.spec);
    const bool ok = sym.n_plus == row.expected_plus &&
                    sym.n_minus == row.expected_minus &&
                    shot.n_plus == sym.n_plus && shot.n_minus == sym.n_minus;
    pass = pass && ok;
    table.push_back({
        {"name", row.spec.name},
        {"n_plus", sym.n_plus},
        {"n_minus", sym.n_minus},
        {"expected_plus", row.expected_plus},
        {"expected_minus", row.expected_minus},
        {"shooting_plus", shot.n_plus},
        {"shooting_minus", shot.n_minus},
        {"agrees", ok},
    });
  }

  // randomized Hermitian constant potentials: symbolic and shooting counts
  // must agree even though the individual indices vary
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int agreements = 0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    OperatorSpec spec;
    spec.name = "randomized";
    Eigen::Matrix2cd v;
    const double p = gauss(rng);
    const double r = gauss(rng);
    const Complex q(gauss(rng), gauss(rng));
    v << p, q, std::conj(q), r;
    spec.v_inf = v;
    spec.bc = trial % 2 == 0
                  ? OperatorSpec::BoundaryCondition::full_zero
                  : OperatorSpec::BoundaryCondition::first_component_zero;
    const DeficiencyIndices sym = deficiency_indices(spec);
    const DeficiencyIndices shot = shooting_deficiency_indices(spec);
    if (sym.n_plus == shot.n_plus && sym.n_minus == shot.n_minus) {
      ++agreements;
    }
  }
  pass = pass && agreements == trials;

  out.report["measured"] = {
      {"table", table},
      {"randomized_trials", trials},
      {"randomized_agreements", agreements},
  };
  out.report["tolerances"] = json::object();
  out.pass = pass;
  out.report["pass"] = pass;
  return out;
}

ScenarioOutcome run_part_classification(const ExperimentConfig& cfg,
                                        const std::filesystem::path&) {
  const Grid grid = Grid::uniform(cfg.n, cfg.length);
  const DiscreteGreenSystem sys = build_dirac(grid);
  const SelfAdjointExtension ext = extend_self_adjoint(sys);
  const PartClassification cls = classify_part(sys, ext);

  ScenarioOutcome out;
  out.report = base_report(
      cfg,
      "the (1,-i)-polarized subspace is invariant under the operator; the "
      "part of the minimal operator in it has indices (0,1), so it belongs "
      "to the class of maximal restrictions with no forward defect, while "
      "the mirror part has (1,0): maximal but outside the class; the decay "
      "relation that a genuine defect vector would impose fails by the "
      "unitarity of the constrained evolution");
  out.report["measured"] = {
      {"invariance_residual", cls.invariance_residual},
      {"invariance_budget", cls.invariance_budget},
      {"invariant", cls.invariant},
      {"n_plus", cls.indices.n_plus},
      {"n_minus", cls.indices.n_minus},
      {"in_class_m", cls.in_class_m},
      {"is_maximal", cls.is_maximal},
      {"mirror_n_plus", cls.mirror_indices.n_plus},
      {"mirror_n_minus", cls.mirror_indices.n_minus},
      {"mirror_in_class_m", cls.mirror_in_class_m},
      {"mirror_is_maximal", cls.mirror_is_maximal},
      {"probe_ratio", cls.probe_ratio},
      {"probe_consistent", cls.probe_consistent},
      {"whole_space_n_plus",
       deficiency_indices(OperatorSpec::whole_line_selfadjoint()).n_plus},
      {"whole_space_n_minus",
       deficiency_indices(OperatorSpec::whole_line_selfadjoint()).n_minus},
      {"minimal_n_plus", deficiency_indices(OperatorSpec::minimal()).n_plus},
      {"minimal_n_minus",
       deficiency_indices(OperatorSpec::minimal()).n_minus},
  };
  const double tol_probe = tol_or(cfg, "tol_probe_ratio", 0.05);
  out.report["tolerances"] = {{"tol_probe_ratio", tol_probe}};
  out.pass = cls.invariant && cls.in_class_m && cls.is_maximal &&
             cls.indices.n_plus == 0 && cls.indices.n_minus == 1 &&
             cls.mirror_indices.n_plus == 1 &&
             cls.mirror_indices.n_minus == 0 && !cls.mirror_in_class_m &&
             cls.mirror_is_maximal && cls.probe_ratio <= tol_probe;
  out.report["pass"] = out.pass;
  return out;
}

struct ScenarioEntry {
  const char* name;
  const char* claim;
  ScenarioFn fn;
};

const ScenarioEntry kScenarios[] = {
    {"green-identity",
     "the discrete Green identity holds to rounding for random state pairs",
     run_green_identity},
    {"duhamel-consistency",
     "the inhomogeneous evolution agrees with its regularized form and with "
     "closed-form spectral solutions",
     run_duhamel_consistency},
    {"oracle-agreement",
     "direct and lift boundary-control solvers reproduce the transport "
     "solution f(t - x) (1, i) at second order, independent of the lift "
     "gauge",
     run_oracle_agreement},
    {"duality-auxiliary",
     "the controlled state pairs with constrained states through a boundary "
     "trace integral of the free evolution",
     run_duality_auxiliary},
    {"duality-aux1",
     "the time-integrated pairing of the controlled state equals a boundary "
     "trace integral of the integrated free trajectory",
     run_duality_aux1},
    {"duality-aux2",
     "the negative-time integrated trajectory pairs with the controlled "
     "state through bulk and boundary integrals",
     run_duality_aux2},
    {"reachability-forward",
     "forward reachable states are (1, i)-polarized, supported behind the "
     "front, and span exactly the rank of the control family",
     run_reachability_forward},
    {"reachability-backward",
     "backward reachable states carry the mirror polarization and are "
     "nearly orthogonal to the forward span",
     run_reachability_backward},
    {"deficiency-table",
     "symbolic deficiency indices match a shooting oracle for the minimal, "
     "self-adjoint, and polarized-part operators and randomized potentials",
     run_deficiency_table},
    {"part-classification",
     "the polarized part of the minimal operator is maximal with indices "
     "(0,1) and the decay-relation probe confirms no defect vector exists",
     run_part_classification},
};

const ScenarioEntry* find_scenario(const std::string& name) {
  for (const auto& entry : kScenarios) {
    if (name == entry.name) return &entry;
  }
  return nullptr;
}

}  // namespace

std::vector<ScenarioInfo> list_scenarios() {
  std::vector<ScenarioInfo> out;
  for (const auto& entry : kScenarios) {
    out.push_back({entry.name, entry.claim});
  }
  return out;
}

ScenarioResult run_scenario(const ExperimentConfig& config) {
  if (config.scenario.empty()) {
    throw ConfigError("config does not name a scenario");
  }
  const ScenarioEntry* entry = find_scenario(config.scenario);
  if (entry == nullptr) {
    throw ConfigError("unknown scenario '" + config.scenario + "'");
  }
  config.validate();

  const std::filesystem::path root = config.resolved_output_dir();
  std::filesystem::create_directories(root);

  const ScenarioOutcome outcome = entry->fn(config, root);

  ScenarioResult result;
  result.name = config.scenario;
  result.pass = outcome.pass;
  result.report_json = outcome.report.dump(2) + "\n";
  result.csv_names = outcome.csv_names;

  std::ofstream out(root / (config.scenario + ".json"));
  if (!out) {
    throw std::runtime_error("cannot write report under " + root.string());
  }
  out << result.report_json;
  return result;
}

ConvergenceResult convergence_study(const std::string& scenario,
                                    const std::vector<int>& sizes,
                                    ExperimentConfig config) {
  if (sizes.size() < 2) {
    throw ConfigError("convergence study needs at least two sizes");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw ConfigError("convergence sizes must increase");
    }
  }
  config.scenario = scenario;
  config.validate();

  ConvergenceResult result;
  result.scenario = scenario;
  result.sizes = sizes;

  json per_size = json::array();
  const bool exact_floor = scenario == "green-identity";
  std::vector<double> lift_errors;

  for (const int n : sizes) {
    ExperimentConfig cfg = config;
    cfg.n = n;
    const Grid grid = Grid::uniform(n, cfg.length);
    json entry;
    entry["n"] = n;
    if (scenario == "green-identity") {
      const ScenarioResult r = run_scenario(cfg);
      const json rep = json::parse(r.report_json);
      const double err =
          rep["measured"]["max_residual_config_potential"].get<double>();
      result.errors.push_back(err);
      entry["error"] = err;
    } else if (scenario == "oracle-agreement") {
      const DiscreteGreenSystem sys = build_dirac(grid);
      const SelfAdjointExtension ext = extend_self_adjoint(sys);
      const ControlSignal f = config_bump(cfg);
      const Vec oracle = transport_oracle(grid, f, cfg.t_final);
      const double on = weighted_norm(oracle, sys.state_weights);
      const Trajectory direct = solve_bc_direct(sys, f, cfg.t_final, cfg.dt);
      LiftOptions lopt;
      lopt.dt = cfg.dt;
      const LiftedSolution lift =
          solve_bc_lift(sys, ext, f, cfg.t_final, lopt);
      const double err_direct =
          weighted_norm(direct.at_final() - oracle, sys.state_weights) / on;
      const double err_lift =
          weighted_norm(lift.state - oracle, sys.state_weights) / on;
      result.errors.push_back(err_direct);
      lift_errors.push_back(err_lift);
      entry["direct_error"] = err_direct;
      entry["lift_error"] = err_lift;
    } else if (scenario == "duality-auxiliary" || scenario == "duality-aux1" ||
               scenario == "duality-aux2") {
      const DiscreteGreenSystem sys = build_dirac(grid);
      const SelfAdjointExtension ext = extend_self_adjoint(sys);
      const ControlSignal f = config_bump(cfg);
      const Vec y = smooth_constrained_profile(grid);
      DualityCheck check;
      if (scenario == "duality-auxiliary") {
        check = check_auxiliary(sys, ext, f, y, cfg.t_final, cfg.dt);
      } else if (scenario == "duality-aux1") {
        check = check_aux1(sys, ext, f, y, cfg.t_final, cfg.dt);
      } else {
        check = check_aux2(sys, ext, f, y, cfg.t_final, -0.3 * cfg.t_final,
                           cfg.dt);
      }
      result.errors.push_back(check.rel_residual);
      entry["error"] = check.rel_residual;
    } else {
      throw ConfigError("convergence study not defined for scenario '" +
                        scenario + "'");
    }
    per_size.push_back(entry);
  }

  json report;
  report["scenario"] = scenario;
  report["per_size"] = per_size;

  if (exact_floor) {
    result.exact = true;
    const double tol = tol_or(config, "tol_green_identity", 1e-12);
    result.pass = true;
    for (const double e : result.errors) result.pass = result.pass && e <= tol;
    report["exact"] = true;
    report["tolerance"] = tol;
  } else {
    auto fit_orders = [](const std::vector<double>& errs) {
      std::vector<double> orders;
      for (std::size_t i = 1; i < errs.size(); ++i) {
        orders.push_back(std::log2(errs[i - 1] / errs[i]));
      }
      return orders;
    };
    result.orders = fit_orders(result.errors);
    const double lo = tol_or(config, "tol_order_low", 1.5);
    const double hi = tol_or(config, "tol_order_high", 2.5);
    result.pass = true;
    for (const double p : result.orders) {
      result.pass = result.pass && p >= lo && p <= hi;
    }
    json orders = json::array();
    for (const double p : result.orders) orders.push_back(p);
    report["orders"] = orders;
    report["order_band"] = {lo, hi};
    if (!lift_errors.empty()) {
      const std::vector<double> lift_orders = fit_orders(lift_errors);
      json jl = json::array();
      for (const double p : lift_orders) jl.push_back(p);
      report["lift_orders"] = jl;
      for (const double p : lift_orders) {
        result.pass = result.pass && p >= lo && p <= hi;
      }
    }
  }
  report["pass"] = result.pass;
  result.report_json = report.dump(2) + "\n";

  const std::filesystem::path root = config.resolved_output_dir();
  std::filesystem::create_directories(root);
  std::ofstream out(root / ("convergence_" + scenario + ".json"));
  out << result.report_json;
  return result;
}

void write_manifest(const std::filesystem::path& out_root,
                    const ExperimentConfig& config,
                    const std::vector<ScenarioResult>& results,
                    const std::string& started_at,
                    const std::string& finished_at) {
  json manifest;
  manifest["artifact_version"] = "0.1.0";
  manifest["started_at"] = started_at;
  manifest["finished_at"] = finished_at;
  manifest["config"] = {
      {"scenario", config.scenario},
      {"n", config.n},
      {"length", config.length},
      {"t_final", config.t_final},
      {"dt", config.dt},
      {"seed", config.seed},
      {"output_dir", config.output_dir},
  };
  json rs = json::array();
  for (const auto& r : results) {
    json entry;
    entry["scenario"] = r.name;
    entry["pass"] = r.pass;
    entry["report"] = r.name + ".json";
    json csvs = json::array();
    for (const auto& c : r.csv_names) csvs.push_back(c);
    entry["traces"] = csvs;
    rs.push_back(entry);
  }
  manifest["results"] = rs;
  std::filesystem::create_directories(out_root);
  std::ofstream out(out_root / "run_manifest.json");
  out << manifest.dump(2) << "\n";
}

}  // namespace bclab
