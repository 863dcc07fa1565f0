#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "artifacts.hpp"
#include "swhs/config.hpp"
#include "swhs/extremal.hpp"
#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"
#include "swhs/rational.hpp"
#include "swhs/rearrange.hpp"
#include "swhs/report.hpp"
#include "swhs/symmetry.hpp"
#include "swhs/system.hpp"

#ifndef SWHS_VERSION
#define SWHS_VERSION "0.0.0"
#endif

namespace {

using namespace swhs;
using cli::Verdicts;

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void put_header(KvReport& rep, const std::string& command) {
  rep.set("command", command);
  rep.set("tool_version", SWHS_VERSION);
}

Rational parse_exponent(const std::string& text, const char* flag) {
  auto r = parse_rational(text);
  if (!r) {
    throw std::runtime_error(std::string(flag) + ": cannot parse '" + text +
                             "' as a decimal or rational a/b");
  }
  return *r;
}

/// Flags shared by every subcommand.
struct OutputOpts {
  std::string out;
  std::string json;
};

void add_output_opts(CLI::App* cmd, OutputOpts& o) {
  cmd->add_option("--out", o.out, "Output directory (default: SWHS_OUTPUT_DIR or '.')");
  cmd->add_option("--json", o.json, "Also write the report as a JSON file at this path");
}

/// Solver flags layered over the [solve] config block; only flags the user
/// actually passed override the file.
struct SolveOverrides {
  int max_iters = 0;
  double tol_rel = 0.0;
  double damping = 0.0;
  std::uint64_t seed = 0;
  bool symmetrize = false;
  bool random_start = false;
  CLI::Option* max_iters_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* damping_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* symmetrize_opt = nullptr;
  CLI::Option* random_opt = nullptr;

  void attach(CLI::App* cmd) {
    max_iters_opt = cmd->add_option("--max-iters", max_iters, "Iteration budget");
    tol_opt = cmd->add_option("--tol", tol_rel, "Relative convergence tolerance");
    damping_opt = cmd->add_option("--damping", damping, "Iterate blend weight in (0, 1]");
    seed_opt = cmd->add_option("--seed", seed, "Seed for randomized starts");
    symmetrize_opt = cmd->add_flag("--symmetrize-each-step", symmetrize,
                                   "Radially symmetrize the boundary iterate every step");
    random_opt = cmd->add_flag("--random-start", random_start,
                               "Start from seeded random data instead of the bump profile");
  }

  void apply(SolveOptions& opts) const {
    if (max_iters_opt->count() > 0) opts.max_iters = max_iters;
    if (tol_opt->count() > 0) opts.tol_rel = tol_rel;
    if (damping_opt->count() > 0) opts.damping = damping;
    if (seed_opt->count() > 0) opts.seed = seed;
    if (symmetrize_opt->count() > 0) opts.symmetrize_each_step = symmetrize;
    if (random_opt->count() > 0) opts.random_start = random_start;
  }
};

GridSpec load_grid_spec(const std::string& grid_path, const Config& params_cfg) {
  if (grid_path.empty()) return grid_from_config(params_cfg);
  return grid_from_config(Config::parse_file(grid_path));
}

/// Field CSVs carry no grid reference; the node count decides which side of
/// the pairing the file belongs to.
enum class FieldSide { Boundary, Half };

FieldSide detect_side(const std::string& path, std::size_t count, const BoundaryGrid& bg,
                      const HalfGrid& hg) {
  if (count == bg.weight.size() && count == hg.weight.size()) {
    throw std::runtime_error(path + ": node count " + std::to_string(count) +
                             " matches both grids; use distinct resolutions");
  }
  if (count == bg.weight.size()) return FieldSide::Boundary;
  if (count == hg.weight.size()) return FieldSide::Half;
  throw std::runtime_error(path + ": " + std::to_string(count) +
                           " values match neither the boundary grid (" +
                           std::to_string(bg.weight.size()) + " nodes) nor the half grid (" +
                           std::to_string(hg.weight.size()) + ")");
}

int run_check(const std::string& params_path, const std::string& convention,
              const OutputOpts& oo) {
  WallClock clock;
  Config cfg = Config::parse_file(params_path);
  InequalityParams ip = inequality_from_config(cfg);
  WeightConvention wc = weight_convention_from_config(cfg);
  if (convention == "sum") wc = WeightConvention::Sum;
  if (convention == "each") wc = WeightConvention::Each;

  AdmissibilityReport adm = validate(ip, wc);

  KvReport rep;
  put_header(rep, "check");
  cli::put_params(rep, ip);
  rep.set("convention", wc == WeightConvention::Sum ? "sum" : "each");
  Verdicts verdicts;
  verdicts.add(rep, "admissible", adm.admissible);
  for (const auto& cond : adm.conditions) {
    rep.set("condition." + cond.name, cond.holds ? "pass" : "fail");
    rep.set("slack." + cond.name, cond.slack);
  }
  rep.set("q", adm.q ? to_string(*adm.q) : "undefined");
  rep.set("p_prime", adm.p_prime ? to_string(*adm.p_prime) : "undefined");
  rep.set("balance_residual", to_string(ip.balance_residual()));
  if (ip.p > 1 && ip.q_prime > 1) {
    SystemParams sys = derive_el_exponents(ip);
    rep.set("derived.p0", to_string(sys.p0));
    rep.set("derived.q0", to_string(sys.q0));
    rep.set("derived.pohozaev_residual",
            to_string(pohozaev_residual(sys.single_weight_equivalent())));
  }

  std::string out = cli::resolve_out_dir(oo.out);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_sharp_constant(const std::string& params_path, const std::string& grid_path,
                       bool full_mode, const SolveOverrides& so, const OutputOpts& oo) {
  WallClock clock;
  Config cfg = Config::parse_file(params_path);
  InequalityParams ip = inequality_from_config(cfg);
  AdmissibilityReport adm = validate(ip, weight_convention_from_config(cfg));
  if (!adm.admissible) {
    throw std::runtime_error(params_path +
                             ": parameters fail admissibility; run 'check' for the conditions");
  }
  GridSpec spec = load_grid_spec(grid_path, cfg);
  if (full_mode) spec.mode = GridMode::Full;
  SolveOptions opts = solve_options_from_config(cfg);
  so.apply(opts);
  opts.check();

  std::string out = cli::resolve_out_dir(oo.out);
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);
  OpParams op = OpParams::from(ip);
  KernelTable table = KernelTable::build_or_load(cli::kernel_cache_dir(out), bg, hg, op.kp);

  ExtremalResult res = power_iterate(ip, bg, hg, table, opts);

  KvReport rep;
  put_header(rep, "sharp-constant");
  cli::put_params(rep, ip);
  cli::put_grid(rep, spec, bg, hg);
  cli::put_solve(rep, opts);
  rep.set("status", to_string(res.status));
  rep.set("constant", res.constant_estimate);
  rep.set("iterations", res.iterations);
  rep.set("el_residual", res.el_residual);
  rep.set("g_consistency", res.g_consistency);
  rep.set("c0", res.c0);
  rep.set("radial_deviation", res.radial_deviation);
  rep.set("monotonicity_deviation", res.monotonicity_deviation);
  rep.set("final_damping", res.final_damping);

  const std::string f_path = cli::join_path(out, "f.csv");
  const std::string g_path = cli::join_path(out, "g.csv");
  const std::string trace_path = cli::join_path(out, "trace.csv");
  write_field_csv(f_path, res.f.value);
  write_field_csv(g_path, res.g.value);
  std::string trace = "iter,constant\n";
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    trace += std::to_string(i) + "," + format_double(res.trace[i]) + "\n";
  }
  write_text_atomic(trace_path, trace);
  write_grid_manifest(cli::join_path(out, "boundary_grid.csv"), bg);
  write_grid_manifest(cli::join_path(out, "half_grid.csv"), hg);
  rep.set("artifact.f", f_path);
  rep.set("artifact.g", g_path);
  rep.set("artifact.trace", trace_path);

  Verdicts verdicts;
  verdicts.add(rep, "converged", res.status == SolveStatus::Converged);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_solve_system(const std::string& params_path, const std::string& grid_path,
                     bool single_weight, const SolveOverrides& so, const OutputOpts& oo) {
  WallClock clock;
  Config cfg = Config::parse_file(params_path);
  SystemParams sys = system_from_config(cfg);
  GridSpec spec = load_grid_spec(grid_path, cfg);
  SolveOptions opts = solve_options_from_config(cfg);
  so.apply(opts);
  opts.check();

  std::string out = cli::resolve_out_dir(oo.out);
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);
  OpParams op = OpParams::from(sys);
  KernelTable table = KernelTable::build_or_load(cli::kernel_cache_dir(out), bg, hg, op.kp);

  SystemSolution sol = single_weight ? solve_single_weight(sys, bg, hg, table, opts)
                                     : solve_system(sys, bg, hg, table, opts);
  FixedPointResiduals fp = fixed_point_residual(sol, table);

  KvReport rep;
  put_header(rep, "solve-system");
  cli::put_params(rep, sys);
  cli::put_grid(rep, spec, bg, hg);
  cli::put_solve(rep, opts);
  cli::put_solution(rep, sol);
  rep.set("fixed_point_residual_u", fp.u);
  rep.set("fixed_point_residual_v", fp.v);
  cli::save_solution_fields(rep, out, sol, bg, hg);

  Verdicts verdicts;
  verdicts.add(rep, "converged", sol.status == SystemStatus::Converged);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_verify_duality(const std::string& params_path, const std::string& grid_path, int trials,
                       std::uint64_t seed, double tol, const OutputOpts& oo) {
  WallClock clock;
  Config cfg = Config::parse_file(params_path);
  OpParams op = cli::op_params_from_config(cfg);
  GridSpec spec = load_grid_spec(grid_path, cfg);

  std::string out = cli::resolve_out_dir(oo.out);
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);
  KernelTable table = KernelTable::build_or_load(cli::kernel_cache_dir(out), bg, hg, op.kp);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double max_gap = 0.0;
  for (int t = 0; t < trials; ++t) {
    BoundaryField f = make_field(bg);
    HalfField g = make_field(hg);
    for (auto& v : f.value) v = unit(rng);
    for (auto& v : g.value) v = unit(rng);
    max_gap = std::max(max_gap, duality_gap(f, g, op, table));
  }

  KvReport rep;
  put_header(rep, "verify-duality");
  cli::put_grid(rep, spec, bg, hg);
  rep.set("trials", trials);
  rep.set("seed", static_cast<long long>(seed));
  rep.set("tolerance", tol);
  rep.set("max_relative_gap", max_gap);
  Verdicts verdicts;
  verdicts.add(rep, "duality", max_gap <= tol);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_verify_pohozaev(const std::string& solution_dir, double tol, const OutputOpts& oo) {
  WallClock clock;
  cli::SolutionArtifacts art;
  cli::load_solution(solution_dir, art);
  std::string out = cli::resolve_out_dir(oo.out);
  KernelTable table = KernelTable::build_or_load(cli::kernel_cache_dir(out), art.bg, art.hg,
                                                 OpParams::from(art.sol.sys).kp);
  PohozaevCheck pc = pohozaev_check(art.sol, table);

  KvReport rep;
  put_header(rep, "verify-pohozaev");
  cli::put_params(rep, art.sol.sys);
  cli::put_grid(rep, art.spec, art.bg, art.hg);
  cli::put_solution(rep, art.sol);
  rep.set("lhs", pc.lhs);
  rep.set("rhs", pc.rhs);
  rep.set("energy_u", pc.e_u);
  rep.set("energy_v", pc.e_v);
  rep.set("double_integral", pc.d);
  rep.set("norms_finite", pc.norms_finite);
  rep.set("residual", pc.residual);
  rep.set("tolerance", tol);
  Verdicts verdicts;
  verdicts.add(rep, "pohozaev", pc.norms_finite && pc.residual <= tol);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_verify_asymptotics(const std::string& solution_dir, double tol, const OutputOpts& oo) {
  WallClock clock;
  cli::SolutionArtifacts art;
  cli::load_solution(solution_dir, art);
  AsymptoticCheck ac = asymptotic_check(art.sol);

  KvReport rep;
  put_header(rep, "verify-asymptotics");
  cli::put_params(rep, art.sol.sys);
  cli::put_grid(rep, art.spec, art.bg, art.hg);
  rep.set("tolerance", tol);
  rep.set("u.checked", ac.u_checked);
  if (ac.u_checked) {
    rep.set("u.limit_extrapolated", ac.lhs_u);
    rep.set("u.limit_integral", ac.rhs_u);
    rep.set("u.fit_slope", ac.slope_u);
  } else {
    rep.set("u.skip_reason", ac.u_skip_reason);
  }
  rep.set("v.checked", ac.v_checked);
  if (ac.v_checked) {
    rep.set("v.limit_extrapolated", ac.lhs_v);
    rep.set("v.limit_integral", ac.rhs_v);
    rep.set("v.fit_slope", ac.slope_v);
  } else {
    rep.set("v.skip_reason", ac.v_skip_reason);
  }

  Verdicts verdicts;
  auto rel_err = [](double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
  };
  if (ac.u_checked) verdicts.add(rep, "asymptotics_u", rel_err(ac.lhs_u, ac.rhs_u) <= tol);
  if (ac.v_checked) verdicts.add(rep, "asymptotics_v", rel_err(ac.lhs_v, ac.rhs_v) <= tol);
  std::string out = cli::resolve_out_dir(oo.out);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_verify_regularity(const std::string& solution_dir, const OutputOpts& oo) {
  WallClock clock;
  cli::SolutionArtifacts art;
  cli::load_solution(solution_dir, art);
  RegularityWindow window = regularity_window(art.sol.sys);
  RegularityProbe probe = regularity_probe(art.sol, window);

  KvReport rep;
  put_header(rep, "verify-regularity");
  cli::put_params(rep, art.sol.sys);
  cli::put_grid(rep, art.spec, art.bg, art.hg);
  rep.set("window_u_empty", probe.window_u_empty);
  rep.set("window_v_empty", probe.window_v_empty);

  bool inside_ok = true;
  bool any_inside = false;
  auto record = [&](const char* side, const std::vector<NormTrend>& trends) {
    for (std::size_t i = 0; i < trends.size(); ++i) {
      const NormTrend& t = trends[i];
      std::string key = std::string(side) + "." + std::to_string(i);
      rep.set(key + ".inv_exponent", t.inv);
      rep.set(key + ".inside_window", t.inside_window);
      rep.set(key + ".stabilized", t.stabilized);
      rep.set(key + ".last_rel_change", t.last_rel_change);
      if (t.inside_window) {
        any_inside = true;
        inside_ok = inside_ok && t.stabilized;
      }
    }
  };
  record("u", probe.u_trends);
  record("v", probe.v_trends);

  Verdicts verdicts;
  if (any_inside) verdicts.add(rep, "regularity", inside_ok);
  std::string out = cli::resolve_out_dir(oo.out);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_verify_symmetry(const std::string& solution_dir, int axis, const std::string& taus_text,
                        double tol_gg, const OutputOpts& oo) {
  WallClock clock;
  cli::SolutionArtifacts art;
  cli::load_solution(solution_dir, art);
  if (art.spec.mode != GridMode::Full) {
    throw std::runtime_error(solution_dir +
                             ": moving-plane scan needs a full-mode solution (grid.mode=full)");
  }
  std::vector<double> taus = cli::parse_taus(taus_text);
  const SystemParams& sys = art.sol.sys;
  std::vector<MovingPlaneRow> rows =
      moving_plane_scan(art.sol.u, art.sol.v, to_double(sys.beta), to_double(sys.q0),
                        OpParams::from(sys).kp, axis, taus);

  std::string out = cli::resolve_out_dir(oo.out);
  std::string csv = "tau,measure_u,measure_v,amplitude,gg_residual\n";
  double max_gg = 0.0;
  double max_violation = 0.0;
  bool any_nonpositive = false;
  for (const MovingPlaneRow& row : rows) {
    csv += format_double(row.tau) + "," + format_double(row.measure_u) + "," +
           format_double(row.measure_v) + "," + format_double(row.amplitude) + "," +
           format_double(row.gg_residual) + "\n";
    max_gg = std::max(max_gg, row.gg_residual);
    if (row.tau <= 0.0) {
      any_nonpositive = true;
      max_violation = std::max(max_violation, row.measure_u + row.measure_v);
    }
  }
  const std::string csv_path = cli::join_path(out, "moving_plane.csv");
  write_text_atomic(csv_path, csv);

  KvReport rep;
  put_header(rep, "verify-symmetry");
  cli::put_params(rep, sys);
  cli::put_grid(rep, art.spec, art.bg, art.hg);
  rep.set("axis", axis);
  rep.set("taus", taus_text);
  rep.set("rows", rows.size());
  rep.set("max_gg_residual", max_gg);
  rep.set("max_violation_nonpositive_tau", max_violation);
  rep.set("gg_tolerance", tol_gg);
  rep.set("artifact.scan", csv_path);

  Verdicts verdicts;
  verdicts.add(rep, "gg_reconstruction", max_gg <= tol_gg);
  if (any_nonpositive) verdicts.add(rep, "no_violation_nonpositive_tau", max_violation == 0.0);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_verify_riesz(const std::string& params_path, const std::string& grid_path, int trials,
                     std::uint64_t seed, double tol_drop, double pass_fraction,
                     const OutputOpts& oo) {
  WallClock clock;
  Config cfg = Config::parse_file(params_path);
  InequalityParams ip = inequality_from_config(cfg);
  GridSpec spec = load_grid_spec(grid_path, cfg);

  std::string out = cli::resolve_out_dir(oo.out);
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);
  KernelTable table =
      KernelTable::build_or_load(cli::kernel_cache_dir(out), bg, hg, OpParams::from(ip).kp);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  double worst_drop = 0.0;
  for (int t = 0; t < trials; ++t) {
    BoundaryField f = make_field(bg);
    HalfField g = make_field(hg);
    for (auto& v : f.value) v = unit(rng);
    for (auto& v : g.value) v = unit(rng);
    RieszCheck rc = riesz_check(f, g, ip, table);
    double drop = (rc.j_before - rc.j_after) / std::max(std::abs(rc.j_before), 1e-300);
    worst_drop = std::max(worst_drop, drop);
    if (drop > tol_drop) ++violations;
  }
  double fraction_ok = trials > 0 ? 1.0 - static_cast<double>(violations) / trials : 1.0;

  KvReport rep;
  put_header(rep, "verify-riesz");
  cli::put_params(rep, ip);
  cli::put_grid(rep, spec, bg, hg);
  rep.set("trials", trials);
  rep.set("seed", static_cast<long long>(seed));
  rep.set("drop_tolerance", tol_drop);
  rep.set("required_pass_fraction", pass_fraction);
  rep.set("violations", violations);
  rep.set("fraction_ok", fraction_ok);
  rep.set("worst_relative_drop", worst_drop);
  Verdicts verdicts;
  verdicts.add(rep, "riesz", fraction_ok >= pass_fraction);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

int run_rearrange(const std::string& field_path, const std::string& grid_path, double p,
                  const OutputOpts& oo) {
  WallClock clock;
  GridSpec spec = grid_from_config(Config::parse_file(grid_path));
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);
  std::vector<double> values = read_field_csv(field_path);
  FieldSide side = detect_side(field_path, values.size(), bg, hg);

  std::string out = cli::resolve_out_dir(oo.out);
  const std::string profile_path = cli::join_path(out, "profile.csv");
  const std::string sym_path = cli::join_path(out, "symmetrized.csv");

  KvReport rep;
  put_header(rep, "rearrange");
  cli::put_grid(rep, spec, bg, hg);
  rep.set("field", field_path);
  rep.set("space", side == FieldSide::Boundary ? "boundary" : "half");
  rep.set("p", p);

  RearrangementProfile before;
  RearrangementProfile after;
  double norm_before = 0.0;
  double norm_after = 0.0;
  if (side == FieldSide::Boundary) {
    BoundaryField f = make_field(bg);
    f.value = std::move(values);
    before = decreasing_rearrangement(f);
    BoundaryField sym = radial_symmetrize(f);
    after = decreasing_rearrangement(sym);
    norm_before = lp_norm(f, p);
    norm_after = lp_norm(sym, p);
    write_field_csv(sym_path, sym.value);
  } else {
    HalfField g = make_field(hg);
    g.value = std::move(values);
    before = decreasing_rearrangement(g);
    HalfField sym = slice_symmetrize(g);
    after = decreasing_rearrangement(sym);
    norm_before = lp_norm(g, p);
    norm_after = lp_norm(sym, p);
    write_field_csv(sym_path, sym.value);
  }
  write_profile_csv(before, profile_path);

  bool equimeasurable = before.steps.size() == after.steps.size();
  for (std::size_t i = 0; equimeasurable && i < before.steps.size(); ++i) {
    equimeasurable = before.steps[i].value == after.steps[i].value &&
                     before.steps[i].measure == after.steps[i].measure;
  }
  rep.set("support_measure", before.total_measure());
  rep.set("profile_steps", before.steps.size());
  rep.set("lp_norm_before", norm_before);
  rep.set("lp_norm_after", norm_after);
  rep.set("equimeasurable", equimeasurable);
  rep.set("artifact.profile", profile_path);
  rep.set("artifact.symmetrized", sym_path);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return 0;
}

int run_norm(const std::string& field_path, const std::string& grid_path, bool lorentz,
             const std::string& p_text, const std::string& r_text, const std::string& s_text,
             const OutputOpts& oo) {
  WallClock clock;
  GridSpec spec = grid_from_config(Config::parse_file(grid_path));
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);
  std::vector<double> values = read_field_csv(field_path);
  FieldSide side = detect_side(field_path, values.size(), bg, hg);

  KvReport rep;
  put_header(rep, lorentz ? "norm-lorentz" : "norm-lp");
  cli::put_grid(rep, spec, bg, hg);
  rep.set("field", field_path);
  rep.set("space", side == FieldSide::Boundary ? "boundary" : "half");

  double norm = 0.0;
  if (lorentz) {
    double r = to_double(parse_exponent(r_text, "--r"));
    double s = s_text == "inf" ? std::numeric_limits<double>::infinity()
                               : to_double(parse_exponent(s_text, "--s"));
    rep.set("r", r_text);
    rep.set("s", s_text);
    norm = side == FieldSide::Boundary
               ? lorentz_norm(BoundaryField{&bg, std::move(values)}, r, s)
               : lorentz_norm(HalfField{&hg, std::move(values)}, r, s);
  } else {
    double p = to_double(parse_exponent(p_text, "--p"));
    rep.set("p", p_text);
    norm = side == FieldSide::Boundary ? lp_norm(BoundaryField{&bg, std::move(values)}, p)
                                       : lp_norm(HalfField{&hg, std::move(values)}, p);
  }
  rep.set("norm", norm);
  std::string out = cli::resolve_out_dir(oo.out);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return 0;
}

int run_op_apply(const std::string& field_path, const std::string& grid_path,
                 const std::string& params_path, bool apply_v_dir, const OutputOpts& oo) {
  WallClock clock;
  Config cfg = Config::parse_file(params_path);
  OpParams op = cli::op_params_from_config(cfg);
  GridSpec spec = load_grid_spec(grid_path, cfg);
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);
  std::vector<double> values = read_field_csv(field_path);

  std::string out = cli::resolve_out_dir(oo.out);
  KernelTable table = KernelTable::build_or_load(cli::kernel_cache_dir(out), bg, hg, op.kp);

  KvReport rep;
  put_header(rep, apply_v_dir ? "op-apply-v" : "op-apply-w");
  cli::put_grid(rep, spec, bg, hg);
  rep.set("field", field_path);

  std::string out_path;
  if (apply_v_dir) {
    if (values.size() != bg.weight.size()) {
      throw std::runtime_error(field_path + ": apply-v wants a boundary field (" +
                               std::to_string(bg.weight.size()) + " nodes), got " +
                               std::to_string(values.size()));
    }
    BoundaryField f{&bg, std::move(values)};
    HalfField vf = apply_V(f, hg, op, table);
    out_path = cli::join_path(out, "vf.csv");
    write_field_csv(out_path, vf.value);
    rep.set("sup_abs", sup_abs(vf.value));
  } else {
    if (values.size() != hg.weight.size()) {
      throw std::runtime_error(field_path + ": apply-w wants a half-space field (" +
                               std::to_string(hg.weight.size()) + " nodes), got " +
                               std::to_string(values.size()));
    }
    HalfField g{&hg, std::move(values)};
    BoundaryField wg = apply_W(g, bg, op, table);
    out_path = cli::join_path(out, "wg.csv");
    write_field_csv(out_path, wg.value);
    rep.set("sup_abs", sup_abs(wg.value));
  }
  rep.set("artifact.result", out_path);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return 0;
}

int run_op_duality_gap(const std::string& f_path, const std::string& g_path,
                       const std::string& grid_path, const std::string& params_path, double tol,
                       const OutputOpts& oo) {
  WallClock clock;
  Config cfg = Config::parse_file(params_path);
  OpParams op = cli::op_params_from_config(cfg);
  GridSpec spec = load_grid_spec(grid_path, cfg);
  BoundaryGrid bg = build_boundary_grid(spec);
  HalfGrid hg = build_half_grid(spec);

  BoundaryField f = make_field(bg);
  HalfField g = make_field(hg);
  f.value = read_field_csv(f_path);
  g.value = read_field_csv(g_path);
  if (f.value.size() != bg.weight.size()) {
    throw std::runtime_error(f_path + ": expected a boundary field with " +
                             std::to_string(bg.weight.size()) + " nodes");
  }
  if (g.value.size() != hg.weight.size()) {
    throw std::runtime_error(g_path + ": expected a half-space field with " +
                             std::to_string(hg.weight.size()) + " nodes");
  }

  std::string out = cli::resolve_out_dir(oo.out);
  KernelTable table = KernelTable::build_or_load(cli::kernel_cache_dir(out), bg, hg, op.kp);
  double gap = duality_gap(f, g, op, table);

  KvReport rep;
  put_header(rep, "op-duality-gap");
  cli::put_grid(rep, spec, bg, hg);
  rep.set("f", f_path);
  rep.set("g", g_path);
  rep.set("tolerance", tol);
  rep.set("relative_gap", gap);
  Verdicts verdicts;
  verdicts.add(rep, "duality", gap <= tol);
  cli::finish_run(rep, out, oo.json, clock.seconds());
  return verdicts.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted half-space kernel operators: sharp constants, coupled integral "
               "systems and their verification"};
  app.set_version_flag("--version", SWHS_VERSION);
  app.require_subcommand(1);
  int code = 0;

  // check
  std::string check_params;
  std::string check_convention;
  OutputOpts check_out;
  CLI::App* check = app.add_subcommand("check", "Validate parameters and derive exponents");
  check->add_option("--params", check_params, "Parameter config file")->required();
  check->add_option("--convention", check_convention,
                    "Weight sign convention: sum (alpha+beta >= 0) or each (alpha, beta >= 0)")
      ->check(CLI::IsMember({"sum", "each"}));
  add_output_opts(check, check_out);
  check->callback([&] { code = run_check(check_params, check_convention, check_out); });

  // sharp-constant
  std::string sharp_params;
  std::string sharp_grid;
  bool sharp_full = false;
  SolveOverrides sharp_solve;
  OutputOpts sharp_out;
  CLI::App* sharp = app.add_subcommand("sharp-constant",
                                       "Estimate the sharp constant by alternating iteration");
  sharp->add_option("--params", sharp_params, "Parameter config file")->required();
  sharp->add_option("--grid", sharp_grid, "Grid config file (default: the params file)");
  sharp->add_flag("--full-mode", sharp_full, "Use the full angular grid");
  sharp_solve.attach(sharp);
  add_output_opts(sharp, sharp_out);
  sharp->callback([&] {
    code = run_sharp_constant(sharp_params, sharp_grid, sharp_full, sharp_solve, sharp_out);
  });

  // solve-system
  std::string sys_params;
  std::string sys_grid;
  bool sys_single = false;
  SolveOverrides sys_solve;
  OutputOpts sys_out;
  CLI::App* solve = app.add_subcommand("solve-system",
                                       "Solve the coupled integral system by fixed point");
  solve->add_option("--params", sys_params, "Parameter config file")->required();
  solve->add_option("--grid", sys_grid, "Grid config file (default: the params file)");
  solve->add_flag("--single-weight", sys_single,
                  "Solve the single-weight form (weights absorbed into the unknowns)");
  sys_solve.attach(solve);
  add_output_opts(solve, sys_out);
  solve->callback([&] {
    code = run_solve_system(sys_params, sys_grid, sys_single, sys_solve, sys_out);
  });

  // verify
  CLI::App* verify = app.add_subcommand("verify", "Check identities and qualitative claims");
  verify->require_subcommand(1);

  std::string dual_params, dual_grid;
  int dual_trials = 100;
  std::uint64_t dual_seed = 12345;
  double dual_tol = 1e-12;
  OutputOpts dual_out;
  CLI::App* dual = verify->add_subcommand("duality", "<V f, g> = <f, W g> on random fields");
  dual->add_option("--params", dual_params, "Parameter config file")->required();
  dual->add_option("--grid", dual_grid, "Grid config file (default: the params file)");
  dual->add_option("--trials", dual_trials, "Random field pairs");
  dual->add_option("--seed", dual_seed, "Random seed");
  dual->add_option("--tol", dual_tol, "Maximum relative gap");
  add_output_opts(dual, dual_out);
  dual->callback([&] {
    code = run_verify_duality(dual_params, dual_grid, dual_trials, dual_seed, dual_tol, dual_out);
  });

  std::string poho_dir;
  double poho_tol = 0.02;
  OutputOpts poho_out;
  CLI::App* poho = verify->add_subcommand("pohozaev", "Energy identity on a solved system");
  poho->add_option("--solution", poho_dir, "Solution directory from solve-system")->required();
  poho->add_option("--tol", poho_tol, "Maximum relative residual");
  add_output_opts(poho, poho_out);
  poho->callback([&] { code = run_verify_pohozaev(poho_dir, poho_tol, poho_out); });

  std::string asym_dir;
  double asym_tol = 0.05;
  OutputOpts asym_out;
  CLI::App* asym = verify->add_subcommand("asymptotics",
                                          "Near-origin limits against their limit integrals");
  asym->add_option("--solution", asym_dir, "Solution directory from solve-system")->required();
  asym->add_option("--tol", asym_tol, "Maximum relative mismatch");
  add_output_opts(asym, asym_out);
  asym->callback([&] { code = run_verify_asymptotics(asym_dir, asym_tol, asym_out); });

  std::string reg_dir;
  OutputOpts reg_out;
  CLI::App* reg = verify->add_subcommand("regularity",
                                         "Truncated norm trends across the integrability window");
  reg->add_option("--solution", reg_dir, "Solution directory from solve-system")->required();
  add_output_opts(reg, reg_out);
  reg->callback([&] { code = run_verify_regularity(reg_dir, reg_out); });

  std::string symm_dir, symm_taus = "-1:0.5:0.5";
  int symm_axis = 1;
  double symm_tol_gg = 1e-8;
  OutputOpts symm_out;
  CLI::App* symm = verify->add_subcommand("symmetry", "Moving-plane violation scan");
  symm->add_option("--solution", symm_dir, "Solution directory from solve-system")->required();
  symm->add_option("--axis", symm_axis, "Tangential axis to reflect across (1-based)")
      ->check(CLI::Range(1, 2));
  symm->add_option("--taus", symm_taus, "Reflection offsets a:b:step (inclusive)");
  symm->add_option("--tol-gg", symm_tol_gg, "Maximum reconstruction residual");
  add_output_opts(symm, symm_out);
  symm->callback([&] {
    code = run_verify_symmetry(symm_dir, symm_axis, symm_taus, symm_tol_gg, symm_out);
  });

  std::string riesz_params, riesz_grid;
  int riesz_trials = 100;
  std::uint64_t riesz_seed = 12345;
  double riesz_tol = 1e-10;
  double riesz_fraction = 0.95;
  OutputOpts riesz_out;
  CLI::App* riesz = verify->add_subcommand("riesz",
                                           "Symmetrization does not decrease the pairing");
  riesz->add_option("--params", riesz_params, "Parameter config file")->required();
  riesz->add_option("--grid", riesz_grid, "Grid config file (default: the params file)");
  riesz->add_option("--trials", riesz_trials, "Random nonnegative field pairs");
  riesz->add_option("--seed", riesz_seed, "Random seed");
  riesz->add_option("--tol-drop", riesz_tol, "Tolerated relative decrease per pair");
  riesz->add_option("--pass-fraction", riesz_fraction, "Required fraction of passing pairs");
  add_output_opts(riesz, riesz_out);
  riesz->callback([&] {
    code = run_verify_riesz(riesz_params, riesz_grid, riesz_trials, riesz_seed, riesz_tol,
                            riesz_fraction, riesz_out);
  });

  // rearrange
  std::string rear_field, rear_grid;
  double rear_p = 2.0;
  OutputOpts rear_out;
  CLI::App* rear = app.add_subcommand("rearrange",
                                      "Decreasing profile and symmetrized copy of a field");
  rear->add_option("--field", rear_field, "Field CSV (node_id,value)")->required();
  rear->add_option("--grid", rear_grid, "Grid config file")->required();
  rear->add_option("--p", rear_p, "Exponent for the reported norms");
  add_output_opts(rear, rear_out);
  rear->callback([&] { code = run_rearrange(rear_field, rear_grid, rear_p, rear_out); });

  // norm
  CLI::App* norm = app.add_subcommand("norm", "Weighted norms of a stored field");
  norm->require_subcommand(1);

  std::string lp_field, lp_grid, lp_p = "2";
  OutputOpts lp_out;
  CLI::App* lp = norm->add_subcommand("lp", "Lebesgue norm");
  lp->add_option("--field", lp_field, "Field CSV (node_id,value)")->required();
  lp->add_option("--grid", lp_grid, "Grid config file")->required();
  lp->add_option("--p", lp_p, "Exponent (decimal or rational a/b)");
  add_output_opts(lp, lp_out);
  lp->callback([&] { code = run_norm(lp_field, lp_grid, false, lp_p, "", "", lp_out); });

  std::string lor_field, lor_grid, lor_r = "2", lor_s = "2";
  OutputOpts lor_out;
  CLI::App* lor = norm->add_subcommand("lorentz", "Lorentz norm via the decreasing profile");
  lor->add_option("--field", lor_field, "Field CSV (node_id,value)")->required();
  lor->add_option("--grid", lor_grid, "Grid config file")->required();
  lor->add_option("--r", lor_r, "Primary exponent (decimal or rational a/b)");
  lor->add_option("--s", lor_s, "Secondary exponent, or 'inf'");
  add_output_opts(lor, lor_out);
  lor->callback([&] { code = run_norm(lor_field, lor_grid, true, "", lor_r, lor_s, lor_out); });

  // op
  CLI::App* op_cmd = app.add_subcommand("op", "Apply the kernel operators to stored fields");
  op_cmd->require_subcommand(1);

  std::string av_field, av_grid, av_params;
  OutputOpts av_out;
  CLI::App* av = op_cmd->add_subcommand("apply-v", "Boundary field to half-space potential");
  av->add_option("--field", av_field, "Boundary field CSV")->required();
  av->add_option("--params", av_params, "Parameter config file")->required();
  av->add_option("--grid", av_grid, "Grid config file (default: the params file)");
  add_output_opts(av, av_out);
  av->callback([&] { code = run_op_apply(av_field, av_grid, av_params, true, av_out); });

  std::string aw_field, aw_grid, aw_params;
  OutputOpts aw_out;
  CLI::App* aw = op_cmd->add_subcommand("apply-w", "Half-space field to boundary potential");
  aw->add_option("--field", aw_field, "Half-space field CSV")->required();
  aw->add_option("--params", aw_params, "Parameter config file")->required();
  aw->add_option("--grid", aw_grid, "Grid config file (default: the params file)");
  add_output_opts(aw, aw_out);
  aw->callback([&] { code = run_op_apply(aw_field, aw_grid, aw_params, false, aw_out); });

  std::string gap_f, gap_g, gap_grid, gap_params;
  double gap_tol = 1e-12;
  OutputOpts gap_out;
  CLI::App* gap = op_cmd->add_subcommand("duality-gap", "Relative defect of the adjoint pairing");
  gap->add_option("--f", gap_f, "Boundary field CSV")->required();
  gap->add_option("--g", gap_g, "Half-space field CSV")->required();
  gap->add_option("--params", gap_params, "Parameter config file")->required();
  gap->add_option("--grid", gap_grid, "Grid config file (default: the params file)");
  gap->add_option("--tol", gap_tol, "Maximum relative gap");
  add_output_opts(gap, gap_out);
  gap->callback([&] {
    code = run_op_duality_gap(gap_f, gap_g, gap_grid, gap_params, gap_tol, gap_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "swhs: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "swhs: error: %s\n", e.what());
    return 2;
  }
  return code;
}
