#include "swhs/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "swhs/rational.hpp"
#include "swhs/rearrange.hpp"
#include "swhs/summation.hpp"

namespace swhs {

namespace {

constexpr double kBlowUp = 1e100;

struct SystemScalars {
  int n;
  double p0, q0, alpha, beta, lambda, mu;
};

SystemScalars scalars(const SystemParams& sys) {
  return {sys.n,
          to_double(sys.p0),
          to_double(sys.q0),
          to_double(sys.alpha),
          to_double(sys.beta),
          to_double(sys.lambda),
          to_double(sys.mu)};
}

// weights of each equation: the single-weight variant drops the weight that
// matches the equation's own side
OpParams op_for_v(const SystemScalars& s, bool single_weight) {
  OpParams op;
  op.n = s.n;
  op.alpha = s.alpha;
  op.beta = single_weight ? 0.0 : s.beta;
  op.kp = {s.lambda, s.mu};
  return op;
}

OpParams op_for_u(const SystemScalars& s, bool single_weight) {
  OpParams op;
  op.n = s.n;
  op.alpha = single_weight ? 0.0 : s.alpha;
  op.beta = s.beta;
  op.kp = {s.lambda, s.mu};
  return op;
}

bool out_of_range(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v) || std::abs(v) > kBlowUp) return true;
  }
  return false;
}

template <typename Field>
void pow_into(const Field& in, double expo, Field& out) {
  for (std::size_t i = 0; i < in.value.size(); ++i) {
    out.value[i] = std::pow(std::max(in.value[i], 0.0), expo);
  }
}

double sup_rel_change(const std::vector<double>& next, const std::vector<double>& prev) {
  double num = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    num = std::max(num, std::abs(next[i] - prev[i]));
  }
  return num / std::max(sup_abs(next), 1e-300);
}

double energy_u(const BoundaryField& u, double alpha, double expo) {
  NeumaierSum acc;
  const BoundaryGrid& g = *u.grid;
  for (std::size_t i = 0; i < u.value.size(); ++i) {
    acc.add(g.weight[i] * std::pow(g.node_radius(i), -alpha) *
            std::pow(std::max(u.value[i], 0.0), expo));
  }
  return acc.value();
}

double energy_v(const HalfField& v, double beta, double expo) {
  NeumaierSum acc;
  const HalfGrid& g = *v.grid;
  for (std::size_t i = 0; i < v.value.size(); ++i) {
    double r = std::hypot(g.node_radius(i), g.node_height(i));
    acc.add(g.weight[i] * std::pow(r, -beta) * std::pow(std::max(v.value[i], 0.0), expo));
  }
  return acc.value();
}

double shell_mean(const BoundaryField& f, int k) {
  const BoundaryGrid& g = *f.grid;
  NeumaierSum wsum, wvsum;
  for (int m = 0; m < g.angular_count(); ++m) {
    std::size_t i = g.node_index(k, m);
    wsum.add(g.weight[i]);
    wvsum.add(g.weight[i] * f.value[i]);
  }
  return wvsum.value() / wsum.value();
}

double bulk_corner_mean(const HalfField& f, int j, int k) {
  const HalfGrid& g = *f.grid;
  NeumaierSum wsum, wvsum;
  for (int m = 0; m < g.angular_count(); ++m) {
    std::size_t i = g.node_index(j, m, k);
    wsum.add(g.weight[i]);
    wvsum.add(g.weight[i] * f.value[i]);
  }
  return wvsum.value() / wsum.value();
}

// least-squares line a + b t through the points (t_i, y_i)
struct LineFit {
  double a = 0.0;
  double b = 0.0;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  double n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  double denom = n * stt - st * st;
  LineFit fit;
  fit.b = denom != 0.0 ? (n * sty - st * sy) / denom : 0.0;
  fit.a = (sy - fit.b * st) / n;
  return fit;
}

SystemSolution solve_core(const SystemParams& sys, const BoundaryGrid& bg, const HalfGrid& hg,
                          const KernelTable& table, const SolveOptions& opts,
                          bool single_weight) {
  opts.check();
  const SystemScalars s = scalars(sys);
  const OpParams opv = op_for_v(s, single_weight);
  const OpParams opu = op_for_u(s, single_weight);
  const double norm_expo = s.p0 + 1.0;

  SystemSolution out;
  out.sys = sys;
  out.single_weight = single_weight;
  out.u = make_field(bg);
  out.v = make_field(hg);

  if (opts.random_start) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& x : out.u.value) x = unit(rng);
  } else {
    double expo = -(s.n - 1) / (2.0 * norm_expo);
    for (std::size_t i = 0; i < out.u.value.size(); ++i) {
      double r = bg.node_radius(i);
      out.u.value[i] = std::pow(1.0 + r * r, expo);
    }
  }
  {
    double norm = lp_norm(out.u, norm_expo);
    if (norm > 0.0) {
      for (double& x : out.u.value) x /= norm;
    }
    // an all-zero start is reported Degenerate by the first iteration
  }

  double damping = opts.damping;
  if (damping == 1.0 && (s.p0 > 3.0 || s.q0 > 3.0)) damping = 0.5;

  BoundaryField powered_u = make_field(bg);
  HalfField powered_v = make_field(hg);

  for (int k = 0; k < opts.max_iters; ++k) {
    pow_into(out.u, s.p0, powered_u);
    HalfField v_new = apply_V(powered_u, hg, opv, table);
    if (out_of_range(v_new.value)) {
      out.status = SystemStatus::Diverged;
      return out;
    }

    pow_into(v_new, s.q0, powered_v);
    BoundaryField u_raw = apply_W(powered_v, bg, opu, table);
    if (out_of_range(u_raw.value)) {
      out.status = SystemStatus::Diverged;
      return out;
    }

    double a = lp_norm(u_raw, norm_expo);
    if (a == 0.0) {
      out.status = SystemStatus::Degenerate;
      return out;
    }
    if (!std::isfinite(a)) {
      out.status = SystemStatus::Diverged;
      return out;
    }

    BoundaryField u_next = make_field(bg);
    for (std::size_t i = 0; i < u_next.value.size(); ++i) {
      u_next.value[i] = u_raw.value[i] / a;
    }
    if (damping < 1.0) {
      for (std::size_t i = 0; i < u_next.value.size(); ++i) {
        u_next.value[i] = damping * u_next.value[i] + (1.0 - damping) * out.u.value[i];
      }
      double norm = lp_norm(u_next, norm_expo);
      for (double& x : u_next.value) x /= norm;
    }

    out.residual_u = sup_rel_change(u_next.value, out.u.value);
    out.residual_v = sup_rel_change(v_new.value, out.v.value);
    out.u = std::move(u_next);
    out.v = std::move(v_new);
    out.eigenvalue = a;
    out.iterations = k + 1;

    if (std::max(out.residual_u, out.residual_v) < opts.tol_rel) {
      out.status = SystemStatus::Converged;
      break;
    }
  }

  // make v exactly consistent with the final u, then fix the free scale
  pow_into(out.u, s.p0, powered_u);
  out.v = apply_V(powered_u, hg, opv, table);
  pow_into(out.v, s.q0, powered_v);
  BoundaryField u_raw = apply_W(powered_v, bg, opu, table);
  double a = lp_norm(u_raw, norm_expo);
  if (a > 0.0 && std::isfinite(a)) out.eigenvalue = a;

  double pq = s.p0 * s.q0;
  if (std::abs(pq - 1.0) > 1e-12 && out.status != SystemStatus::Degenerate &&
      out.eigenvalue > 0.0) {
    double c = std::pow(out.eigenvalue, 1.0 / (1.0 - pq));
    double d = std::pow(c, s.p0);
    if (std::isfinite(c) && c > 0.0 && std::isfinite(d)) {
      for (double& x : out.u.value) x *= c;
      for (double& x : out.v.value) x *= d;
      out.rescaled = true;
    }
  }
  return out;
}

}  // namespace

const char* to_string(SystemStatus s) {
  switch (s) {
    case SystemStatus::Converged: return "converged";
    case SystemStatus::IterationCap: return "iteration-cap";
    case SystemStatus::Diverged: return "diverged";
    case SystemStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

SystemSolution solve_system(const SystemParams& sys, const BoundaryGrid& bg, const HalfGrid& hg,
                            const KernelTable& table, const SolveOptions& opts) {
  return solve_core(sys, bg, hg, table, opts, false);
}

SystemSolution solve_single_weight(const SystemParams& sys, const BoundaryGrid& bg,
                                   const HalfGrid& hg, const KernelTable& table,
                                   const SolveOptions& opts) {
  return solve_core(sys, bg, hg, table, opts, true);
}

FixedPointResiduals fixed_point_residual(const SystemSolution& sol, const KernelTable& table) {
  if (!sol.u.grid || !sol.v.grid) {
    throw std::invalid_argument("fixed_point_residual: solution has no grids");
  }
  const SystemScalars s = scalars(sol.sys);
  const BoundaryGrid& bg = *sol.u.grid;
  const HalfGrid& hg = *sol.v.grid;

  BoundaryField powered_u = make_field(bg);
  pow_into(sol.u, s.p0, powered_u);
  HalfField v_rhs = apply_V(powered_u, hg, op_for_v(s, sol.single_weight), table);

  HalfField powered_v = make_field(hg);
  pow_into(sol.v, s.q0, powered_v);
  BoundaryField u_rhs = apply_W(powered_v, bg, op_for_u(s, sol.single_weight), table);
  if (!sol.rescaled && sol.eigenvalue > 0.0) {
    for (double& x : u_rhs.value) x /= sol.eigenvalue;
  }

  auto sup_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) num = std::max(num, std::abs(a[i] - b[i]));
    return num;
  };
  FixedPointResiduals res;
  res.u = sup_diff(u_rhs.value, sol.u.value) / std::max(sup_abs(sol.u.value), 1e-300);
  res.v = sup_diff(v_rhs.value, sol.v.value) / std::max(sup_abs(sol.v.value), 1e-300);
  return res;
}

PohozaevCheck pohozaev_check(const SystemSolution& sol, const KernelTable& table) {
  if (!sol.single_weight) {
    throw std::invalid_argument(
        "pohozaev_check: the energy identity is stated for single-weight solutions");
  }
  FixedPointResiduals fp = fixed_point_residual(sol, table);
  double fp_worst = std::max(fp.u, fp.v);
  if (!(fp_worst <= 1e-4)) {
    throw std::domain_error(
        "pohozaev_check: input is not a converged solution (fixed-point residual " +
        std::to_string(fp_worst) + " > 1e-4)");
  }

  const SystemScalars s = scalars(sol.sys);
  const BoundaryGrid& bg = *sol.u.grid;
  const HalfGrid& hg = *sol.v.grid;

  PohozaevCheck check;
  check.e_u = energy_u(sol.u, s.alpha, s.p0 + 1.0);
  check.e_v = energy_v(sol.v, s.beta, s.q0 + 1.0);
  check.norms_finite = std::isfinite(check.e_u) && std::isfinite(check.e_v) &&
                       std::abs(check.e_u) < kBlowUp && std::abs(check.e_v) < kBlowUp;

  // D pairs the u-equation source against |y|^{-alpha} u^{p0}, evaluated as
  // its own quadrature rather than reusing e_u
  HalfField powered_v = make_field(hg);
  pow_into(sol.v, s.q0, powered_v);
  BoundaryField eta = apply_W(powered_v, bg, op_for_u(s, true), table);
  NeumaierSum d_acc;
  for (std::size_t i = 0; i < eta.value.size(); ++i) {
    d_acc.add(bg.weight[i] * std::pow(bg.node_radius(i), -s.alpha) *
              std::pow(std::max(sol.u.value[i], 0.0), s.p0) * eta.value[i]);
  }
  check.d = d_acc.value();

  check.lhs = -((s.n - 1.0 - s.alpha) / (s.p0 + 1.0)) * check.e_u -
              ((s.n - s.beta) / (s.q0 + 1.0)) * check.e_v;
  check.rhs = -(s.mu - s.lambda) * check.d;
  if (check.norms_finite) {
    check.residual = std::abs(check.lhs - check.rhs) /
                     std::max({std::abs(check.lhs), std::abs(check.rhs), 1.0});
  } else {
    check.residual = std::numeric_limits<double>::infinity();
  }
  return check;
}

AsymptoticCheck asymptotic_check(const SystemSolution& sol) {
  if (!sol.u.grid || !sol.v.grid) {
    throw std::invalid_argument("asymptotic_check: solution has no grids");
  }
  const SystemScalars s = scalars(sol.sys);
  const BoundaryGrid& bg = *sol.u.grid;
  const HalfGrid& hg = *sol.v.grid;
  const double nd = s.n;
  constexpr int kShells = 5;

  AsymptoticCheck check;

  // u side: limit of u |y|^alpha at the origin
  double lhs_gate = 1.0 / s.q0 - (s.mu + s.beta - s.lambda) / (s.q0 * nd);
  if (!(lhs_gate > (s.beta - 1.0) / nd)) {
    check.u_skip_reason = "integrability hypothesis fails for the u-limit";
  } else if (bg.radial_count() < kShells) {
    check.u_skip_reason = "fewer than five radial shells";
  } else {
    std::vector<double> t(kShells), y(kShells);
    for (int k = 0; k < kShells; ++k) {
      double r = bg.shell_r[k];
      double w = shell_mean(sol.u, k);
      if (!sol.single_weight) w *= std::pow(r, s.alpha);
      t[k] = std::log(r);
      y[k] = w;
    }
    LineFit fit = fit_line(t, y);
    double t_eval = t.front() - (t.back() - t.front());
    check.lhs_u = fit.a + fit.b * t_eval;
    check.slope_u = fit.b;

    NeumaierSum rhs;
    for (std::size_t i = 0; i < sol.v.value.size(); ++i) {
      double r = std::hypot(hg.node_radius(i), hg.node_height(i));
      double num = s.lambda == 0.0 ? 1.0 : std::pow(hg.node_height(i), s.lambda);
      rhs.add(hg.weight[i] * num * std::pow(std::max(sol.v.value[i], 0.0), s.q0) /
              std::pow(r, s.mu + s.beta));
    }
    check.rhs_u = rhs.value();
    check.u_checked = true;
  }

  // v side: limit of v |x|^beta / x_n^lambda at the origin
  double v_gate = 1.0 / s.p0 - (s.mu + s.alpha - s.lambda + 1.0) / (s.p0 * (nd - 1.0));
  if (!(v_gate > s.alpha / (nd - 1.0))) {
    check.v_skip_reason = "integrability hypothesis fails for the v-limit";
  } else if (hg.radial_count() < kShells || hg.height_count() < kShells) {
    check.v_skip_reason = "fewer than five radial or height cells";
  } else {
    std::vector<double> t(kShells), y(kShells);
    for (int i = 0; i < kShells; ++i) {
      double r = std::hypot(hg.shell_r[i], hg.height[i]);
      double w = bulk_corner_mean(sol.v, i, i);
      if (!sol.single_weight) w *= std::pow(r, s.beta);
      if (s.lambda != 0.0) w /= std::pow(hg.height[i], s.lambda);
      t[i] = std::log(r);
      y[i] = w;
    }
    LineFit fit = fit_line(t, y);
    double t_eval = t.front() - (t.back() - t.front());
    check.lhs_v = fit.a + fit.b * t_eval;
    check.slope_v = fit.b;

    NeumaierSum rhs;
    for (std::size_t i = 0; i < sol.u.value.size(); ++i) {
      double r = bg.node_radius(i);
      rhs.add(bg.weight[i] * std::pow(std::max(sol.u.value[i], 0.0), s.p0) /
              std::pow(r, s.alpha + s.mu));
    }
    check.rhs_v = rhs.value();
    check.v_checked = true;
  }
  return check;
}

namespace {

NormTrend norm_trend_u(const BoundaryField& u, double inv, bool inside) {
  NormTrend trend;
  trend.inv = inv;
  trend.exponent = 1.0 / inv;
  trend.inside_window = inside;
  const BoundaryGrid& g = *u.grid;
  double r_max = g.spec.r_max;
  for (int m = 4; m >= 0; --m) {
    double cutoff = r_max / std::pow(2.0, m);
    NeumaierSum acc;
    for (std::size_t i = 0; i < u.value.size(); ++i) {
      if (g.node_radius(i) <= cutoff) {
        acc.add(g.weight[i] * std::pow(std::abs(u.value[i]), trend.exponent));
      }
    }
    trend.cutoff.push_back(cutoff);
    trend.norm.push_back(std::pow(acc.value(), inv));
  }
  std::size_t last = trend.norm.size() - 1;
  trend.last_rel_change = std::abs(trend.norm[last] - trend.norm[last - 1]) /
                          std::max(trend.norm[last], 1e-300);
  trend.stabilized = trend.last_rel_change <= 0.02;
  return trend;
}

NormTrend norm_trend_v(const HalfField& v, double inv, bool inside) {
  NormTrend trend;
  trend.inv = inv;
  trend.exponent = 1.0 / inv;
  trend.inside_window = inside;
  const HalfGrid& g = *v.grid;
  double r_max = g.spec.r_max;
  for (int m = 4; m >= 0; --m) {
    double cutoff = r_max / std::pow(2.0, m);
    NeumaierSum acc;
    for (std::size_t i = 0; i < v.value.size(); ++i) {
      if (std::hypot(g.node_radius(i), g.node_height(i)) <= cutoff) {
        acc.add(g.weight[i] * std::pow(std::abs(v.value[i]), trend.exponent));
      }
    }
    trend.cutoff.push_back(cutoff);
    trend.norm.push_back(std::pow(acc.value(), inv));
  }
  std::size_t last = trend.norm.size() - 1;
  trend.last_rel_change = std::abs(trend.norm[last] - trend.norm[last - 1]) /
                          std::max(trend.norm[last], 1e-300);
  trend.stabilized = trend.last_rel_change <= 0.02;
  return trend;
}

// sampled window coordinates: three interior points plus the near-misses
// just outside each endpoint. Only positive 1/exponent values correspond to
// Lebesgue norms, so the sampled range is clipped at zero and an endpoint
// below it yields no outside sample.
std::vector<std::pair<double, bool>> window_samples(const Interval& window) {
  double lo = std::max(to_double(window.lo), 0.0);
  double hi = to_double(window.hi);
  std::vector<std::pair<double, bool>> samples;
  if (!(hi > lo)) return samples;
  double width = hi - lo;
  for (double frac : {0.25, 0.5, 0.75}) {
    double inv = lo + frac * width;
    if (inv > 1e-9) samples.emplace_back(inv, true);
  }
  double below = lo - 0.25 * width;
  if (below > 1e-9) samples.emplace_back(below, false);
  samples.emplace_back(hi + 0.25 * width, false);
  return samples;
}

}  // namespace

RegularityProbe regularity_probe(const SystemSolution& sol, const RegularityWindow& window) {
  if (!sol.u.grid || !sol.v.grid) {
    throw std::invalid_argument("regularity_probe: solution has no grids");
  }
  RegularityProbe probe;
  probe.window_u_empty = window.inv_r.empty;
  probe.window_v_empty = window.inv_s.empty;
  if (!probe.window_u_empty) {
    for (auto [inv, inside] : window_samples(window.inv_r)) {
      probe.u_trends.push_back(norm_trend_u(sol.u, inv, inside));
    }
  }
  if (!probe.window_v_empty) {
    for (auto [inv, inside] : window_samples(window.inv_s)) {
      probe.v_trends.push_back(norm_trend_v(sol.v, inv, inside));
    }
  }
  return probe;
}

NonexistenceSweep nonexistence_sweep(const SystemParams& sys, const GridSpec& base,
                                     int doublings, const SolveOptions& opts,
                                     bool single_weight) {
  if (doublings < 1) throw std::invalid_argument("nonexistence_sweep: need at least one doubling");
  base.check();
  const SystemScalars s = scalars(sys);
  const double decades_base = std::log(base.r_max / base.r_min);

  NonexistenceSweep sweep;
  for (int stage = 0; stage <= doublings; ++stage) {
    GridSpec spec = base;
    spec.r_max = base.r_max * std::pow(2.0, stage);
    double scale = std::log(spec.r_max / spec.r_min) / decades_base;
    spec.n_radial = std::max(2, static_cast<int>(std::lround(base.n_radial * scale)));
    spec.n_height = std::max(2, static_cast<int>(std::lround(base.n_height * scale)));

    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    KernelTable table = KernelTable::build(bg, hg, {s.lambda, s.mu});
    SystemSolution sol = single_weight ? solve_single_weight(sys, bg, hg, table, opts)
                                       : solve_system(sys, bg, hg, table, opts);

    sweep.r_max.push_back(spec.r_max);
    sweep.status.push_back(sol.status);
    if (sol.status == SystemStatus::Diverged || sol.status == SystemStatus::Degenerate) {
      sweep.e_u.push_back(std::numeric_limits<double>::quiet_NaN());
      sweep.e_v.push_back(std::numeric_limits<double>::quiet_NaN());
      break;
    }
    sweep.e_u.push_back(energy_u(sol.u, s.alpha, s.p0 + 1.0));
    sweep.e_v.push_back(energy_v(sol.v, s.beta, s.q0 + 1.0));
  }

  bool all_witnessed = true;
  double min_growth = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < sweep.r_max.size(); ++i) {
    if (sweep.status[i + 1] == SystemStatus::Diverged) continue;
    double gu = sweep.e_u[i + 1] / sweep.e_u[i];
    double gv = sweep.e_v[i + 1] / sweep.e_v[i];
    double growth = std::max(gu, gv);
    min_growth = std::min(min_growth, growth);
    if (!(growth > 10.0)) all_witnessed = false;
  }
  if (!sweep.status.empty() && sweep.status.back() == SystemStatus::Diverged) {
    sweep.witnessed = true;
  } else {
    sweep.witnessed = all_witnessed && sweep.r_max.size() > 1;
  }
  sweep.min_growth = std::isfinite(min_growth) ? min_growth : 0.0;
  return sweep;
}

}  // namespace swhs
