#include "swhs/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "swhs/rational.hpp"
#include "swhs/rearrange.hpp"
#include "swhs/summation.hpp"
#include "swhs/symmetry.hpp"

namespace swhs {

namespace {

constexpr double kDampingFloor = 1.0 / 1024.0;

void check_nonnegative_start(const std::vector<double>& v) {
  for (double x : v) {
    if (!(x >= 0.0)) {
      throw std::domain_error("power_iterate: initial field must be nonnegative");
    }
  }
}

template <typename Field>
void normalize_unit(Field& field, double p, const char* who) {
  double norm = lp_norm(field, p);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::domain_error(std::string(who) + ": degenerate iterate, zero or non-finite norm");
  }
  for (double& v : field.value) v /= norm;
}

double fetch_q(const InequalityParams& ip) {
  Rational inv_q = ip.inv_q();
  if (!(inv_q > 0)) {
    throw std::domain_error("power_iterate: derived exponent q is undefined for these parameters");
  }
  return 1.0 / to_double(inv_q);
}

}  // namespace

void SolveOptions::check() const {
  if (max_iters < 0) throw std::invalid_argument("SolveOptions: max_iters must be >= 0");
  if (!(tol_rel > 0.0)) throw std::invalid_argument("SolveOptions: tol_rel must be positive");
  if (!(damping > 0.0) || damping > 1.0) {
    throw std::invalid_argument("SolveOptions: damping must lie in (0, 1]");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterationCap: return "iteration-cap";
    case SolveStatus::NonMonotone: return "non-monotone";
  }
  return "unknown";
}

double objective(const BoundaryField& f, const HalfField& g, const InequalityParams& ip,
                 const KernelTable& table) {
  if (!f.grid || !g.grid) throw std::invalid_argument("objective: field has no grid");
  HalfField vf = apply_V(f, *g.grid, OpParams::from(ip), table);
  return weighted_inner(vf, g);
}

BoundaryField initial_field(const BoundaryGrid& bg, const InequalityParams& ip,
                            const SolveOptions& opts) {
  BoundaryField f = make_field(bg);
  if (opts.random_start) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& v : f.value) v = unit(rng);
  } else {
    double p = to_double(ip.p);
    double expo = -(bg.spec.n - 1) / p;
    for (std::size_t i = 0; i < f.value.size(); ++i) {
      double r = bg.node_radius(i);
      f.value[i] = std::pow(1.0 + r * r, expo);
    }
  }
  normalize_unit(f, to_double(ip.p), "initial_field");
  return f;
}

ExtremalResult power_iterate(const InequalityParams& ip, const BoundaryGrid& bg,
                             const HalfGrid& hg, const KernelTable& table,
                             const SolveOptions& opts, const BoundaryField* start) {
  opts.check();
  const OpParams op = OpParams::from(ip);
  const double p = to_double(ip.p);
  const double q_prime = to_double(ip.q_prime);
  const double q = fetch_q(ip);
  const double expo_g = 1.0 / (q_prime - 1.0);
  const double expo_f = 1.0 / (p - 1.0);

  ExtremalResult out;
  if (start) {
    if (start->grid != &bg) {
      throw std::invalid_argument("power_iterate: start field lives on a different grid");
    }
    check_nonnegative_start(start->value);
    out.f = *start;
    normalize_unit(out.f, p, "power_iterate");
  } else {
    out.f = initial_field(bg, ip, opts);
  }
  out.g = make_field(hg);
  out.status = SolveStatus::IterationCap;

  double damping = opts.damping;
  double j_prev = 0.0;
  for (int k = 0; k < opts.max_iters; ++k) {
    HalfField vf = apply_V(out.f, hg, op, table);
    double j = lp_norm(vf, q);
    out.trace.push_back(j);
    out.iterations = k + 1;
    if (k == 0 && j == 0.0) {
      throw std::domain_error("power_iterate: degenerate start, zero objective overlap");
    }
    if (k > 0) {
      if (std::abs(j - j_prev) <= opts.tol_rel * std::max(j, 1e-300)) {
        out.status = SolveStatus::Converged;
        j_prev = j;
        break;
      }
      if (j < j_prev - 10.0 * opts.tol_rel * j_prev) {
        damping *= 0.5;
        if (damping < kDampingFloor) {
          out.status = SolveStatus::NonMonotone;
          j_prev = j;
          break;
        }
      }
    }
    j_prev = j;

    for (std::size_t i = 0; i < out.g.value.size(); ++i) {
      out.g.value[i] = std::pow(std::max(vf.value[i], 0.0), expo_g);
    }
    normalize_unit(out.g, q_prime, "power_iterate");

    BoundaryField wg = apply_W(out.g, bg, op, table);
    BoundaryField f_new = make_field(bg);
    for (std::size_t i = 0; i < f_new.value.size(); ++i) {
      f_new.value[i] = std::pow(std::max(wg.value[i], 0.0), expo_f);
    }
    normalize_unit(f_new, p, "power_iterate");

    if (damping < 1.0) {
      for (std::size_t i = 0; i < f_new.value.size(); ++i) {
        f_new.value[i] = damping * f_new.value[i] + (1.0 - damping) * out.f.value[i];
      }
      normalize_unit(f_new, p, "power_iterate");
    }
    if (opts.symmetrize_each_step) {
      f_new = radial_symmetrize(f_new);
      normalize_unit(f_new, p, "power_iterate");
    }
    out.f = std::move(f_new);
  }
  out.final_damping = damping;

  // sync g to the final f and collect the closure diagnostics
  HalfField vf = apply_V(out.f, hg, op, table);
  out.constant_estimate = lp_norm(vf, q);
  HalfField h = make_field(hg);
  for (std::size_t i = 0; i < h.value.size(); ++i) {
    h.value[i] = std::pow(std::max(vf.value[i], 0.0), expo_g);
  }
  out.g = h;
  normalize_unit(out.g, q_prime, "power_iterate");

  double hh = weighted_inner(h, h);
  out.c0 = hh > 0.0 ? weighted_inner(out.g, h) / hh : 0.0;
  NeumaierSum dev2;
  for (std::size_t i = 0; i < h.value.size(); ++i) {
    double d = out.g.value[i] - out.c0 * h.value[i];
    dev2.add(hg.weight[i] * d * d);
  }
  out.g_consistency = std::sqrt(std::max(dev2.value(), 0.0));

  BoundaryField wg = apply_W(out.g, bg, op, table);
  BoundaryField f_star = make_field(bg);
  for (std::size_t i = 0; i < f_star.value.size(); ++i) {
    f_star.value[i] = std::pow(std::max(wg.value[i], 0.0), expo_f);
  }
  normalize_unit(f_star, p, "power_iterate");
  double num = 0.0;
  for (std::size_t i = 0; i < f_star.value.size(); ++i) {
    num = std::max(num, std::abs(out.f.value[i] - f_star.value[i]));
  }
  out.el_residual = num / std::max(sup_abs(f_star.value), 1e-300);

  BoundaryField centered = bg.spec.mode == GridMode::Full ? recenter(out.f) : out.f;
  SymmetryDeviation dev = symmetry_deviation(centered);
  out.radial_deviation = dev.radial;
  out.monotonicity_deviation = dev.monotonicity;
  return out;
}

DilatedField dilation_normalize(const BoundaryField& f, double kappa, double p) {
  if (!f.grid) throw std::invalid_argument("dilation_normalize: field has no grid");
  if (f.grid->spec.mode != GridMode::Reduced) {
    throw std::invalid_argument("dilation_normalize: requires a reduced-mode radial field");
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::domain_error("dilation_normalize: kappa must be positive and finite");
  }
  if (!(p > 0.0)) throw std::domain_error("dilation_normalize: p must be positive");

  DilatedField out;
  if (kappa == 1.0) {
    out.field = f;
    return out;
  }

  const BoundaryGrid& g = *f.grid;
  const std::vector<double>& shells = g.shell_r;
  const double sup = sup_abs(f.value);
  const double tol = 1e-12 * sup;
  const double scale = std::pow(kappa, -(g.spec.n - 1) / p);

  out.field = make_field(g);
  for (std::size_t i = 0; i < shells.size(); ++i) {
    double rs = shells[i] / kappa;
    double v;
    if (rs < shells.front()) {
      v = 0.0;
      if (std::abs(f.value.front()) > tol) out.truncated = true;
    } else if (rs > shells.back()) {
      v = 0.0;
      if (std::abs(f.value.back()) > tol) out.truncated = true;
    } else {
      auto it = std::upper_bound(shells.begin(), shells.end(), rs);
      std::size_t hi = std::min<std::size_t>(it - shells.begin(), shells.size() - 1);
      std::size_t lo = hi > 0 ? hi - 1 : 0;
      if (lo == hi) {
        v = f.value[lo];
      } else {
        double t = std::log(rs / shells[lo]) / std::log(shells[hi] / shells[lo]);
        v = f.value[lo] + (f.value[hi] - f.value[lo]) * t;
      }
    }
    out.field.value[i] = scale * v;
  }

  // content the resampling window can never reach
  if (kappa > 1.0) {
    double edge = shells.back() / kappa;
    for (std::size_t i = 0; i < shells.size(); ++i) {
      if (shells[i] > edge && std::abs(f.value[i]) > tol) out.truncated = true;
    }
  } else {
    double edge = shells.front() / kappa;
    for (std::size_t i = 0; i < shells.size(); ++i) {
      if (shells[i] < edge && std::abs(f.value[i]) > tol) out.truncated = true;
    }
  }
  return out;
}

double concentration_diagnostic(const BoundaryField& f, double p) {
  if (!f.grid) throw std::invalid_argument("concentration_diagnostic: field has no grid");
  if (!(p > 0.0)) throw std::domain_error("concentration_diagnostic: p must be positive");
  const BoundaryGrid& g = *f.grid;
  const double expo = (g.spec.n - 1) / p;

  double best = 0.0;
  for (int k = 0; k < g.radial_count(); ++k) {
    NeumaierSum wsum, wvsum;
    for (int m = 0; m < g.angular_count(); ++m) {
      std::size_t i = g.node_index(k, m);
      wsum.add(g.weight[i]);
      wvsum.add(g.weight[i] * f.value[i]);
    }
    double mean = wvsum.value() / wsum.value();
    best = std::max(best, std::pow(g.shell_r[k], expo) * mean);
  }
  return best;
}

}  // namespace swhs
