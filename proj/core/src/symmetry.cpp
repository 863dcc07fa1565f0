#include "swhs/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "swhs/summation.hpp"

namespace swhs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_full_mode(GridMode mode, const char* what) {
  if (mode != GridMode::Full) {
    throw std::invalid_argument(std::string(what) + ": requires a full-mode grid");
  }
}

// fractional angular position of phi on the uniform grid 0, 2pi/A, ...
struct AngularPos {
  int lo;
  int hi;
  double t;
};

AngularPos angular_pos(double phi, int count) {
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  double s = phi * count / kTwoPi;
  int lo = static_cast<int>(s);
  if (lo >= count) lo = 0;  // fmod rounding at the seam
  return {lo, (lo + 1) % count, s - lo};
}

// fractional log-radial position; flags the out-of-range cases
struct RadialPos {
  int lo = 0;
  int hi = 0;
  double t = 0.0;
  bool below = false;
  bool above = false;
};

RadialPos radial_pos(const std::vector<double>& shells, double r) {
  RadialPos pos;
  if (r <= shells.front()) {
    pos.below = true;
    return pos;
  }
  if (r >= shells.back()) {
    pos.above = true;
    return pos;
  }
  auto it = std::upper_bound(shells.begin(), shells.end(), r);
  pos.hi = static_cast<int>(it - shells.begin());
  pos.lo = pos.hi - 1;
  pos.t = std::log(r / shells[pos.lo]) / std::log(shells[pos.hi] / shells[pos.lo]);
  return pos;
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// power-law continuation of the outer two samples v1 at r1, v2 at r2 < r;
// falls back to the outer value when the pair has no positive power fit
double far_field(double v1, double v2, double r1, double r2, double r) {
  if (v1 > 0.0 && v2 > 0.0) {
    double slope = std::log(v2 / v1) / std::log(r2 / r1);
    return v2 * std::pow(r / r2, slope);
  }
  return v2;
}

}  // namespace

void ReflectionSpec::check(int n) const {
  if (axis < 1 || axis >= n) {
    throw std::invalid_argument("ReflectionSpec: axis must be a tangential coordinate");
  }
  if (!std::isfinite(tau)) {
    throw std::invalid_argument("ReflectionSpec: tau must be finite");
  }
}

double sample_planar(const BoundaryField& f, double y1, double y2) {
  if (!f.grid) throw std::invalid_argument("sample_planar: field has no grid");
  const BoundaryGrid& g = *f.grid;
  const double r = std::hypot(y1, y2);

  // value on shell k at the requested angle
  auto shell_value = [&](int k) {
    if (g.spec.mode == GridMode::Reduced) return f.value[k];
    AngularPos ap = angular_pos(std::atan2(y2, y1), g.angular_count());
    return lerp(f.value[g.node_index(k, ap.lo)], f.value[g.node_index(k, ap.hi)], ap.t);
  };

  RadialPos rp = radial_pos(g.shell_r, r);
  if (rp.below) return shell_value(0);
  if (rp.above) {
    int last = g.radial_count() - 1;
    return far_field(shell_value(last - 1), shell_value(last), g.shell_r[last - 1],
                     g.shell_r[last], r);
  }
  return lerp(shell_value(rp.lo), shell_value(rp.hi), rp.t);
}

double sample_bulk(const HalfField& g, double x1, double x2, double xn) {
  if (!g.grid) throw std::invalid_argument("sample_bulk: field has no grid");
  const HalfGrid& grid = *g.grid;
  const double r = std::hypot(x1, x2);

  // heights clamp to the grid range; interpolation is log-linear between
  const std::vector<double>& h = grid.height;
  RadialPos hp = radial_pos(h, xn);
  int k_lo, k_hi;
  double ht;
  if (hp.below) {
    k_lo = k_hi = 0;
    ht = 0.0;
  } else if (hp.above) {
    k_lo = k_hi = grid.height_count() - 1;
    ht = 0.0;
  } else {
    k_lo = hp.lo;
    k_hi = hp.hi;
    ht = hp.t;
  }

  auto node_value = [&](int j, int k) {
    if (grid.spec.mode == GridMode::Reduced) return g.value[grid.node_index(j, 0, k)];
    AngularPos ap = angular_pos(std::atan2(x2, x1), grid.angular_count());
    return lerp(g.value[grid.node_index(j, ap.lo, k)], g.value[grid.node_index(j, ap.hi, k)],
                ap.t);
  };
  auto slice_value = [&](int k) {
    RadialPos rp = radial_pos(grid.shell_r, r);
    if (rp.below) return node_value(0, k);
    if (rp.above) {
      int last = grid.radial_count() - 1;
      return far_field(node_value(last - 1, k), node_value(last, k), grid.shell_r[last - 1],
                       grid.shell_r[last], r);
    }
    return lerp(node_value(rp.lo, k), node_value(rp.hi, k), rp.t);
  };

  if (k_lo == k_hi) return slice_value(k_lo);
  return lerp(slice_value(k_lo), slice_value(k_hi), ht);
}

std::array<double, 2> weighted_barycenter(const BoundaryField& f) {
  if (!f.grid) throw std::invalid_argument("weighted_barycenter: field has no grid");
  const BoundaryGrid& g = *f.grid;
  if (g.spec.mode == GridMode::Reduced) return {0.0, 0.0};

  NeumaierSum mass, m1, m2;
  for (std::size_t i = 0; i < f.value.size(); ++i) {
    double wv = g.weight[i] * f.value[i];
    auto p = g.point2(i);
    mass.add(wv);
    m1.add(wv * p[0]);
    m2.add(wv * p[1]);
  }
  double m = mass.value();
  if (std::abs(m) < 1e-300) return {0.0, 0.0};
  return {m1.value() / m, m2.value() / m};
}

BoundaryField recenter(const BoundaryField& f) {
  if (!f.grid) throw std::invalid_argument("recenter: field has no grid");
  if (f.grid->spec.mode == GridMode::Reduced) return f;
  auto c = weighted_barycenter(f);
  if (c[0] == 0.0 && c[1] == 0.0) return f;

  BoundaryField out = make_field(*f.grid);
  for (std::size_t i = 0; i < out.value.size(); ++i) {
    auto p = f.grid->point2(i);
    out.value[i] = sample_planar(f, p[0] + c[0], p[1] + c[1]);
  }
  return out;
}

SymmetryDeviation symmetry_deviation(const BoundaryField& f) {
  if (!f.grid) throw std::invalid_argument("symmetry_deviation: field has no grid");
  const BoundaryGrid& g = *f.grid;
  double sup = sup_abs(f.value);
  SymmetryDeviation dev;
  if (sup == 0.0) return dev;

  double prev_mean = 0.0;
  for (int k = 0; k < g.radial_count(); ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    NeumaierSum wsum, wvsum;
    for (int m = 0; m < g.angular_count(); ++m) {
      std::size_t i = g.node_index(k, m);
      lo = std::min(lo, f.value[i]);
      hi = std::max(hi, f.value[i]);
      wsum.add(g.weight[i]);
      wvsum.add(g.weight[i] * f.value[i]);
    }
    dev.radial = std::max(dev.radial, (hi - lo) / sup);
    double mean = wvsum.value() / wsum.value();
    if (k > 0) dev.monotonicity = std::max(dev.monotonicity, (mean - prev_mean) / sup);
    prev_mean = mean;
  }
  return dev;
}

namespace {

// exact node-to-node reflection when tau = 0 lands angles back on the grid:
// axis 2 sends angle index m to -m (any count), axis 1 sends m to A/2 - m
// (even count). Returns -1 when no exact mapping exists.
int reflected_angle_index(int m, int axis, int count) {
  if (axis == 2) return (count - m) % count;
  if (count % 2 == 0) return ((count / 2 - m) % count + count) % count;
  return -1;
}

std::array<double, 2> reflect_planar(double y1, double y2, int axis, double tau) {
  if (axis == 1) return {2.0 * tau - y1, y2};
  return {y1, 2.0 * tau - y2};
}

}  // namespace

BoundaryField reflect(const BoundaryField& f, const ReflectionSpec& spec) {
  if (!f.grid) throw std::invalid_argument("reflect: field has no grid");
  require_full_mode(f.grid->spec.mode, "reflect");
  spec.check(f.grid->spec.n);
  const BoundaryGrid& g = *f.grid;

  BoundaryField out = make_field(g);
  if (spec.tau == 0.0) {
    int mirror = reflected_angle_index(0, spec.axis, g.angular_count());
    if (mirror >= 0) {
      for (int k = 0; k < g.radial_count(); ++k)
        for (int m = 0; m < g.angular_count(); ++m) {
          int mr = reflected_angle_index(m, spec.axis, g.angular_count());
          out.value[g.node_index(k, m)] = f.value[g.node_index(k, mr)];
        }
      return out;
    }
  }
  for (std::size_t i = 0; i < out.value.size(); ++i) {
    auto p = g.point2(i);
    auto q = reflect_planar(p[0], p[1], spec.axis, spec.tau);
    out.value[i] = sample_planar(f, q[0], q[1]);
  }
  return out;
}

HalfField reflect(const HalfField& g, const ReflectionSpec& spec) {
  if (!g.grid) throw std::invalid_argument("reflect: field has no grid");
  require_full_mode(g.grid->spec.mode, "reflect");
  spec.check(g.grid->spec.n);
  const HalfGrid& grid = *g.grid;

  HalfField out = make_field(grid);
  if (spec.tau == 0.0) {
    int mirror = reflected_angle_index(0, spec.axis, grid.angular_count());
    if (mirror >= 0) {
      for (int j = 0; j < grid.radial_count(); ++j)
        for (int m = 0; m < grid.angular_count(); ++m) {
          int mr = reflected_angle_index(m, spec.axis, grid.angular_count());
          for (int k = 0; k < grid.height_count(); ++k)
            out.value[grid.node_index(j, m, k)] = g.value[grid.node_index(j, mr, k)];
        }
      return out;
    }
  }
  for (std::size_t i = 0; i < out.value.size(); ++i) {
    auto p = grid.point3(i);
    auto q = reflect_planar(p[0], p[1], spec.axis, spec.tau);
    out.value[i] = sample_bulk(g, q[0], q[1], p[2]);
  }
  return out;
}

KelvinResult kelvin_transform(const BoundaryField& u, std::array<double, 2> center,
                              double power) {
  if (!u.grid) throw std::invalid_argument("kelvin_transform: field has no grid");
  require_full_mode(u.grid->spec.mode, "kelvin_transform");
  const BoundaryGrid& g = *u.grid;

  KelvinResult result;
  result.field = make_field(g);
  result.excluded.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point2(i);
    double d1 = p[0] - center[0], d2p = p[1] - center[1];
    double d2 = d1 * d1 + d2p * d2p;
    if (d2 == 0.0) {
      result.excluded[i] = 1;
      ++result.excluded_count;
      continue;
    }
    double q1 = d1 / d2 + center[0], q2 = d2p / d2 + center[1];
    result.field.value[i] = std::pow(d2, -0.5 * power) * sample_planar(u, q1, q2);
  }
  return result;
}

KelvinResultBulk kelvin_transform(const HalfField& v, std::array<double, 2> center,
                                  double power) {
  if (!v.grid) throw std::invalid_argument("kelvin_transform: field has no grid");
  require_full_mode(v.grid->spec.mode, "kelvin_transform");
  const HalfGrid& g = *v.grid;

  KelvinResultBulk result;
  result.field = make_field(g);
  result.excluded.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point3(i);
    double d1 = p[0] - center[0], d2p = p[1] - center[1], dn = p[2];
    double d2 = d1 * d1 + d2p * d2p + dn * dn;
    if (d2 == 0.0) {
      result.excluded[i] = 1;
      ++result.excluded_count;
      continue;
    }
    // boundary centers keep the inverted point in the half space
    double q1 = d1 / d2 + center[0], q2 = d2p / d2 + center[1], qn = dn / d2;
    result.field.value[i] = std::pow(d2, -0.5 * power) * sample_bulk(v, q1, q2, qn);
  }
  return result;
}

std::vector<MovingPlaneRow> moving_plane_scan(const BoundaryField& u, const HalfField& v,
                                              double beta, double q0,
                                              const KernelParams& kp, int axis,
                                              const std::vector<double>& taus) {
  if (!u.grid || !v.grid) throw std::invalid_argument("moving_plane_scan: field has no grid");
  require_full_mode(u.grid->spec.mode, "moving_plane_scan");
  require_full_mode(v.grid->spec.mode, "moving_plane_scan");
  const BoundaryGrid& bg = *u.grid;
  const HalfGrid& hg = *v.grid;
  ReflectionSpec{axis, 0.0}.check(bg.spec.n);

  const double tol_u = 1e-10 * sup_abs(u.value);
  const double tol_v = 1e-10 * sup_abs(v.value);

  // weighted bulk sources w |x|^{-beta} v^{q0} feeding the u-equation
  std::vector<std::array<double, 3>> src_pt(hg.size());
  std::vector<double> src(hg.size());
  for (std::size_t i = 0; i < hg.size(); ++i) {
    src_pt[i] = hg.point3(i);
    double r = std::hypot(std::hypot(src_pt[i][0], src_pt[i][1]), src_pt[i][2]);
    src[i] = hg.weight[i] * std::pow(r, -beta) * std::pow(std::max(v.value[i], 0.0), q0);
  }

  auto kernel_sum_at = [&](const std::array<double, 2>& y) {
    NeumaierSum acc;
    for (std::size_t i = 0; i < hg.size(); ++i) {
      if (src[i] != 0.0) acc.add(src[i] * kernel_point(src_pt[i].data(), y.data(), 3, kp));
    }
    return acc.value();
  };

  std::vector<MovingPlaneRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    ReflectionSpec rs{axis, tau};
    MovingPlaneRow row;
    row.tau = tau;

    BoundaryField u_tau = reflect(u, rs);
    for (std::size_t i = 0; i < bg.size(); ++i) {
      auto p = bg.point2(i);
      if (p[axis - 1] >= tau) continue;
      double diff = u.value[i] - u_tau.value[i];
      row.amplitude = std::max(row.amplitude, diff);
      if (diff > tol_u) row.measure_u += bg.weight[i];
    }

    HalfField v_tau = reflect(v, rs);
    for (std::size_t i = 0; i < hg.size(); ++i) {
      auto p = hg.point3(i);
      if (p[axis - 1] >= tau) continue;
      double diff = v.value[i] - v_tau.value[i];
      row.amplitude = std::max(row.amplitude, diff);
      if (diff > tol_v) row.measure_v += hg.weight[i];
    }

    // reconstruction identity: sample boundary points on the tau side and
    // compare S(y) - S(y^tau) with the source-reflected evaluation
    std::vector<std::size_t> samples;
    for (std::size_t i = 0; i < bg.size(); ++i) {
      if (bg.point2(i)[axis - 1] < tau) samples.push_back(i);
    }
    std::size_t stride = std::max<std::size_t>(1, samples.size() / 48);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t s = 0; s < samples.size(); s += stride) {
      auto y = bg.point2(samples[s]);
      auto y_tau = reflect_planar(y[0], y[1], axis, tau);
      double direct = kernel_sum_at(y) - kernel_sum_at({y_tau[0], y_tau[1]});

      NeumaierSum acc;
      for (std::size_t i = 0; i < hg.size(); ++i) {
        if (src[i] == 0.0) continue;
        auto q = reflect_planar(src_pt[i][0], src_pt[i][1], axis, tau);
        std::array<double, 3> x_tau = {q[0], q[1], src_pt[i][2]};
        acc.add(src[i] * (kernel_point(src_pt[i].data(), y.data(), 3, kp) -
                          kernel_point(x_tau.data(), y.data(), 3, kp)));
      }
      worst = std::max(worst, std::abs(direct - acc.value()));
      scale = std::max(scale, std::abs(kernel_sum_at(y)));
    }
    row.gg_residual = scale > 0.0 ? worst / scale : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swhs
