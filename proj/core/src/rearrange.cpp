#include "swhs/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "swhs/report.hpp"
#include "swhs/summation.hpp"

namespace swhs {

namespace {

void require_positive(double p, const char* what) {
  if (!(p > 0.0)) {
    throw std::domain_error(std::string(what) + " must be positive");
  }
}

double lp_norm_impl(const std::vector<double>& value, const std::vector<double>& weight,
                    double p) {
  require_positive(p, "lp_norm: p");
  NeumaierSum acc;
  for (std::size_t i = 0; i < value.size(); ++i) {
    double v = std::abs(value[i]);
    if (v > 0.0) acc.add(std::pow(v, p) * weight[i]);
  }
  return std::pow(acc.value(), 1.0 / p);
}

RearrangementProfile profile_impl(const std::vector<double>& value,
                                  const std::vector<double>& weight) {
  std::vector<std::size_t> order(value.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(value[a]) > std::abs(value[b]);
  });

  RearrangementProfile profile;
  for (std::size_t i : order) {
    double v = std::abs(value[i]);
    if (v == 0.0) break;  // zeros sort last; the support ends here
    if (!profile.steps.empty() && profile.steps.back().value == v) {
      profile.steps.back().measure += weight[i];
    } else {
      profile.steps.push_back({v, weight[i]});
    }
  }
  return profile;
}

// target node order for symmetrization: ascending radius, then node id
template <typename Radius>
std::vector<std::size_t> by_radius(std::size_t count, Radius radius) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return radius(a) < radius(b);
  });
  return order;
}

// source value order: descending value, ties by ascending original radius,
// then ascending node id
template <typename Radius>
std::vector<std::size_t> by_value(const std::vector<double>& value, Radius radius) {
  std::vector<std::size_t> order(value.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (value[a] != value[b]) return value[a] > value[b];
    double ra = radius(a), rb = radius(b);
    if (ra != rb) return ra < rb;
    return a < b;
  });
  return order;
}

void check_nonnegative(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (x < 0.0) {
      throw std::domain_error(std::string("riesz_check: ") + what +
                              " has negative values");
    }
  }
}

}  // namespace

double RearrangementProfile::total_measure() const {
  NeumaierSum acc;
  for (const auto& s : steps) acc.add(s.measure);
  return acc.value();
}

double RearrangementProfile::value_at(double t) const {
  if (t < 0.0) t = 0.0;
  double cum = 0.0;
  for (const auto& s : steps) {
    cum += s.measure;
    if (t < cum) return s.value;
  }
  return 0.0;
}

double lp_norm(const BoundaryField& f, double p) {
  if (!f.grid) throw std::invalid_argument("lp_norm: field has no grid");
  return lp_norm_impl(f.value, f.grid->weight, p);
}

double lp_norm(const HalfField& g, double p) {
  if (!g.grid) throw std::invalid_argument("lp_norm: field has no grid");
  return lp_norm_impl(g.value, g.grid->weight, p);
}

double lp_norm(const RearrangementProfile& profile, double p) {
  require_positive(p, "lp_norm: p");
  NeumaierSum acc;
  for (const auto& s : profile.steps) acc.add(std::pow(s.value, p) * s.measure);
  return std::pow(acc.value(), 1.0 / p);
}

RearrangementProfile decreasing_rearrangement(const BoundaryField& f) {
  if (!f.grid) throw std::invalid_argument("decreasing_rearrangement: field has no grid");
  return profile_impl(f.value, f.grid->weight);
}

RearrangementProfile decreasing_rearrangement(const HalfField& g) {
  if (!g.grid) throw std::invalid_argument("decreasing_rearrangement: field has no grid");
  return profile_impl(g.value, g.grid->weight);
}

double lorentz_norm(const RearrangementProfile& profile, double r, double s) {
  require_positive(r, "lorentz_norm: r");
  if (std::isinf(s)) {
    double best = 0.0;
    double cum = 0.0;
    for (const auto& step : profile.steps) {
      cum += step.measure;
      best = std::max(best, std::pow(cum, 1.0 / r) * step.value);
    }
    return best;
  }
  require_positive(s, "lorentz_norm: s");
  double sr = s / r;
  NeumaierSum acc;
  double prev = 0.0;  // T_{i-1}^{s/r}
  double cum = 0.0;
  for (const auto& step : profile.steps) {
    cum += step.measure;
    double next = std::pow(cum, sr);
    acc.add(std::pow(step.value, s) * (r / s) * (next - prev));
    prev = next;
  }
  return std::pow(acc.value(), 1.0 / s);
}

double lorentz_norm(const BoundaryField& f, double r, double s) {
  return lorentz_norm(decreasing_rearrangement(f), r, s);
}

double lorentz_norm(const HalfField& g, double r, double s) {
  return lorentz_norm(decreasing_rearrangement(g), r, s);
}

BoundaryField radial_symmetrize(const BoundaryField& f) {
  if (!f.grid) throw std::invalid_argument("radial_symmetrize: field has no grid");
  const BoundaryGrid& g = *f.grid;
  auto radius = [&](std::size_t i) { return g.node_radius(i); };
  auto target = by_radius(f.value.size(), radius);
  auto source = by_value(f.value, radius);

  BoundaryField out = make_field(g);
  for (std::size_t k = 0; k < target.size(); ++k) {
    out.value[target[k]] = f.value[source[k]];
  }
  return out;
}

HalfField slice_symmetrize(const HalfField& g) {
  if (!g.grid) throw std::invalid_argument("slice_symmetrize: field has no grid");
  const HalfGrid& grid = *g.grid;
  HalfField out = make_field(grid);

  // gather each height slice, symmetrize in the planar radius, scatter back
  int K = grid.height_count();
  std::vector<std::size_t> slice;
  std::vector<double> values;
  for (int k = 0; k < K; ++k) {
    slice.clear();
    values.clear();
    for (std::size_t i = 0; i < g.value.size(); ++i) {
      if (grid.height_index(i) == k) {
        slice.push_back(i);
        values.push_back(g.value[i]);
      }
    }
    auto radius = [&](std::size_t local) { return grid.node_radius(slice[local]); };
    auto target = by_radius(slice.size(), radius);
    auto source = by_value(values, radius);
    for (std::size_t j = 0; j < slice.size(); ++j) {
      out.value[slice[target[j]]] = values[source[j]];
    }
  }
  return out;
}

RieszCheck riesz_check(const BoundaryField& f, const HalfField& g,
                       const InequalityParams& ip, const KernelTable& table) {
  if (!f.grid || !g.grid) throw std::invalid_argument("riesz_check: field has no grid");
  check_nonnegative(f.value, "f");
  check_nonnegative(g.value, "g");
  OpParams op = OpParams::from(ip);
  if (op.alpha < 0.0 || op.beta < 0.0) {
    throw std::domain_error(
        "riesz_check: requires alpha >= 0 and beta >= 0; the rearrangement "
        "inequality is not asserted for negative weight exponents");
  }

  RieszCheck result;
  {
    HalfField vf = apply_V(f, *g.grid, op, table);
    result.j_before = weighted_inner(g, vf);
  }
  {
    BoundaryField fs = radial_symmetrize(f);
    HalfField gs = slice_symmetrize(g);
    HalfField vfs = apply_V(fs, *g.grid, op, table);
    result.j_after = weighted_inner(gs, vfs);
  }
  return result;
}

void write_profile_csv(const RearrangementProfile& profile, const std::string& path) {
  std::ostringstream os;
  os << "t,value\n";
  double cum = 0.0;
  for (const auto& s : profile.steps) {
    cum += s.measure;
    os << format_double(cum) << ',' << format_double(s.value) << '\n';
  }
  write_text_atomic(path, os.str());
}

}  // namespace swhs
