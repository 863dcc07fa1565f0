#include "swhs/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "swhs/report.hpp"
#include "swhs/summation.hpp"

namespace swhs {

double unit_sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("unit_sphere_area: d must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

void GridSpec::check() const {
  if (n < 3) throw std::invalid_argument("GridSpec: n must be >= 3");
  if (!(r_min > 0.0)) throw std::invalid_argument("GridSpec: r_min must be positive");
  if (!(r_min < r_max)) throw std::invalid_argument("GridSpec: r_min must be < r_max");
  if (n_radial < 2 || n_height < 2 || n_angular < 2)
    throw std::invalid_argument("GridSpec: node counts must be >= 2");
  if (mode == GridMode::Full && n != 3)
    throw std::invalid_argument("GridSpec: full mode is implemented for n = 3 only");
  if (mode == GridMode::Full && n_angular < 4)
    throw std::invalid_argument("GridSpec: full mode needs n_angular >= 4");
}

namespace detail {

RadialLayout radial_layout(const GridSpec& spec, int dim) {
  const int K = spec.n_radial;
  RadialLayout lay;
  lay.node.resize(K);
  lay.edge.resize(K + 1);

  const double s0 = std::log(spec.r_min), s1 = std::log(spec.r_max);
  switch (spec.spacing) {
    case Spacing::Geometric:
      for (int k = 0; k < K; ++k)
        lay.node[k] = std::exp(s0 + (s1 - s0) * k / (K - 1));
      lay.node.front() = spec.r_min;
      lay.node.back() = spec.r_max;
      for (int k = 1; k < K; ++k) lay.edge[k] = std::sqrt(lay.node[k - 1] * lay.node[k]);
      break;
    case Spacing::Uniform:
      for (int k = 0; k < K; ++k)
        lay.node[k] = spec.r_min + (spec.r_max - spec.r_min) * k / (K - 1);
      for (int k = 1; k < K; ++k) lay.edge[k] = 0.5 * (lay.node[k - 1] + lay.node[k]);
      break;
    case Spacing::EqualMeasure: {
      // cell edges split [r_min, r_max] into K cells of identical shell
      // measure; nodes sit at the measure centroid of their cell
      const double mlo = std::pow(spec.r_min, dim), mhi = std::pow(spec.r_max, dim);
      for (int k = 0; k <= K; ++k)
        lay.edge[k] = std::pow(mlo + (mhi - mlo) * k / K, 1.0 / dim);
      for (int k = 0; k < K; ++k) {
        const double a = lay.edge[k], b = lay.edge[k + 1];
        lay.node[k] = dim / (dim + 1.0) *
                      (std::pow(b, dim + 1) - std::pow(a, dim + 1)) /
                      (std::pow(b, dim) - std::pow(a, dim));
      }
      break;
    }
  }
  lay.edge.front() = spec.r_min;
  lay.edge.back() = spec.r_max;

  const double sigma = unit_sphere_area(dim);
  lay.shell.resize(K);
  for (int k = 0; k < K; ++k)
    lay.shell[k] = sigma / dim * (std::pow(lay.edge[k + 1], dim) - std::pow(lay.edge[k], dim));
  return lay;
}

struct LineLayout {
  std::vector<double> node, edge, length;
};

// x_n direction: geometric unless the spec asks for uniform nodes
LineLayout line_layout(const GridSpec& spec) {
  const int K = spec.n_height;
  LineLayout lay;
  lay.node.resize(K);
  lay.edge.resize(K + 1);
  if (spec.spacing == Spacing::Uniform) {
    for (int k = 0; k < K; ++k)
      lay.node[k] = spec.r_min + (spec.r_max - spec.r_min) * k / (K - 1);
    for (int k = 1; k < K; ++k) lay.edge[k] = 0.5 * (lay.node[k - 1] + lay.node[k]);
  } else {
    const double s0 = std::log(spec.r_min), s1 = std::log(spec.r_max);
    for (int k = 0; k < K; ++k) lay.node[k] = std::exp(s0 + (s1 - s0) * k / (K - 1));
    lay.node.front() = spec.r_min;
    lay.node.back() = spec.r_max;
    for (int k = 1; k < K; ++k) lay.edge[k] = std::sqrt(lay.node[k - 1] * lay.node[k]);
  }
  lay.edge.front() = spec.r_min;
  lay.edge.back() = spec.r_max;
  lay.length.resize(K);
  for (int k = 0; k < K; ++k) lay.length[k] = lay.edge[k + 1] - lay.edge[k];
  return lay;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_doubles(std::uint64_t h, const std::vector<double>& v) {
  for (double x : v) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    h = fnv1a(h, &bits, sizeof bits);
  }
  return h;
}

std::uint64_t hash_spec(std::uint64_t h, const GridSpec& s) {
  int ints[6] = {s.n, s.n_radial, s.n_height, s.n_angular,
                 static_cast<int>(s.spacing), static_cast<int>(s.mode)};
  h = fnv1a(h, ints, sizeof ints);
  double reals[2] = {s.r_min, s.r_max};
  h = fnv1a(h, reals, sizeof reals);
  return h;
}

std::vector<double> uniform_angles(int count) {
  std::vector<double> a(count);
  for (int m = 0; m < count; ++m) a[m] = 2.0 * std::numbers::pi * m / count;
  return a;
}

}  // namespace detail

BoundaryGrid build_boundary_grid(const GridSpec& spec) {
  spec.check();
  BoundaryGrid g;
  g.spec = spec;
  auto lay = detail::radial_layout(spec, spec.n - 1);
  g.shell_r = std::move(lay.node);
  g.shell_edges = std::move(lay.edge);
  g.shell_weight = std::move(lay.shell);

  if (spec.mode == GridMode::Reduced) {
    g.weight = g.shell_weight;
  } else {
    g.angle = detail::uniform_angles(spec.n_angular);
    g.weight.resize(static_cast<std::size_t>(spec.n_radial) * spec.n_angular);
    for (int k = 0; k < spec.n_radial; ++k)
      for (int m = 0; m < spec.n_angular; ++m)
        g.weight[g.node_index(k, m)] = g.shell_weight[k] / spec.n_angular;
  }
  return g;
}

HalfGrid build_half_grid(const GridSpec& spec) {
  spec.check();
  HalfGrid g;
  g.spec = spec;
  auto rad = detail::radial_layout(spec, spec.n - 1);
  g.shell_r = std::move(rad.node);
  g.shell_edges = std::move(rad.edge);
  g.shell_weight = std::move(rad.shell);
  auto lin = detail::line_layout(spec);
  g.height = std::move(lin.node);
  g.height_edges = std::move(lin.edge);
  g.height_weight = std::move(lin.length);

  const int J = spec.n_radial, K = spec.n_height;
  if (spec.mode == GridMode::Reduced) {
    g.weight.resize(static_cast<std::size_t>(J) * K);
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k)
        g.weight[g.node_index(j, 0, k)] = g.shell_weight[j] * g.height_weight[k];
  } else {
    g.angle = detail::uniform_angles(spec.n_angular);
    g.weight.resize(static_cast<std::size_t>(J) * spec.n_angular * K);
    for (int j = 0; j < J; ++j)
      for (int m = 0; m < spec.n_angular; ++m)
        for (int k = 0; k < K; ++k)
          g.weight[g.node_index(j, m, k)] =
              g.shell_weight[j] / spec.n_angular * g.height_weight[k];
  }
  return g;
}

std::array<double, 2> BoundaryGrid::point2(std::size_t i) const {
  const double r = node_radius(i), phi = node_angle(i);
  return {r * std::cos(phi), r * std::sin(phi)};
}

std::array<double, 3> HalfGrid::point3(std::size_t i) const {
  const double r = node_radius(i), phi = node_angle(i);
  return {r * std::cos(phi), r * std::sin(phi), node_height(i)};
}

double BoundaryGrid::total_measure() const {
  NeumaierSum s;
  for (double w : weight) s.add(w);
  return s.value();
}

double BoundaryGrid::analytic_measure() const {
  const int d = spec.n - 1;
  return unit_sphere_area(d) / d * (std::pow(spec.r_max, d) - std::pow(spec.r_min, d));
}

double HalfGrid::total_measure() const {
  NeumaierSum s;
  for (double w : weight) s.add(w);
  return s.value();
}

double HalfGrid::analytic_measure() const {
  const int d = spec.n - 1;
  return unit_sphere_area(d) / d * (std::pow(spec.r_max, d) - std::pow(spec.r_min, d)) *
         (spec.r_max - spec.r_min);
}

std::uint64_t BoundaryGrid::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = detail::fnv1a(h, "boundary", 8);
  h = detail::hash_spec(h, spec);
  h = detail::hash_doubles(h, shell_r);
  h = detail::hash_doubles(h, angle);
  h = detail::hash_doubles(h, weight);
  return h;
}

std::uint64_t HalfGrid::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = detail::fnv1a(h, "halfgrid", 8);
  h = detail::hash_spec(h, spec);
  h = detail::hash_doubles(h, shell_r);
  h = detail::hash_doubles(h, height);
  h = detail::hash_doubles(h, angle);
  h = detail::hash_doubles(h, weight);
  return h;
}

BoundaryField make_field(const BoundaryGrid& g, double fill) {
  return BoundaryField{&g, std::vector<double>(g.size(), fill)};
}

HalfField make_field(const HalfGrid& g, double fill) {
  return HalfField{&g, std::vector<double>(g.size(), fill)};
}

namespace {

template <class Field>
void check_field(const Field& f) {
  if (!f.grid) throw std::invalid_argument("field has no grid");
  if (f.value.size() != f.grid->size())
    throw std::invalid_argument("field/grid size mismatch");
}

template <class Field>
double integrate_impl(const Field& f) {
  check_field(f);
  NeumaierSum s;
  for (std::size_t i = 0; i < f.value.size(); ++i) s.add(f.grid->weight[i] * f.value[i]);
  return s.value();
}

template <class Field>
double inner_impl(const Field& a, const Field& b) {
  check_field(a);
  check_field(b);
  if (a.grid != b.grid) throw std::invalid_argument("fields on different grids");
  NeumaierSum s;
  for (std::size_t i = 0; i < a.value.size(); ++i)
    s.add(a.grid->weight[i] * a.value[i] * b.value[i]);
  return s.value();
}

}  // namespace

double integrate(const BoundaryField& f) { return integrate_impl(f); }
double integrate(const HalfField& f) { return integrate_impl(f); }
double weighted_inner(const BoundaryField& a, const BoundaryField& b) { return inner_impl(a, b); }
double weighted_inner(const HalfField& a, const HalfField& b) { return inner_impl(a, b); }

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void write_field_csv(const std::string& path, const std::vector<double>& values) {
  std::string out = "node_id,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(values[i]);
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<double> read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field CSV: " + path);
  std::string line;
  std::vector<std::pair<std::size_t, double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("node_id", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed field CSV line: " + line);
    std::size_t id = 0;
    try {
      id = std::stoull(line.substr(0, comma));
    } catch (const std::exception&) {
      throw std::runtime_error("malformed node id in: " + line);
    }
    char* end = nullptr;
    const std::string vs = line.substr(comma + 1);
    double v = std::strtod(vs.c_str(), &end);
    if (end == vs.c_str() || !std::isfinite(v))
      throw std::runtime_error("malformed or non-finite value in: " + line);
    rows.emplace_back(id, v);
  }
  std::vector<double> values(rows.size());
  std::vector<char> seen(rows.size(), 0);
  for (auto& [id, v] : rows) {
    if (id >= values.size() || seen[id])
      throw std::runtime_error("field CSV ids must cover 0..N-1 exactly once");
    seen[id] = 1;
    values[id] = v;
  }
  return values;
}

void write_grid_manifest(const std::string& path, const BoundaryGrid& g) {
  std::string out;
  if (g.spec.mode == GridMode::Reduced) {
    out = "node_id,r,weight\n";
    for (std::size_t i = 0; i < g.size(); ++i)
      out += std::to_string(i) + ',' + format_double(g.node_radius(i)) + ',' +
             format_double(g.weight[i]) + '\n';
  } else {
    out = "node_id,y1,y2,weight\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto pt = g.point2(i);
      out += std::to_string(i) + ',' + format_double(pt[0]) + ',' + format_double(pt[1]) +
             ',' + format_double(g.weight[i]) + '\n';
    }
  }
  write_text_atomic(path, out);
}

void write_grid_manifest(const std::string& path, const HalfGrid& g) {
  std::string out;
  if (g.spec.mode == GridMode::Reduced) {
    out = "node_id,r,xn,weight\n";
    for (std::size_t i = 0; i < g.size(); ++i)
      out += std::to_string(i) + ',' + format_double(g.node_radius(i)) + ',' +
             format_double(g.node_height(i)) + ',' + format_double(g.weight[i]) + '\n';
  } else {
    out = "node_id,x1,x2,x3,weight\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto pt = g.point3(i);
      out += std::to_string(i) + ',' + format_double(pt[0]) + ',' + format_double(pt[1]) +
             ',' + format_double(pt[2]) + ',' + format_double(g.weight[i]) + '\n';
    }
  }
  write_text_atomic(path, out);
}

}  // namespace swhs
