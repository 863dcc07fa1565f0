#include "swhs/operators.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "swhs/summation.hpp"

namespace swhs {

double kernel_point(const double* x, const double* y, int n, const KernelParams& kp) {
  if (!(x[n - 1] > 0.0)) {
    throw std::domain_error("kernel_point: x_n must be positive");
  }
  double d2 = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    double d = x[i] - y[i];
    d2 += d * d;
  }
  return kernel_value(d2, x[n - 1], kp);
}

OpParams OpParams::from(const InequalityParams& ip) {
  return OpParams{ip.n, to_double(ip.alpha), to_double(ip.beta),
                  {to_double(ip.lambda), to_double(ip.mu)}};
}

OpParams OpParams::from(const SystemParams& sp) {
  return OpParams{sp.n, to_double(sp.alpha), to_double(sp.beta),
                  {to_double(sp.lambda), to_double(sp.mu)}};
}

namespace detail {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_order(x) and its derivative
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

}  // namespace detail

namespace {

// |x' - y|^2 written to avoid cancellation when the points nearly coincide
inline double planar_dist2(double rx, double ry, double sin_half) {
  double d = rx - ry;
  return d * d + 4.0 * rx * ry * sin_half * sin_half;
}

struct AngularRule {
  std::vector<double> sin_half;  // sin(theta/2) at quadrature nodes
  std::vector<double> w;         // sin^(n-3)(theta) * GL weight, normalized
};

AngularRule make_angular_rule(int n, int order) {
  std::vector<double> t, gw;
  detail::gauss_legendre(order, t, gw);
  AngularRule rule;
  rule.sin_half.resize(order);
  rule.w.resize(order);
  double norm = 0.0;
  for (int i = 0; i < order; ++i) {
    double theta = std::numbers::pi * 0.5 * (t[i] + 1.0);
    rule.sin_half[i] = std::sin(0.5 * theta);
    double wt = gw[i] * std::pow(std::sin(theta), n - 3);
    rule.w[i] = wt;
    norm += wt;
  }
  for (double& wt : rule.w) wt /= norm;
  return rule;
}

double angular_mean(const AngularRule& rule, double rx, double ry, double h,
                    const KernelParams& kp) {
  NeumaierSum s;
  for (std::size_t i = 0; i < rule.w.size(); ++i)
    s.add(rule.w[i] * kernel_value(planar_dist2(rx, ry, rule.sin_half[i]), h, kp));
  return s.value();
}

}  // namespace

std::uint64_t KernelTable::cache_key(const BoundaryGrid& bg, const HalfGrid& hg,
                                     const KernelParams& kp) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(static_cast<std::uint64_t>(bg.spec.n));
  mix(std::bit_cast<std::uint64_t>(kp.lambda));
  mix(std::bit_cast<std::uint64_t>(kp.mu));
  mix(bg.content_hash());
  mix(hg.content_hash());
  return h;
}

KernelTable KernelTable::build(const BoundaryGrid& bg, const HalfGrid& hg,
                               const KernelParams& kp) {
  if (bg.spec.n != hg.spec.n)
    throw std::invalid_argument("KernelTable: grids disagree on dimension");
  const bool full = hg.spec.mode == GridMode::Full || bg.spec.mode == GridMode::Full;
  if (full && (hg.spec.mode != GridMode::Full || bg.spec.mode != GridMode::Full ||
               bg.spec.n_angular != hg.spec.n_angular))
    throw std::invalid_argument("KernelTable: full mode needs matching full grids");

  KernelTable t;
  t.J_ = hg.radial_count();
  t.K_ = hg.height_count();
  t.M_ = bg.radial_count();
  t.A_ = full ? hg.spec.n_angular : 1;
  t.key_ = cache_key(bg, hg, kp);
  t.data_.resize(static_cast<std::size_t>(t.J_) * t.K_ * t.M_ * t.A_);

  AngularRule rule;
  if (!full) rule = make_angular_rule(bg.spec.n, hg.spec.n_angular);

  // relative-angle geometry for full mode
  std::vector<double> sin_half_full(t.A_);
  for (int a = 0; a < t.A_; ++a)
    sin_half_full[a] = std::abs(std::sin(std::numbers::pi * a / t.A_));

  for (int j = 0; j < t.J_; ++j) {
    const double rx = hg.shell_r[j];
    const double cell_lo = hg.shell_edges[j], cell_hi = hg.shell_edges[j + 1];
    const double cell_w = cell_hi - cell_lo;
    for (int k = 0; k < t.K_; ++k) {
      const double h = hg.height[k];
      double* out = t.data_.data() + (static_cast<std::size_t>(j) * t.K_ + k) * t.M_ * t.A_;
      for (int m = 0; m < t.M_; ++m) {
        const double ry = bg.shell_r[m];
        // near-diagonal: boundary shell inside this radial cell while x_n is
        // no larger than the cell width; average over one subcell refinement
        const bool near = ry >= cell_lo && ry <= cell_hi && h <= cell_w;
        double sub_r[2] = {rx, rx}, sub_h[2] = {h, h}, sub_wr[2] = {1.0, 0.0},
               sub_wh[2] = {1.0, 0.0};
        int nr = 1, nh = 1;
        if (near) {
          // geometric quarter points of the x cell in both directions,
          // weighted by the exact submeasures
          const double rm = std::sqrt(cell_lo * cell_hi);
          sub_r[0] = std::sqrt(cell_lo * rm);
          sub_r[1] = std::sqrt(rm * cell_hi);
          const int d = hg.spec.n - 1;
          const double m_lo = std::pow(rm, d) - std::pow(cell_lo, d);
          const double m_hi = std::pow(cell_hi, d) - std::pow(rm, d);
          sub_wr[0] = m_lo / (m_lo + m_hi);
          sub_wr[1] = m_hi / (m_lo + m_hi);
          nr = 2;
          const double h_lo = hg.height_edges[k], h_hi = hg.height_edges[k + 1];
          const double hm = std::sqrt(h_lo * h_hi);
          sub_h[0] = std::sqrt(h_lo * hm);
          sub_h[1] = std::sqrt(hm * h_hi);
          sub_wh[0] = (hm - h_lo) / (h_hi - h_lo);
          sub_wh[1] = (h_hi - hm) / (h_hi - h_lo);
          nh = 2;
        }
        if (!full) {
          double acc = 0.0;
          for (int ir = 0; ir < nr; ++ir)
            for (int ih = 0; ih < nh; ++ih)
              acc += sub_wr[ir] * sub_wh[ih] * angular_mean(rule, sub_r[ir], ry, sub_h[ih], kp);
          out[m] = acc;
        } else {
          for (int a = 0; a < t.A_; ++a) {
            double acc = 0.0;
            for (int ir = 0; ir < nr; ++ir)
              for (int ih = 0; ih < nh; ++ih)
                acc += sub_wr[ir] * sub_wh[ih] *
                       kernel_value(planar_dist2(sub_r[ir], ry, sin_half_full[a]),
                                    sub_h[ih], kp);
            out[m * t.A_ + a] = acc;
          }
        }
      }
    }
  }
  return t;
}

void KernelTable::save(const std::string& path) const {
  std::ofstream out(path + ".tmp", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write kernel cache: " + path);
  const char magic[8] = {'S', 'W', 'H', 'S', 'K', 'T', '0', '1'};
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&key_), sizeof key_);
  int dims[4] = {J_, K_, M_, A_};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  std::uint64_t count = data_.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(data_.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  out.flush();
  if (!out) throw std::runtime_error("kernel cache write failed: " + path);
  out.close();
  if (std::rename((path + ".tmp").c_str(), path.c_str()) != 0)
    throw std::runtime_error("kernel cache rename failed: " + path);
}

std::optional<KernelTable> KernelTable::load(const std::string& path,
                                             std::uint64_t expected_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, "SWHSKT01", 8) != 0) return std::nullopt;
  KernelTable t;
  int dims[4];
  std::uint64_t count = 0;
  if (!in.read(reinterpret_cast<char*>(&t.key_), sizeof t.key_)) return std::nullopt;
  if (t.key_ != expected_key) return std::nullopt;
  if (!in.read(reinterpret_cast<char*>(dims), sizeof dims)) return std::nullopt;
  t.J_ = dims[0];
  t.K_ = dims[1];
  t.M_ = dims[2];
  t.A_ = dims[3];
  if (!in.read(reinterpret_cast<char*>(&count), sizeof count)) return std::nullopt;
  if (t.J_ < 1 || t.K_ < 1 || t.M_ < 1 || t.A_ < 1 ||
      count != static_cast<std::uint64_t>(t.J_) * t.K_ * t.M_ * t.A_)
    return std::nullopt;
  t.data_.resize(count);
  if (!in.read(reinterpret_cast<char*>(t.data_.data()),
               static_cast<std::streamsize>(count * sizeof(double))))
    return std::nullopt;
  return t;
}

KernelTable KernelTable::build_or_load(const std::string& dir, const BoundaryGrid& bg,
                                       const HalfGrid& hg, const KernelParams& kp) {
  const std::uint64_t key = cache_key(bg, hg, kp);
  char name[64];
  std::snprintf(name, sizeof name, "kernel_%016llx.bin",
                static_cast<unsigned long long>(key));
  const std::string path = dir + "/" + name;
  if (auto cached = load(path, key)) return std::move(*cached);
  KernelTable t = build(bg, hg, kp);
  try {
    std::filesystem::create_directories(dir);
    t.save(path);
  } catch (const std::exception&) {
    // cache persistence is best effort; the freshly built table is valid
  }
  return t;
}

namespace {

void check_table(const KernelTable& t, const BoundaryGrid& bg, const HalfGrid& hg) {
  if (t.boundary_count() != bg.radial_count() || t.radial_count() != hg.radial_count() ||
      t.height_count() != hg.height_count() ||
      t.angle_count() != (hg.spec.mode == GridMode::Full ? hg.spec.n_angular : 1))
    throw std::invalid_argument("kernel table does not match the supplied grids");
}

std::vector<double> boundary_source(const BoundaryField& f, double alpha) {
  const BoundaryGrid& bg = *f.grid;
  std::vector<double> pre(bg.size());
  for (std::size_t i = 0; i < bg.size(); ++i) {
    double r = bg.node_radius(i);
    double w = alpha == 0.0 ? 1.0 : std::pow(r, -alpha);
    pre[i] = bg.weight[i] * w * f.value[i];
  }
  return pre;
}

std::vector<double> half_source(const HalfField& g, double beta) {
  const HalfGrid& hg = *g.grid;
  std::vector<double> pre(hg.size());
  for (std::size_t i = 0; i < hg.size(); ++i) {
    double r = hg.node_radius(i), h = hg.node_height(i);
    double absx = std::hypot(r, h);
    double w = beta == 0.0 ? 1.0 : std::pow(absx, -beta);
    pre[i] = hg.weight[i] * w * g.value[i];
  }
  return pre;
}

// (a - b) mod A lookup; the kernel depends on the relative angle through its
// cosine, so the table is even in it and either difference order indexes the
// same value
std::vector<int> rel_angle_index(int A) {
  std::vector<int> rel(static_cast<std::size_t>(A) * A);
  for (int a = 0; a < A; ++a)
    for (int b = 0; b < A; ++b) rel[static_cast<std::size_t>(a) * A + b] = ((a - b) % A + A) % A;
  return rel;
}

}  // namespace

HalfField apply_V(const BoundaryField& f, const HalfGrid& hg, const OpParams& op,
                  const KernelTable& table) {
  if (!f.grid) throw std::invalid_argument("apply_V: field has no grid");
  const BoundaryGrid& bg = *f.grid;
  check_table(table, bg, hg);
  HalfField out = make_field(hg);
  const int J = table.radial_count(), K = table.height_count(), M = table.boundary_count(),
            A = table.angle_count();
  std::vector<double> pre = boundary_source(f, op.alpha);

  if (A == 1) {
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) {
        const double* row = table.row(j, k);
        NeumaierSum s;
        for (int m = 0; m < M; ++m) s.add(pre[m] * row[m]);
        double absx = std::hypot(hg.shell_r[j], hg.height[k]);
        double wfac = op.beta == 0.0 ? 1.0 : std::pow(absx, -op.beta);
        out.value[hg.node_index(j, 0, k)] = wfac * s.value();
      }
    return out;
  }

  const std::vector<int> rel = rel_angle_index(A);
  std::vector<NeumaierSum> acc(A);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < K; ++k) {
      const double* row = table.row(j, k);
      for (auto& s : acc) s = NeumaierSum{};
      for (int m = 0; m < M; ++m) {
        const double* kr = row + static_cast<std::size_t>(m) * A;
        for (int b = 0; b < A; ++b) {
          const double c = pre[bg.node_index(m, b)];
          if (c == 0.0) continue;
          const int* rb = rel.data() + static_cast<std::size_t>(b) * A;  // (b - a) row
          for (int a = 0; a < A; ++a) acc[a].add(c * kr[rb[a]]);
        }
      }
      double absx = std::hypot(hg.shell_r[j], hg.height[k]);
      double wfac = op.beta == 0.0 ? 1.0 : std::pow(absx, -op.beta);
      for (int a = 0; a < A; ++a) out.value[hg.node_index(j, a, k)] = wfac * acc[a].value();
    }
  return out;
}

BoundaryField apply_W(const HalfField& g, const BoundaryGrid& bg, const OpParams& op,
                      const KernelTable& table) {
  if (!g.grid) throw std::invalid_argument("apply_W: field has no grid");
  const HalfGrid& hg = *g.grid;
  check_table(table, bg, hg);
  BoundaryField out = make_field(bg);
  const int J = table.radial_count(), K = table.height_count(), M = table.boundary_count(),
            A = table.angle_count();
  std::vector<double> pre = half_source(g, op.beta);

  if (A == 1) {
    for (int m = 0; m < M; ++m) {
      NeumaierSum s;
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
          s.add(pre[hg.node_index(j, 0, k)] * table.at(j, k, m));
      double wfac = op.alpha == 0.0 ? 1.0 : std::pow(bg.shell_r[m], -op.alpha);
      out.value[m] = wfac * s.value();
    }
    return out;
  }

  const std::vector<int> rel = rel_angle_index(A);
  std::vector<NeumaierSum> acc(A);
  for (int m = 0; m < M; ++m) {
    for (auto& s : acc) s = NeumaierSum{};
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) {
        const double* kr = table.row(j, k) + static_cast<std::size_t>(m) * A;
        for (int a = 0; a < A; ++a) {
          const double c = pre[hg.node_index(j, a, k)];
          if (c == 0.0) continue;
          const int* ra = rel.data() + static_cast<std::size_t>(a) * A;  // (a - b) row
          for (int b = 0; b < A; ++b) acc[b].add(c * kr[ra[b]]);
        }
      }
    double wfac = op.alpha == 0.0 ? 1.0 : std::pow(bg.shell_r[m], -op.alpha);
    for (int b = 0; b < A; ++b) out.value[bg.node_index(m, b)] = wfac * acc[b].value();
  }
  return out;
}

HalfField apply_V(const BoundaryField& f, const HalfGrid& hg, const OpParams& op) {
  KernelTable t = KernelTable::build(*f.grid, hg, op.kp);
  return apply_V(f, hg, op, t);
}

BoundaryField apply_W(const HalfField& g, const BoundaryGrid& bg, const OpParams& op) {
  KernelTable t = KernelTable::build(bg, *g.grid, op.kp);
  return apply_W(g, bg, op, t);
}

double duality_gap(const BoundaryField& f, const HalfField& g, const OpParams& op,
                   const KernelTable& table) {
  HalfField vf = apply_V(f, *g.grid, op, table);
  BoundaryField wg = apply_W(g, *f.grid, op, table);
  double lhs = weighted_inner(vf, g);
  double rhs = weighted_inner(f, wg);
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return std::abs(lhs - rhs) / scale;
}

HardyReport hardy_conditions(const std::function<double(double)>& W,
                             const std::function<double(double)>& U, double p, double q,
                             const BoundaryGrid& bg, const HalfGrid& hg,
                             const std::vector<double>& radii) {
  if (!(p > 1.0)) throw std::invalid_argument("hardy_conditions: p must exceed 1");
  if (!(q > 0.0)) throw std::invalid_argument("hardy_conditions: q must be positive");
  const double p_conj = p / (p - 1.0);

  // radial samples once, then reuse per cutoff
  std::vector<double> absx(hg.size()), wvals(hg.size());
  for (std::size_t i = 0; i < hg.size(); ++i) {
    absx[i] = std::hypot(hg.node_radius(i), hg.node_height(i));
    wvals[i] = W(absx[i]);
  }
  std::vector<double> uvals(bg.size());
  for (std::size_t i = 0; i < bg.size(); ++i)
    uvals[i] = std::pow(U(bg.node_radius(i)), 1.0 - p_conj);

  HardyReport rep;
  rep.radii = radii;
  rep.a0_at.resize(radii.size());
  rep.a1_at.resize(radii.size());
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double R = radii[ri];
    NeumaierSum w_tail, w_head, u_tail, u_head;
    for (std::size_t i = 0; i < hg.size(); ++i)
      (absx[i] >= R ? w_tail : w_head).add(hg.weight[i] * wvals[i]);
    for (std::size_t i = 0; i < bg.size(); ++i)
      (bg.node_radius(i) <= R ? u_head : u_tail).add(bg.weight[i] * uvals[i]);
    rep.a0_at[ri] = std::pow(w_tail.value(), 1.0 / q) * std::pow(u_head.value(), 1.0 / p_conj);
    rep.a1_at[ri] = std::pow(w_head.value(), 1.0 / q) * std::pow(u_tail.value(), 1.0 / p_conj);
    rep.A0 = std::max(rep.A0, rep.a0_at[ri]);
    rep.A1 = std::max(rep.A1, rep.a1_at[ri]);
  }
  return rep;
}

SplitBounds split_bounds(const BoundaryField& f, const InequalityParams& ip,
                         const BoundaryGrid& bg, const HalfGrid& hg,
                         const KernelTable& table) {
  auto qopt = ip.q();
  if (!qopt) throw std::domain_error("split_bounds: derived q is not positive");
  const double q = to_double(*qopt);
  const OpParams op = OpParams::from(ip);
  check_table(table, bg, hg);
  const int J = table.radial_count(), K = table.height_count(), M = table.boundary_count(),
            A = table.angle_count();
  std::vector<double> pre = boundary_source(f, op.alpha);
  const std::vector<int> rel = A > 1 ? rel_angle_index(A) : std::vector<int>{};

  SplitBounds sb;
  NeumaierSum P1, P2, P3, tot;
  std::vector<NeumaierSum> acc1(A), acc2(A), acc3(A);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < K; ++k) {
      const double absx = std::hypot(hg.shell_r[j], hg.height[k]);
      const double wfac = op.beta == 0.0 ? 1.0 : std::pow(absx, -op.beta);
      const double* row = table.row(j, k);
      for (auto* v : {&acc1, &acc2, &acc3})
        for (auto& s : *v) s = NeumaierSum{};
      for (int m = 0; m < M; ++m) {
        const double ry = bg.shell_r[m];
        auto& acc = ry < 0.5 * absx ? acc1 : (ry > 2.0 * absx ? acc2 : acc3);
        if (A == 1) {
          acc[0].add(pre[m] * row[m]);
        } else {
          const double* kr = row + static_cast<std::size_t>(m) * A;
          for (int b = 0; b < A; ++b) {
            const double c = pre[bg.node_index(m, b)];
            if (c == 0.0) continue;
            const int* rb = rel.data() + static_cast<std::size_t>(b) * A;
            for (int a = 0; a < A; ++a) acc[a].add(c * kr[rb[a]]);
          }
        }
      }
      for (int a = 0; a < A; ++a) {
        const double w = hg.weight[hg.node_index(j, a, k)];
        const double v1 = wfac * acc1[a].value(), v2 = wfac * acc2[a].value(),
                     v3 = wfac * acc3[a].value();
        P1.add(w * std::pow(std::abs(v1), q));
        P2.add(w * std::pow(std::abs(v2), q));
        P3.add(w * std::pow(std::abs(v3), q));
        tot.add(w * std::pow(std::abs(v1 + v2 + v3), q));
      }
    }
  sb.p1 = P1.value();
  sb.p2 = P2.value();
  sb.p3 = P3.value();
  sb.total = tot.value();
  return sb;
}

}  // namespace swhs
