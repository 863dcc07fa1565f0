#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swhs/grid.hpp"
#include "swhs/params.hpp"

namespace swhs {

// Kernel P(x, y) = x_n^lambda / (|x' - y|^2 + x_n^2)^(mu/2) for x in the
// half space and y on its boundary.
struct KernelParams {
  double lambda = 0.0;
  double mu = 1.0;
};

// dist2 = |x' - y|^2, xn = x_n > 0
inline double kernel_value(double dist2, double xn, const KernelParams& kp) {
  double denom = std::pow(dist2 + xn * xn, 0.5 * kp.mu);
  double num = kp.lambda == 0.0 ? 1.0 : std::pow(xn, kp.lambda);
  return num / denom;
}

// x has n entries (x_n last, positive), y has n-1 entries.
double kernel_point(const double* x, const double* y, int n, const KernelParams& kp);

// Everything the quadrature operators need beyond the grids.
struct OpParams {
  int n = 3;
  double alpha = 0.0;
  double beta = 0.0;
  KernelParams kp;

  static OpParams from(const InequalityParams& ip);
  static OpParams from(const SystemParams& sp);
};

// Kernel samples between every half-space node column and boundary shell,
// reduced over the angular variable.
//
// Reduced mode stores the mean of the kernel over the relative angle between
// x' and y (Gauss-Legendre in theta with the sin^(n-3) weight, order
// spec.n_angular of the half grid). Full mode stores the kernel per relative
// angle index. Entries touching the diagonal (boundary shell inside the
// x-shell's radial cell and x_n within one cell width) are averaged over
// four subcell sample points to tame the near singularity.
class KernelTable {
 public:
  static KernelTable build(const BoundaryGrid& bg, const HalfGrid& hg, const KernelParams& kp);

  // Binary cache under dir, keyed by (n, lambda, mu, grid hashes). Corrupt
  // or mismatched files are ignored and rebuilt.
  static KernelTable build_or_load(const std::string& dir, const BoundaryGrid& bg,
                                   const HalfGrid& hg, const KernelParams& kp);

  bool full_mode() const { return A_ > 1; }
  // reduced access: mean kernel between half node (j,k) and boundary shell m
  double at(int j, int k, int m) const { return data_[(static_cast<std::size_t>(j) * K_ + k) * M_ * A_ + static_cast<std::size_t>(m) * A_]; }
  // full access: relative angle index a
  double at(int j, int k, int m, int a) const { return data_[(static_cast<std::size_t>(j) * K_ + k) * M_ * A_ + static_cast<std::size_t>(m) * A_ + a]; }
  const double* row(int j, int k) const { return data_.data() + (static_cast<std::size_t>(j) * K_ + k) * M_ * A_; }

  int radial_count() const { return J_; }
  int height_count() const { return K_; }
  int boundary_count() const { return M_; }
  int angle_count() const { return A_; }
  std::uint64_t key() const { return key_; }

  void save(const std::string& path) const;
  static std::optional<KernelTable> load(const std::string& path, std::uint64_t expected_key);

  static std::uint64_t cache_key(const BoundaryGrid& bg, const HalfGrid& hg,
                                 const KernelParams& kp);

 private:
  int J_ = 0, K_ = 0, M_ = 0, A_ = 1;
  std::uint64_t key_ = 0;
  std::vector<double> data_;
};

// V(f)(x) = |x|^-beta * int_boundary |y|^-alpha P(x,y) f(y) dy
HalfField apply_V(const BoundaryField& f, const HalfGrid& hg, const OpParams& op,
                  const KernelTable& table);
// W(g)(y) = |y|^-alpha * int_half |x|^-beta P(x,y) g(x) dx
BoundaryField apply_W(const HalfField& g, const BoundaryGrid& bg, const OpParams& op,
                      const KernelTable& table);

// convenience overloads that build the table on the fly
HalfField apply_V(const BoundaryField& f, const HalfGrid& hg, const OpParams& op);
BoundaryField apply_W(const HalfField& g, const BoundaryGrid& bg, const OpParams& op);

// Relative defect of <V f, g>_half = <f, W g>_boundary. Zero in exact
// arithmetic for any f, g because both sides associate the same double sum.
double duality_gap(const BoundaryField& f, const HalfField& g, const OpParams& op,
                   const KernelTable& table);

struct HardyReport {
  double A0 = 0.0;  // sup_R (int_{|x|>=R} W)^(1/q) (int_{|y|<=R} U^(1-p'))^(1/p')
  double A1 = 0.0;  // sup_R (int_{|x|<=R} W)^(1/q) (int_{|y|>=R} U^(1-p'))^(1/p')
  std::vector<double> radii;
  std::vector<double> a0_at;
  std::vector<double> a1_at;
};

// W and U are radial profiles (functions of |x| and |y|). The suprema are
// taken over the supplied radii only, so the values are lower bounds for the
// continuum suprema.
HardyReport hardy_conditions(const std::function<double(double)>& W,
                             const std::function<double(double)>& U, double p, double q,
                             const BoundaryGrid& bg, const HalfGrid& hg,
                             const std::vector<double>& radii);

struct SplitBounds {
  double p1 = 0.0;     // ||.||_q^q restricted to |y| <  |x|/2
  double p2 = 0.0;     //                         |y| >  2|x|
  double p3 = 0.0;     //                         annulus between
  double total = 0.0;  // unsplit ||V f||_q^q
};

// Region-restricted q-th power integrals of V(f); the three integrands sum
// to the unsplit one pointwise before the q-th power is taken.
SplitBounds split_bounds(const BoundaryField& f, const InequalityParams& ip,
                         const BoundaryGrid& bg, const HalfGrid& hg,
                         const KernelTable& table);

namespace detail {
// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);
}

}  // namespace swhs
