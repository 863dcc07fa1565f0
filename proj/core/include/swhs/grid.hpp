#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace swhs {

enum class Spacing { Geometric, Uniform, EqualMeasure };
enum class GridMode { Reduced, Full };

// Truncated, origin-avoiding quadrature layout. Radial nodes live on
// [r_min, r_max]; the half-space grid also carries x_n nodes on the same
// interval, so no node ever touches the weight singularity at the origin or
// the kernel degeneracy at x_n = 0.
//
// Reduced mode stores one node per radial shell (axisymmetric fields) and
// works for any n >= 3. Full mode adds explicit angular nodes and is
// implemented for n = 3 (polar boundary, cylindrical half space).
struct GridSpec {
  int n = 3;
  double r_min = 1e-3;
  double r_max = 1e3;
  int n_radial = 64;
  int n_height = 64;
  int n_angular = 16;
  Spacing spacing = Spacing::Geometric;
  GridMode mode = GridMode::Reduced;

  void check() const;  // throws std::invalid_argument
};

// Surface measure of the unit sphere S^{d-1} in R^d.
double unit_sphere_area(int d);

namespace detail {
// Radial cells partition [r_min, r_max]; node k sits inside cell k and its
// weight carries the exact shell measure of the cell, so integrating the
// constant 1 reproduces the annulus measure to round-off. Cell boundaries
// are spacing midpoints (half cells at the ends, trapezoid layout).
struct RadialLayout {
  std::vector<double> node;   // n_radial nodes, ascending
  std::vector<double> edge;   // n_radial + 1 cell edges
  std::vector<double> shell;  // exact measure of sigma * r^{dim-1} dr per cell
};
RadialLayout radial_layout(const GridSpec& spec, int dim);
}  // namespace detail

struct BoundaryGrid {
  GridSpec spec;
  // distinct shells, ascending
  std::vector<double> shell_r;
  std::vector<double> shell_edges;   // size n_radial + 1
  std::vector<double> shell_weight;  // full shell measure on the boundary
  std::vector<double> angle;         // full mode only, size n_angular
  std::vector<double> weight;        // per node

  std::size_t size() const { return weight.size(); }
  int radial_count() const { return static_cast<int>(shell_r.size()); }
  int angular_count() const { return spec.mode == GridMode::Full ? spec.n_angular : 1; }

  std::size_t node_index(int k, int m) const {
    return static_cast<std::size_t>(k) * angular_count() + m;
  }
  int radial_index(std::size_t i) const { return static_cast<int>(i / angular_count()); }
  int angular_index(std::size_t i) const { return static_cast<int>(i % angular_count()); }
  double node_radius(std::size_t i) const { return shell_r[radial_index(i)]; }
  double node_angle(std::size_t i) const {
    return spec.mode == GridMode::Full ? angle[angular_index(i)] : 0.0;
  }
  // boundary point as (y_1, y_2) for n = 3 full mode
  std::array<double, 2> point2(std::size_t i) const;

  double total_measure() const;
  double analytic_measure() const;
  std::uint64_t content_hash() const;
};

struct HalfGrid {
  GridSpec spec;
  std::vector<double> shell_r;       // |x'| shells, ascending
  std::vector<double> shell_edges;
  std::vector<double> shell_weight;  // measure of the x' shell (R^{n-1})
  std::vector<double> height;        // x_n nodes, ascending
  std::vector<double> height_edges;
  std::vector<double> height_weight; // plain length measure of each x_n cell
  std::vector<double> angle;         // full mode only
  std::vector<double> weight;        // per node

  std::size_t size() const { return weight.size(); }
  int radial_count() const { return static_cast<int>(shell_r.size()); }
  int height_count() const { return static_cast<int>(height.size()); }
  int angular_count() const { return spec.mode == GridMode::Full ? spec.n_angular : 1; }

  // layout: ((j * n_angular + m) * n_height + k) in full mode,
  //          (j * n_height + k) in reduced mode
  std::size_t node_index(int j, int m, int k) const {
    return (static_cast<std::size_t>(j) * angular_count() + m) * height_count() + k;
  }
  int height_index(std::size_t i) const { return static_cast<int>(i % height_count()); }
  int angular_index(std::size_t i) const {
    return static_cast<int>((i / height_count()) % angular_count());
  }
  int radial_index(std::size_t i) const {
    return static_cast<int>(i / (static_cast<std::size_t>(height_count()) * angular_count()));
  }
  double node_radius(std::size_t i) const { return shell_r[radial_index(i)]; }
  double node_height(std::size_t i) const { return height[height_index(i)]; }
  double node_angle(std::size_t i) const {
    return spec.mode == GridMode::Full ? angle[angular_index(i)] : 0.0;
  }
  // half-space point as (x_1, x_2, x_3 = x_n) for n = 3 full mode
  std::array<double, 3> point3(std::size_t i) const;

  double total_measure() const;
  double analytic_measure() const;
  std::uint64_t content_hash() const;
};

BoundaryGrid build_boundary_grid(const GridSpec& spec);
HalfGrid build_half_grid(const GridSpec& spec);

struct BoundaryField {
  const BoundaryGrid* grid = nullptr;
  std::vector<double> value;
};

struct HalfField {
  const HalfGrid* grid = nullptr;
  std::vector<double> value;
};

BoundaryField make_field(const BoundaryGrid& g, double fill = 0.0);
HalfField make_field(const HalfGrid& g, double fill = 0.0);

// Compensated weighted sums. Field/grid mismatch raises std::invalid_argument.
double integrate(const BoundaryField& f);
double integrate(const HalfField& f);
// sum of w_i a_i b_i over the owning grid (both fields must share it)
double weighted_inner(const BoundaryField& a, const BoundaryField& b);
double weighted_inner(const HalfField& a, const HalfField& b);

double sup_abs(const std::vector<double>& v);

// Two-column "node_id,value" CSV; ids must be exactly 0..N-1 (any order).
void write_field_csv(const std::string& path, const std::vector<double>& values);
std::vector<double> read_field_csv(const std::string& path);

// Grid manifests list node_id, coordinates and weight per node.
void write_grid_manifest(const std::string& path, const BoundaryGrid& g);
void write_grid_manifest(const std::string& path, const HalfGrid& g);

}  // namespace swhs
