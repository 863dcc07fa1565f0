#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "swhs/grid.hpp"
#include "swhs/operators.hpp"

namespace swhs {

/// Reflection hyperplane {point_axis = tau} in a tangential coordinate.
/// The normal direction x_n is never reflected; axis is 1-based and must
/// stay in {1, ..., n-1}.
struct ReflectionSpec {
    int axis = 1;
    double tau = 0.0;

    void check(int n) const;  // throws std::invalid_argument
};

/// Interpolated point samples of gridded fields, used by every operation
/// that needs a field value away from its own nodes. Interpolation is
/// bilinear in (log r, angle) on the boundary and trilinear in
/// (log r, angle, log x_n) in the bulk. Radii beyond the outermost shell
/// take a power-law extrapolant fitted to the outer two shells at the
/// interpolated angle; radii below the innermost shell clamp to it.
double sample_planar(const BoundaryField& f, double y1, double y2);
double sample_bulk(const HalfField& g, double x1, double x2, double xn);

/// Mass center sum(w f y) / sum(w f) of a nonnegative boundary field;
/// all-zero fields map to the origin.
std::array<double, 2> weighted_barycenter(const BoundaryField& f);

/// Translates the field so its weighted barycenter moves to the origin,
/// resampling through sample_planar. Reduced-mode fields are returned
/// unchanged (they are radial about the origin by construction).
BoundaryField recenter(const BoundaryField& f);

/// radial: max over shells of (max - min within the shell) / sup|f|.
/// monotonicity: max positive outward increment of shell means / sup|f|.
/// Both vanish iff the field is radial about the origin and non-increasing.
struct SymmetryDeviation {
    double radial = 0.0;
    double monotonicity = 0.0;
};
SymmetryDeviation symmetry_deviation(const BoundaryField& f);

/// u_tau(y): the field sampled at the reflected point (coordinate `axis`
/// mapped to 2 tau - coordinate). Exact at nodes whose reflection is again
/// a node (tau = 0 on an even angular grid); interpolated otherwise.
BoundaryField reflect(const BoundaryField& f, const ReflectionSpec& spec);
HalfField reflect(const HalfField& g, const ReflectionSpec& spec);

/// Inversion about a boundary point c with a power prefactor,
///   (K u)(y) = |y - c|^{-power} u( (y - c)/|y - c|^2 + c ).
/// A node that coincides with the center cannot be evaluated; it is set to
/// zero and flagged in `excluded`. Full-mode grids only.
struct KelvinResult {
    BoundaryField field;
    std::vector<std::uint8_t> excluded;
    int excluded_count = 0;
};
struct KelvinResultBulk {
    HalfField field;
    std::vector<std::uint8_t> excluded;
    int excluded_count = 0;
};
KelvinResult kelvin_transform(const BoundaryField& u, std::array<double, 2> center,
                              double power);
KelvinResultBulk kelvin_transform(const HalfField& v, std::array<double, 2> center,
                                  double power);

/// One reflection offset of a moving-plane scan. measure_* are the
/// quadrature measures of the violation sets {value > reflected value + tol}
/// on the tau side, with tol = 1e-10 * sup|field| absorbing interpolation
/// noise; amplitude is the largest positive excess over both fields.
/// gg_residual compares two evaluations of u(y) - u(y^tau): the direct
/// kernel sums at y and y^tau against the source-reflected form that uses
/// P(x, y^tau) = P(x^tau, y); both are exact quadratures of the same terms,
/// so the residual isolates the kernel reflection identity.
struct MovingPlaneRow {
    double tau = 0.0;
    double measure_u = 0.0;
    double measure_v = 0.0;
    double amplitude = 0.0;
    double gg_residual = 0.0;
};

/// Scans reflection offsets for a solution pair of the single-weight
/// system: u paired with the bulk source |x|^{-beta} v^{q0}. Full-mode
/// grids only.
std::vector<MovingPlaneRow> moving_plane_scan(const BoundaryField& u, const HalfField& v,
                                              double beta, double q0,
                                              const KernelParams& kp, int axis,
                                              const std::vector<double>& taus);

}  // namespace swhs
