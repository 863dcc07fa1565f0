#pragma once

#include <cstdint>
#include <vector>

#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"

namespace swhs {

/// Iteration controls shared by the extremal and system solvers.
struct SolveOptions {
    int max_iters = 10000;
    double tol_rel = 1e-9;  // relative change stopping threshold
    double damping = 1.0;   // blend weight for the new iterate, in (0, 1]
    bool symmetrize_each_step = false;
    bool random_start = false;
    std::uint64_t seed = 12345;

    void check() const;  // throws std::invalid_argument
};

enum class SolveStatus {
    Converged,
    IterationCap,   // budget exhausted before the tolerance was met
    NonMonotone,    // objective kept decreasing after damping bottomed out
};
const char* to_string(SolveStatus s);

/// Output of the alternating sharp-constant iteration. The pair (f, g) is
/// kept on the unit spheres ||f||_p = ||g||_{q'} = 1; constant_estimate is
/// the final objective ||V f||_q, the discrete sharp-constant estimate.
struct ExtremalResult {
    SolveStatus status = SolveStatus::Converged;
    double constant_estimate = 0.0;
    BoundaryField f;
    HalfField g;
    std::vector<double> trace;  // objective per iteration
    int iterations = 0;

    // self-consistency of f under one more alternating step, sup-norm relative
    double el_residual = 0.0;
    // weighted L2 distance of g from the fitted c0 (V f)^{1/(q'-1)}
    double g_consistency = 0.0;
    double c0 = 0.0;
    // deviations of f from a radial non-increasing profile, measured after
    // recentering at the weighted barycenter (full mode)
    double radial_deviation = 0.0;
    double monotonicity_deviation = 0.0;
    double final_damping = 1.0;
};

/// J(f, g) = <V f, g>, the bilinear form whose supremum over the unit
/// spheres is the sharp constant.
double objective(const BoundaryField& f, const HalfField& g, const InequalityParams& ip,
                 const KernelTable& table);

/// Default start: the radial profile (1 + r^2)^{-(n-1)/p} normalized to
/// ||f||_p = 1, or a seeded uniform random positive field when
/// opts.random_start is set.
BoundaryField initial_field(const BoundaryGrid& bg, const InequalityParams& ip,
                            const SolveOptions& opts);

/// Alternating maximization of J: g <- argmax over ||g||_{q'} = 1 given f
/// (closed form (V f)^{1/(q'-1)} normalized), then f <- argmax over
/// ||f||_p = 1 given g. Each half step is exact coordinate ascent, so the
/// objective trace is non-decreasing up to discretization noise; a decrease
/// beyond 10 tol_rel halves the damping, and the run is flagged NonMonotone
/// if that fails to restore ascent. A start with zero objective overlap
/// throws std::domain_error. Pass `start` to override the default initial
/// field (it is normalized, not copied verbatim).
ExtremalResult power_iterate(const InequalityParams& ip, const BoundaryGrid& bg,
                             const HalfGrid& hg, const KernelTable& table,
                             const SolveOptions& opts,
                             const BoundaryField* start = nullptr);

/// kappa^{-(n-1)/p} f(y/kappa) resampled onto the grid by log-radial
/// interpolation. The Lp norm is preserved up to interpolation error while
/// the support stays inside [r_min, r_max]; `truncated` flags dilations
/// that push visible mass outside the grid. Reduced-mode radial fields only.
struct DilatedField {
    BoundaryField field;
    bool truncated = false;
};
DilatedField dilation_normalize(const BoundaryField& f, double kappa, double p);

/// A(f) = sup over grid radii of r^{(n-1)/p} f(r), the dilation-invariant
/// height of the radial profile at unit radius. A drifting maximizing
/// sequence loses this sup while keeping its norm, so a decreasing trend
/// across iterates signals escaping mass.
double concentration_diagnostic(const BoundaryField& f, double p);

}  // namespace swhs
