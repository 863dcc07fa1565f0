#pragma once

#include <string>
#include <vector>

#include "swhs/extremal.hpp"
#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"

namespace swhs {

enum class SystemStatus {
    Converged,
    IterationCap,
    Diverged,    // iterate values exceeded 1e100 or left the finite range
    Degenerate,  // iterate collapsed to zero
};
const char* to_string(SystemStatus s);

/// Fixed point of the coupled pair
///   u(y) = |y|^{-alpha} int P_lambda(x, y) |x|^{-beta} v(x)^{q0} dx
///   v(x) = |x|^{-beta}  int P_lambda(x, y) |y|^{-alpha} u(y)^{p0} dy
/// or of its single-weight variant where each equation carries only the
/// other side's weight. The iteration renormalizes ||u||_{p0+1} = 1 and
/// tracks the multiplier `eigenvalue`; when p0 q0 != 1 the returned pair is
/// rescaled into an actual solution of the unnormalized equations
/// (`rescaled` set), while the linear case p0 q0 = 1 keeps the normalized
/// eigenpair.
struct SystemSolution {
    SystemStatus status = SystemStatus::IterationCap;
    SystemParams sys;
    bool single_weight = false;
    bool rescaled = false;
    double eigenvalue = 0.0;
    BoundaryField u;
    HalfField v;
    double residual_u = 0.0;  // sup-norm relative update at the last step
    double residual_v = 0.0;
    int iterations = 0;
};

/// opts.damping blends consecutive u iterates; if left at the default 1 it
/// drops to 0.5 automatically when p0 > 3 or q0 > 3, where the undamped
/// power updates oscillate. Zero initial data reports Degenerate, values
/// above 1e100 report Diverged.
SystemSolution solve_system(const SystemParams& sys, const BoundaryGrid& bg,
                            const HalfGrid& hg, const KernelTable& table,
                            const SolveOptions& opts);
SystemSolution solve_single_weight(const SystemParams& sys, const BoundaryGrid& bg,
                                   const HalfGrid& hg, const KernelTable& table,
                                   const SolveOptions& opts);

/// Sup-norm relative change of (u, v) under one more application of the
/// system's right-hand sides (the equations the solution claims to satisfy).
struct FixedPointResiduals {
    double u = 0.0;
    double v = 0.0;
};
FixedPointResiduals fixed_point_residual(const SystemSolution& sol, const KernelTable& table);

/// Both sides of the integrated energy identity
///   lhs = -[(n-1-alpha)/(p0+1)] E_u - [(n-beta)/(q0+1)] E_v
///   rhs = -(mu - lambda) D
/// with E_u = int |y|^{-alpha} u^{p0+1}, E_v = int |x|^{-beta} v^{q0+1} and
/// D the double integral pairing the u-equation source against
/// |y|^{-alpha} u^{p0}. The residual is |lhs - rhs| / max(|lhs|, |rhs|, 1);
/// it vanishes exactly when the exponent balance holds and measures the
/// imbalance otherwise. Refuses input whose fixed-point residual exceeds
/// 1e-4 (std::domain_error): the identity only asserts anything about
/// solutions.
struct PohozaevCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double e_u = 0.0;
    double e_v = 0.0;
    double d = 0.0;
    bool norms_finite = true;
};
PohozaevCheck pohozaev_check(const SystemSolution& sol, const KernelTable& table);

/// Near-origin limits of the solution pair. The left-hand sides sample
/// u |y|^alpha (and v |x|^beta / x_n^lambda) on the five innermost shells
/// and extrapolate linearly in log r, evaluated one sampling-window width
/// below the innermost shell; the right-hand sides are the limit integrals
///   int x_n^lambda v^{q0} / |x|^{mu+beta} dx   and
///   int u^{p0} / |y|^{alpha+mu} dy.
/// For single-weight solutions the weight factors the solution already
/// carries are not re-applied. Each side runs only when its integrability
/// hypothesis holds; otherwise it is skipped with the reason recorded.
struct AsymptoticCheck {
    bool u_checked = false;
    std::string u_skip_reason;
    double lhs_u = 0.0;
    double rhs_u = 0.0;
    double slope_u = 0.0;  // fitted log-log slope; flat means the limit exists

    bool v_checked = false;
    std::string v_skip_reason;
    double lhs_v = 0.0;
    double rhs_v = 0.0;
    double slope_v = 0.0;
};
AsymptoticCheck asymptotic_check(const SystemSolution& sol);

/// Truncated norm ||u||_{L^e(|y| <= R)} for a ladder of cutoffs R ending at
/// the grid radius; `stabilized` means the final doubling changed the norm
/// by at most 2 percent.
struct NormTrend {
    double exponent = 0.0;
    double inv = 0.0;  // 1/exponent, the window coordinate
    bool inside_window = false;
    std::vector<double> cutoff;
    std::vector<double> norm;
    double last_rel_change = 0.0;
    bool stabilized = false;
};

/// Samples Lebesgue exponents inside and just outside the admissible
/// integrability windows and tabulates the truncation trends of the solved
/// pair. Empty windows produce no samples and set the corresponding flag.
struct RegularityProbe {
    bool window_u_empty = false;
    bool window_v_empty = false;
    std::vector<NormTrend> u_trends;
    std::vector<NormTrend> v_trends;
};
RegularityProbe regularity_probe(const SystemSolution& sol, const RegularityWindow& window);

/// Re-solves the system on grids with doubled outer radius and tracks the
/// weighted energies E_u, E_v of the rescaled solutions. Unbalanced
/// exponents admit no solution on the whole space, which shows up as
/// unbounded energy growth (factor > 10 per doubling) or outright solver
/// divergence; `witnessed` records whether every stage showed one of the
/// two. Resolution grows with the radius so the density per decade stays
/// fixed.
struct NonexistenceSweep {
    std::vector<double> r_max;
    std::vector<double> e_u;
    std::vector<double> e_v;
    std::vector<SystemStatus> status;
    double min_growth = 0.0;  // smallest per-doubling factor max(growth_u, growth_v)
    bool witnessed = false;
};
NonexistenceSweep nonexistence_sweep(const SystemParams& sys, const GridSpec& base,
                                     int doublings, const SolveOptions& opts,
                                     bool single_weight);

}  // namespace swhs
