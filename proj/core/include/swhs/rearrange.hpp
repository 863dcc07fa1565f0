#pragma once

#include <string>
#include <vector>

#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"

namespace swhs {

/// One step of a decreasing rearrangement: the function takes `value` on a
/// measure interval of length `measure`.
struct ProfileStep {
    double value = 0.0;
    double measure = 0.0;
};

/// Decreasing rearrangement f*(t) of a gridded field, stored as a
/// right-continuous step function. Steps are strictly decreasing in value;
/// equal node values are merged into a single step. Zero values are dropped,
/// so total_measure() is the measure of the support of |f|.
struct RearrangementProfile {
    std::vector<ProfileStep> steps;

    double total_measure() const;

    /// f*(t) for t >= 0; zero beyond the support measure.
    double value_at(double t) const;
};

/// (sum |value|^p * weight)^(1/p). Throws std::domain_error for p <= 0.
double lp_norm(const BoundaryField& f, double p);
double lp_norm(const HalfField& g, double p);
double lp_norm(const RearrangementProfile& profile, double p);

/// Sorts |values| descending, accumulating quadrature weights as measure.
/// Equimeasurable with |f| by construction.
RearrangementProfile decreasing_rearrangement(const BoundaryField& f);
RearrangementProfile decreasing_rearrangement(const HalfField& g);

/// Lorentz norm L^{r,s} from the decreasing rearrangement,
///   finite s:  ( sum_i v_i^s * (r/s) * (T_i^{s/r} - T_{i-1}^{s/r}) )^{1/s}
/// with T_i the cumulative measures; each step integrated in closed form.
/// s = infinity: sup over steps of T_i^{1/r} * v_i (right endpoints, since
/// f* is right-continuous and t^{1/r} increases). Throws std::domain_error
/// for r <= 0 or for s <= 0 unless s is infinite.
double lorentz_norm(const RearrangementProfile& profile, double r, double s);
double lorentz_norm(const BoundaryField& f, double r, double s);
double lorentz_norm(const HalfField& g, double r, double s);

/// Symmetric decreasing rearrangement mapped back onto the same grid:
/// values sorted descending are assigned to nodes sorted by ascending
/// radius. Ties in value keep ascending original radius, then ascending
/// node id, so the result is deterministic. The value multiset is preserved
/// exactly; the (value, weight) pair multiset is preserved exactly on grids
/// with equal node measures (Spacing::EqualMeasure).
BoundaryField radial_symmetrize(const BoundaryField& f);

/// Per-height-slice analogue for bulk fields: within each height slice the
/// values are sorted descending onto planar-radius-ascending nodes. Heights
/// are never mixed, matching a kernel that decays in the planar offset only.
HalfField slice_symmetrize(const HalfField& g);

/// Value of the bilinear functional and its value after symmetrizing both
/// arguments.
struct RieszCheck {
    double j_before = 0.0;
    double j_after = 0.0;
};

/// Evaluates J(f, g) = <g, V f> before and after replacing f by its radial
/// symmetrization and g by its per-slice symmetrization. Requires f, g >= 0
/// and alpha, beta >= 0; anything else throws std::domain_error (the
/// rearrangement inequality is only asserted in that regime).
RieszCheck riesz_check(const BoundaryField& f, const HalfField& g,
                       const InequalityParams& ip, const KernelTable& table);

/// Writes the profile as plot-ready CSV with header `t,value`: one row per
/// step at the step's right endpoint (cumulative measure).
void write_profile_csv(const RearrangementProfile& profile, const std::string& path);

}  // namespace swhs
