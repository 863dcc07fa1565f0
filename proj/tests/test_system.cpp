#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "swhs/extremal.hpp"
#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"
#include "swhs/rearrange.hpp"
#include "swhs/system.hpp"

#include "oracles.hpp"

using namespace swhs;

namespace {

struct ReferenceSetup {
    BoundaryGrid bg;
    HalfGrid hg;
    KernelTable table;
    SystemSolution sol;
};

// solved once and shared; subcases re-run their enclosing body, so the
// expensive solve stays out of any case that branches. Heap storage keeps
// the grid addresses stable for the field pointers inside the solution.
const ReferenceSetup& reference_single_weight() {
    static const ReferenceSetup* setup = [] {
        SystemParams sys;
        GridSpec spec;
        spec.n_radial = 32;
        spec.n_height = 32;
        auto* s = new ReferenceSetup{build_boundary_grid(spec), build_half_grid(spec),
                                     KernelTable{}, SystemSolution{}};
        s->table = KernelTable::build(s->bg, s->hg, OpParams::from(sys).kp);
        SolveOptions opts;
        opts.max_iters = 40000;
        opts.tol_rel = 1e-9;
        s->sol = solve_single_weight(sys, s->bg, s->hg, s->table, opts);
        return s;
    }();
    return *setup;
}

}  // namespace

TEST_SUITE("system") {

TEST_CASE("single weight pair converges positive and self consistent") {
    const ReferenceSetup& ref = reference_single_weight();
    const SystemSolution& sol = ref.sol;

    CHECK(sol.status == SystemStatus::Converged);
    CHECK(sol.single_weight);
    CHECK(sol.rescaled);
    CHECK(sol.eigenvalue > 0.0);
    for (double v : sol.u.value) CHECK(v >= 0.0);
    for (double v : sol.v.value) CHECK(v >= 0.0);
    CHECK(lp_norm(sol.u, 3.0) > 0.0);

    FixedPointResiduals fp = fixed_point_residual(sol, ref.table);
    CHECK(fp.u <= 1e-6);
    CHECK(fp.v <= 1e-6);

    SUBCASE("iteration cap is reported") {
        SolveOptions tight;
        tight.max_iters = 1;
        SystemSolution capped = solve_single_weight(sol.sys, ref.bg, ref.hg, ref.table, tight);
        CHECK(capped.status == SystemStatus::IterationCap);
        CHECK(capped.iterations == 1);
    }
}

TEST_CASE("energy identity closes on the solved balanced system") {
    const ReferenceSetup& ref = reference_single_weight();

    InequalityParams ip;
    SystemParams derived = derive_el_exponents(ip);
    CHECK(derived.p0 == Rational(2));
    CHECK(derived.q0 == Rational(8));
    CHECK(pohozaev_residual(derived.single_weight_equivalent()) == Rational(0));

    PohozaevCheck pc = pohozaev_check(ref.sol, ref.table);
    CHECK(pc.norms_finite);
    CHECK(pc.e_u > 0.0);
    CHECK(pc.e_v > 0.0);
    CHECK(pc.d > 0.0);
    CHECK(pc.residual <= 0.02);

    SUBCASE("a perturbed pair is refused") {
        SystemSolution fake = ref.sol;
        for (std::size_t i = 0; i < fake.u.value.size(); i += 2) fake.u.value[i] *= 1.5;
        CHECK_THROWS_AS(pohozaev_check(fake, ref.table), std::domain_error);
    }
}

TEST_CASE("linear coupling matches a dense eigenvalue oracle") {
    SystemParams sys;
    sys.p0 = 1;
    sys.q0 = 1;
    sys.alpha = Rational(1, 5);
    sys.beta = Rational(3, 10);
    sys.lambda = Rational(1, 2);
    sys.mu = 1;

    GridSpec spec;
    spec.r_min = 0.05;
    spec.r_max = 20.0;
    spec.n_radial = 24;
    spec.n_height = 24;
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    OpParams op = OpParams::from(sys);
    KernelTable table = KernelTable::build(bg, hg, op.kp);

    SolveOptions opts;
    opts.max_iters = 20000;
    opts.tol_rel = 1e-12;
    SystemSolution sol = solve_system(sys, bg, hg, table, opts);
    CHECK(sol.status == SystemStatus::Converged);
    CHECK_FALSE(sol.rescaled);
    CHECK(lp_norm(sol.u, 2.0) == doctest::Approx(1.0).epsilon(1e-10));

    double oracle = oracles::dense_dominant_eigenvalue(bg, hg, op, table);
    CHECK(sol.eigenvalue == doctest::Approx(oracle).epsilon(1e-8));

    // scaled grids shift the eigenvalue by s^(2n-1-2a-2b+2(lambda-mu)) = s^3
    // and the bulk component by s^(n-1-a-b+lambda-mu) = s while fixing u
    double s = 2.0;
    GridSpec scaled = spec;
    scaled.r_min *= s;
    scaled.r_max *= s;
    BoundaryGrid bg2 = build_boundary_grid(scaled);
    HalfGrid hg2 = build_half_grid(scaled);
    KernelTable table2 = KernelTable::build(bg2, hg2, op.kp);
    SystemSolution sol2 = solve_system(sys, bg2, hg2, table2, opts);
    CHECK(sol2.eigenvalue == doctest::Approx(8.0 * sol.eigenvalue).epsilon(1e-8));
    for (std::size_t i = 0; i < sol.u.value.size(); i += 37)
        CHECK(sol2.u.value[i] == doctest::Approx(sol.u.value[i]).epsilon(1e-8));
    for (std::size_t i = 0; i < sol.v.value.size(); i += 113)
        CHECK(sol2.v.value[i] == doctest::Approx(2.0 * sol.v.value[i]).epsilon(1e-8));
}

TEST_CASE("vanishing weights collapse both formulations onto each other") {
    SystemParams sys;
    GridSpec spec;
    spec.r_min = 1e-2;
    spec.r_max = 1e2;
    spec.n_radial = 16;
    spec.n_height = 16;
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    KernelTable table = KernelTable::build(bg, hg, OpParams::from(sys).kp);
    SolveOptions opts;
    opts.max_iters = 20000;

    SystemSolution both = solve_system(sys, bg, hg, table, opts);
    SystemSolution single = solve_single_weight(sys, bg, hg, table, opts);
    REQUIRE(both.status == SystemStatus::Converged);
    REQUIRE(single.status == SystemStatus::Converged);
    CHECK(both.eigenvalue == doctest::Approx(single.eigenvalue).epsilon(1e-10));
    for (std::size_t i = 0; i < both.u.value.size(); ++i)
        CHECK(both.u.value[i] == doctest::Approx(single.u.value[i]).epsilon(1e-10));
    for (std::size_t i = 0; i < both.v.value.size(); ++i)
        CHECK(both.v.value[i] == doctest::Approx(single.v.value[i]).epsilon(1e-10));
}

TEST_CASE("near origin limits extrapolate to the predicted integrals") {
    const ReferenceSetup& ref = reference_single_weight();
    AsymptoticCheck coarse = asymptotic_check(ref.sol);
    REQUIRE(coarse.u_checked);
    double err32 = std::abs(coarse.lhs_u / coarse.rhs_u - 1.0);
    CHECK(err32 <= 0.05);

    GridSpec spec;
    spec.n_radial = 48;
    spec.n_height = 48;
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    KernelTable table = KernelTable::build(bg, hg, OpParams::from(ref.sol.sys).kp);
    SolveOptions opts;
    opts.max_iters = 40000;
    opts.tol_rel = 1e-9;
    SystemSolution fine = solve_single_weight(ref.sol.sys, bg, hg, table, opts);
    REQUIRE(fine.status == SystemStatus::Converged);
    AsymptoticCheck refined = asymptotic_check(fine);
    REQUIRE(refined.u_checked);
    double err48 = std::abs(refined.lhs_u / refined.rhs_u - 1.0);
    CHECK(err48 <= 0.05);
    CHECK(err48 < err32);
}

TEST_CASE("truncated norms stabilize inside the admissible window") {
    const ReferenceSetup& ref = reference_single_weight();
    RegularityWindow window = regularity_window(ref.sol.sys);
    RegularityProbe probe = regularity_probe(ref.sol, window);

    CHECK_FALSE(probe.window_u_empty);
    CHECK_FALSE(probe.window_v_empty);
    int inside_u = 0;
    for (const NormTrend& t : probe.u_trends) {
        REQUIRE(!t.norm.empty());
        if (t.inside_window) {
            ++inside_u;
            CHECK(t.stabilized);
            CHECK(t.last_rel_change <= 0.02);
        }
    }
    CHECK(inside_u > 0);
    int inside_v = 0;
    for (const NormTrend& t : probe.v_trends)
        if (t.inside_window) {
            ++inside_v;
            CHECK(t.stabilized);
        }
    CHECK(inside_v > 0);
}

TEST_CASE("unbalanced exponents never settle as the domain grows") {
    GridSpec base;
    base.r_min = 1e-3;
    base.r_max = 1e2;
    base.n_radial = 24;
    base.n_height = 24;
    SolveOptions opts;
    opts.max_iters = 4000;
    opts.tol_rel = 1e-8;

    SystemParams a;
    a.p0 = Rational(1, 2);
    a.q0 = Rational(1, 2);

    SystemParams b;
    b.mu = Rational(3, 2);
    b.p0 = Rational(1, 3);
    b.q0 = Rational(1, 2);

    SystemParams c;
    c.lambda = Rational(1, 2);
    c.mu = 1;
    c.alpha = Rational(1, 5);
    c.beta = Rational(3, 10);
    c.p0 = Rational(1, 2);
    c.q0 = Rational(2, 5);

    for (const SystemParams& sys : {a, b, c}) {
        CHECK(pohozaev_residual(sys) != Rational(0));
        NonexistenceSweep sweep = nonexistence_sweep(sys, base, 3, opts, true);
        REQUIRE(sweep.r_max.size() == sweep.e_u.size());
        REQUIRE(sweep.r_max.size() == sweep.status.size());
        CHECK(sweep.witnessed);
        CHECK(sweep.min_growth > 10.0);
    }

    SystemParams balanced;
    CHECK(pohozaev_residual(balanced.single_weight_equivalent()) == Rational(0));
    NonexistenceSweep flat = nonexistence_sweep(balanced, base, 3, opts, true);
    CHECK_FALSE(flat.witnessed);
    CHECK(flat.min_growth < 1.5);
}

}
