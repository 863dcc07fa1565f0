#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "swhs/grid.hpp"

#include "oracles.hpp"

using namespace swhs;

namespace {

// Error of the grid quadrature against a closed-form radial integral of a
// smooth integrand over the truncated annulus.
double boundary_error(int n_radial, double (*f)(double), double exact) {
    GridSpec spec;
    spec.r_min = 1.0;
    spec.r_max = 10.0;
    spec.n_radial = n_radial;
    BoundaryGrid bg = build_boundary_grid(spec);
    BoundaryField field = make_field(bg);
    for (std::size_t i = 0; i < field.value.size(); ++i) field.value[i] = f(bg.node_radius(i));
    return std::abs(integrate(field) - exact);
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("spec invariants are enforced") {
    GridSpec bad;
    bad.r_min = 0.0;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);
    bad.r_min = -1.0;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);

    GridSpec degenerate;
    degenerate.r_min = 2.0;
    degenerate.r_max = 2.0;
    CHECK_THROWS_AS(degenerate.check(), std::invalid_argument);

    GridSpec too_few;
    too_few.n_radial = 1;
    CHECK_THROWS_AS(too_few.check(), std::invalid_argument);
}

TEST_CASE("two node uniform annulus carries the exact measure") {
    GridSpec spec;
    spec.r_min = 1.0;
    spec.r_max = std::numbers::e;
    spec.n_radial = 2;
    spec.spacing = Spacing::Uniform;
    BoundaryGrid bg = build_boundary_grid(spec);
    REQUIRE(bg.size() == 2);
    double analytic = std::numbers::pi * (std::numbers::e * std::numbers::e - 1.0);
    CHECK(bg.analytic_measure() == doctest::Approx(analytic).epsilon(1e-14));
    CHECK(bg.total_measure() == doctest::Approx(analytic).epsilon(1e-12));
}

TEST_CASE("total measures match the analytic truncation at default resolution") {
    GridSpec spec;
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    CHECK(std::abs(bg.total_measure() - bg.analytic_measure()) <=
          0.005 * bg.analytic_measure());
    CHECK(std::abs(hg.total_measure() - hg.analytic_measure()) <=
          0.005 * hg.analytic_measure());
    for (double w : bg.weight) CHECK(w > 0.0);
    for (double w : hg.weight) CHECK(w > 0.0);
}

TEST_CASE("no node samples the origin or the boundary plane") {
    GridSpec spec;
    spec.n_radial = 16;
    spec.n_height = 16;
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    for (std::size_t i = 0; i < bg.size(); ++i) CHECK(bg.node_radius(i) >= spec.r_min);
    for (std::size_t i = 0; i < hg.size(); ++i) {
        CHECK(hg.node_radius(i) >= spec.r_min);
        CHECK(hg.node_height(i) > 0.0);
    }
}

TEST_CASE("integration is linear and monotone") {
    GridSpec spec;
    spec.n_radial = 24;
    BoundaryGrid bg = build_boundary_grid(spec);
    std::mt19937_64 rng(7);
    BoundaryField f = make_field(bg);
    BoundaryField g = make_field(bg);
    oracles::fill_uniform(f, rng);
    oracles::fill_uniform(g, rng);

    // power of two scaling commutes with rounding, so these are bit exact
    BoundaryField doubled = f;
    for (double& v : doubled.value) v *= 2.0;
    CHECK(integrate(doubled) == 2.0 * integrate(f));
    CHECK(integrate(doubled) >= integrate(f));

    BoundaryField combo = make_field(bg);
    for (std::size_t i = 0; i < combo.value.size(); ++i)
        combo.value[i] = 3.0 * f.value[i] + 0.25 * g.value[i];
    double lhs = integrate(combo);
    double rhs = 3.0 * integrate(f) + 0.25 * integrate(g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));

    BoundaryField bigger = make_field(bg);
    for (std::size_t i = 0; i < bigger.value.size(); ++i) bigger.value[i] = g.value[i] + 0.5;
    CHECK(integrate(bigger) >= integrate(g));
}

TEST_CASE("empty field integrates to zero") {
    GridSpec spec;
    spec.n_radial = 8;
    spec.n_height = 8;
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    CHECK(integrate(make_field(bg)) == 0.0);
    CHECK(integrate(make_field(hg)) == 0.0);
}

TEST_CASE("field and grid sizes must agree") {
    GridSpec spec;
    spec.n_radial = 8;
    BoundaryGrid bg = build_boundary_grid(spec);
    BoundaryField f = make_field(bg);
    f.value.resize(3);
    CHECK_THROWS_AS(integrate(f), std::invalid_argument);

    BoundaryGrid other = build_boundary_grid(spec);
    BoundaryField g = make_field(other);
    BoundaryField h = make_field(bg);
    CHECK_THROWS_AS(weighted_inner(g, h), std::invalid_argument);
}

TEST_CASE("doubling the radial count cuts smooth quadrature error at least in half") {
    // integral of exp(-r) over the annulus [1, 10] in the boundary plane
    double exact = 2.0 * std::numbers::pi *
                   (2.0 * std::exp(-1.0) - 11.0 * std::exp(-10.0));
    auto f = +[](double r) { return std::exp(-r); };
    double e16 = boundary_error(16, f, exact);
    double e32 = boundary_error(32, f, exact);
    double e64 = boundary_error(64, f, exact);
    CHECK(e32 <= 0.5 * e16);
    CHECK(e64 <= 0.5 * e32);
}

TEST_CASE("radial power integrand matches its closed form within one percent") {
    // f = r^{-4/3}, the decay class of extremals for p = 3/2
    GridSpec spec;
    spec.r_min = 1.0;
    spec.r_max = 10.0;
    spec.n_radial = 64;
    BoundaryGrid bg = build_boundary_grid(spec);
    BoundaryField field = make_field(bg);
    for (std::size_t i = 0; i < field.value.size(); ++i)
        field.value[i] = std::pow(bg.node_radius(i), -4.0 / 3.0);
    double exact = 2.0 * std::numbers::pi * 1.5 * (std::pow(10.0, 2.0 / 3.0) - 1.0);
    CHECK(integrate(field) == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("height power integrand over an edge aligned box matches its closed form") {
    GridSpec spec;
    spec.n_radial = 64;
    spec.n_height = 64;
    HalfGrid hg = build_half_grid(spec);
    // box edges taken from the grid itself so the indicator is cell aligned
    double r_lo = hg.shell_edges[20], r_hi = hg.shell_edges[44];
    double h_lo = hg.height_edges[20], h_hi = hg.height_edges[44];
    HalfField field = make_field(hg);
    for (std::size_t i = 0; i < field.value.size(); ++i) {
        double r = hg.node_radius(i);
        double xn = hg.node_height(i);
        if (r >= r_lo && r <= r_hi && xn >= h_lo && xn <= h_hi) field.value[i] = xn;
    }
    double exact = std::numbers::pi * (r_hi * r_hi - r_lo * r_lo) * 0.5 *
                   (h_hi * h_hi - h_lo * h_lo);
    CHECK(integrate(field) == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("equal measure spacing gives every shell the same weight") {
    GridSpec spec;
    spec.n_radial = 32;
    spec.spacing = Spacing::EqualMeasure;
    BoundaryGrid bg = build_boundary_grid(spec);
    double first = bg.shell_weight[0];
    for (double w : bg.shell_weight) CHECK(w == doctest::Approx(first).epsilon(1e-12));
}

TEST_CASE("full mode splits shells over angles without changing the measure") {
    GridSpec spec;
    spec.n_radial = 12;
    spec.n_height = 8;
    spec.n_angular = 10;
    BoundaryGrid reduced = build_boundary_grid(spec);
    GridSpec full_spec = spec;
    full_spec.mode = GridMode::Full;
    BoundaryGrid full = build_boundary_grid(full_spec);
    CHECK(full.size() == reduced.size() * static_cast<std::size_t>(spec.n_angular));
    CHECK(full.total_measure() == doctest::Approx(reduced.total_measure()).epsilon(1e-12));
}

TEST_CASE("field csv round trips node values exactly") {
    GridSpec spec;
    spec.n_radial = 8;
    BoundaryGrid bg = build_boundary_grid(spec);
    BoundaryField f = make_field(bg);
    std::mt19937_64 rng(3);
    oracles::fill_uniform(f, rng, -2.0, 5.0);
    std::string path = "grid_roundtrip_test.csv";
    write_field_csv(path, f.value);
    std::vector<double> back = read_field_csv(path);
    REQUIRE(back.size() == f.value.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == f.value[i]);
    std::remove(path.c_str());
}

}
