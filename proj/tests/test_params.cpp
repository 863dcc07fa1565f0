#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "swhs/params.hpp"
#include "swhs/rational.hpp"

using namespace swhs;

namespace {

// Solves the balance identity for q' given everything else, so the returned
// parameters are balanced by construction (exactly, in rational arithmetic).
InequalityParams balanced_params(const Rational& p, const Rational& alpha, const Rational& beta,
                                 const Rational& lambda, const Rational& mu) {
    InequalityParams ip;
    ip.p = p;
    ip.alpha = alpha;
    ip.beta = beta;
    ip.lambda = lambda;
    ip.mu = mu;
    Rational n(ip.n);
    Rational inv_qp = (2 * n - 1) / n - (alpha + beta + mu - lambda) / n - ((n - 1) / n) / p;
    REQUIRE(inv_qp > 0);
    ip.q_prime = 1 / inv_qp;
    return ip;
}

std::map<std::string, bool> verdict_map(const AdmissibilityReport& rep) {
    std::map<std::string, bool> m;
    for (const auto& c : rep.conditions) m[c.name] = c.holds;
    return m;
}

}  // namespace

TEST_SUITE("params") {

TEST_CASE("reference parameters validate with exact derived exponents") {
    InequalityParams ip;
    AdmissibilityReport rep = validate(ip);
    CHECK(rep.admissible);
    REQUIRE(rep.q.has_value());
    REQUIRE(rep.p_prime.has_value());
    CHECK(*rep.q == Rational(9));
    CHECK(*rep.p_prime == Rational(3));
    CHECK(ip.balance_residual() == 0);
    CHECK(*rep.q == conjugate_exponent(ip.q_prime));
    CHECK(*rep.p_prime == conjugate_exponent(ip.p));
}

TEST_CASE("kernel decay above the admissible range is rejected by name") {
    InequalityParams ip;
    ip.lambda = 1;
    ip.mu = 3;
    AdmissibilityReport rep = validate(ip);
    CHECK_FALSE(rep.admissible);
    const Condition* c = rep.find("mu_lt_n_minus_2lambda");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->holds);
    CHECK(c->slack == doctest::Approx(-2.0));
}

TEST_CASE("weighted example solving the balance for q_prime is admissible") {
    InequalityParams ip = balanced_params(Rational(3, 2), Rational(1, 5), Rational(1, 10),
                                          Rational(0), Rational(1));
    CHECK(ip.q_prime == Rational(90, 71));
    AdmissibilityReport rep = validate(ip);
    CHECK(rep.admissible);
}

TEST_CASE("derived exponent relations hold exactly on random balanced tuples") {
    std::mt19937_64 rng(42);
    const std::vector<Rational> ps = {Rational(5, 4), Rational(4, 3), Rational(3, 2),
                                      Rational(5, 3), Rational(2)};
    const std::vector<Rational> weights = {Rational(0), Rational(1, 8), Rational(1, 4),
                                           Rational(2, 5)};
    const std::vector<Rational> lambdas = {Rational(0), Rational(1, 4), Rational(1, 2)};
    const std::vector<Rational> gaps = {Rational(3, 4), Rational(1), Rational(5, 4)};
    auto pick = [&rng](const auto& v) {
        std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
        return v[d(rng)];
    };

    int admissible_count = 0;
    for (int trial = 0; trial < 400 && admissible_count < 100; ++trial) {
        Rational lambda = pick(lambdas);
        Rational mu = lambda + pick(gaps);
        InequalityParams ip = balanced_params(pick(ps), pick(weights), pick(weights), lambda, mu);
        AdmissibilityReport rep = validate(ip);
        if (!rep.admissible) continue;
        ++admissible_count;

        CHECK(ip.balance_residual() == 0);
        CHECK(*rep.q == conjugate_exponent(ip.q_prime));
        CHECK(*rep.p_prime == conjugate_exponent(ip.p));

        SystemParams sys = derive_el_exponents(ip);
        CHECK(sys.p0 == 1 / (ip.p - 1));
        CHECK(sys.q0 == 1 / (ip.q_prime - 1));
        CHECK(sys.system_balance_residual() == 0);
        CHECK(pohozaev_residual(sys.single_weight_equivalent()) == 0);
    }
    CHECK(admissible_count == 100);
}

TEST_CASE("crossing one constraint boundary flips exactly that condition") {
    InequalityParams ref;
    auto base = verdict_map(validate(ref));

    auto expect_single_flip = [&base](const InequalityParams& ip, const std::string& name) {
        auto got = verdict_map(validate(ip));
        REQUIRE(got.size() == base.size());
        for (const auto& [cond, holds] : got) {
            if (cond == name)
                CHECK_FALSE(holds);
            else
                CHECK(holds == base.at(cond));
        }
    };

    SUBCASE("kernel decay against the height power") {
        // lambda and mu move together so the balance stays exact
        InequalityParams ip;
        ip.lambda = 1;
        ip.mu = 2;
        CHECK(ip.balance_residual() == 0);
        expect_single_flip(ip, "mu_lt_n_minus_2lambda");
    }
    SUBCASE("weight sum sign") {
        InequalityParams ip = balanced_params(Rational(3, 2), Rational(-1, 8), Rational(0),
                                              Rational(0), Rational(1));
        expect_single_flip(ip, "alpha_plus_beta_nonneg");
    }
    SUBCASE("index sum") {
        InequalityParams ip = balanced_params(Rational(3, 2), Rational(0), Rational(0),
                                              Rational(0), Rational(9, 4));
        CHECK(ip.q_prime == Rational(36, 17));
        expect_single_flip(ip, "index_sum");
    }
}

TEST_CASE("weight conventions gate negative weights differently") {
    InequalityParams ip = balanced_params(Rational(3, 2), Rational(-1, 8), Rational(1, 4),
                                          Rational(0), Rational(1));
    AdmissibilityReport sum = validate(ip, WeightConvention::Sum);
    CHECK(sum.admissible);
    AdmissibilityReport each = validate(ip, WeightConvention::Each);
    CHECK_FALSE(each.admissible);
    const Condition* c = each.find("alpha_nonneg");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->holds);
}

TEST_CASE("strict inequalities fail at exactly zero slack") {
    InequalityParams ip;
    ip.p = 1;
    AdmissibilityReport rep = validate(ip);
    const Condition* c = rep.find("p_gt_1");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->holds);
    CHECK(c->slack == 0.0);
}

TEST_CASE("non finite input raises an input error instead of a failed condition") {
    CHECK_THROWS_AS(InequalityParams::from_doubles(3, std::nan(""), 1.125, 0, 0, 0, 1),
                    std::domain_error);
    CHECK_THROWS_AS(InequalityParams::from_doubles(3, 1.5, 1.125, 0, 0, 0,
                                                   std::numeric_limits<double>::infinity()),
                    std::domain_error);
}

TEST_CASE("double constructed parameters tolerate dyadic rounding in the balance") {
    InequalityParams ip = InequalityParams::from_doubles(3, 1.5, 1.125, 0.0, 0.0, 0.0, 1.0);
    CHECK_FALSE(ip.exact);
    AdmissibilityReport rep = validate(ip);
    CHECK(rep.admissible);
}

TEST_CASE("euler lagrange exponents from the inequality exponents") {
    InequalityParams ip;
    SystemParams sys = derive_el_exponents(ip);
    CHECK(sys.p0 == Rational(2));
    CHECK(sys.q0 == Rational(8));
    CHECK(sys.system_balance_residual() == 0);

    InequalityParams sym;
    sym.p = 2;
    sym.q_prime = 2;
    SystemParams lin = derive_el_exponents(sym);
    CHECK(lin.p0 == Rational(1));
    CHECK(lin.q0 == Rational(1));

    InequalityParams degenerate;
    degenerate.p = 1;
    CHECK_THROWS_AS(derive_el_exponents(degenerate), std::domain_error);
}

TEST_CASE("pohozaev residual closed forms") {
    SystemParams sys;
    CHECK(pohozaev_residual(sys) == 0);

    SystemParams off;
    off.q0 = 2;
    CHECK(pohozaev_residual(off) == Rational(2, 3));

    SystemParams corner;
    corner.alpha = 2;
    corner.beta = 3;
    CHECK(pohozaev_residual(corner) == corner.lambda - corner.mu);
}

TEST_CASE("single weight equivalent scales the weights by the coupled powers") {
    SystemParams sys;
    sys.alpha = Rational(1, 4);
    sys.beta = Rational(1, 4);
    sys.q0 = Rational(13, 5);
    SystemParams sw = sys.single_weight_equivalent();
    CHECK(sw.alpha == sys.alpha * (sys.p0 + 1));
    CHECK(sw.beta == sys.beta * (sys.q0 + 1));
    CHECK(sw.p0 == sys.p0);
    CHECK(sw.q0 == sys.q0);
}

TEST_CASE("regularity window for the reference system") {
    SystemParams sys;
    RegularityWindow win = regularity_window(sys);
    REQUIRE_FALSE(win.inv_r.empty);
    CHECK(win.inv_r.lo == Rational(0));
    CHECK(win.inv_r.hi == Rational(1, 2));
    CHECK(win.inv_r.contains(Rational(1, 4)));
    CHECK_FALSE(win.inv_r.contains(Rational(1, 2)));
    REQUIRE_FALSE(win.inv_s.empty);
    CHECK(win.inv_s.lo < win.inv_s.hi);
}

}
