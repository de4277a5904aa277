#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "starbsde/bsde.hpp"
#include "starbsde/rng.hpp"

using namespace starbsde;

TEST_CASE("martingale: zero driver reproduces the conditional expectation") {
    const BrownianLattice lat = build_lattice(1.0, 64);
    const BsdeSolution sol = solve_bsde(lat, zero_driver(), identity_claim());
    CHECK(std::abs(sol.Y.at(0, 0)) <= 1e-13);
}

TEST_CASE("closed form: g = mu|z| with X = W_T gives Y_t = W_t + mu(T-t) exactly") {
    for (int n : {4, 37, 100}) {
        const BrownianLattice lat = build_lattice(1.0, n);
        const BsdeSolution sol = solve_bsde(lat, scaled_abs_z(0.5), identity_claim());
        CHECK(std::abs(sol.Y.at(0, 0) - 0.5) <= 1e-10);
        for (int t = 0; t <= n; ++t)
            for (int j = 0; j <= t; ++j)
                CHECK(std::abs(sol.Y.at(t, j) -
                               (lat.w_value(t, j) + 0.5 * (1.0 - lat.grid().time_at(t)))) <=
                      1e-10);
    }
}

TEST_CASE("ODE oracle: g = -y with X = 1 converges to e^{-1} at first order") {
    const BrownianLattice lat200 = build_lattice(1.0, 200);
    const double y200 = solve_bsde(lat200, linear_y(-1.0), constant_claim(1.0)).Y.at(0, 0);
    const double target = std::exp(-1.0);
    CHECK(std::abs(y200 - target) <= 2e-3);

    const BrownianLattice lat400 = build_lattice(1.0, 400);
    const double y400 = solve_bsde(lat400, linear_y(-1.0), constant_claim(1.0)).Y.at(0, 0);
    const double ratio = std::abs(y400 - target) / std::abs(y200 - target);
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
}

TEST_CASE("step-size guard suggests a usable N") {
    const BrownianLattice coarse = build_lattice(1.0, 2);  // k*delta = 1 for example1
    CHECK_THROWS_AS(solve_bsde(coarse, example1(1.0, 1.0), identity_claim()), ValidationError);
    CHECK_THROWS_AS(solve_bsde(coarse, example3_default(), identity_claim()), ValidationError);
}

TEST_CASE("min representation: witness envelope member attains the primal") {
    const BrownianLattice lat = build_lattice(1.0, 40);
    for (const Driver& d : {scaled_abs_z(0.5), example1(1.0, 1.0), example2_default(),
                            example3_restricted_default()}) {
        const MinRepresentation mr = min_representation(lat, d, identity_claim());
        CHECK(mr.max_node_gap <= 1e-9);
    }

    // Zero driver: every envelope member collapses to the conditional
    // expectation, so random anchors give gap 0 too.
    const MinRepresentation mz = min_representation(lat, zero_driver(), identity_claim());
    CHECK(mz.max_node_gap == 0.0);
    const DominanceReport dz = dominance_sample(lat, zero_driver(), identity_claim(), 5, 3);
    CHECK(dz.min_gap == 0.0);
}

TEST_CASE("dominance: random envelope members stay above the primal") {
    const BrownianLattice lat = build_lattice(1.0, 24);
    const DominanceReport rep =
        dominance_sample(lat, example1(1.0, 1.0), identity_claim(), 20, 20240517);
    CHECK(rep.all_dominate);
    CHECK(rep.min_gap >= -1e-9);
}

TEST_CASE("comparison: adding a nonnegative bump raises the solution node-wise") {
    const BrownianLattice lat = build_lattice(1.0, 24);
    Rng rng(7);
    const std::vector<Driver> bases = {example1(1.0, 1.0), scaled_abs_z(0.5),
                                       example2_default()};
    for (int trial = 0; trial < 50; ++trial) {
        const Driver& base = bases[trial % bases.size()];
        const BsdeSolution y1 = solve_bsde(lat, base, identity_claim());
        const double a = rng.uniform(0.0, 0.3), b = rng.uniform(0.5, 2.0);
        const double c = rng.uniform(0.0, 0.3), e = rng.uniform(0.5, 2.0);
        DriverFlags f;
        f.lsc = true;
        const Driver bumped(
            "bumped",
            [=, g = base](int step, int node, double y, double z) {
                return g(step, node, y, z) +
                       ExtReal(a * (1.0 + std::sin(b * y)) + c * (1.0 + std::cos(e * z)));
            },
            base.lipschitz_k() + a * b + c * e, f);
        const BsdeSolution y2 = solve_bsde(lat, bumped, identity_claim());
        for (int t = 0; t <= lat.steps(); ++t)
            for (int j = 0; j <= t; ++j)
                CHECK(y1.Y.at(t, j) <= y2.Y.at(t, j) + 1e-9);
    }
}

TEST_CASE("star-shapedness and positive homogeneity transfer to the measure") {
    const BrownianLattice lat = build_lattice(1.0, 32);
    const std::vector<TerminalClaim> claims = {identity_claim(), call_claim(0.0)};

    for (const Driver& d : {example1(1.0, 1.0), example2_default(), scaled_abs_z(0.5)}) {
        const auto reps = verify_risk_properties(lat, d, claims, {RiskProperty::star_shaped});
        CHECK(reps[0].holds);
    }
    for (const Driver& d : {scaled_abs_z(0.5), neg_part_y(), zero_driver()}) {
        const auto reps = verify_risk_properties(lat, d, claims, {RiskProperty::pos_hom});
        CHECK(reps[0].holds);
    }
}

TEST_CASE("cash-subadditivity holds iff the driver is decreasing in y") {
    const BrownianLattice lat = build_lattice(1.0, 32);
    const std::vector<TerminalClaim> claims = {identity_claim()};

    const auto dec =
        verify_risk_properties(lat, neg_part_y(), claims, {RiskProperty::cash_subadditive});
    CHECK(dec[0].holds);

    const auto inc =
        verify_risk_properties(lat, linear_y(1.0), claims, {RiskProperty::cash_subadditive});
    CHECK_FALSE(inc[0].holds);  // increasing drivers amplify cash injections

    const auto yind =
        verify_risk_properties(lat, scaled_abs_z(0.5), claims, {RiskProperty::cash_additive});
    CHECK(yind[0].holds);
    CHECK(yind[0].worst_violation <= 1e-9);
}

TEST_CASE("normalization, constancy, splicing and regularity") {
    const BrownianLattice lat = build_lattice(1.0, 32);
    const std::vector<TerminalClaim> claims = {identity_claim()};

    // Normalized drivers give Y^0 identically zero.
    for (const Driver& d : {example1(1.0, 1.0), scaled_abs_z(0.5), example2_default()}) {
        const BsdeSolution sol = solve_bsde(lat, d, constant_claim(0.0));
        for (int t = 0; t <= lat.steps(); ++t)
            for (int j = 0; j <= t; ++j) CHECK(sol.Y.at(t, j) == 0.0);
    }

    const auto pc = verify_risk_properties(lat, scaled_abs_z(0.5), claims,
                                           {RiskProperty::positive_constancy});
    CHECK(pc[0].applicable);
    CHECK(pc[0].holds);

    const auto pc_na =
        verify_risk_properties(lat, example1(1.0, 1.0), claims, {RiskProperty::positive_constancy});
    CHECK_FALSE(pc_na[0].applicable);

    const auto tc = verify_risk_properties(lat, example1(1.0, 1.0), claims,
                                           {RiskProperty::time_consistency});
    CHECK(tc[0].holds);
    CHECK(tc[0].worst_violation <= 1e-12);

    const auto reg =
        verify_risk_properties(lat, example2_default(), claims, {RiskProperty::regularity});
    CHECK(reg[0].holds);
}

TEST_CASE("sublinearity for a sublinear driver") {
    const BrownianLattice lat = build_lattice(1.0, 32);
    const std::vector<TerminalClaim> claims = {identity_claim(), call_claim(0.5)};
    const auto rep = verify_risk_properties(lat, scaled_abs_z(0.5), claims,
                                            {RiskProperty::sublinear});
    CHECK(rep[0].holds);
}

TEST_CASE("return risk measure: pos-hom convex driver vanishing on (1,0)") {
    // g(y,z) = 0.4 * max(-y, 0): positively homogeneous, convex, nonnegative,
    // zero on constants >= 0. The induced measure is sublinear,
    // positive-constant and cash-subadditive.
    DriverFlags f;
    f.convex = f.star_shaped = f.pos_hom = f.decreasing_y = true;
    f.normalized_at_origin = f.nonnegative = f.lsc = true;
    const Driver d("pos_part_neg_y",
                   [](int, int, double y, double) { return ExtReal(0.4 * std::max(-y, 0.0)); },
                   0.4, f);
    const BrownianLattice lat = build_lattice(1.0, 32);
    const std::vector<TerminalClaim> claims = {identity_claim(), call_claim(0.0)};
    const auto reps = verify_risk_properties(
        lat, d, claims,
        {RiskProperty::sublinear, RiskProperty::positive_constancy,
         RiskProperty::cash_subadditive});
    for (const auto& rep : reps) {
        CHECK(rep.applicable);
        CHECK(rep.holds);
    }
}

TEST_CASE("pointwise-min driver solves below every member") {
    const BrownianLattice lat = build_lattice(1.0, 32);
    DriverFlags f;
    f.convex = f.star_shaped = f.normalized_at_origin = f.lsc = true;
    const Driver b1("b1",
                    [](int, int, double y, double z) {
                        return ExtReal(0.8 * (std::abs(y) + std::abs(z)));
                    },
                    0.8, f);
    const Driver b2 = scaled_abs_z(0.5);
    const Driver mn = pointwise_min_driver({b1, b2});
    const BsdeSolution smin = solve_bsde(lat, mn, identity_claim());
    const BsdeSolution s1 = solve_bsde(lat, b1, identity_claim());
    const BsdeSolution s2 = solve_bsde(lat, b2, identity_claim());
    for (int t = 0; t <= lat.steps(); ++t) {
        for (int j = 0; j <= t; ++j) {
            CHECK(smin.Y.at(t, j) <= s1.Y.at(t, j) + 1e-9);
            CHECK(smin.Y.at(t, j) <= s2.Y.at(t, j) + 1e-9);
        }
    }
    // The induced measure passes the star-shapedness transfer check.
    const auto rep = verify_risk_properties(lat, mn, {identity_claim()},
                                            {RiskProperty::star_shaped});
    CHECK(rep[0].holds);
}

TEST_CASE("example3 raw driver is rejected by the Lipschitz precondition") {
    const BrownianLattice lat = build_lattice(1.0, 32);
    CHECK_THROWS_AS(solve_bsde(lat, example3_default(), identity_claim()), ValidationError);
    CHECK_THROWS_AS(solve_bsde(lat, example2_staircase(), identity_claim()), ValidationError);
}
