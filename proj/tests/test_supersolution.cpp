#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "starbsde/duality.hpp"
#include "starbsde/rng.hpp"
#include "starbsde/supersolution.hpp"

using namespace starbsde;

TEST_CASE("Lipschitz coincidence: minimal supersolution equals the BSDE solve") {
    const BrownianLattice lat = build_lattice(1.0, 24);
    for (const Driver& d : {scaled_abs_z(0.5), example3_restricted_default()}) {
        const SupersolutionResult sup = minimal_supersolution(lat, d, identity_claim());
        REQUIRE(sup.feasible);
        const BsdeSolution bsde = solve_bsde(lat, d, identity_claim());
        for (int t = 0; t <= lat.steps(); ++t)
            for (int j = 0; j <= t; ++j)
                CHECK(std::abs(sup.Y.at(t, j) - bsde.Y.at(t, j)) <= 1e-8);
    }
    const SupersolutionResult sup = minimal_supersolution(lat, scaled_abs_z(0.5), identity_claim());
    CHECK(std::abs(sup.Y.at(0, 0) - 0.5) <= 1e-8);
    CHECK_FALSE(sup.grid_warning);
}

TEST_CASE("example3 below the first threshold matches the pure quadratic driver") {
    // T and N such that |Z| stays below z_1 = 1 (Z = 1... scale the claim).
    const BrownianLattice lat = build_lattice(1.0, 16);
    const TerminalClaim half = scaled_claim(identity_claim(), 0.5);  // Z = 0.5 on this claim
    const SupersolutionResult constrained =
        minimal_supersolution(lat, example3_default(), half);
    REQUIRE(constrained.feasible);
    const SupersolutionResult quadratic =
        minimal_supersolution(lat, example3_restricted_default(), half);
    REQUIRE(quadratic.feasible);
    for (int t = 0; t <= lat.steps(); ++t)
        for (int j = 0; j <= t; ++j)
            CHECK(std::abs(constrained.Y.at(t, j) - quadratic.Y.at(t, j)) <= 1e-6);
}

TEST_CASE("nonnegative driver dominates the conditional expectation") {
    const BrownianLattice lat = build_lattice(1.0, 16);
    const TerminalClaim neg = shifted_claim(call_claim(0.0), -3.0);  // X <= 0 on most nodes
    const SupersolutionResult sup = minimal_supersolution(lat, example3_restricted_default(), neg);
    REQUIRE(sup.feasible);
    const BsdeSolution expectation = solve_bsde(lat, zero_driver(), neg);
    CHECK(sup.Y.at(0, 0) >= expectation.Y.at(0, 0) - 1e-10);
}

TEST_CASE("minimality: a downward perturbation breaks the inequality at every z") {
    const BrownianLattice lat = build_lattice(1.0, 12);
    const Driver d = example3_restricted_default();
    const SupersolutionResult sup = minimal_supersolution(lat, d, identity_claim());
    REQUIRE(sup.feasible);
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const int t = 1 + static_cast<int>(rng.below(lat.steps() - 1));
        const int j = static_cast<int>(rng.below(t + 1));
        const double y_pert = sup.Y.at(t, j) - 1e-6;
        const double up = sup.Y.at(t + 1, j + 1);
        const double dn = sup.Y.at(t + 1, j);
        bool any_feasible = false;
        for (int i = 0; i <= 400; ++i) {
            const double z = -1.4 + 2.8 * i / 400.0;
            const double C =
                std::max(up - z * lat.sqrt_delta(), dn + z * lat.sqrt_delta());
            const ExtReal g = d(t, j, y_pert, z);
            if (g.finite() && y_pert - g.value() * lat.delta() >= C) any_feasible = true;
        }
        CHECK_FALSE(any_feasible);
    }
}

TEST_CASE("monotonicity in the claim") {
    const BrownianLattice lat = build_lattice(1.0, 16);
    const Driver d = example3_restricted_default();
    const SupersolutionResult lo = minimal_supersolution(lat, d, identity_claim());
    const SupersolutionResult hi =
        minimal_supersolution(lat, d, shifted_claim(identity_claim(), 0.4));
    REQUIRE(lo.feasible);
    REQUIRE(hi.feasible);
    for (int t = 0; t <= lat.steps(); ++t)
        for (int j = 0; j <= t; ++j)
            CHECK(lo.Y.at(t, j) <= hi.Y.at(t, j) + 1e-9);
}

TEST_CASE("representation: witness segment member reproduces E^g, anchors dominate") {
    const BrownianLattice lat = build_lattice(1.0, 16);
    for (const Driver& d : {scaled_abs_z(0.5), example3_restricted_default()}) {
        const SuperRepresentationReport rep =
            verify_super_representation(lat, d, identity_claim(), 10, 41);
        CHECK(rep.witness_ok);
        CHECK(rep.witness_gap <= 1e-8);
        CHECK(rep.domination_ok);
    }
}

TEST_CASE("pos-hom driver: poshom member conjugate vanishes on its domain") {
    const Driver d = scaled_abs_z(0.5);
    const Driver member = ph_envelope(d, 0.0, 1.0, 0.5, EnvelopeMode::poshom);
    const Conjugate G = conjugate_of(member);
    int finite_points = 0;
    for (double q = -0.5; q <= 0.5; q += 0.05) {
        const ExtReal v = G(0, 0, 0.0, q);
        if (v.finite()) {
            ++finite_points;
            CHECK(v.value() == 0.0);
        }
    }
    CHECK(finite_points > 0);
}

TEST_CASE("example2 runs through the supersolution after the positivity shift") {
    // The smoothed example2 is Lipschitz but dips below zero on the positive
    // y-side. The normalizing transform ghat(t,y,z) = g(t, y - c*(T-t), z) + c
    // with c = -inf g is nonnegative and lsc, and its solutions relate to the
    // original ones by Yhat_t = Y_t + c*(T-t) exactly.
    const BrownianLattice lat = build_lattice(1.0, 16);
    const Driver base = example2_default();

    double inf_g = 0.0;
    for (double y = -3.0; y <= 3.0; y += 1e-3)
        inf_g = std::min(inf_g, base(0, 0, y, 0.0).value());
    const double c = -inf_g;
    REQUIRE(c > 0.0);

    const int n = lat.steps();
    const double delta = lat.delta();
    DriverFlags f;
    f.lsc = true;
    f.nonnegative = true;
    const Driver shifted(
        "example2_shifted",
        [base, c, n, delta](int step, int node, double y, double z) {
            return base(step, node, y - c * delta * (n - step), z) + ExtReal(c);
        },
        base.lipschitz_k(), f);

    ZSearchSpec spec;
    spec.points = 201;
    spec.sensitivity_check = false;
    const SupersolutionResult sup = minimal_supersolution(lat, shifted, identity_claim(), spec);
    REQUIRE(sup.feasible);

    // For Lipschitz drivers the DP coincides with the BSDE solve, so the
    // shifted DP must match the original BSDE solution plus c*(T - t).
    const BsdeSolution bsde = solve_bsde(lat, base, identity_claim());
    for (int t = 0; t <= n; ++t)
        for (int j = 0; j <= t; ++j)
            CHECK(std::abs(sup.Y.at(t, j) - (bsde.Y.at(t, j) + c * delta * (n - t))) <= 1e-7);
}
