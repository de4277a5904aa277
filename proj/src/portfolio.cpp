#include "starbsde/portfolio.hpp"

#include <algorithm>
#include <cmath>

namespace starbsde {

void Market::validate() const {
    if (!(sigma > 1e-12)) throw ValidationError("market: sigma must be bounded away from 0");
    if (!std::isfinite(drift) || !std::isfinite(x0))
        throw ValidationError("market: non-finite parameters");
}

Policy constant_policy(const BrownianLattice& lattice, double level) {
    return Policy(lattice.steps(), level);
}

namespace {

bool is_constant(const Policy& p) {
    for (double v : p)
        if (v != p.front()) return false;
    return true;
}

TerminalClaim wealth_plus_claim(const Market& market, double level, double horizon,
                                const TerminalClaim& F) {
    auto payoff = F.payoff;
    const double base = market.x0 + level * market.drift * horizon;
    const double vol = level * market.sigma;
    return TerminalClaim{[payoff, base, vol](double w) { return base + vol * w + payoff(w); },
                         std::numeric_limits<double>::infinity(), "wealth+" + F.label};
}

} // namespace

AdaptedProcess simulate_wealth(const BrownianLattice& lattice, const Market& market,
                               const Policy& policy) {
    market.validate();
    if (static_cast<int>(policy.size()) != lattice.steps())
        throw ValidationError("simulate_wealth: policy needs one value per step");
    if (!is_constant(policy))
        throw ValidationError("simulate_wealth: time-varying policies make wealth "
                              "path-dependent; only constant policies have a node-valued "
                              "wealth process");
    const double pi = policy.front();
    AdaptedProcess wealth(lattice.steps());
    for (int t = 0; t <= lattice.steps(); ++t)
        for (int j = 0; j <= t; ++j)
            wealth.at(t, j) = market.x0 + pi * market.drift * lattice.grid().time_at(t) +
                              pi * market.sigma * lattice.w_value(t, j);
    return wealth;
}

PortfolioSolution optimize_portfolio(const BrownianLattice& lattice, const Driver& d,
                                     const Market& market, const StrategyGrid& grid,
                                     const TerminalClaim& F) {
    market.validate();
    if (grid.levels.empty()) throw ValidationError("optimize_portfolio: empty strategy grid");
    if (!d.flags().star_shaped)
        throw ValidationError("optimize_portfolio: requires a star-shaped driver");

    std::vector<double> levels = grid.levels;
    std::sort(levels.begin(), levels.end());

    PortfolioSolution sol;
    sol.value = std::numeric_limits<double>::infinity();
    for (double level : levels) {
        const TerminalClaim claim = wealth_plus_claim(market, level, lattice.horizon(), F);
        const double rho0 = solve_bsde(lattice, d, claim).Y.at(0, 0);
        sol.table.push_back({level, rho0});
        if (rho0 < sol.value) {  // strict: ties keep the smallest level
            sol.value = rho0;
            sol.pi_star = level;
            sol.winner = static_cast<int>(sol.table.size()) - 1;
        }
    }
    return sol;
}

LinearDecompositionReport verify_linear_decomposition(const BrownianLattice& lattice,
                                                      const Driver& d, const Market& market,
                                                      const StrategyGrid& grid,
                                                      const TerminalClaim& F) {
    const DriverFlags& fl = d.flags();
    if (!fl.star_shaped || !fl.y_independent || !fl.nonnegative || !fl.normalized_at_origin)
        throw ValidationError("verify_linear_decomposition: driver must be star-shaped, "
                              "y-independent, nonnegative and normalized");

    LinearDecompositionReport rep;
    rep.solution = optimize_portfolio(lattice, d, market, grid, F);
    const double pibar = rep.solution.pi_star;

    // Witness member of the winning solve.
    const TerminalClaim win_claim = wealth_plus_claim(market, pibar, lattice.horizon(), F);
    const MinRepresentation mr = min_representation(lattice, d, win_claim);

    // gtilde(t, z) = pibar*b + g^gammabar(t, z + pibar*sigma).
    const Driver member = mr.envelope;
    const double shift = pibar * market.sigma;
    const double drift_term = pibar * market.drift;
    DriverFlags tf;
    tf.convex = true;
    tf.y_independent = true;
    tf.lsc = true;
    const Driver transformed(
        "portfolio_transformed",
        [member, shift, drift_term](int step, int node, double y, double z) {
            return ExtReal(drift_term) + member(step, node, y, z + shift);
        },
        member.lipschitz_k(), tf);

    const BsdeSolution inner = solve_bsde(lattice, transformed, F);
    const AdaptedProcess wealth =
        simulate_wealth(lattice, market, constant_policy(lattice, pibar));

    // V_t (the winner's value process) against X^pibar_t + Y^gammabar_t.
    const BsdeSolution winner_process = solve_bsde(lattice, d, win_claim);
    for (int t = 0; t <= lattice.steps(); ++t)
        for (int j = 0; j <= t; ++j)
            rep.max_decomposition_gap =
                std::max(rep.max_decomposition_gap,
                         std::abs(winner_process.Y.at(t, j) -
                                  (wealth.at(t, j) + inner.Y.at(t, j))));
    rep.decomposition_ok = rep.max_decomposition_gap <= 1e-8;

    // Interchange of minima on the candidate table M[pi][gamma] where gamma
    // ranges over the witness members of all candidates.
    std::vector<double> levels = grid.levels;
    std::sort(levels.begin(), levels.end());
    std::vector<Driver> members;
    members.reserve(levels.size());
    for (double level : levels) {
        const TerminalClaim claim = wealth_plus_claim(market, level, lattice.horizon(), F);
        members.push_back(min_representation(lattice, d, claim).envelope);
    }
    std::vector<std::vector<double>> table(levels.size(),
                                           std::vector<double>(members.size()));
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const TerminalClaim claim = wealth_plus_claim(market, levels[i], lattice.horizon(), F);
        for (std::size_t gidx = 0; gidx < members.size(); ++gidx)
            table[i][gidx] = solve_bsde(lattice, members[gidx], claim).Y.at(0, 0);
    }
    double min_pi_gamma = std::numeric_limits<double>::infinity();
    std::size_t winner_pi_a = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        double inner_min = std::numeric_limits<double>::infinity();
        for (std::size_t gidx = 0; gidx < members.size(); ++gidx)
            inner_min = std::min(inner_min, table[i][gidx]);
        if (inner_min < min_pi_gamma) {
            min_pi_gamma = inner_min;
            winner_pi_a = i;
        }
    }
    double min_gamma_pi = std::numeric_limits<double>::infinity();
    std::size_t winner_pi_b = 0;
    for (std::size_t gidx = 0; gidx < members.size(); ++gidx) {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (table[i][gidx] < min_gamma_pi) {
                min_gamma_pi = table[i][gidx];
                winner_pi_b = i;
            }
        }
    }
    rep.interchange_gap = std::abs(min_pi_gamma - min_gamma_pi);
    rep.interchange_ok = rep.interchange_gap == 0.0;
    rep.minimizer_consistent =
        levels[winner_pi_a] == rep.solution.pi_star && winner_pi_a == winner_pi_b;
    return rep;
}

} // namespace starbsde
