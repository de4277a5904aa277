#pragma once

#include <vector>

#include "starbsde/bsde.hpp"

namespace starbsde {

/// Single-stock market with null interest rate: dS/S = b dt + sigma dW.
struct Market {
    double drift = 0.0;
    double sigma = 1.0;   // must be bounded away from 0
    double x0 = 0.0;

    void validate() const;
};

/// Finite set of capital-in-stock levels; candidate policies are constant
/// unless explicit time-indexed policies are supplied.
struct StrategyGrid {
    std::vector<double> levels;
};

/// Per-step capital in stock. Constant policies keep the wealth a function
/// of the running Brownian value; genuinely time-varying policies make
/// wealth path-dependent, so they are admitted only through the
/// y-independent driver transformation that never materialises the wealth
/// tree.
using Policy = std::vector<double>;

Policy constant_policy(const BrownianLattice& lattice, double level);

/// Wealth process X^pi(t, node) = x0 + pi*b*t + pi*sigma*W for a constant
/// policy. Rejects time-varying policies (path-dependent wealth).
AdaptedProcess simulate_wealth(const BrownianLattice& lattice, const Market& market,
                               const Policy& policy);

struct PortfolioCandidate {
    double level = 0.0;      // constant policy level
    double rho0 = 0.0;       // rho_0(X^pi_T + F)
};

struct PortfolioSolution {
    double value = 0.0;      // V_0(F) = min over candidates
    double pi_star = 0.0;    // winning level (ties -> smallest level)
    int winner = -1;
    std::vector<PortfolioCandidate> table;
};

/// Exhaustive enumeration over the constant policies of the grid: for each
/// candidate solve the star-shaped BSDE of X^pi_T + F and take the minimum
/// (ties broken by the smallest level).
PortfolioSolution optimize_portfolio(const BrownianLattice& lattice, const Driver& d,
                                     const Market& market, const StrategyGrid& grid,
                                     const TerminalClaim& F);

/// Linear-utility decomposition V_t = X^pibar_t + Y^gammabar_t where
/// Y^gammabar solves the BSDE with terminal F and transformed driver
/// gtilde(t,z) = pibar*b + g^gammabar(t, z + pibar*sigma). Requires a
/// star-shaped, y-independent, nonnegative, normalized driver.
struct LinearDecompositionReport {
    PortfolioSolution solution;
    double max_decomposition_gap = 0.0;  // node-wise at every step
    bool decomposition_ok = false;
    double interchange_gap = 0.0;        // |min_pi min_gamma - min_gamma min_pi|
    bool interchange_ok = false;
    bool minimizer_consistent = false;   // both enumerations pick the same policy
};

LinearDecompositionReport verify_linear_decomposition(const BrownianLattice& lattice,
                                                      const Driver& d, const Market& market,
                                                      const StrategyGrid& grid,
                                                      const TerminalClaim& F);

} // namespace starbsde
