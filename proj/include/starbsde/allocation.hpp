#pragma once

#include <string>
#include <vector>

#include "starbsde/duality.hpp"

namespace starbsde {

struct Quadrature {
    enum class Rule { gauss_legendre, trapezoid };
    Rule rule = Rule::gauss_legendre;
    int n = 32;
};

/// Gauss-Legendre nodes/weights on (0,1) (Newton on the Legendre
/// polynomial; deterministic).
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Allocation of X inside portfolio Y at step t. `values` holds one entry
/// per node of step t (a single entry at t = 0).
struct AllocationResult {
    std::vector<double> values;
    double value = 0.0;               // values[0]
    double rho_portfolio = 0.0;       // rho_t(Y) at node 0, for consistency checks
    DualControl scenario;             // (beta^Y, q^Y) used by the SS rule
    std::vector<double> m_nodes;      // quadrature abscissas (AS variants)
};

/// Subdifferential CAR: Lambda^SS(X, Y) = E_{Q^{q^Y}}[ D^{beta^Y} X ] -
/// penalty, evaluated at the witness scenario of rho_t(Y) (the min
/// representation's envelope member and its attaining dual control; the
/// canonical selection has zero conjugate penalty along its own path).
AllocationResult car_subdifferential(const BrownianLattice& lattice, const Driver& d,
                                     const TerminalClaim& X, const TerminalClaim& Y, int t);

/// Aumann-Shapley CAR: the member gamma^Y is fixed by rho_t(Y); for each
/// quadrature node m the member is solved at claim mY, its subgradient
/// scenario extracted, and E_Q[D X] (no penalty) accumulated over m.
AllocationResult car_aumann_shapley(const BrownianLattice& lattice, const Driver& d,
                                    const TerminalClaim& X, const TerminalClaim& Y, int t,
                                    const Quadrature& quad = {});

/// Penalized Aumann-Shapley CAR: quadrature over m of Lambda^SS(X, mY)
/// (each node re-solves the star-shaped representation at mY).
AllocationResult car_penalized_as(const BrownianLattice& lattice, const Driver& d,
                                  const TerminalClaim& X, const TerminalClaim& Y, int t,
                                  const Quadrature& quad = {});

/// Terminal kernel weights of Lambda^AS(., Y): nonnegative weights w with
/// Lambda^AS(X, Y) = sum_j w_j X(terminal node j). Used for the
/// monotonicity / kernel positivity check.
std::vector<double> as_kernel_weights(const BrownianLattice& lattice, const Driver& d,
                                      const TerminalClaim& Y, const Quadrature& quad = {});

struct AllocationAxiomReport {
    std::string axiom;
    bool applicable = true;
    bool holds = true;
    double worst_violation = 0.0;
};

/// Axiom suite on a fixture (X1, X2, Y): normalization, monotonicity, full
/// allocation, sub-allocation, weak convexity, 1-cash-additivity /
/// 1-cash-subadditivity per driver flags, modified no-undercut, audacious
/// bound for the penalized AS rule.
std::vector<AllocationAxiomReport> verify_allocation_axioms(const BrownianLattice& lattice,
                                                            const Driver& d,
                                                            const TerminalClaim& X1,
                                                            const TerminalClaim& X2,
                                                            const TerminalClaim& Y,
                                                            const Quadrature& quad = {});

} // namespace starbsde
