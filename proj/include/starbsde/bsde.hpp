#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starbsde/driver.hpp"
#include "starbsde/lattice.hpp"

namespace starbsde {

/// Solution of the backward recursion
///   Y(N,.) = X,   Z(t) = (Y_up - Y_dn) / (2 sqrt(delta)),
///   Y(t)   = (Y_up + Y_dn)/2 + g(t, Y(t), Z(t)) * delta,
/// with Y implicit in the driver (solved per node by fixed-point iteration)
/// and Z explicit from the two children. fixed_point_residual is the largest
/// per-node residual of the implicit step.
struct BsdeSolution {
    AdaptedProcess Y;  // the dynamic risk measure rho_t
    AdaptedProcess Z;  // control / local volatility, steps 0..N-1
    double fixed_point_residual = 0.0;
};

/// Backward-induction solve on the full lattice. Requires finite lipschitz_k
/// with k * delta <= 0.5 (the error message suggests the smallest admissible
/// N otherwise) and a bounded claim.
BsdeSolution solve_bsde(const BrownianLattice& lattice, const Driver& d,
                        const TerminalClaim& claim);

/// Same recursion started from given layer values at `terminal_step`
/// (solves on steps 0..terminal_step). Used for splicing checks and
/// sub-tree solves.
BsdeSolution solve_bsde_from_layer(const BrownianLattice& lattice, const Driver& d,
                                   const std::vector<double>& terminal_values,
                                   int terminal_step);

/// Value at a single node (root_step, root_node) of the sub-BSDE on the
/// subtree rooted there, with terminal payoff `payoff`.
double solve_bsde_subtree(const BrownianLattice& lattice, const Driver& d,
                          const std::function<double(double)>& payoff, int root_step,
                          int root_node);

/// Min representation of a star-shaped generator (the essential-minimum
/// construction): solves the primal, anchors the Pasch-Hausdorff envelope at
/// the witness control (Y, Z), re-solves with the envelope member, and
/// checks node-wise equality.
struct MinRepresentation {
    BsdeSolution primal;
    ControlPath witness;        // (alpha, delta) = (Y, Z)
    Driver envelope;            // convex member attaining the minimum
    BsdeSolution envelope_solution;
    double max_node_gap = 0.0;  // max |envelope Y - primal Y| over all nodes
};

MinRepresentation min_representation(const BrownianLattice& lattice, const Driver& d,
                                     const TerminalClaim& claim);

/// Domination check: envelope members at random anchor paths must dominate
/// the primal node-wise. min_gap is the most negative value of
/// (rho^gamma - rho) seen across all controls and nodes.
struct DominanceReport {
    int n_controls = 0;
    double min_gap = 0.0;
    bool all_dominate = true;
};

DominanceReport dominance_sample(const BrownianLattice& lattice, const Driver& d,
                                 const TerminalClaim& claim, int n_controls,
                                 std::uint64_t seed, double anchor_box = 2.0);

/// Risk-measure property checks evaluated on solved Y processes.
enum class RiskProperty {
    star_shaped,
    pos_hom,
    cash_additive,
    cash_subadditive,
    positive_constancy,
    time_consistency,
    regularity,
    sublinear,
};

struct RiskPropertyReport {
    RiskProperty mode;
    bool applicable = true;   // false: precondition unmet, not a failure
    bool holds = true;
    double worst_violation = 0.0;
    std::string detail;
};

std::vector<RiskPropertyReport> verify_risk_properties(const BrownianLattice& lattice,
                                                       const Driver& d,
                                                       const std::vector<TerminalClaim>& claims,
                                                       const std::vector<RiskProperty>& modes);

const char* risk_property_name(RiskProperty p);

} // namespace starbsde
