#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "starbsde/errors.hpp"

namespace starbsde {

/// Uniform time grid on [0, T] with N steps. delta is always derived as T/N,
/// never stored, so it cannot drift from the horizon.
struct TimeGrid {
    double horizon = 1.0;
    int steps = 1;

    double delta() const { return horizon / steps; }
    double time_at(int step) const { return step * delta(); }
};

/// Recombining binomial carrier of a one-dimensional Brownian motion.
///
/// Layer k has k+1 nodes; node j at step k carries the Brownian value
/// (2j - k) * sqrt(delta), computed from the closed form rather than
/// accumulated. The children of (step, node) are (step+1, node+1) on the up
/// branch (+sqrt(delta)) and (step+1, node) on the down branch. Up and down
/// carry probability 1/2 each under the reference measure.
///
/// Immutable after construction; safe for concurrent reads.
class BrownianLattice {
public:
    explicit BrownianLattice(TimeGrid grid);

    const TimeGrid& grid() const { return grid_; }
    int steps() const { return grid_.steps; }
    double horizon() const { return grid_.horizon; }
    double delta() const { return grid_.delta(); }
    double sqrt_delta() const { return sqrt_delta_; }

    int node_count(int step) const { return step + 1; }
    double w_value(int step, int node) const {
        return (2.0 * node - step) * sqrt_delta_;
    }

private:
    TimeGrid grid_;
    double sqrt_delta_;
};

/// Build a lattice with N+1 layers. Rejects non-positive horizon or steps.
BrownianLattice build_lattice(double horizon, int steps);

/// Real-valued process indexed by (step, node); the value at (step, node)
/// depends only on information up to that step by construction.
class AdaptedProcess {
public:
    AdaptedProcess() = default;

    /// Zero-initialised layers 0..last_step (layer k has k+1 entries).
    explicit AdaptedProcess(int last_step);

    double at(int step, int node) const { return layers_[step][node]; }
    double& at(int step, int node) { return layers_[step][node]; }

    int last_step() const { return static_cast<int>(layers_.size()) - 1; }
    const std::vector<double>& layer(int step) const { return layers_[step]; }
    std::vector<double>& layer(int step) { return layers_[step]; }

private:
    std::vector<std::vector<double>> layers_;
};

/// Terminal position as a function of the terminal Brownian value (the
/// recombining lattice restricts claims to Markovian payoffs). `bound`, when
/// finite, declares sup |payoff| over reachable terminal values and is
/// verified at evaluation.
struct TerminalClaim {
    std::function<double(double)> payoff;
    double bound = std::numeric_limits<double>::infinity();
    std::string label = "claim";
};

TerminalClaim identity_claim();                   // X = W_T
TerminalClaim constant_claim(double c);
TerminalClaim call_claim(double strike);          // X = max(W_T - strike, 0)
TerminalClaim scaled_claim(const TerminalClaim& base, double factor);
TerminalClaim shifted_claim(const TerminalClaim& base, double shift);
TerminalClaim sum_claim(const TerminalClaim& a, const TerminalClaim& b);
/// Payoff given by a value table over the terminal nodes of `lattice`.
TerminalClaim table_claim(const BrownianLattice& lattice, std::vector<double> values);

/// Payoff evaluated on the terminal layer. A non-finite payoff at a reachable
/// node is an evaluation error naming the node.
std::vector<double> evaluate_claim(const BrownianLattice& lattice, const TerminalClaim& claim);

/// Binomial reference-measure weights at `step` (row of probabilities 2^-k * C(k,j)).
std::vector<double> reference_weights(int step);

} // namespace starbsde
