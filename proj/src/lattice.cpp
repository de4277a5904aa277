#include "starbsde/lattice.hpp"

#include <cmath>
#include <limits>

namespace starbsde {

BrownianLattice::BrownianLattice(TimeGrid grid)
    : grid_(grid), sqrt_delta_(std::sqrt(grid.delta())) {
    if (!(grid.horizon > 0.0) || !std::isfinite(grid.horizon))
        throw ValidationError("lattice: horizon must be positive and finite");
    if (grid.steps < 1)
        throw ValidationError("lattice: steps must be >= 1");
}

BrownianLattice build_lattice(double horizon, int steps) {
    return BrownianLattice(TimeGrid{horizon, steps});
}

AdaptedProcess::AdaptedProcess(int last_step) {
    if (last_step < 0) throw ValidationError("AdaptedProcess: negative last step");
    layers_.resize(last_step + 1);
    for (int k = 0; k <= last_step; ++k) layers_[k].assign(k + 1, 0.0);
}

TerminalClaim identity_claim() {
    return TerminalClaim{[](double w) { return w; },
                         std::numeric_limits<double>::infinity(), "W_T"};
}

TerminalClaim constant_claim(double c) {
    return TerminalClaim{[c](double) { return c; }, std::abs(c), "const"};
}

TerminalClaim call_claim(double strike) {
    return TerminalClaim{[strike](double w) { return std::max(w - strike, 0.0); },
                         std::numeric_limits<double>::infinity(), "call"};
}

TerminalClaim scaled_claim(const TerminalClaim& base, double factor) {
    auto payoff = base.payoff;
    return TerminalClaim{[payoff, factor](double w) { return factor * payoff(w); },
                         std::numeric_limits<double>::infinity(),
                         base.label + "_scaled"};
}

TerminalClaim shifted_claim(const TerminalClaim& base, double shift) {
    auto payoff = base.payoff;
    return TerminalClaim{[payoff, shift](double w) { return payoff(w) + shift; },
                         std::numeric_limits<double>::infinity(),
                         base.label + "_shifted"};
}

TerminalClaim sum_claim(const TerminalClaim& a, const TerminalClaim& b) {
    auto pa = a.payoff;
    auto pb = b.payoff;
    return TerminalClaim{[pa, pb](double w) { return pa(w) + pb(w); },
                         std::numeric_limits<double>::infinity(),
                         a.label + "+" + b.label};
}

TerminalClaim table_claim(const BrownianLattice& lattice, std::vector<double> values) {
    const int n = lattice.steps();
    if (static_cast<int>(values.size()) != n + 1)
        throw ValidationError("table_claim: need one value per terminal node");
    const double h = lattice.sqrt_delta();
    return TerminalClaim{
        [values, n, h](double w) {
            // Invert w = (2j - n) * sqrt(delta); snap to the nearest node.
            const int j = static_cast<int>(std::lround((w / h + n) / 2.0));
            if (j < 0 || j > n)
                throw ValidationError("table_claim: terminal value off the lattice");
            return values[j];
        },
        std::numeric_limits<double>::infinity(), "table"};
}

std::vector<double> evaluate_claim(const BrownianLattice& lattice, const TerminalClaim& claim) {
    const int n = lattice.steps();
    std::vector<double> out(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double w = lattice.w_value(n, j);
        const double v = claim.payoff(w);
        if (!std::isfinite(v))
            throw NumericalError("evaluate_claim: non-finite payoff at terminal node " +
                                 std::to_string(j));
        if (std::isfinite(claim.bound) && std::abs(v) > claim.bound + 1e-12)
            throw ValidationError("evaluate_claim: payoff exceeds declared bound at node " +
                                  std::to_string(j));
        out[j] = v;
    }
    return out;
}

std::vector<double> reference_weights(int step) {
    std::vector<double> w(step + 1, 0.0);
    w[0] = 1.0;
    for (int k = 1; k <= step; ++k) {
        for (int j = k; j >= 1; --j) w[j] = 0.5 * (w[j] + w[j - 1]);
        w[0] *= 0.5;
    }
    return w;
}

} // namespace starbsde
