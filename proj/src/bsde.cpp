#include "starbsde/bsde.hpp"

#include <algorithm>
#include <cmath>

#include "starbsde/rng.hpp"

namespace starbsde {

namespace {

// Implicit-in-y step: solve y = c + g(step, node, y, z) * delta by fixed
// point iteration. The contraction factor is k*delta <= 0.5, so 100
// iterations reach far below the 1e-12 tolerance for any Lipschitz driver.
double implicit_node_solve(const Driver& d, int step, int node, double c, double z,
                           double delta, double& residual_out) {
    double y = c;
    for (int iter = 0; iter < 100; ++iter) {
        const ExtReal gv = d(step, node, y, z);
        if (!gv.finite())
            throw NumericalError("solve_bsde: driver is +infinity at step " +
                                 std::to_string(step) + ", node " + std::to_string(node));
        const double y_next = c + gv.value() * delta;
        if (std::abs(y_next - y) <= 1e-13) {
            y = y_next;
            break;
        }
        y = y_next;
    }
    const ExtReal gv = d(step, node, y, z);
    const double residual = std::abs(y - (c + gv.value() * delta));
    if (residual > 1e-12)
        throw NumericalError("solve_bsde: implicit step did not converge at step " +
                             std::to_string(step) + ", node " + std::to_string(node) +
                             " (residual " + std::to_string(residual) + ")");
    residual_out = std::max(residual_out, residual);
    return y;
}

void check_step_size(const BrownianLattice& lattice, const Driver& d) {
    const double k = d.lipschitz_k();
    if (!std::isfinite(k))
        throw ValidationError("solve_bsde: driver '" + d.name() +
                              "' has no finite Lipschitz constant");
    if (k * lattice.delta() > 0.5) {
        const int suggested = static_cast<int>(std::ceil(2.0 * k * lattice.horizon()));
        throw ValidationError("solve_bsde: k*delta > 0.5; increase steps to at least " +
                              std::to_string(suggested));
    }
}

} // namespace

BsdeSolution solve_bsde_from_layer(const BrownianLattice& lattice, const Driver& d,
                                   const std::vector<double>& terminal_values,
                                   int terminal_step) {
    check_step_size(lattice, d);
    if (terminal_step < 0 || terminal_step > lattice.steps())
        throw ValidationError("solve_bsde: terminal step out of range");
    if (static_cast<int>(terminal_values.size()) != terminal_step + 1)
        throw ValidationError("solve_bsde: terminal layer size mismatch");

    const double delta = lattice.delta();
    const double sqrt_delta = lattice.sqrt_delta();

    BsdeSolution sol;
    sol.Y = AdaptedProcess(terminal_step);
    sol.Z = AdaptedProcess(std::max(terminal_step - 1, 0));
    sol.Y.layer(terminal_step) = terminal_values;

    for (int t = terminal_step - 1; t >= 0; --t) {
        for (int j = 0; j <= t; ++j) {
            const double up = sol.Y.at(t + 1, j + 1);
            const double dn = sol.Y.at(t + 1, j);
            const double z = (up - dn) / (2.0 * sqrt_delta);
            const double c = 0.5 * (up + dn);
            sol.Z.at(t, j) = z;
            sol.Y.at(t, j) =
                implicit_node_solve(d, t, j, c, z, delta, sol.fixed_point_residual);
        }
    }
    return sol;
}

BsdeSolution solve_bsde(const BrownianLattice& lattice, const Driver& d,
                        const TerminalClaim& claim) {
    return solve_bsde_from_layer(lattice, d, evaluate_claim(lattice, claim), lattice.steps());
}

double solve_bsde_subtree(const BrownianLattice& lattice, const Driver& d,
                          const std::function<double(double)>& payoff, int root_step,
                          int root_node) {
    check_step_size(lattice, d);
    const int n = lattice.steps();
    const double delta = lattice.delta();
    const double sqrt_delta = lattice.sqrt_delta();

    // Terminal nodes reachable from (root_step, root_node) are
    // root_node .. root_node + (n - root_step); local index 0 at root_node.
    const int width = n - root_step;
    std::vector<double> values(width + 1);
    for (int j = 0; j <= width; ++j) {
        const double v = payoff(lattice.w_value(n, root_node + j));
        if (!std::isfinite(v))
            throw NumericalError("solve_bsde_subtree: non-finite payoff");
        values[j] = v;
    }
    double residual = 0.0;
    for (int t = n - 1; t >= root_step; --t) {
        const int w = t - root_step;
        for (int j = 0; j <= w; ++j) {
            const double up = values[j + 1];
            const double dn = values[j];
            const double z = (up - dn) / (2.0 * sqrt_delta);
            const double c = 0.5 * (up + dn);
            values[j] = implicit_node_solve(d, t, root_node + j, c, z, delta, residual);
        }
    }
    return values[0];
}

MinRepresentation min_representation(const BrownianLattice& lattice, const Driver& d,
                                     const TerminalClaim& claim) {
    MinRepresentation rep;
    rep.primal = solve_bsde(lattice, d, claim);

    const int n = lattice.steps();
    rep.witness.alpha = AdaptedProcess(std::max(n - 1, 0));
    rep.witness.delta = AdaptedProcess(std::max(n - 1, 0));
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j <= t; ++j) {
            rep.witness.alpha.at(t, j) = rep.primal.Y.at(t, j);
            rep.witness.delta.at(t, j) = rep.primal.Z.at(t, j);
        }
    }

    rep.envelope = ph_envelope(d, rep.witness, d.lipschitz_k(), EnvelopeMode::star);
    rep.envelope_solution = solve_bsde(lattice, rep.envelope, claim);

    for (int t = 0; t <= n; ++t)
        for (int j = 0; j <= t; ++j)
            rep.max_node_gap =
                std::max(rep.max_node_gap,
                         std::abs(rep.envelope_solution.Y.at(t, j) - rep.primal.Y.at(t, j)));
    return rep;
}

DominanceReport dominance_sample(const BrownianLattice& lattice, const Driver& d,
                                 const TerminalClaim& claim, int n_controls,
                                 std::uint64_t seed, double anchor_box) {
    const BsdeSolution primal = solve_bsde(lattice, d, claim);
    const int n = lattice.steps();
    Rng rng(seed);

    DominanceReport rep;
    rep.n_controls = n_controls;
    double min_gap = 0.0;
    for (int c = 0; c < n_controls; ++c) {
        ControlPath ctrl;
        ctrl.alpha = AdaptedProcess(std::max(n - 1, 0));
        ctrl.delta = AdaptedProcess(std::max(n - 1, 0));
        for (int t = 0; t < n; ++t) {
            for (int j = 0; j <= t; ++j) {
                ctrl.alpha.at(t, j) = rng.uniform(-anchor_box, anchor_box);
                ctrl.delta.at(t, j) = rng.uniform(-anchor_box, anchor_box);
            }
        }
        const Driver member = ph_envelope(d, ctrl, d.lipschitz_k(), EnvelopeMode::star);
        const BsdeSolution sol = solve_bsde(lattice, member, claim);
        for (int t = 0; t <= n; ++t)
            for (int j = 0; j <= t; ++j)
                min_gap = std::min(min_gap, sol.Y.at(t, j) - primal.Y.at(t, j));
    }
    rep.min_gap = min_gap;
    rep.all_dominate = min_gap >= -1e-9;
    return rep;
}

// ---------------------------------------------------------------------------
// Risk-measure property checks
// ---------------------------------------------------------------------------

namespace {

double max_layer_diff(const AdaptedProcess& a, const AdaptedProcess& b) {
    double worst = 0.0;
    for (int t = 0; t <= std::min(a.last_step(), b.last_step()); ++t)
        for (int j = 0; j <= t; ++j)
            worst = std::max(worst, std::abs(a.at(t, j) - b.at(t, j)));
    return worst;
}

RiskPropertyReport check_scaling(const BrownianLattice& lattice, const Driver& d,
                                 const std::vector<TerminalClaim>& claims, bool pos_hom_mode) {
    RiskPropertyReport rep;
    rep.mode = pos_hom_mode ? RiskProperty::pos_hom : RiskProperty::star_shaped;
    const std::vector<double> lambdas =
        pos_hom_mode ? std::vector<double>{0.5, 2.0} : std::vector<double>{0.25, 0.5, 0.75};
    const BsdeSolution zero_sol = solve_bsde(lattice, d, constant_claim(0.0));
    double worst = 0.0;
    for (const TerminalClaim& claim : claims) {
        const BsdeSolution base = solve_bsde(lattice, d, claim);
        for (double lam : lambdas) {
            const BsdeSolution scaled = solve_bsde(lattice, d, scaled_claim(claim, lam));
            for (int t = 0; t <= lattice.steps(); ++t) {
                for (int j = 0; j <= t; ++j) {
                    const double lhs = scaled.Y.at(t, j);
                    const double mix =
                        lam * base.Y.at(t, j) + (1.0 - lam) * zero_sol.Y.at(t, j);
                    worst = std::max(worst, pos_hom_mode ? std::abs(lhs - lam * base.Y.at(t, j))
                                                         : lhs - mix);
                }
            }
        }
    }
    rep.worst_violation = worst;
    rep.holds = worst <= (pos_hom_mode ? 1e-9 : 1e-8);
    return rep;
}

RiskPropertyReport check_cash(const BrownianLattice& lattice, const Driver& d,
                              const std::vector<TerminalClaim>& claims, bool additive) {
    RiskPropertyReport rep;
    rep.mode = additive ? RiskProperty::cash_additive : RiskProperty::cash_subadditive;
    double worst = -std::numeric_limits<double>::infinity();
    const double c = 0.5;
    for (const TerminalClaim& claim : claims) {
        const BsdeSolution base = solve_bsde(lattice, d, claim);
        const BsdeSolution shifted = solve_bsde(lattice, d, shifted_claim(claim, c));
        for (int t = 0; t <= lattice.steps(); ++t) {
            for (int j = 0; j <= t; ++j) {
                const double diff = shifted.Y.at(t, j) - base.Y.at(t, j) - c;
                worst = std::max(worst, additive ? std::abs(diff) : diff);
            }
        }
        // F_t-measurable shifts: per-node constants on the subtree rooted at
        // an intermediate step.
        const int t = lattice.steps() / 2;
        for (int j = 0; j <= t; j += std::max(1, t / 3)) {
            const double ct = 0.1 * (1 + j % 3);
            auto payoff = claim.payoff;
            const double sub = solve_bsde_subtree(
                lattice, d, [payoff, ct](double w) { return payoff(w) + ct; }, t, j);
            const double diff = sub - base.Y.at(t, j) - ct;
            worst = std::max(worst, additive ? std::abs(diff) : diff);
        }
    }
    rep.worst_violation = worst;
    rep.holds = worst <= (additive ? 1e-9 : 1e-8);
    return rep;
}

} // namespace

std::vector<RiskPropertyReport> verify_risk_properties(const BrownianLattice& lattice,
                                                       const Driver& d,
                                                       const std::vector<TerminalClaim>& claims,
                                                       const std::vector<RiskProperty>& modes) {
    if (claims.empty()) throw ValidationError("verify_risk_properties: no claims supplied");
    std::vector<RiskPropertyReport> out;

    for (RiskProperty mode : modes) {
        switch (mode) {
            case RiskProperty::star_shaped:
                out.push_back(check_scaling(lattice, d, claims, false));
                break;
            case RiskProperty::pos_hom:
                out.push_back(check_scaling(lattice, d, claims, true));
                break;
            case RiskProperty::cash_additive:
                out.push_back(check_cash(lattice, d, claims, true));
                break;
            case RiskProperty::cash_subadditive:
                out.push_back(check_cash(lattice, d, claims, false));
                break;
            case RiskProperty::positive_constancy: {
                RiskPropertyReport rep;
                rep.mode = mode;
                bool vanishes = true;
                for (double c : {0.5, 1.0})
                    for (int t : {0, lattice.steps() / 2})
                        vanishes &= std::abs(d(t, 0, c, 0.0).value_or(1.0)) == 0.0;
                if (!vanishes) {
                    rep.applicable = false;
                    rep.detail = "precondition unmet: g(t,c,0) != 0";
                } else {
                    double worst = 0.0;
                    for (double c : {0.5, 1.0}) {
                        const BsdeSolution sol = solve_bsde(lattice, d, constant_claim(c));
                        for (int t = 0; t <= lattice.steps(); ++t)
                            for (int j = 0; j <= t; ++j)
                                worst = std::max(worst, std::abs(sol.Y.at(t, j) - c));
                    }
                    rep.worst_violation = worst;
                    rep.holds = worst <= 1e-12;
                }
                out.push_back(rep);
                break;
            }
            case RiskProperty::time_consistency: {
                RiskPropertyReport rep;
                rep.mode = mode;
                double worst = 0.0;
                for (const TerminalClaim& claim : claims) {
                    const BsdeSolution full = solve_bsde(lattice, d, claim);
                    const int t = lattice.steps() / 2;
                    const BsdeSolution spliced =
                        solve_bsde_from_layer(lattice, d, full.Y.layer(t), t);
                    worst = std::max(worst, max_layer_diff(spliced.Y, full.Y));
                }
                rep.worst_violation = worst;
                rep.holds = worst <= 1e-12;
                out.push_back(rep);
                break;
            }
            case RiskProperty::regularity: {
                RiskPropertyReport rep;
                rep.mode = mode;
                double worst = 0.0;
                for (const TerminalClaim& claim : claims) {
                    const BsdeSolution full = solve_bsde(lattice, d, claim);
                    const int t = lattice.steps() / 2;
                    for (int j = 0; j <= t; j += 2) {  // the event A = even nodes at step t
                        const double sub =
                            solve_bsde_subtree(lattice, d, claim.payoff, t, j);
                        worst = std::max(worst, std::abs(sub - full.Y.at(t, j)));
                    }
                }
                rep.worst_violation = worst;
                rep.holds = worst <= 1e-12;
                out.push_back(rep);
                break;
            }
            case RiskProperty::sublinear: {
                RiskPropertyReport rep;
                rep.mode = mode;
                const TerminalClaim& a = claims.front();
                const TerminalClaim& b = claims.back();
                const BsdeSolution sa = solve_bsde(lattice, d, a);
                const BsdeSolution sb = solve_bsde(lattice, d, b);
                const BsdeSolution ssum = solve_bsde(lattice, d, sum_claim(a, b));
                double worst = -std::numeric_limits<double>::infinity();
                for (int t = 0; t <= lattice.steps(); ++t)
                    for (int j = 0; j <= t; ++j)
                        worst = std::max(worst, ssum.Y.at(t, j) - sa.Y.at(t, j) - sb.Y.at(t, j));
                const RiskPropertyReport ph = check_scaling(lattice, d, claims, true);
                worst = std::max(worst, ph.worst_violation);
                rep.worst_violation = worst;
                rep.holds = worst <= 1e-8;
                out.push_back(rep);
                break;
            }
        }
    }
    return out;
}

const char* risk_property_name(RiskProperty p) {
    switch (p) {
        case RiskProperty::star_shaped: return "star_shaped";
        case RiskProperty::pos_hom: return "pos_hom";
        case RiskProperty::cash_additive: return "cash_additive";
        case RiskProperty::cash_subadditive: return "cash_subadditive";
        case RiskProperty::positive_constancy: return "positive_constancy";
        case RiskProperty::time_consistency: return "time_consistency";
        case RiskProperty::regularity: return "regularity";
        case RiskProperty::sublinear: return "sublinear";
    }
    return "unknown";
}

} // namespace starbsde
