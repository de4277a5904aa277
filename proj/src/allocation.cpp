#include "starbsde/allocation.hpp"

#include <algorithm>
#include <cmath>

namespace starbsde {

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 2) throw ValidationError("gauss_legendre: need at least 2 nodes");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-angle initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);  // map [-1,1] -> (0,1), ascending
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
}

namespace {

std::vector<double> quad_nodes(const Quadrature& quad, std::vector<double>& weights) {
    std::vector<double> nodes;
    if (quad.rule == Quadrature::Rule::gauss_legendre) {
        gauss_legendre_01(quad.n, nodes, weights);
    } else {
        if (quad.n < 2) throw ValidationError("quadrature: need at least 2 nodes");
        nodes.resize(quad.n);
        weights.assign(quad.n, 1.0 / (quad.n - 1));
        weights.front() = weights.back() = 0.5 / (quad.n - 1);
        for (int i = 0; i < quad.n; ++i) nodes[i] = static_cast<double>(i) / (quad.n - 1);
        nodes.front() = 1e-4;  // the integrand's scenario may be discontinuous at m = 0
    }
    return nodes;
}

struct WitnessScenario {
    Driver member;
    DualControl control;
    double rho0 = 0.0;
};

WitnessScenario witness_scenario(const BrownianLattice& lattice, const Driver& d,
                                 const TerminalClaim& Y) {
    const MinRepresentation mr = min_representation(lattice, d, Y);
    WitnessScenario w{mr.envelope, witness_dual_control(mr.envelope, lattice, mr.primal),
                      mr.primal.Y.at(0, 0)};
    return w;
}

} // namespace

AllocationResult car_subdifferential(const BrownianLattice& lattice, const Driver& d,
                                     const TerminalClaim& X, const TerminalClaim& Y, int t) {
    if (!d.flags().star_shaped)
        throw ValidationError("car_subdifferential: requires a star-shaped driver");
    if (t >= lattice.steps()) throw ValidationError("car_subdifferential: t must be < N");

    const WitnessScenario w = witness_scenario(lattice, d, Y);
    const Conjugate G = conjugate_of(w.member);
    AllocationResult out;
    out.values = dual_evaluate(lattice, X, w.control, G, t);
    out.value = out.values[0];
    out.rho_portfolio = w.rho0;
    out.scenario = w.control;
    return out;
}

AllocationResult car_aumann_shapley(const BrownianLattice& lattice, const Driver& d,
                                    const TerminalClaim& X, const TerminalClaim& Y, int t,
                                    const Quadrature& quad) {
    if (!d.flags().star_shaped)
        throw ValidationError("car_aumann_shapley: requires a star-shaped driver");
    if (t >= lattice.steps()) throw ValidationError("car_aumann_shapley: t must be < N");

    const MinRepresentation mr = min_representation(lattice, d, Y);
    const Conjugate zero_pen = zero_conjugate();

    std::vector<double> weights;
    const std::vector<double> nodes = quad_nodes(quad, weights);

    AllocationResult out;
    out.values.assign(t + 1, 0.0);
    out.m_nodes = nodes;
    out.rho_portfolio = mr.primal.Y.at(0, 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double m = nodes[i];
        const BsdeSolution sol_m =
            solve_bsde(lattice, mr.envelope, scaled_claim(Y, m));
        const DualControl ctrl_m = extract_dual_control(mr.envelope, lattice, sol_m);
        const std::vector<double> part = dual_evaluate(lattice, X, ctrl_m, zero_pen, t);
        for (int j = 0; j <= t; ++j) out.values[j] += weights[i] * part[j];
    }
    out.value = out.values[0];
    return out;
}

AllocationResult car_penalized_as(const BrownianLattice& lattice, const Driver& d,
                                  const TerminalClaim& X, const TerminalClaim& Y, int t,
                                  const Quadrature& quad) {
    if (!d.flags().star_shaped)
        throw ValidationError("car_penalized_as: requires a star-shaped driver");
    if (t >= lattice.steps()) throw ValidationError("car_penalized_as: t must be < N");

    std::vector<double> weights;
    const std::vector<double> nodes = quad_nodes(quad, weights);

    AllocationResult out;
    out.values.assign(t + 1, 0.0);
    out.m_nodes = nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const AllocationResult part =
            car_subdifferential(lattice, d, X, scaled_claim(Y, nodes[i]), t);
        for (int j = 0; j <= t; ++j) out.values[j] += weights[i] * part.values[j];
    }
    out.value = out.values[0];
    out.rho_portfolio = solve_bsde(lattice, d, Y).Y.at(0, 0);
    return out;
}

std::vector<double> as_kernel_weights(const BrownianLattice& lattice, const Driver& d,
                                      const TerminalClaim& Y, const Quadrature& quad) {
    const MinRepresentation mr = min_representation(lattice, d, Y);
    const int n = lattice.steps();
    const double delta = lattice.delta();
    const double sqrt_delta = lattice.sqrt_delta();

    std::vector<double> weights;
    const std::vector<double> nodes = quad_nodes(quad, weights);

    std::vector<double> kernel(n + 1, 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const BsdeSolution sol_m =
            solve_bsde(lattice, mr.envelope, scaled_claim(Y, nodes[i]));
        const DualControl ctrl = extract_dual_control(mr.envelope, lattice, sol_m);
        // Forward propagation of the discounted tilted measure.
        std::vector<double> w(1, 1.0);
        for (int s = 0; s < n; ++s) {
            std::vector<double> next(s + 2, 0.0);
            for (int j = 0; j <= s; ++j) {
                const double q = ctrl.q.at(s, j);
                const double beta = ctrl.beta.at(s, j);
                const double p_up = 0.5 * (1.0 - q * sqrt_delta);
                const double disc = 1.0 / (1.0 + beta * delta);
                next[j + 1] += w[j] * p_up * disc;
                next[j] += w[j] * (1.0 - p_up) * disc;
            }
            w = std::move(next);
        }
        for (int j = 0; j <= n; ++j) kernel[j] += weights[i] * w[j];
    }
    return kernel;
}

std::vector<AllocationAxiomReport> verify_allocation_axioms(const BrownianLattice& lattice,
                                                            const Driver& d,
                                                            const TerminalClaim& X1,
                                                            const TerminalClaim& X2,
                                                            const TerminalClaim& Y,
                                                            const Quadrature& quad) {
    std::vector<AllocationAxiomReport> out;
    const int t = 0;
    const TerminalClaim Xsum = sum_claim(X1, X2);

    const double rho_Y = solve_bsde(lattice, d, Y).Y.at(0, 0);
    const WitnessScenario wit = witness_scenario(lattice, d, Y);
    const Conjugate G = conjugate_of(wit.member);

    auto lam_ss = [&](const TerminalClaim& X) {
        return dual_evaluate(lattice, X, wit.control, G, t)[0];
    };

    // Normalization: Lambda(0, Y) = 0.
    {
        AllocationAxiomReport r{"normalization"};
        r.worst_violation = std::abs(lam_ss(constant_claim(0.0)));
        r.holds = r.worst_violation <= 1e-12;
        out.push_back(r);
    }
    // Monotonicity in X (SS rule; the scenario kernel is nonnegative).
    {
        AllocationAxiomReport r{"monotonicity"};
        const double lo = lam_ss(X1);
        const double hi = lam_ss(shifted_claim(X1, 0.3));
        r.worst_violation = lo - hi;
        r.holds = r.worst_violation <= 1e-9;
        out.push_back(r);
    }
    // Full allocation / consistency of the SS rule.
    {
        AllocationAxiomReport r{"full_allocation_ss"};
        r.worst_violation = std::abs(lam_ss(Y) - rho_Y);
        r.holds = r.worst_violation <= 1e-8;
        out.push_back(r);
    }
    // Full allocation of the AS rule (quadrature-limited off the
    // positively homogeneous case).
    {
        AllocationAxiomReport r{"full_allocation_as"};
        const AllocationResult as = car_aumann_shapley(lattice, d, Y, Y, t, quad);
        r.worst_violation = std::abs(as.value - rho_Y);
        r.holds = r.worst_violation <= (d.flags().pos_hom ? 1e-6 : 1e-3);
        out.push_back(r);
    }
    // Sub-allocation of the penalized AS rule.
    {
        AllocationAxiomReport r{"sub_allocation"};
        const double whole = car_penalized_as(lattice, d, Xsum, Y, t, quad).value;
        const double parts = car_penalized_as(lattice, d, X1, Y, t, quad).value +
                             car_penalized_as(lattice, d, X2, Y, t, quad).value;
        r.worst_violation = parts - whole;
        r.holds = r.worst_violation <= 1e-8;
        out.push_back(r);
    }
    // Weak convexity of the SS rule at a1 = a2 = 1/2.
    {
        AllocationAxiomReport r{"weak_convexity"};
        const double mix = lam_ss(scaled_claim(Xsum, 0.5));
        const double bound = 0.5 * lam_ss(X1) + 0.5 * lam_ss(X2);
        r.worst_violation = mix - bound;
        r.holds = r.worst_violation <= 1e-8;
        out.push_back(r);
    }
    // 1-cash-additivity (y-independent drivers have beta = 0).
    {
        AllocationAxiomReport r{"one_cash_additivity"};
        if (!d.flags().y_independent) {
            r.applicable = false;
        } else {
            const double c = 0.3;
            r.worst_violation = std::abs(lam_ss(shifted_claim(X1, c)) - lam_ss(X1) - c);
            r.holds = r.worst_violation <= 1e-9;
        }
        out.push_back(r);
    }
    // 1-cash-subadditivity (decreasing-y drivers have beta >= 0).
    {
        AllocationAxiomReport r{"one_cash_subadditivity"};
        if (!d.flags().decreasing_y) {
            r.applicable = false;
        } else {
            const double c = 0.3;
            r.worst_violation = lam_ss(shifted_claim(X1, c)) - lam_ss(X1) - c;
            r.holds = r.worst_violation <= 1e-8;
        }
        out.push_back(r);
    }
    // Modified no-undercut: Lambda^SS(X, Y) <= rho^{gamma^Y}(X).
    {
        AllocationAxiomReport r{"modified_no_undercut"};
        const double member_rho = solve_bsde(lattice, wit.member, X1).Y.at(0, 0);
        r.worst_violation = lam_ss(X1) - member_rho;
        r.holds = r.worst_violation <= 1e-8;
        out.push_back(r);
    }
    // Audacious bound of the penalized AS rule.
    {
        AllocationAxiomReport r{"audacious"};
        const double pas = car_penalized_as(lattice, d, Y, Y, t, quad).value;
        r.worst_violation = pas - rho_Y;
        r.holds = r.worst_violation <= 1e-8;
        out.push_back(r);
    }
    // Kernel positivity of the AS rule.
    {
        AllocationAxiomReport r{"as_kernel_positivity"};
        const std::vector<double> kernel = as_kernel_weights(lattice, d, Y, quad);
        double most_negative = 0.0;
        for (double w : kernel) most_negative = std::min(most_negative, w);
        r.worst_violation = -most_negative;
        r.holds = most_negative >= 0.0;
        out.push_back(r);
    }
    return out;
}

} // namespace starbsde
