#include "starbsde/duality.hpp"

#include <algorithm>
#include <cmath>

#include "starbsde/rng.hpp"

namespace starbsde {

DualControl constant_dual_control(const BrownianLattice& lattice, double beta, double q) {
    const int n = lattice.steps();
    DualControl ctrl;
    ctrl.beta = AdaptedProcess(std::max(n - 1, 0));
    ctrl.q = AdaptedProcess(std::max(n - 1, 0));
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j <= t; ++j) {
            ctrl.beta.at(t, j) = beta;
            ctrl.q.at(t, j) = q;
        }
    }
    return ctrl;
}

Conjugate fenchel_conjugate_grid(const Driver& d, double radius, double resolution) {
    if (!(resolution > 0.0)) throw ValidationError("fenchel_conjugate_grid: resolution <= 0");
    if (!(radius > 0.0)) throw ValidationError("fenchel_conjugate_grid: radius <= 0");
    const Driver base = d;
    const double R = radius, h = resolution;
    Conjugate c;
    c.domain_radius = d.lipschitz_k();
    c.method = Conjugate::Method::grid_sup;
    c.G = [base, R, h](int step, int node, double beta, double q) -> ExtReal {
        double sup = -std::numeric_limits<double>::infinity();
        double arg_y = 0.0, arg_z = 0.0;
        const int m = static_cast<int>(std::floor(R / h));
        for (int i = -m; i <= m; ++i) {
            const double y = i * h;
            for (int j = -m; j <= m; ++j) {
                const double z = j * h;
                const ExtReal g = base(step, node, y, z);
                if (!g.finite()) continue;
                const double v = -beta * y - q * z - g.value();
                if (v > sup) {
                    sup = v;
                    arg_y = y;
                    arg_z = z;
                }
            }
        }
        if (!std::isfinite(sup))
            throw NumericalError("fenchel_conjugate_grid: empty effective domain");
        // Growth test: sup pinned near the boundary and strictly above the
        // value two cells inward means the objective keeps increasing.
        const double edge = m * h - 2.0 * h;
        if (std::abs(arg_y) > edge || std::abs(arg_z) > edge) {
            const double in_y = arg_y - 2.0 * h * ((arg_y > 0) - (arg_y < 0));
            const double in_z = arg_z - 2.0 * h * ((arg_z > 0) - (arg_z < 0));
            const double y_probe = std::abs(arg_y) > edge ? in_y : arg_y;
            const double z_probe = std::abs(arg_z) > edge ? in_z : arg_z;
            const ExtReal g = base(step, node, y_probe, z_probe);
            const double inner = g.finite()
                                     ? -beta * y_probe - q * z_probe - g.value()
                                     : -std::numeric_limits<double>::infinity();
            if (sup > inner + 1e-12) return ExtReal::infinity();
        }
        return ExtReal(sup);
    };
    return c;
}

Conjugate conjugate_of(const Driver& d) {
    if (!d.has_conjugate())
        throw ValidationError("conjugate_of: driver '" + d.name() +
                              "' carries no closed-form conjugate");
    const Driver base = d;
    Conjugate c;
    c.domain_radius = d.lipschitz_k();
    c.method = Conjugate::Method::closed_form;
    c.G = [base](int step, int node, double beta, double q) {
        return base.conjugate(step, node, beta, q);
    };
    return c;
}

Conjugate zero_conjugate() {
    Conjugate c;
    c.domain_radius = std::numeric_limits<double>::infinity();
    c.G = [](int, int, double, double) { return ExtReal(0.0); };
    return c;
}

// ---------------------------------------------------------------------------
// Control extraction
// ---------------------------------------------------------------------------

DualControl extract_dual_control(const Driver& d, const BrownianLattice& lattice,
                                 const BsdeSolution& sol) {
    if (!d.flags().convex)
        throw ValidationError("extract_dual_control: requires a convex driver");
    const double k = d.lipschitz_k();
    if (!std::isfinite(k))
        throw ValidationError("extract_dual_control: requires a finite Lipschitz constant");

    const int n = lattice.steps();
    DualControl ctrl;
    ctrl.beta = AdaptedProcess(std::max(n - 1, 0));
    ctrl.q = AdaptedProcess(std::max(n - 1, 0));

    const double h = 1e-6;
    const double kink_tol = 1e-3;

    for (int t = 0; t < n; ++t) {
        for (int j = 0; j <= t; ++j) {
            const double y = sol.Y.at(t, j);
            const double z = sol.Z.at(t, j);
            auto f = [&](double yy, double zz) { return d(t, j, yy, zz).value(); };
            const double f0 = f(y, z);

            auto candidates = [&](double central, double right, double left) {
                std::vector<double> cs;
                if (std::abs(central - right) > kink_tol || std::abs(central - left) > kink_tol) {
                    cs = {right, left, central};
                } else {
                    cs = {central};
                }
                for (double& v : cs) v = std::clamp(-v, -k, k);
                return cs;
            };

            const auto betas = candidates((f(y + h, z) - f(y - h, z)) / (2 * h),
                                          (f(y + h, z) - f0) / h, (f0 - f(y - h, z)) / h);
            const auto qs = candidates((f(y, z + h) - f(y, z - h)) / (2 * h),
                                       (f(y, z + h) - f0) / h, (f0 - f(y, z - h)) / h);

            double best_beta = betas.front();
            double best_q = qs.front();
            if (d.has_conjugate() && (betas.size() > 1 || qs.size() > 1)) {
                double best_res = std::numeric_limits<double>::infinity();
                for (double b : betas) {
                    for (double qq : qs) {
                        const ExtReal G = d.conjugate(t, j, b, qq);
                        const double res = G.finite()
                                               ? std::abs(f0 + G.value() + b * y + qq * z)
                                               : std::numeric_limits<double>::infinity();
                        if (res < best_res) {
                            best_res = res;
                            best_beta = b;
                            best_q = qq;
                        }
                    }
                }
            }
            ctrl.beta.at(t, j) = best_beta;
            ctrl.q.at(t, j) = best_q;
        }
    }
    return ctrl;
}

DualControl witness_dual_control(const Driver& member, const BrownianLattice& lattice,
                                 const BsdeSolution& sol) {
    if (!member.has_witness_dual())
        throw ValidationError("witness_dual_control: driver '" + member.name() +
                              "' carries no witness dual selector");
    const int n = lattice.steps();
    DualControl ctrl;
    ctrl.beta = AdaptedProcess(std::max(n - 1, 0));
    ctrl.q = AdaptedProcess(std::max(n - 1, 0));
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j <= t; ++j) {
            const auto [beta, q] =
                member.witness_dual(t, j, sol.Y.at(t, j), sol.Z.at(t, j));
            ctrl.beta.at(t, j) = beta;
            ctrl.q.at(t, j) = q;
        }
    }
    return ctrl;
}

// ---------------------------------------------------------------------------
// Dual evaluation
// ---------------------------------------------------------------------------

std::vector<double> dual_evaluate_terminal(const BrownianLattice& lattice,
                                           const std::vector<double>& terminal_values,
                                           const DualControl& ctrl, const Conjugate& G, int t) {
    const int n = lattice.steps();
    if (t < 0 || t > n) throw ValidationError("dual_evaluate: step out of range");
    if (static_cast<int>(terminal_values.size()) != n + 1)
        throw ValidationError("dual_evaluate: terminal layer size mismatch");
    const double delta = lattice.delta();
    const double sqrt_delta = lattice.sqrt_delta();

    std::vector<double> v = terminal_values;
    for (int s = n - 1; s >= t; --s) {
        std::vector<double> next(s + 1);
        for (int j = 0; j <= s; ++j) {
            const double q = ctrl.q.at(s, j);
            const double beta = ctrl.beta.at(s, j);
            if (std::abs(q) * sqrt_delta >= 1.0)
                throw ValidationError("dual_evaluate: |q|*sqrt(delta) >= 1 at step " +
                                      std::to_string(s) + ", node " + std::to_string(j));
            if (1.0 + beta * delta <= 0.0)
                throw ValidationError("dual_evaluate: 1 + beta*delta <= 0 at step " +
                                      std::to_string(s) + ", node " + std::to_string(j));
            const ExtReal Gv = G(s, j, beta, q);
            if (!Gv.finite())
                throw NumericalError("dual_evaluate: infinite conjugate at step " +
                                     std::to_string(s) + ", node " + std::to_string(j));
            const double p_up = 0.5 * (1.0 - q * sqrt_delta);
            const double eq = p_up * v[j + 1] + (1.0 - p_up) * v[j];
            next[j] = (eq - Gv.value() * delta) / (1.0 + beta * delta);
        }
        v = std::move(next);
    }
    return v;
}

std::vector<double> dual_evaluate(const BrownianLattice& lattice, const TerminalClaim& claim,
                                  const DualControl& ctrl, const Conjugate& G, int t) {
    return dual_evaluate_terminal(lattice, evaluate_claim(lattice, claim), ctrl, G, t);
}

// ---------------------------------------------------------------------------
// Min-max verification
// ---------------------------------------------------------------------------

MinmaxReport verify_minmax(const BrownianLattice& lattice, const Driver& d,
                           const TerminalClaim& claim, int n_random_duals, std::uint64_t seed,
                           double tol_minmax) {
    if (!d.flags().star_shaped)
        throw ValidationError("verify_minmax: requires a star-shaped driver");

    MinmaxReport rep;
    const MinRepresentation mr = min_representation(lattice, d, claim);
    rep.primal0 = mr.primal.Y.at(0, 0);
    rep.envelope0 = mr.envelope_solution.Y.at(0, 0);

    const DualControl witness = witness_dual_control(mr.envelope, lattice, mr.primal);
    const Conjugate G = conjugate_of(mr.envelope);
    rep.dual_at_witness = dual_evaluate(lattice, claim, witness, G, 0)[0];
    rep.gap = std::abs(rep.dual_at_witness - rep.primal0);
    rep.gap_ok = rep.gap <= tol_minmax;

    const double k = d.lipschitz_k();
    const bool y_indep = d.flags().y_independent;
    // Discount rates stay nonnegative for cash-subadditive (decreasing-y)
    // drivers; unrestricted in sign otherwise.
    const double beta_lo = d.flags().decreasing_y ? 0.0 : -k;
    Rng rng(seed);
    rep.n_random_duals = n_random_duals;
    double worst = -std::numeric_limits<double>::infinity();
    const int n = lattice.steps();
    for (int i = 0; i < n_random_duals; ++i) {
        DualControl ctrl;
        ctrl.beta = AdaptedProcess(std::max(n - 1, 0));
        ctrl.q = AdaptedProcess(std::max(n - 1, 0));
        for (int t = 0; t < n; ++t) {
            for (int j = 0; j <= t; ++j) {
                const double beta = y_indep ? 0.0 : rng.uniform(beta_lo, k);
                const double q = rng.uniform(-(k - std::abs(beta)), k - std::abs(beta));
                ctrl.beta.at(t, j) = beta;
                ctrl.q.at(t, j) = q;
            }
        }
        const double dual0 = dual_evaluate(lattice, claim, ctrl, G, 0)[0];
        worst = std::max(worst, dual0 - rep.envelope0);
    }
    rep.worst_weak_duality = n_random_duals > 0 ? worst : 0.0;
    rep.weak_duality_ok = rep.worst_weak_duality <= 1e-6;
    return rep;
}

} // namespace starbsde
