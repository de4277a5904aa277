#include "starbsde/supersolution.hpp"

#include <algorithm>
#include <cmath>

#include "starbsde/rng.hpp"

namespace starbsde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest y with y - g(t,y,z)*delta >= C, or +inf when z is outside the
// effective domain. For drivers Lipschitz in y the fixed point of
// y = C + g(y)*delta is the unique answer; for lsc staircase drivers the
// map can jump, so fall back to a forward scan plus bisection for the first
// feasible point.
double smallest_feasible_y(const Driver& d, int step, int node, double z, double C,
                           double delta) {
    auto g_at = [&](double y) { return d(step, node, y, z); };

    {
        const ExtReal g0 = g_at(C);
        if (!g0.finite()) return kInf;
        double y = C;
        for (int iter = 0; iter < 100; ++iter) {
            const ExtReal gv = g_at(y);
            if (!gv.finite()) break;
            const double y_next = C + gv.value() * delta;
            if (std::abs(y_next - y) <= 1e-13) {
                const double resid = std::abs(y_next - C - g_at(y_next).value() * delta);
                if (resid <= 1e-12) return y_next;
                break;
            }
            y = y_next;
        }
    }

    // Scan upward from C (g >= 0 forces y >= C) for the first feasible
    // point, then bisect into the entry boundary.
    auto feasible = [&](double y) {
        const ExtReal gv = g_at(y);
        return gv.finite() && y - gv.value() * delta >= C - 1e-12;
    };
    double hi = C + std::max(1.0, std::abs(C));
    int grow = 0;
    while (!feasible(hi) && grow < 60) {
        hi = C + 2.0 * (hi - C);
        ++grow;
    }
    if (!feasible(hi)) return kInf;
    const int scan_points = 2000;
    double lo_scan = C, first_ok = hi;
    for (int i = 1; i <= scan_points; ++i) {
        const double y = C + (hi - C) * i / scan_points;
        if (feasible(y)) {
            first_ok = y;
            lo_scan = C + (hi - C) * (i - 1) / scan_points;
            break;
        }
    }
    double a = lo_scan, b = first_ok;
    if (feasible(a)) return a;
    for (int iter = 0; iter < 100; ++iter) {
        const double m = 0.5 * (a + b);
        if (feasible(m)) b = m;
        else a = m;
    }
    return b;
}

// Effective |z| range: [-k-1, k+1] for Lipschitz drivers, otherwise probe
// the domain boundary outward from 0.
double auto_z_range(const Driver& d) {
    if (std::isfinite(d.lipschitz_k())) return d.lipschitz_k() + 1.0;
    double lo = 0.0, hi = 1.0;
    int grow = 0;
    while (d(0, 0, 0.0, hi).finite() && grow < 40) {
        lo = hi;
        hi *= 2.0;
        ++grow;
    }
    if (grow == 40) return hi;
    for (int iter = 0; iter < 80; ++iter) {
        const double m = 0.5 * (lo + hi);
        (d(0, 0, 0.0, m).finite() ? lo : hi) = m;
    }
    return lo;
}

struct NodeMin {
    double y = kInf;
    double z = 0.0;
};

NodeMin minimize_over_z(const Driver& d, int step, int node, double up, double dn,
                        double sqrt_delta, double delta, double z_lo, double z_hi,
                        int points, bool refine) {
    auto objective = [&](double z) {
        const double C = std::max(up - z * sqrt_delta, dn + z * sqrt_delta);
        return smallest_feasible_y(d, step, node, z, C, delta);
    };

    NodeMin best;
    const double zstar = (up - dn) / (2.0 * sqrt_delta);
    auto consider = [&](double z) {
        const double y = objective(z);
        if (y < best.y) {
            best.y = y;
            best.z = z;
        }
    };
    if (zstar >= z_lo && zstar <= z_hi) consider(zstar);
    const double cell = (z_hi - z_lo) / (points - 1);
    for (int i = 0; i < points; ++i) consider(z_lo + cell * i);

    if (refine && std::isfinite(best.y)) {
        double a = std::max(z_lo, best.z - cell);
        double b = std::min(z_hi, best.z + cell);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = objective(x1), f2 = objective(x2);
        for (int iter = 0; iter < 60 && b - a > 1e-11; ++iter) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = objective(x2);
            }
        }
        consider(0.5 * (a + b));
    }
    return best;
}

bool run_dp(const BrownianLattice& lattice, const Driver& d,
            const std::vector<double>& terminal, double z_lo, double z_hi, int points,
            bool refine, SupersolutionResult& out) {
    const int n = lattice.steps();
    out.Y = AdaptedProcess(n);
    out.Z = AdaptedProcess(std::max(n - 1, 0));
    out.Y.layer(n) = terminal;
    for (int t = n - 1; t >= 0; --t) {
        for (int j = 0; j <= t; ++j) {
            const NodeMin nm =
                minimize_over_z(d, t, j, out.Y.at(t + 1, j + 1), out.Y.at(t + 1, j),
                                lattice.sqrt_delta(), lattice.delta(), z_lo, z_hi, points,
                                refine);
            if (!std::isfinite(nm.y)) return false;
            out.Y.at(t, j) = nm.y;
            out.Z.at(t, j) = nm.z;
        }
    }
    return true;
}

} // namespace

SupersolutionResult minimal_supersolution(const BrownianLattice& lattice, const Driver& d,
                                          const TerminalClaim& claim, const ZSearchSpec& spec) {
    if (!d.flags().lsc || !d.flags().nonnegative)
        throw ValidationError("minimal_supersolution: driver must be lsc and nonnegative");
    if (spec.points < 3) throw ValidationError("minimal_supersolution: z grid too small");

    double z_lo = spec.z_min, z_hi = spec.z_max;
    if (z_lo == 0.0 && z_hi == 0.0) {
        const double r = auto_z_range(d);
        z_lo = -r;
        z_hi = r;
    }
    if (!(z_hi > z_lo)) throw ValidationError("minimal_supersolution: empty z range");

    const std::vector<double> terminal = evaluate_claim(lattice, claim);
    SupersolutionResult out;
    out.feasible = run_dp(lattice, d, terminal, z_lo, z_hi, spec.points, spec.refine, out);
    if (!out.feasible) return out;

    if (spec.sensitivity_check) {
        SupersolutionResult fine;
        if (run_dp(lattice, d, terminal, z_lo, z_hi, 2 * spec.points - 1, spec.refine, fine))
            out.grid_warning = std::abs(fine.Y.at(0, 0) - out.Y.at(0, 0)) > 1e-8;
        else
            out.grid_warning = true;
    }
    return out;
}

SupersolutionResult segment_member_supersolution(const BrownianLattice& lattice,
                                                 const Driver& d, const ControlPath& anchor,
                                                 const TerminalClaim& claim) {
    const int n = lattice.steps();
    const double delta = lattice.delta();
    const double sqrt_delta = lattice.sqrt_delta();
    const double feas_tol = 1e-12;

    SupersolutionResult out;
    out.Y = AdaptedProcess(n);
    out.Z = AdaptedProcess(std::max(n - 1, 0));
    out.Y.layer(n) = evaluate_claim(lattice, claim);

    for (int t = n - 1; t >= 0; --t) {
        for (int j = 0; j <= t; ++j) {
            const double a = anchor.alpha.at(t, j);
            const double dz = anchor.delta.at(t, j);
            const double up = out.Y.at(t + 1, j + 1);
            const double dn = out.Y.at(t + 1, j);
            const ExtReal gB_ext = d(t, j, a, dz);
            const double g0 = d(t, j, 0.0, 0.0).value();

            // Feasible m in [0,1] under the two linear branch constraints
            //   m*(a - delta*(gB - g0) +/- dz*sqrt_delta) >= child + delta*g0.
            double m_lo = 0.0, m_hi = 1.0;
            bool feasible = true;
            if (!gB_ext.finite()) m_hi = 0.0;  // only the origin is on the segment
            const double gB = gB_ext.value_or(0.0);
            const double coeff_common = a - delta * (gB - g0);
            const double rhs_up = up + delta * g0 - feas_tol;
            const double rhs_dn = dn + delta * g0 - feas_tol;
            auto apply = [&](double coeff, double rhs) {
                if (coeff > 0.0) m_lo = std::max(m_lo, rhs / coeff);
                else if (coeff < 0.0) m_hi = std::min(m_hi, rhs / coeff);
                else if (rhs > 0.0) feasible = false;
            };
            apply(coeff_common + dz * sqrt_delta, rhs_up);
            apply(coeff_common - dz * sqrt_delta, rhs_dn);
            if (!feasible || m_lo > m_hi) {
                out.feasible = false;
                return out;
            }
            const double m = a > 0.0 ? m_lo : (a < 0.0 ? m_hi : m_lo);
            out.Y.at(t, j) = m * a;
            out.Z.at(t, j) = m * dz;
        }
    }
    return out;
}

SuperRepresentationReport verify_super_representation(const BrownianLattice& lattice,
                                                      const Driver& d,
                                                      const TerminalClaim& claim, int n_anchors,
                                                      std::uint64_t seed) {
    if (!d.flags().star_shaped)
        throw ValidationError("verify_super_representation: driver must be star-shaped");
    if (!d.flags().normalized_at_origin)
        throw ValidationError("verify_super_representation: driver must be normalized");

    const SupersolutionResult base = minimal_supersolution(lattice, d, claim);
    if (!base.feasible)
        throw NumericalError("verify_super_representation: base problem infeasible");

    SuperRepresentationReport rep;
    const int n = lattice.steps();

    ControlPath witness;
    witness.alpha = AdaptedProcess(std::max(n - 1, 0));
    witness.delta = AdaptedProcess(std::max(n - 1, 0));
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j <= t; ++j) {
            witness.alpha.at(t, j) = base.Y.at(t, j);
            witness.delta.at(t, j) = base.Z.at(t, j);
        }
    }
    const SupersolutionResult member = segment_member_supersolution(lattice, d, witness, claim);
    if (member.feasible) {
        for (int t = 0; t <= n; ++t)
            for (int j = 0; j <= t; ++j)
                rep.witness_gap =
                    std::max(rep.witness_gap, std::abs(member.Y.at(t, j) - base.Y.at(t, j)));
        rep.witness_ok = rep.witness_gap <= 1e-8;
    }

    Rng rng(seed);
    rep.n_anchors = n_anchors;
    double min_gap = 0.0;
    for (int i = 0; i < n_anchors; ++i) {
        ControlPath anchor;
        anchor.alpha = AdaptedProcess(std::max(n - 1, 0));
        anchor.delta = AdaptedProcess(std::max(n - 1, 0));
        for (int t = 0; t < n; ++t) {
            for (int j = 0; j <= t; ++j) {
                anchor.alpha.at(t, j) = rng.uniform(-2.0, 2.0);
                anchor.delta.at(t, j) = rng.uniform(-2.0, 2.0);
            }
        }
        const SupersolutionResult sol = segment_member_supersolution(lattice, d, anchor, claim);
        if (!sol.feasible) {
            ++rep.infeasible_anchors;  // E = +inf dominates trivially
            continue;
        }
        for (int t = 0; t <= n; ++t)
            for (int j = 0; j <= t; ++j)
                min_gap = std::min(min_gap, sol.Y.at(t, j) - base.Y.at(t, j));
    }
    rep.min_domination_gap = min_gap;
    rep.domination_ok = min_gap >= -1e-8;
    return rep;
}

} // namespace starbsde
