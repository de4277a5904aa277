#include "starbsde/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace starbsde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

DriverFlags all_flags() {
    DriverFlags f;
    f.convex = f.star_shaped = f.pos_hom = f.decreasing_y = f.y_independent = true;
    f.normalized_at_origin = f.nonnegative = f.lsc = true;
    return f;
}

// Point-domain conjugate {(b0,q0)} -> 0 with a small tolerance absorbing
// finite-difference noise in extracted controls.
Driver::ConjugateFn point_conjugate(double b0, double q0) {
    return [b0, q0](int, int, double beta, double q) -> ExtReal {
        if (std::abs(beta - b0) <= 1e-9 && std::abs(q - q0) <= 1e-9) return ExtReal(0.0);
        return ExtReal::infinity();
    };
}

} // namespace

// ---------------------------------------------------------------------------
// Built-in drivers
// ---------------------------------------------------------------------------

Driver zero_driver() {
    Driver d("zero", [](int, int, double, double) { return ExtReal(0.0); }, 0.0, all_flags());
    d.set_conjugate(point_conjugate(0.0, 0.0));
    return d;
}

Driver scaled_abs_z(double mu) {
    if (!(mu >= 0.0)) throw ValidationError("scaled_abs_z: mu must be >= 0");
    DriverFlags f;
    f.convex = f.star_shaped = f.pos_hom = f.y_independent = true;
    f.decreasing_y = true;  // vacuously, g does not depend on y
    f.normalized_at_origin = f.nonnegative = f.lsc = true;
    Driver d("scaled_abs_z",
             [mu](int, int, double, double z) { return ExtReal(mu * std::abs(z)); }, mu, f);
    d.set_conjugate([mu](int, int, double beta, double q) -> ExtReal {
        if (std::abs(beta) <= 1e-9 && std::abs(q) <= mu + 1e-9) return ExtReal(0.0);
        return ExtReal::infinity();
    });
    return d;
}

Driver linear_y(double a) {
    DriverFlags f;
    f.convex = f.star_shaped = f.pos_hom = true;
    f.decreasing_y = (a <= 0.0);
    f.y_independent = (a == 0.0);
    f.normalized_at_origin = f.lsc = true;
    f.nonnegative = (a == 0.0);
    Driver d("linear_y", [a](int, int, double y, double) { return ExtReal(a * y); },
             std::abs(a), f);
    d.set_conjugate(point_conjugate(-a, 0.0));
    return d;
}

Driver neg_part_y() {
    DriverFlags f;
    f.star_shaped = f.pos_hom = f.decreasing_y = true;
    f.normalized_at_origin = f.lsc = true;
    return Driver("neg_part_y",
                  [](int, int, double y, double) { return ExtReal(-std::max(y, 0.0)); }, 1.0, f);
}

Driver example1(double gamma, double delta) {
    if (!(gamma >= 0.0) || !(delta >= 0.0))
        throw ValidationError("example1: gamma, delta must be >= 0");
    DriverFlags f;
    f.star_shaped = true;
    f.normalized_at_origin = f.lsc = true;
    const double k = std::max(gamma, 2.0 * delta);
    return Driver(
        "example1",
        [gamma, delta](int, int, double y, double z) {
            const double ay = std::abs(y);
            const double az = std::abs(z);
            const double zpart = az <= 1.0 ? z * z : az;
            return ExtReal(-gamma * ay * std::exp(-ay) + delta * zpart);
        },
        k, f);
}

// --- example2 -------------------------------------------------------------

namespace {

// Monotone rate staircase on x >= 0 with optional linear ramps of width
// `ramp` starting at each threshold (the threshold itself carries the left
// rate, which is the lsc choice for the induced driver values).
struct RateStaircase {
    std::vector<double> thresholds;  // ascending
    std::vector<double> rates;       // size thresholds.size() + 1
    double ramp = 0.0;

    double at(double x) const {
        double r = rates[0];
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            const double t = thresholds[i];
            if (x <= t) return r;
            const double next = rates[i + 1];
            if (ramp > 0.0 && x < t + ramp) return r + (x - t) / ramp * (next - r);
            r = next;
        }
        return r;
    }

    // Max |d/dx (rate(x) * x)| over pieces; the derivative is linear within
    // each piece so the endpoints suffice. Infinite when ramp == 0 and some
    // rate actually jumps.
    double value_lipschitz() const {
        double k = std::abs(rates.back()) * 1.0;
        k = std::max(k, std::abs(rates[0]));
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            const double t = thresholds[i];
            const double a = rates[i], b = rates[i + 1];
            k = std::max({k, std::abs(a), std::abs(b)});
            if (a == b) continue;
            if (ramp == 0.0) return kInf;
            const double slope = (b - a) / ramp;
            // v(x) = (a + slope*(x-t))*x, v'(x) = a + slope*(2x - t)
            k = std::max(k, std::abs(a + slope * (2.0 * t - t)));
            k = std::max(k, std::abs(a + slope * (2.0 * (t + ramp) - t)));
        }
        return k;
    }
};

void check_spacing(const RateStaircase& s, const char* side) {
    if (s.ramp < 0.0) throw ValidationError("example2: ramp_width must be >= 0");
    for (std::size_t i = 1; i < s.thresholds.size(); ++i) {
        if (s.thresholds[i] <= s.thresholds[i - 1])
            throw ValidationError(std::string("example2: thresholds not sorted on ") + side);
        if (s.ramp > 0.0 && s.thresholds[i] - s.thresholds[i - 1] < s.ramp)
            throw ValidationError(std::string("example2: ramp overlaps thresholds on ") + side);
    }
}

} // namespace

Driver example2(std::vector<double> rate_neg, std::vector<double> rate_pos,
                std::vector<double> thresholds, double ramp_width) {
    const std::size_t n = thresholds.size();
    if (n == 0 || rate_neg.size() != n || rate_pos.size() != n)
        throw ValidationError("example2: need matching thresholds and rate vectors");
    for (std::size_t i = 1; i < n; ++i)
        if (thresholds[i] <= thresholds[i - 1])
            throw ValidationError("example2: thresholds not sorted");
    for (std::size_t i = 0; i < n; ++i) {
        if (thresholds[i] == 0.0) throw ValidationError("example2: zero threshold");
        if (rate_neg[i] < 0.0 || rate_pos[i] < 0.0)
            throw ValidationError("example2: rates must be >= 0");
        if (i > 0 && (rate_neg[i] > rate_neg[i - 1] || rate_pos[i] > rate_pos[i - 1]))
            throw ValidationError("example2: rates must be non-increasing across regions "
                                  "(star-shapedness)");
    }

    // Split the region staircase into one monotone rate function per sign of
    // y. Region i covers [y_{i-1}, y_i); only R matters on y < 0 and only r
    // on y > 0, and everything past the last threshold has rate 0.
    std::size_t p = 0;  // number of negative thresholds
    while (p < n && thresholds[p] < 0.0) ++p;

    RateStaircase neg;  // argument s = -y, rates ascending outward
    for (std::size_t i = p; i-- > 0;) neg.thresholds.push_back(-thresholds[i]);
    neg.rates.push_back(p < n ? rate_neg[p] : 0.0);
    for (std::size_t i = p; i-- > 0;) neg.rates.push_back(rate_neg[i]);
    neg.ramp = ramp_width;

    RateStaircase pos;  // argument u = +y, rates descending to 0
    for (std::size_t i = p; i < n; ++i) pos.thresholds.push_back(thresholds[i]);
    for (std::size_t i = p; i < n; ++i) pos.rates.push_back(rate_pos[i]);
    pos.rates.push_back(0.0);
    pos.ramp = ramp_width;

    check_spacing(neg, "negative side");
    check_spacing(pos, "positive side");

    const double k = std::max(neg.value_lipschitz(), pos.value_lipschitz());

    DriverFlags f;
    f.star_shaped = true;
    f.normalized_at_origin = f.lsc = true;
    return Driver(
        "example2",
        [neg, pos](int, int, double y, double) -> ExtReal {
            if (y >= 0.0) return ExtReal(-pos.at(y) * y);
            const double s = -y;
            return ExtReal(neg.at(s) * s);
        },
        k, f);
}

Driver example2_default() {
    return example2({2.0, 1.0, 1.0}, {0.5, 0.5, 0.3}, {-0.5, 0.3, 0.6}, 0.2);
}

Driver example2_staircase() {
    return example2({2.0, 1.0, 1.0}, {0.5, 0.5, 0.3}, {-0.5, 0.3, 0.6}, 0.0);
}

// --- example3 -------------------------------------------------------------

Driver example3(std::vector<double> lambdas, std::vector<double> thresholds) {
    const std::size_t n = lambdas.size();
    if (n < 1 || thresholds.size() != n)
        throw ValidationError("example3: need matching lambda levels and |z| thresholds");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lambdas[i] > 0.0)) throw ValidationError("example3: lambda levels must be > 0");
        if (!(thresholds[i] > 0.0)) throw ValidationError("example3: thresholds must be > 0");
        if (i > 0 && !(lambdas[i] <= lambdas[i - 1]))
            throw ValidationError("example3: lambda levels must be decreasing");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
            throw ValidationError("example3: thresholds must be increasing");
    }
    DriverFlags f;
    f.star_shaped = f.y_independent = true;
    f.decreasing_y = true;  // vacuously
    f.normalized_at_origin = f.nonnegative = f.lsc = true;
    return Driver(
        "example3",
        [lambdas, thresholds, n](int, int, double, double z) -> ExtReal {
            const double a = std::abs(z);
            for (std::size_t i = 0; i < n; ++i)
                if (a <= thresholds[i]) return ExtReal(z * z / lambdas[i]);
            return ExtReal::infinity();
        },
        kInf, f);
}

Driver example3_default() {
    return example3({5.0, 2.0, 1.5, 1.2}, {1.0, 2.0, 2.5, 3.0});
}

Driver example3_restricted(double lambda1, double z1) {
    if (!(lambda1 > 0.0) || !(z1 > 0.0))
        throw ValidationError("example3_restricted: lambda1, z1 must be > 0");
    DriverFlags f;
    f.convex = f.star_shaped = f.y_independent = true;
    f.decreasing_y = true;  // vacuously
    f.normalized_at_origin = f.nonnegative = f.lsc = true;
    const double k = 2.0 * z1 / lambda1;
    return Driver(
        "example3_restricted",
        [lambda1, z1](int, int, double, double z) -> ExtReal {
            const double a = std::abs(z);
            if (a <= z1) return ExtReal(z * z / lambda1);
            return ExtReal((2.0 * z1 * a - z1 * z1) / lambda1);
        },
        k, f);
}

Driver example3_restricted_default() { return example3_restricted(5.0, 1.0); }

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

Driver segment_driver(const Driver& d, double beta, double mu) {
    DriverFlags f;
    f.convex = f.star_shaped = true;
    f.lsc = true;
    f.normalized_at_origin = d.flags().normalized_at_origin;
    f.nonnegative = d.flags().nonnegative && d.flags().star_shaped;
    const Driver base = d;
    return Driver(
        "segment(" + d.name() + ")",
        [base, beta, mu](int step, int node, double y, double z) -> ExtReal {
            const double scale_ref = std::max({1.0, std::abs(beta), std::abs(mu)});
            const double tol = 1e-12 * scale_ref;
            double m;
            if (beta == 0.0 && mu == 0.0) {
                if (std::abs(y) > tol || std::abs(z) > tol) return ExtReal::infinity();
                m = 0.0;
            } else {
                m = std::abs(beta) >= std::abs(mu) ? y / beta : z / mu;
                if (m < -tol || m > 1.0 + tol) return ExtReal::infinity();
                m = std::clamp(m, 0.0, 1.0);
                if (std::abs(y - m * beta) > tol || std::abs(z - m * mu) > tol)
                    return ExtReal::infinity();
            }
            const ExtReal gB = base(step, node, beta, mu);
            const ExtReal g0 = base(step, node, 0.0, 0.0);
            return scale(m, gB) + scale(1.0 - m, g0);
        },
        kInf, f);
}

namespace {

// Exact inner minimisation of the envelope objective
//   phi(m) = k*(use_y ? |y - m*beta| : 0) + k*|z - m*mu|
//            + m*gB + (1-m)*g0,   m in [0, m_max],
// which is piecewise linear and convex in m: evaluate at the kinks and the
// range endpoints.
struct EnvelopeMin {
    double m = 0.0;
    double value = 0.0;
};

EnvelopeMin envelope_minimize(double y, double z, double beta, double mu, double k,
                              double gB, double g0, bool use_y, bool star_range) {
    double cands[5];
    int nc = 0;
    cands[nc++] = 0.0;
    if (star_range) cands[nc++] = 1.0;
    const double m_hi = star_range ? 1.0 : kInf;
    if (use_y && beta != 0.0) {
        const double m = y / beta;
        if (m > 0.0 && m < m_hi) cands[nc++] = m;
    }
    if (mu != 0.0) {
        const double m = z / mu;
        if (m > 0.0 && m < m_hi) cands[nc++] = m;
    }
    EnvelopeMin best;
    best.value = kInf;
    for (int i = 0; i < nc; ++i) {
        const double m = cands[i];
        double v = k * std::abs(z - m * mu) + m * gB + (1.0 - m) * g0;
        if (use_y) v += k * std::abs(y - m * beta);
        if (v < best.value) {
            best.value = v;
            best.m = m;
        }
    }
    return best;
}

} // namespace

static Driver ph_envelope_impl(const Driver& d,
                               std::function<std::pair<double, double>(int, int)> anchor,
                               double k, EnvelopeMode mode, const std::string& label) {
    if (!std::isfinite(d.lipschitz_k()))
        throw ValidationError("ph_envelope: base driver is not Lipschitz");
    if (!(k >= d.lipschitz_k()))
        throw ValidationError("ph_envelope: k below the driver's Lipschitz constant; "
                              "the envelope would fail the majorant property");
    if (mode == EnvelopeMode::poshom && !d.flags().pos_hom)
        throw ValidationError("ph_envelope: poshom mode requires a positively homogeneous driver");

    const bool use_y = !d.flags().y_independent;
    const bool star_range = (mode == EnvelopeMode::star);
    const Driver base = d;

    // Anchors are rescaled to the unit l1 sphere in poshom mode; in star
    // mode they are used as given (and the y-anchor is dropped for
    // y-independent drivers).
    auto anchor_at = [anchor, use_y, star_range](int step, int node) {
        auto [b, m] = anchor(step, node);
        if (!use_y) b = 0.0;
        if (!star_range) {
            const double n1 = std::abs(b) + std::abs(m);
            if (n1 > 0.0) {
                b /= n1;
                m /= n1;
            }
        }
        return std::pair<double, double>(b, m);
    };

    DriverFlags f;
    f.convex = true;
    f.star_shaped = true;  // convex with finite value at 0
    f.pos_hom = (mode == EnvelopeMode::poshom);
    f.y_independent = d.flags().y_independent;
    f.decreasing_y = d.flags().y_independent;
    f.normalized_at_origin = d.flags().normalized_at_origin;
    f.nonnegative = d.flags().nonnegative && d.flags().star_shaped;
    f.lsc = true;

    Driver out(
        label,
        [base, anchor_at, k, use_y, star_range](int step, int node, double y, double z) -> ExtReal {
            const auto [b, m] = anchor_at(step, node);
            const ExtReal gB = base(step, node, b, m);
            const ExtReal g0 = base(step, node, 0.0, 0.0);
            if (!gB.finite() || !g0.finite())
                throw NumericalError("ph_envelope: anchor outside the driver's domain");
            return ExtReal(envelope_minimize(y, z, b, m, k, gB.value(), g0.value(), use_y,
                                             star_range)
                               .value);
        },
        k, f);

    // Closed-form conjugate: the conjugate of an infimal convolution is the
    // sum of the conjugates. G_bk is the indicator of the box {|beta|<=k,
    // |q|<=k} (beta pinned to 0 for y-independent members); G_seg follows
    // from the segment structure.
    out.set_conjugate([base, anchor_at, k, use_y, star_range](int step, int node, double beta,
                                                              double q) -> ExtReal {
        if (use_y ? std::abs(beta) > k : std::abs(beta) > 1e-12) return ExtReal::infinity();
        if (std::abs(q) > k) return ExtReal::infinity();
        const auto [b, m] = anchor_at(step, node);
        const double gB = base(step, node, b, m).value();
        const double g0 = base(step, node, 0.0, 0.0).value();
        const double s = -beta * b - q * m;
        if (star_range) return ExtReal(-g0 + std::max(0.0, s - gB + g0));
        return s - gB > 1e-12 ? ExtReal::infinity() : ExtReal(0.0);
    });

    // Exact attaining dual pair when evaluated at the member's own anchor
    // point (the solution process in the min representation): pick the
    // subgradient with -beta*y - q*z = g(anchor), which satisfies
    // Fenchel-Young with equality and zero conjugate penalty.
    out.set_witness_dual([base, anchor_at, k, use_y](int step, int node, double y,
                                                     double z) -> std::pair<double, double> {
        const auto [b, m] = anchor_at(step, node);
        const double gB = base(step, node, b, m).value();
        const double denom = (use_y ? std::abs(y) : 0.0) + std::abs(z);
        if (denom == 0.0) return {0.0, 0.0};
        const double s = gB / denom;
        double beta = use_y ? -s * sgn(y) : 0.0;
        double q = -s * sgn(z);
        beta = std::clamp(beta, -k, k);
        q = std::clamp(q, -k, k);
        return {beta, q};
    });

    return out;
}

Driver ph_envelope(const Driver& d, double anchor_beta, double anchor_mu, double k,
                   EnvelopeMode mode) {
    return ph_envelope_impl(
        d, [anchor_beta, anchor_mu](int, int) { return std::pair(anchor_beta, anchor_mu); }, k,
        mode, "envelope(" + d.name() + ")");
}

Driver ph_envelope(const Driver& d, const ControlPath& anchor, double k, EnvelopeMode mode) {
    const AdaptedProcess alpha = anchor.alpha;
    const AdaptedProcess delta = anchor.delta;
    return ph_envelope_impl(
        d,
        [alpha, delta](int step, int node) {
            return std::pair(alpha.at(step, node), delta.at(step, node));
        },
        k, mode, "envelope(" + d.name() + ")");
}

Driver monotone_relaxation(const Driver& d) {
    if (!d.flags().convex)
        throw ValidationError("monotone_relaxation: requires a convex driver");
    if (!std::isfinite(d.lipschitz_k()))
        throw ValidationError("monotone_relaxation: requires a finite Lipschitz constant");
    const Driver base = d;

    const bool identity = d.flags().y_independent || d.flags().decreasing_y;
    DriverFlags f = d.flags();
    f.decreasing_y = true;
    f.pos_hom = d.flags().pos_hom && identity;
    f.normalized_at_origin = d.flags().normalized_at_origin && identity;
    f.nonnegative = d.flags().nonnegative && identity;

    if (d.flags().y_independent) return Driver("relaxed(" + d.name() + ")",
        [base](int step, int node, double y, double z) { return base(step, node, y, z); },
        d.lipschitz_k(), f);

    return Driver(
        "relaxed(" + d.name() + ")",
        [base](int step, int node, double y, double z) -> ExtReal {
            auto value_at = [&](double u) {
                const ExtReal v = base(step, node, u, z);
                if (!v.finite())
                    throw NumericalError("monotone_relaxation: +infinity in the y-section");
                return v.value();
            };
            // Bracket a minimizer of the convex y-section on [lo, y]; expand
            // left while the section is still decreasing at the edge.
            double lo = y - 8.0;
            const double probe = 1e-6;
            int expansions = 0;
            while (value_at(lo) < value_at(lo + probe) && expansions < 40) {
                lo = y - (y - lo) * 2.0;
                ++expansions;
            }
            if (value_at(lo) < value_at(lo + probe) - 1e-9)
                throw NumericalError("monotone_relaxation: y-section unbounded below");
            double a = lo, b = y;
            while (b - a > 1e-13) {
                const double m1 = a + (b - a) / 3.0;
                const double m2 = b - (b - a) / 3.0;
                if (value_at(m1) <= value_at(m2)) b = m2;
                else a = m1;
            }
            const double ystar = 0.5 * (a + b);
            return ExtReal(value_at(std::min(y, ystar)));
        },
        d.lipschitz_k(), f);
}

Driver pointwise_min_driver(const std::vector<Driver>& family) {
    if (family.empty()) throw ValidationError("pointwise_min_driver: empty family");
    double k = 0.0;
    bool all_convex_norm = true, all_star_norm = true, all_norm = true;
    bool all_yind = true, all_dec = true, all_nonneg = true, all_lsc = true;
    for (const Driver& d : family) {
        if (!std::isfinite(d.lipschitz_k()))
            throw ValidationError("pointwise_min_driver: family must be equi-Lipschitz");
        k = std::max(k, d.lipschitz_k());
        all_convex_norm &= d.flags().convex && d.flags().normalized_at_origin;
        all_star_norm &= d.flags().star_shaped && d.flags().normalized_at_origin;
        all_norm &= d.flags().normalized_at_origin;
        all_yind &= d.flags().y_independent;
        all_dec &= d.flags().decreasing_y;
        all_nonneg &= d.flags().nonnegative;
        all_lsc &= d.flags().lsc;
    }
    DriverFlags f;
    f.star_shaped = all_convex_norm || all_star_norm;
    f.normalized_at_origin = all_norm;
    f.y_independent = all_yind;
    f.decreasing_y = all_dec;
    f.nonnegative = all_nonneg;
    f.lsc = all_lsc;
    const std::vector<Driver> members = family;
    return Driver(
        "min_family",
        [members](int step, int node, double y, double z) {
            ExtReal best = members[0](step, node, y, z);
            for (std::size_t i = 1; i < members.size(); ++i)
                best = min(best, members[i](step, node, y, z));
            return best;
        },
        k, f);
}

// ---------------------------------------------------------------------------
// Property checker
// ---------------------------------------------------------------------------

PropertyGrid PropertyGrid::defaults() {
    PropertyGrid g;
    for (int v = -3; v <= 3; ++v) {
        g.ys.push_back(v);
        g.zs.push_back(v);
    }
    for (int i = 1; i <= 9; ++i) g.lambdas.push_back(0.1 * i);
    g.nodes = {{0, 0}};
    return g;
}

PropertyReport check_driver_property(const Driver& d, DriverProperty mode,
                                     const PropertyGrid& grid, double lipschitz_k) {
    PropertyReport rep;
    rep.worst_violation = -kInf;

    auto record = [&rep](double viol, PropertyWitness w) {
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.witness = w;
        }
    };

    for (auto [step, node] : grid.nodes) {
        const ExtReal g00 = d(step, node, 0.0, 0.0);
        for (double y : grid.ys) {
            for (double z : grid.zs) {
                const ExtReal gyz = d(step, node, y, z);
                switch (mode) {
                    case DriverProperty::star_shaped:
                        for (double lam : grid.lambdas) {
                            const ExtReal lhs = d(step, node, lam * y, lam * z);
                            if (!gyz.finite() || !g00.finite()) continue;  // rhs infinite
                            const double rhs =
                                lam * gyz.value() + (1.0 - lam) * g00.value();
                            if (!lhs.finite()) {
                                ++rep.domain_violations;
                                rep.holds = false;
                                continue;
                            }
                            record(lhs.value() - rhs, {y, z, lam, 0, 0});
                        }
                        break;
                    case DriverProperty::pos_hom:
                        for (double lam : grid.lambdas) {
                            const ExtReal lhs = d(step, node, lam * y, lam * z);
                            if (!lhs.finite() || !gyz.finite()) {
                                ++rep.domain_violations;
                                continue;
                            }
                            record(std::abs(lhs.value() - lam * gyz.value()), {y, z, lam, 0, 0});
                        }
                        break;
                    case DriverProperty::decreasing_y:
                        for (double y2 : grid.ys) {
                            if (!(y2 > y)) continue;
                            const ExtReal g2 = d(step, node, y2, z);
                            if (!gyz.finite() || !g2.finite()) {
                                ++rep.domain_violations;
                                continue;
                            }
                            record(g2.value() - gyz.value(), {y, z, 0, y2, z});
                        }
                        break;
                    case DriverProperty::lipschitz: {
                        const double k = lipschitz_k >= 0.0 ? lipschitz_k : d.lipschitz_k();
                        for (double y2 : grid.ys) {
                            for (double z2 : grid.zs) {
                                const ExtReal g2 = d(step, node, y2, z2);
                                if (!gyz.finite() || !g2.finite()) {
                                    ++rep.domain_violations;
                                    continue;
                                }
                                const double dist = std::abs(y - y2) + std::abs(z - z2);
                                record(std::abs(gyz.value() - g2.value()) - k * dist,
                                       {y, z, 0, y2, z2});
                            }
                        }
                        break;
                    }
                }
            }
        }
    }

    if (!std::isfinite(rep.worst_violation)) rep.worst_violation = 0.0;
    if (rep.worst_violation > 1e-12) rep.holds = false;
    return rep;
}

} // namespace starbsde
