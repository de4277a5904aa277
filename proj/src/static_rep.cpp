#include "starbsde/static_rep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "starbsde/errors.hpp"

namespace starbsde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RandomVariable zeros_like(const RandomVariable& x) { return RandomVariable(x.size(), 0.0); }

double max_coord(const RandomVariable& x) {
    return *std::max_element(x.begin(), x.end());
}

} // namespace

void FiniteSpace::validate() const {
    if (probabilities.empty()) throw ValidationError("FiniteSpace: no atoms");
    double sum = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0)) throw ValidationError("FiniteSpace: probabilities must be > 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("FiniteSpace: probabilities must sum to 1");
}

StaticFunctional max_functional() {
    StaticFunctional f;
    f.f = [](const RandomVariable& x) { return ExtReal(max_coord(x)); };
    f.flags = {true, true, true, true};
    f.name = "max";
    return f;
}

StaticFunctional max_mean_mix(const FiniteSpace& space) {
    space.validate();
    const std::vector<double> probs = space.probabilities;
    StaticFunctional f;
    f.f = [probs](const RandomVariable& x) {
        if (x.size() != probs.size())
            throw ValidationError("max_mean_mix: dimension mismatch");
        double mean = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) mean += probs[i] * x[i];
        return ExtReal(0.7 * max_coord(x) + 0.3 * mean);
    };
    f.flags = {true, true, true, true};
    f.name = "max_mean_mix";
    return f;
}

StaticFunctional nonconvex_star() {
    auto phi = [](double u) {
        if (u <= 0.0) return u;
        if (u <= 1.0) return u * u;
        if (u <= 2.0) return u;
        return 0.5 * u * u;
    };
    StaticFunctional f;
    f.f = [phi](const RandomVariable& x) { return ExtReal(phi(max_coord(x))); };
    f.flags.star_shaped = f.flags.monotone = f.flags.normalized = true;
    f.name = "nonconvex_star";
    return f;
}

StaticFunctional segment_majorant(const StaticFunctional& f, const RandomVariable& Z) {
    const ExtReal f0 = f(zeros_like(Z));
    const ExtReal fZ = f(Z);
    if (!f0.finite() || !fZ.finite())
        throw ValidationError("segment_majorant: f(0) and f(Z) must be finite");
    const double v0 = f0.value(), vZ = fZ.value();

    double zmax = 0.0;
    std::size_t pivot = 0;
    for (std::size_t i = 0; i < Z.size(); ++i)
        if (std::abs(Z[i]) > zmax) {
            zmax = std::abs(Z[i]);
            pivot = i;
        }
    const double tol = 1e-12 * std::max(1.0, zmax);

    StaticFunctional out;
    out.flags.normalized = f.flags.normalized;
    out.name = "segment(" + f.name + ")";
    const RandomVariable z = Z;
    out.f = [z, v0, vZ, zmax, pivot, tol](const RandomVariable& x) -> ExtReal {
        if (x.size() != z.size()) throw ValidationError("segment_majorant: dimension mismatch");
        double alpha;
        if (zmax == 0.0) {
            for (double xi : x)
                if (std::abs(xi) > tol) return ExtReal::infinity();
            alpha = 0.0;
        } else {
            alpha = x[pivot] / z[pivot];
            if (alpha < -tol || alpha > 1.0 + tol) return ExtReal::infinity();
            alpha = std::clamp(alpha, 0.0, 1.0);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (std::abs(x[i] - alpha * z[i]) > tol) return ExtReal::infinity();
        }
        return ExtReal(alpha * vZ + (1.0 - alpha) * v0);
    };
    return out;
}

StaticFunctional monotone_majorant(const StaticFunctional& f, const RandomVariable& Z) {
    if (!f.flags.monotone)
        throw ValidationError("monotone_majorant: requires a monotone functional");
    const double v0 = f(zeros_like(Z)).value();
    const double vZ = f(Z).value();

    StaticFunctional out;
    out.flags.monotone = true;
    out.flags.normalized = f.flags.normalized;
    out.name = "monotone_segment(" + f.name + ")";
    const RandomVariable z = Z;
    out.f = [z, v0, vZ](const RandomVariable& x) -> ExtReal {
        if (x.size() != z.size()) throw ValidationError("monotone_majorant: dimension mismatch");
        // alpha feasible iff alpha*Z >= X coordinate-wise, alpha in [0,1].
        // The interval endpoints carry a relative tolerance so that points
        // exactly on the segment do not drop out by one rounding step.
        const double tol = 1e-12;
        double lo = 0.0, hi = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (z[i] > 0.0) lo = std::max(lo, x[i] / z[i]);
            else if (z[i] < 0.0) hi = std::min(hi, x[i] / z[i]);
            else if (x[i] > tol) return ExtReal::infinity();
        }
        if (lo > hi + tol) return ExtReal::infinity();
        hi = std::max(hi, lo);
        const double alpha = vZ - v0 >= 0.0 ? lo : hi;  // linear objective, endpoint
        return ExtReal(alpha * vZ + (1.0 - alpha) * v0);
    };
    return out;
}

StaticFunctional cash_segment_majorant(const StaticFunctional& rho, const RandomVariable& Z) {
    if (!rho.flags.cash_additive)
        throw ValidationError("cash_segment_majorant: requires a cash-additive functional");
    const double vZ = rho(Z).value();

    // Decompose X = alpha*Z + c exactly when possible: alpha from the
    // max-spread coordinate pair, then c from any coordinate.
    StaticFunctional out;
    out.flags.cash_additive = true;
    out.name = "cash_segment(" + rho.name + ")";
    const RandomVariable z = Z;
    out.f = [z, vZ](const RandomVariable& x) -> ExtReal {
        if (x.size() != z.size())
            throw ValidationError("cash_segment_majorant: dimension mismatch");
        auto [zmin_it, zmax_it] = std::minmax_element(z.begin(), z.end());
        const double spread = *zmax_it - *zmin_it;
        const double tol = 1e-12 * std::max(1.0, std::abs(*zmax_it) + std::abs(*zmin_it));
        const bool x_constant = [&] {
            for (double xi : x)
                if (std::abs(xi - x[0]) > tol) return false;
            return true;
        }();
        if (x_constant) return ExtReal(x[0]);
        if (spread <= tol) return ExtReal::infinity();  // Z constant, X not
        const std::size_t i1 = zmax_it - z.begin(), i2 = zmin_it - z.begin();
        const double alpha = (x[i1] - x[i2]) / spread;
        if (alpha <= tol || alpha > 1.0 + tol) return ExtReal::infinity();
        const double c = x[i1] - alpha * z[i1];
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - alpha * z[i] - c) > tol) return ExtReal::infinity();
        return ExtReal(std::min(alpha, 1.0) * vZ + c);
    };
    return out;
}

StaticMinResult min_representation_static(const StaticFunctional& f, const RandomVariable& X,
                                          const std::vector<RandomVariable>& candidates,
                                          MajorantKind kind) {
    if (candidates.empty())
        throw ValidationError("min_representation_static: empty candidate set");
    StaticMinResult best;
    best.value = ExtReal::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        StaticFunctional fz;
        switch (kind) {
            case MajorantKind::segment: fz = segment_majorant(f, candidates[i]); break;
            case MajorantKind::monotone: fz = monotone_majorant(f, candidates[i]); break;
            case MajorantKind::cash: fz = cash_segment_majorant(f, candidates[i]); break;
        }
        const ExtReal v = fz(X);
        if (v < best.value) {
            best.value = v;
            best.argmin = static_cast<int>(i);
        }
    }
    return best;
}

double conjugate_segment(const StaticFunctional& f, const RandomVariable& Z,
                         const RandomVariable& q) {
    if (q.size() != Z.size()) throw ValidationError("conjugate_segment: dimension mismatch");
    const double v0 = f(zeros_like(Z)).value();
    const double vZ = f(Z).value();
    const double qz = std::inner_product(q.begin(), q.end(), Z.begin(), 0.0);
    return -v0 + std::max(0.0, qz - vZ + v0);
}

double conjugate_segment_bruteforce(const StaticFunctional& f, const RandomVariable& Z,
                                    const RandomVariable& q, int grid_points) {
    const StaticFunctional fz = segment_majorant(f, Z);
    double sup = -kInf;
    RandomVariable x(Z.size());
    for (int i = 0; i < grid_points; ++i) {
        const double alpha = static_cast<double>(i) / (grid_points - 1);
        for (std::size_t j = 0; j < Z.size(); ++j) x[j] = alpha * Z[j];
        const ExtReal v = fz(x);
        if (!v.finite()) continue;
        const double qx = std::inner_product(q.begin(), q.end(), x.begin(), 0.0);
        sup = std::max(sup, qx - v.value());
    }
    return sup;
}

AcceptanceFamily acceptance_family(const StaticFunctional& rho) {
    const StaticFunctional r = rho;
    AcceptanceFamily fam;
    fam.member = [r](double m, const RandomVariable& x) {
        const ExtReal v = r(x);
        return v.finite() && v.value() <= m;
    };
    return fam;
}

AcceptanceRoundtripReport acceptance_roundtrip(const StaticFunctional& rho, double m_lo,
                                               double m_hi, double resolution,
                                               const std::vector<RandomVariable>& samples) {
    if (!(resolution > 0.0) || !(m_hi > m_lo))
        throw ValidationError("acceptance_roundtrip: bad m-grid");
    const AcceptanceFamily fam = acceptance_family(rho);
    const int n_grid = static_cast<int>(std::ceil((m_hi - m_lo) / resolution)) + 1;

    AcceptanceRoundtripReport rep;
    rep.grid_resolution = resolution;

    for (const RandomVariable& x : samples) {
        const double direct = rho(x).value();
        if (direct < m_lo || direct > m_hi)
            throw ValidationError("acceptance_roundtrip: m-grid does not cover the range");
        // rho_A(X) = inf over the grid of {m : X in A^m}.
        double recovered = kInf;
        bool prev_member = false;
        for (int i = 0; i < n_grid; ++i) {
            const double m = m_lo + i * resolution;
            const bool in = fam.member(m, x);
            if (in && !std::isfinite(recovered)) recovered = m;
            if (prev_member && !in) rep.family_increasing = false;
            prev_member = in;
        }
        rep.max_recovery_error = std::max(rep.max_recovery_error, std::abs(recovered - direct));

        // Monotone: with the increasing-rho convention used throughout,
        // dominated positions stay acceptable.
        RandomVariable lower = x;
        for (double& v : lower) v -= 0.25;
        for (double m : {direct, direct + resolution})
            if (fam.member(m, x) && !fam.member(m, lower)) rep.family_monotone = false;

        // Star-shaped: lambda * A^m subset of A^{lambda m} on the samples.
        for (double lam : {0.25, 0.5, 0.75}) {
            RandomVariable lx = x;
            for (double& v : lx) v *= lam;
            const double m = direct + resolution;  // x in A^m by construction
            if (fam.member(m, x) && !fam.member(lam * m, lx)) rep.family_star_shaped = false;
        }

        // Right-continuity at grid level: A^m = intersection of A^{m'} over
        // grid points m' > m reduces to A^m subset A^{m + resolution}.
        if (fam.member(direct, x) && !fam.member(direct + resolution, x))
            rep.family_right_continuous = false;
    }

    // Normalization: inf {m in grid : 0 in A^m} should be 0 at grid level.
    const RandomVariable zero(samples.empty() ? 1 : samples.front().size(), 0.0);
    double norm = kInf;
    for (int i = 0; i < n_grid; ++i) {
        const double m = m_lo + i * resolution;
        if (fam.member(m, zero)) {
            norm = m;
            break;
        }
    }
    rep.normalization_value = norm;

    rep.ok = rep.max_recovery_error <= resolution + 1e-12 && rep.family_increasing &&
             rep.family_monotone && rep.family_star_shaped && rep.family_right_continuous &&
             std::abs(norm) <= resolution + 1e-12;
    return rep;
}

StaticPropertyReport check_star_shaped(const StaticFunctional& f,
                                       const std::vector<RandomVariable>& samples,
                                       const std::vector<double>& lambdas) {
    StaticPropertyReport rep;
    for (const RandomVariable& x : samples) {
        const ExtReal fx = f(x);
        const ExtReal f0 = f(zeros_like(x));
        if (!fx.finite() || !f0.finite()) continue;
        for (double lam : lambdas) {
            RandomVariable lx = x;
            for (double& v : lx) v *= lam;
            const ExtReal flx = f(lx);
            if (!flx.finite()) {
                rep.holds = false;
                continue;
            }
            const double viol =
                flx.value() - (lam * fx.value() + (1.0 - lam) * f0.value());
            rep.worst_violation = std::max(rep.worst_violation, viol);
        }
    }
    if (rep.worst_violation > 1e-12) rep.holds = false;
    return rep;
}

} // namespace starbsde
