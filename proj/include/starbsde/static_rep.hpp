#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "starbsde/ext_real.hpp"

namespace starbsde {

/// Finite scenario space with strictly positive probabilities summing to 1.
struct FiniteSpace {
    std::vector<double> probabilities;

    int n_atoms() const { return static_cast<int>(probabilities.size()); }
    void validate() const;
};

using RandomVariable = std::vector<double>;

struct StaticFlags {
    bool star_shaped = false;
    bool monotone = false;
    bool cash_additive = false;
    bool normalized = false;
};

/// Extended-real functional on a finite scenario space.
struct StaticFunctional {
    std::function<ExtReal(const RandomVariable&)> f;
    StaticFlags flags;
    std::string name = "f";

    ExtReal operator()(const RandomVariable& x) const { return f(x); }
};

// Ready-made functionals for tests and the CLI.
StaticFunctional max_functional();                       // max_i X_i
StaticFunctional max_mean_mix(const FiniteSpace& space); // 0.7*max + 0.3*E[X]
/// Star-shaped but non-convex: phi(max_i X_i) with phi(u) = u for u <= 0,
/// u^2 on [0,1], u on [1,2], u^2/2 beyond (the chord-above-graph ratio
/// phi(u)/u is nondecreasing while the slope drops at u = 1).
StaticFunctional nonconvex_star();

/// Segment majorant f_Z: alpha*f(Z) + (1-alpha)*f(0) when X = alpha*Z for
/// alpha in [0,1] (exact ratio test, relative tolerance 1e-12 against
/// max|Z_i|; Z = 0 degenerates to the one-point segment), +infinity off the
/// segment.
StaticFunctional segment_majorant(const StaticFunctional& f, const RandomVariable& Z);

/// Monotone majorant inf { f_Z(Y) : Y >= X }: the feasible alpha interval is
/// computed exactly from the coordinate inequalities alpha*Z_i >= X_i and
/// the linear objective is minimised at an endpoint.
StaticFunctional monotone_majorant(const StaticFunctional& f, const RandomVariable& Z);

/// Cash-additive majorant per the cash-additive representation:
/// rho_Z(X) = alpha*rho(Z) + c when X = alpha*Z + c (alpha in (0,1]), c when
/// X is constant, +infinity otherwise.
StaticFunctional cash_segment_majorant(const StaticFunctional& rho, const RandomVariable& Z);

enum class MajorantKind { segment, monotone, cash };

struct StaticMinResult {
    ExtReal value = ExtReal(0.0);
    int argmin = -1;  // index into the candidate set
};

/// min over candidates Z of the majorant at X; equals f(X) with Z = X among
/// the minimizers when X is in the candidate set.
StaticMinResult min_representation_static(const StaticFunctional& f, const RandomVariable& X,
                                          const std::vector<RandomVariable>& candidates,
                                          MajorantKind kind = MajorantKind::segment);

/// Closed-form conjugate of the segment majorant under the counting pairing
/// <q, X> = sum_i q_i X_i:
///   f_Z^*(q) = -f(0) + max(0, <q,Z> - f(Z) + f(0)).
double conjugate_segment(const StaticFunctional& f, const RandomVariable& Z,
                         const RandomVariable& q);

/// Brute-force oracle: sup over an alpha-grid of <q, alpha Z> - f_Z(alpha Z).
double conjugate_segment_bruteforce(const StaticFunctional& f, const RandomVariable& Z,
                                    const RandomVariable& q, int grid_points = 1001);

/// Acceptance-set family A^m = {X : rho(X) <= m} realized extensionally.
struct AcceptanceFamily {
    std::function<bool(double m, const RandomVariable&)> member;
};

AcceptanceFamily acceptance_family(const StaticFunctional& rho);

/// Round trip rho -> A^m_rho -> rho_A on an m-grid: the recovered value
/// inf{m in grid : member} differs from rho by at most the grid resolution;
/// family axioms (increasing, monotone, star-shaped, right-continuous at
/// grid level) and the normalization inf{m : 0 in A^m} = 0 are checked on
/// the samples.
struct AcceptanceRoundtripReport {
    double max_recovery_error = 0.0;
    double grid_resolution = 0.0;
    bool family_increasing = true;
    bool family_monotone = true;
    bool family_star_shaped = true;
    bool family_right_continuous = true;
    double normalization_value = 0.0;
    bool ok = false;
};

AcceptanceRoundtripReport acceptance_roundtrip(const StaticFunctional& rho, double m_lo,
                                               double m_hi, double resolution,
                                               const std::vector<RandomVariable>& samples);

/// Star-shapedness of a static functional on sampled points and scalings.
struct StaticPropertyReport {
    bool holds = true;
    double worst_violation = 0.0;
};

StaticPropertyReport check_star_shaped(const StaticFunctional& f,
                                       const std::vector<RandomVariable>& samples,
                                       const std::vector<double>& lambdas);

} // namespace starbsde
