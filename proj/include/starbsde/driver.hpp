#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "starbsde/ext_real.hpp"
#include "starbsde/lattice.hpp"

namespace starbsde {

/// Declared structural properties of a generator. Flags are declared at
/// construction and spot-checked by check_driver_property, not certified.
struct DriverFlags {
    bool convex = false;
    bool star_shaped = false;
    bool pos_hom = false;
    bool decreasing_y = false;
    bool y_independent = false;
    bool normalized_at_origin = false;
    bool nonnegative = false;
    bool lsc = true;
};

/// BSDE generator g evaluated at a lattice node.
///
/// Evaluation takes (step, node) rather than clock time so that drivers built
/// from adapted anchor processes (the envelope members of the min
/// representation) fit the same interface; time-homogeneous drivers ignore
/// both indices. Values are extended reals: +infinity encodes hard
/// constraints on the controls.
///
/// lipschitz_k is the declared modulus for |g(y1,z1)-g(y2,z2)| <=
/// k(|y1-y2|+|z1-z2|); +infinity for lsc-only drivers that are not globally
/// Lipschitz.
///
/// Drivers are pure value objects; evaluation is safe concurrently.
class Driver {
public:
    using Eval = std::function<ExtReal(int step, int node, double y, double z)>;
    /// Optional analytic conjugate G(step, node, beta, q) with the sign
    /// convention G = sup {-beta*y - q*z - g(y,z)}.
    using ConjugateFn = std::function<ExtReal(int step, int node, double beta, double q)>;
    /// Optional exact attaining dual pair (beta, q) at a solution point,
    /// satisfying Fenchel-Young equality g + G = -beta*y - q*z.
    using WitnessDualFn =
        std::function<std::pair<double, double>(int step, int node, double y, double z)>;

    Driver() = default;
    Driver(std::string name, Eval g, double lipschitz_k, DriverFlags flags)
        : name_(std::move(name)), g_(std::move(g)), lipschitz_k_(lipschitz_k), flags_(flags) {}

    ExtReal operator()(int step, int node, double y, double z) const {
        return g_(step, node, y, z);
    }

    const std::string& name() const { return name_; }
    double lipschitz_k() const { return lipschitz_k_; }
    const DriverFlags& flags() const { return flags_; }

    bool has_conjugate() const { return static_cast<bool>(conjugate_); }
    ExtReal conjugate(int step, int node, double beta, double q) const {
        return conjugate_(step, node, beta, q);
    }
    void set_conjugate(ConjugateFn c) { conjugate_ = std::move(c); }

    bool has_witness_dual() const { return static_cast<bool>(witness_dual_); }
    std::pair<double, double> witness_dual(int step, int node, double y, double z) const {
        return witness_dual_(step, node, y, z);
    }
    void set_witness_dual(WitnessDualFn w) { witness_dual_ = std::move(w); }

private:
    std::string name_ = "unset";
    Eval g_;
    double lipschitz_k_ = 0.0;
    DriverFlags flags_;
    ConjugateFn conjugate_;
    WitnessDualFn witness_dual_;
};

// ---------------------------------------------------------------------------
// Built-in drivers
// ---------------------------------------------------------------------------

Driver zero_driver();
Driver scaled_abs_z(double mu);     // g = mu * |z|
Driver linear_y(double a);          // g = a * y
Driver neg_part_y();                // g = -max(y, 0)

/// g(t,y,z) = -gamma*|y|*exp(-|y|) + delta*(z^2 on |z|<=1, |z| beyond).
/// Star-shaped, neither convex nor concave, non-monotone in y, Lipschitz with
/// k = max(gamma, 2*delta).
Driver example1(double gamma, double delta);

/// Ambiguous-interest-rate staircase: g(t,y) = R(|y|)*y^- - r(y)*y^+ with
/// regime rates attached to thresholds y_1 <= ... <= y_n and zero beyond y_n.
/// ramp_width > 0 replaces each rate jump by a linear ramp of that width,
/// which keeps the rate functions monotone (so g stays star-shaped) and makes
/// g Lipschitz; ramp_width = 0 gives the discontinuous staircase, which is
/// lsc only (lipschitz_k = +infinity) and is meant for the supersolution
/// route.
Driver example2(std::vector<double> rate_neg, std::vector<double> rate_pos,
                std::vector<double> thresholds, double ramp_width);
Driver example2_default();          // Lipschitz defaults (ramp_width = 0.2)
Driver example2_staircase();        // discontinuous staircase (ramp_width = 0)

/// Regime-switching quadratic g(t,z) = |z|^2 / lambda_i on |z_{i-1}| < |z| <=
/// |z_i|, +infinity for |z| > z_n. Requires lambda decreasing and |z|
/// thresholds increasing. lsc, nonnegative, normalized, star-shaped; not
/// Lipschitz (lipschitz_k = +infinity).
Driver example3(std::vector<double> lambdas, std::vector<double> thresholds);
Driver example3_default();

/// First regime of example3 extended linearly past z_1 with the tangent
/// slope: g(z) = z^2/lambda_1 for |z| <= z_1, (2*z_1*|z| - z_1^2)/lambda_1
/// beyond. Lipschitz with k = 2*z_1/lambda_1; coincides with example3
/// wherever |z| <= z_1.
Driver example3_restricted(double lambda1, double z1);
Driver example3_restricted_default();

// ---------------------------------------------------------------------------
// Driver transformations
// ---------------------------------------------------------------------------

/// Anchor pair (alpha_t, delta_t) per node. ControlPaths index the convex
/// family of the min representation; alpha anchors y, delta anchors z.
struct ControlPath {
    AdaptedProcess alpha;
    AdaptedProcess delta;
};

/// Segment generator g_{beta,mu}: m*g(beta,mu) + (1-m)*g(0,0) on the segment
/// (y,z) = m*(beta,mu), m in [0,1]; +infinity off it. Convex and lsc.
Driver segment_driver(const Driver& d, double beta, double mu);

enum class EnvelopeMode {
    star,    // m ranges over [0,1], segment tied back to the origin value
    poshom,  // m ranges over [0,inf), anchors rescaled to the unit l1 sphere
};

/// Pasch-Hausdorff envelope of the segment generator:
///
///   g^{beta,mu}(y,z) = inf_m { k(|y-m*beta| + |z-m*mu|)
///                              + m*g(beta,mu) + (1-m)*g(0,0) }.
///
/// The objective is piecewise linear and convex in m, so the infimum is
/// solved exactly by evaluating at the kink points m = y/beta, m = z/mu and
/// the admissible range endpoints. The result is convex, k-Lipschitz, and
/// majorizes a star-shaped d everywhere with equality at the anchor.
///
/// For y-independent d the envelope is taken in z only (the members stay
/// y-independent, hence cash-additive). Requires k >= d.lipschitz_k.
Driver ph_envelope(const Driver& d, double anchor_beta, double anchor_mu, double k,
                   EnvelopeMode mode = EnvelopeMode::star);

/// Per-node anchors (alpha_t, delta_t); anchors at (step, node) are taken
/// from the ControlPath, so the member driver is itself adapted.
Driver ph_envelope(const Driver& d, const ControlPath& anchor, double k,
                   EnvelopeMode mode = EnvelopeMode::star);

/// Monotone relaxation inf_{ybar <= y} g(ybar, z) of a convex driver,
/// computed by ternary search for a minimizer of ybar -> g(ybar, z). The
/// result is decreasing in y, convex, and keeps the Lipschitz modulus.
Driver monotone_relaxation(const Driver& d);

/// Pointwise minimum of a non-empty k-equi-Lipschitz family. Flagged
/// star-shaped when every member is convex and normalized.
Driver pointwise_min_driver(const std::vector<Driver>& family);

// ---------------------------------------------------------------------------
// Property checker
// ---------------------------------------------------------------------------

enum class DriverProperty { star_shaped, pos_hom, decreasing_y, lipschitz };

/// Sample grid for property checks. Defaults to y,z in {-3,...,3} and
/// lambda in {0.1,...,0.9} at step 0.
struct PropertyGrid {
    std::vector<double> ys;
    std::vector<double> zs;
    std::vector<double> lambdas;
    std::vector<std::pair<int, int>> nodes;  // (step, node) sample points

    static PropertyGrid defaults();
};

struct PropertyWitness {
    double y = 0.0, z = 0.0, lambda = 0.0;
    double y2 = 0.0, z2 = 0.0;  // second point for pairwise modes
};

/// Deterministic worst-violation report; never short-circuits. Points where
/// +infinity makes the defining inequality ill-posed are counted as domain
/// violations instead of crashing.
struct PropertyReport {
    bool holds = true;
    double worst_violation = 0.0;
    PropertyWitness witness;
    int domain_violations = 0;
};

PropertyReport check_driver_property(const Driver& d, DriverProperty mode,
                                     const PropertyGrid& grid = PropertyGrid::defaults(),
                                     double lipschitz_k = -1.0);

} // namespace starbsde
