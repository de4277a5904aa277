#pragma once

#include <cmath>
#include <ostream>

#include "starbsde/errors.hpp"

namespace starbsde {

/// Extended real value: either a finite double or +infinity.
///
/// Drivers with hard constraints (e.g. a bounded control domain) return
/// +infinity outside their effective domain. The infinite state is an explicit
/// variant, never a sentinel float; addition and nonnegative scaling saturate.
class ExtReal {
public:
    ExtReal() = default;
    ExtReal(double v) : value_(v), finite_(true) {
        if (!std::isfinite(v)) throw NumericalError("ExtReal: non-finite double");
    }

    static ExtReal infinity() {
        ExtReal r;
        r.finite_ = false;
        return r;
    }

    bool finite() const { return finite_; }

    double value() const {
        if (!finite_) throw NumericalError("ExtReal: value() on +infinity");
        return value_;
    }

    /// Finite value, or `fallback` when infinite.
    double value_or(double fallback) const { return finite_ ? value_ : fallback; }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if (!a.finite_ || !b.finite_) return infinity();
        return ExtReal(a.value_ + b.value_);
    }

    /// Scale by m >= 0 with the convex-analysis convention 0 * (+inf) = 0.
    friend ExtReal scale(double m, ExtReal x) {
        if (m < 0.0) throw ValidationError("ExtReal: scale by negative factor");
        if (m == 0.0) return ExtReal(0.0);
        if (!x.finite_) return infinity();
        return ExtReal(m * x.value_);
    }

    friend bool operator<(ExtReal a, ExtReal b) {
        if (!a.finite_) return false;
        if (!b.finite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator<=(ExtReal a, ExtReal b) { return !(b < a); }

    friend ExtReal min(ExtReal a, ExtReal b) { return a < b ? a : b; }

    friend std::ostream& operator<<(std::ostream& os, ExtReal x) {
        if (!x.finite_) return os << "+inf";
        return os << x.value_;
    }

private:
    double value_ = 0.0;
    bool finite_ = true;
};

} // namespace starbsde
