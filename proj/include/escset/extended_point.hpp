#pragma once

#include <cmath>
#include <complex>

namespace escset {

using complex = std::complex<double>;

/// A complex value that is either an ordinary finite double pair or, when the
/// modulus is beyond double range, a directed overflow stored as
/// (natural log of modulus, angle). The angle is kept unreduced.
class ExtendedPoint {
public:
    enum class Kind : unsigned char { Finite, Directed };

    constexpr ExtendedPoint() = default;
    ExtendedPoint(complex z) : kind_(Kind::Finite), a_(z.real()), b_(z.imag()) {}

    static constexpr ExtendedPoint finite(double re, double im) {
        return ExtendedPoint(Kind::Finite, re, im);
    }
    static constexpr ExtendedPoint directed(double log_modulus, double angle) {
        return ExtendedPoint(Kind::Directed, log_modulus, angle);
    }

    /// Builds e^{log_modulus + i angle}, as Finite when log_modulus is at or
    /// below the threshold and as Directed otherwise.
    static ExtendedPoint from_log_polar(double log_modulus, double angle, double threshold) {
        if (log_modulus > threshold) return directed(log_modulus, angle);
        const double r = std::exp(log_modulus);
        return finite(r * std::cos(angle), r * std::sin(angle));
    }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_directed() const { return kind_ == Kind::Directed; }

    // Finite accessors.
    constexpr double re() const { return a_; }
    constexpr double im() const { return b_; }
    complex value() const { return {a_, b_}; }

    // Directed accessors.
    constexpr double log_modulus() const { return a_; }
    constexpr double angle() const { return b_; }

    /// Natural log of the modulus, valid for both kinds.
    double log_abs() const {
        return is_finite() ? std::log(std::hypot(a_, b_)) : a_;
    }

    /// Real part; for Directed points this is +-inf once e^L cos(angle)
    /// exceeds double range.
    double real_part() const;

    /// True when no component is NaN and Finite components are not infinite.
    bool is_well_formed() const {
        if (std::isnan(a_) || std::isnan(b_)) return false;
        if (is_finite()) return std::isfinite(a_) && std::isfinite(b_);
        return std::isfinite(b_);
    }

    friend constexpr bool operator==(const ExtendedPoint&, const ExtendedPoint&) = default;

private:
    constexpr ExtendedPoint(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}

    Kind kind_ = Kind::Finite;
    double a_ = 0.0;
    double b_ = 0.0;
};

namespace detail {

/// t * e^{log_scale} without forming e^{log_scale} on its own; exact zeros
/// stay zero instead of becoming inf * 0.
inline double scale_by_exp(double t, double log_scale) {
    if (t == 0.0) return 0.0;
    return std::copysign(std::exp(log_scale + std::log(std::fabs(t))), t);
}

}  // namespace detail

inline double ExtendedPoint::real_part() const {
    if (is_finite()) return a_;
    return detail::scale_by_exp(std::cos(b_), a_);
}

}  // namespace escset
