#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "escset/extended_point.hpp"

namespace escset {

enum class Family : unsigned char { F, Fprime };

/// Which horizontal offset the strips carry. Offset is the form the
/// half-plane lemmas prove (shifted by Im lambda / -Im mu); Literal drops the
/// shift and is only equivalent when the parameter is real.
enum class StripForm : unsigned char { Offset, Literal };

struct StripId {
    long long k;
    Family family;
    friend bool operator==(const StripId&, const StripId&) = default;
};

/// Strip index containing z, or none when z is in the absorbing half plane or
/// on a strip boundary.
///
///   family F  (param = lambda): x < 0 and (4k-3)pi/2 < y - Im lambda < (4k-1)pi/2
///   family F' (param = mu):     x > 0 and (4k-1)pi/2 < y + Im mu     < (4k+1)pi/2
inline std::optional<StripId> strip_of(complex z, Family family, complex param,
                                       StripForm form = StripForm::Offset) {
    constexpr double pi = std::numbers::pi;
    const double offset = form == StripForm::Literal ? 0.0 : param.imag();
    double t = 0.0;
    double u = 0.0;
    if (family == Family::F) {
        if (!(z.real() < 0.0)) return std::nullopt;
        t = z.imag() - offset;
        u = (t + 1.5 * pi) / (2.0 * pi);  // strip k <=> u in (k, k + 1/2)
    } else {
        if (!(z.real() > 0.0)) return std::nullopt;
        t = z.imag() + offset;
        u = (t + 0.5 * pi) / (2.0 * pi);
    }
    if (!std::isfinite(u)) return std::nullopt;
    const double k = std::floor(u);
    const double frac = u - k;
    if (!(frac > 0.0 && frac < 0.5)) return std::nullopt;
    return StripId{static_cast<long long>(k), family};
}

/// Imaginary offset of the strip boundaries y = (2m+1)pi/2 + offset.
inline double strip_boundary_offset(Family family, complex param, StripForm form = StripForm::Offset) {
    if (form == StripForm::Literal) return 0.0;
    return family == Family::F ? param.imag() : -param.imag();
}

}  // namespace escset
