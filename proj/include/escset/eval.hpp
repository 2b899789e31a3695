#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "escset/extended_point.hpp"
#include "escset/iteration_config.hpp"
#include "escset/map_expr.hpp"

namespace escset {

class DegeneratePhaseError : public std::runtime_error {
public:
    DegeneratePhaseError()
        : std::runtime_error("degenerate phase: |cos(angle)| below phase resolution on a directed point") {}
};

enum class StepStatus : unsigned char {
    Ok,
    /// A family F / G node mapped a Directed input onto exactly xi / zeta.
    Collapsed,
    /// The sign of the exponent's real part is below phase resolution.
    Degenerate,
};

struct Step {
    ExtendedPoint point;
    StepStatus status = StepStatus::Ok;
};

namespace detail {

inline ExtendedPoint not_a_point() {
    return ExtendedPoint::directed(std::nan(""), std::nan(""));
}

// phi(p) = a p + b
inline ExtendedPoint affine(const ExtendedPoint& p, complex a, complex b, double threshold) {
    if (p.is_finite()) {
        const complex q = a * p.value() + b;
        if (finite(q)) return ExtendedPoint(q);
        return ExtendedPoint::from_log_polar(std::log(std::abs(a)) + p.log_abs(),
                                             std::arg(a) + std::arg(p.value()), threshold);
    }
    const auto q = ExtendedPoint::from_log_polar(p.log_modulus() + std::log(std::abs(a)),
                                                 p.angle() + std::arg(a), threshold);
    return q.is_finite() ? ExtendedPoint(q.value() + b) : q;
}

// phi^{-1}(p) = (p - b) / a
inline ExtendedPoint affine_inverse(const ExtendedPoint& p, complex a, complex b, double threshold) {
    if (p.is_finite()) {
        const complex q = (p.value() - b) / a;
        if (finite(q)) return ExtendedPoint(q);
        return ExtendedPoint::from_log_polar(p.log_abs() - std::log(std::abs(a)),
                                             std::arg(p.value() - b) - std::arg(a), threshold);
    }
    return ExtendedPoint::from_log_polar(p.log_modulus() - std::log(std::abs(a)),
                                         p.angle() - std::arg(a), threshold);
}

// Smallest |cos(angle)| whose sign can be trusted: degeneracy_eps, or the
// rounding error of the angle itself once |angle| is large.
inline double phase_resolution(double angle, const IterationConfig& cfg) {
    return std::max(cfg.degeneracy_eps, std::fabs(angle) * std::numeric_limits<double>::epsilon());
}

// e^{w} + offset for a finite exponent w, switching to Directed above the
// threshold. The additive offset is dropped on the Directed branch.
inline ExtendedPoint exp_plus(complex w, complex offset, double threshold) {
    if (w.real() > threshold) return ExtendedPoint::directed(w.real(), w.imag());
    return ExtendedPoint(std::exp(w) + offset);
}

// One application of e^{sign * z + shift} + offset to a Directed z = e^{L + i theta}.
// sign = -1 for family F, +1 for family G.
inline Step exp_family_directed(const ExtendedPoint& z, double sign, complex shift, complex offset,
                                const IterationConfig& cfg) {
    const double c = sign * std::cos(z.angle());
    if (std::isnan(c)) return {not_a_point()};
    const double eps = phase_resolution(z.angle(), cfg);
    if (c <= -eps) return {ExtendedPoint(offset), StepStatus::Collapsed};
    if (c < eps) return {z, StepStatus::Degenerate};
    const double log_mod = scale_by_exp(c, z.log_modulus()) + shift.real();
    const double angle = sign * scale_by_exp(std::sin(z.angle()), z.log_modulus()) + shift.imag();
    return {ExtendedPoint::from_log_polar(log_mod, angle, cfg.overflow_log_threshold), StepStatus::Ok};
}

inline Step apply(const MapExpr& map, const ExtendedPoint& z, const IterationConfig& cfg);

inline Step apply_base(const MapExpr& map, const ExtendedPoint& z, const IterationConfig& cfg) {
    Step r = apply(map, z, cfg);
    if (r.status == StepStatus::Collapsed) r.status = StepStatus::Ok;
    return r;
}

inline Step apply(const MapExpr& map, const ExtendedPoint& z, const IterationConfig& cfg) {
    const double thr = cfg.overflow_log_threshold;
    return map.visit(overloaded{
        [&](const FamilyF& f) -> Step {
            if (z.is_finite()) return {exp_plus(-z.value() + f.lambda, f.xi, thr)};
            return exp_family_directed(z, -1.0, f.lambda, f.xi, cfg);
        },
        [&](const FamilyG& g) -> Step {
            if (z.is_finite()) return {exp_plus(z.value() + g.mu, g.zeta, thr)};
            return exp_family_directed(z, +1.0, g.mu, g.zeta, cfg);
        },
        [&](const ScaledExp& e) -> Step {
            if (z.is_finite()) return {exp_plus(e.lambda * z.value(), complex{}, thr)};
            // lambda z = |lambda| e^{L} e^{i (theta + arg lambda)}
            const double phase = z.angle() + std::arg(e.lambda);
            const double log_scale = z.log_modulus() + std::log(std::abs(e.lambda));
            const double c = std::cos(phase);
            if (std::isnan(c)) return {not_a_point()};
            const double eps = phase_resolution(phase, cfg);
            if (c <= -eps) return {ExtendedPoint::finite(0.0, 0.0)};
            if (c < eps) return {z, StepStatus::Degenerate};
            return {ExtendedPoint::from_log_polar(scale_by_exp(c, log_scale),
                                                  scale_by_exp(std::sin(phase), log_scale), thr)};
        },
        [&](const Iterate& it) -> Step {
            Step r{z};
            for (int k = 0; k < it.s; ++k) {
                r = apply_base(it.base, r.point, cfg);
                if (r.status != StepStatus::Ok || !r.point.is_well_formed()) break;
            }
            return r;
        },
        [&](const Shift& sh) -> Step {
            Step r = apply_base(sh.base, z, cfg);
            if (r.status == StepStatus::Ok && r.point.is_finite())
                r.point = ExtendedPoint(r.point.value() + sh.c);
            return r;
        },
        [&](const Compose& c) -> Step {
            Step r = apply_base(c.inner, z, cfg);
            if (r.status != StepStatus::Ok || !r.point.is_well_formed()) return r;
            return apply_base(c.outer, r.point, cfg);
        },
        [&](const Conjugate& c) -> Step {
            Step r = apply_base(c.base, affine_inverse(z, c.a, c.b, thr), cfg);
            if (r.status == StepStatus::Ok) r.point = affine(r.point, c.a, c.b, thr);
            return r;
        },
    });
}

}  // namespace detail

/// One application of `map` to `z`, without validation. Reports collapse and
/// degenerate phase through the status instead of throwing.
inline Step step(const MapExpr& map, const ExtendedPoint& z, const IterationConfig& cfg) {
    return detail::apply(map, z, cfg);
}

/// One application of `map` to `z`. Throws ValidationError for an invalid
/// tree and DegeneratePhaseError when a Directed input has undecidable phase.
inline ExtendedPoint eval(const MapExpr& map, const ExtendedPoint& z, const IterationConfig& cfg = {}) {
    require_valid(map);
    Step r = detail::apply(map, z, cfg);
    if (r.status == StepStatus::Degenerate) throw DegeneratePhaseError();
    return r.point;
}

}  // namespace escset
