#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "escset/eval.hpp"
#include "escset/extended_point.hpp"
#include "escset/iteration_config.hpp"
#include "escset/map_expr.hpp"

namespace escset {

enum class AbsorptionRule : unsigned char {
    RightHalfPlaneF,
    LeftHalfPlaneG,
    UnderflowToFixedNeighborhood,
};

enum class UndeterminedReason : unsigned char { DegeneratePhase, NotANumber };

/// Numerical escape verdict: two consecutive deepening / growing steps.
struct Escaping {
    int step;
    friend bool operator==(const Escaping&, const Escaping&) = default;
};

/// Rigorous non-escape verdict: the orbit entered a proven absorbing region.
struct NonEscapingProven {
    AbsorptionRule rule;
    int step;
    friend bool operator==(const NonEscapingProven&, const NonEscapingProven&) = default;
};

struct BoundedAtBudget {
    friend bool operator==(const BoundedAtBudget&, const BoundedAtBudget&) = default;
};

struct Undetermined {
    UndeterminedReason reason;
    friend bool operator==(const Undetermined&, const Undetermined&) = default;
};

using Classification = std::variant<Escaping, NonEscapingProven, BoundedAtBudget, Undetermined>;

inline bool is_escaping(const Classification& c) { return std::holds_alternative<Escaping>(c); }
inline bool is_proven_non_escaping(const Classification& c) {
    return std::holds_alternative<NonEscapingProven>(c);
}
/// Escaping or NonEscapingProven.
inline bool is_determined(const Classification& c) { return is_escaping(c) || is_proven_non_escaping(c); }

/// One of E, P, B, U.
inline char class_letter(const Classification& c) {
    static constexpr char letters[] = {'E', 'P', 'B', 'U'};
    return letters[c.index()];
}

inline const char* variant_name(const Classification& c) {
    static constexpr const char* names[] = {"Escaping", "NonEscapingProven", "BoundedAtBudget",
                                            "Undetermined"};
    return names[c.index()];
}

inline const char* to_string(AbsorptionRule r) {
    switch (r) {
        case AbsorptionRule::RightHalfPlaneF: return "RightHalfPlaneF";
        case AbsorptionRule::LeftHalfPlaneG: return "LeftHalfPlaneG";
        case AbsorptionRule::UnderflowToFixedNeighborhood: return "UnderflowToFixedNeighborhood";
    }
    return "?";
}

inline const char* to_string(UndeterminedReason r) {
    return r == UndeterminedReason::DegeneratePhase ? "degenerate-phase" : "nan";
}

/// Step attached to Escaping / NonEscapingProven, -1 otherwise.
inline int step_of(const Classification& c) {
    if (auto e = std::get_if<Escaping>(&c)) return e->step;
    if (auto p = std::get_if<NonEscapingProven>(&c)) return p->step;
    return -1;
}

/// Human-readable form, e.g. "NonEscapingProven{RightHalfPlaneF, 0}".
inline std::string describe(const Classification& c) {
    return std::visit(detail::overloaded{
                          [](const Escaping& e) { return "Escaping{" + std::to_string(e.step) + "}"; },
                          [](const NonEscapingProven& p) {
                              return "NonEscapingProven{" + std::string(to_string(p.rule)) + ", " +
                                     std::to_string(p.step) + "}";
                          },
                          [](const BoundedAtBudget&) { return std::string("BoundedAtBudget"); },
                          [](const Undetermined& u) {
                              return "Undetermined{" + std::string(to_string(u.reason)) + "}";
                          },
                      },
                      c);
}

struct OrbitRecord {
    ExtendedPoint seed;
    std::vector<ExtendedPoint> points;  ///< empty unless record_orbit
    Classification classification;
    int steps_taken = 0;
};

namespace detail {

enum class MapShape { FamilyF, FamilyG, Generic };

inline MapShape shape_of(const MapExpr& map) {
    if (map.as<FamilyF>()) return MapShape::FamilyF;
    if (map.as<FamilyG>()) return MapShape::FamilyG;
    return MapShape::Generic;
}

// Outcome of the escape test on the pair (z_n, z_{n+1}).
enum class PairVerdict { None, Grows, Escapes };

inline PairVerdict escape_pair(MapShape shape, const ExtendedPoint& z, const ExtendedPoint& next,
                               const IterationConfig& cfg) {
    switch (shape) {
        case MapShape::FamilyF: {
            const double re = z.real_part();
            return re <= -cfg.escape_real_threshold && next.real_part() <= re ? PairVerdict::Escapes
                                                                               : PairVerdict::None;
        }
        case MapShape::FamilyG: {
            const double re = z.real_part();
            return re >= cfg.escape_real_threshold && next.real_part() >= re ? PairVerdict::Escapes
                                                                              : PairVerdict::None;
        }
        case MapShape::Generic: break;
    }
    if (z.is_directed() && next.is_directed()) {
        // +inf is a fixed point of the log-modulus along the real axis.
        const bool deeper = next.log_modulus() > z.log_modulus() ||
                            (next.log_modulus() == HUGE_VAL && z.log_modulus() == HUGE_VAL);
        return deeper ? PairVerdict::Escapes : PairVerdict::None;
    }
    bool grows = false;
    if (z.is_finite() && next.is_finite()) {
        const double r = std::abs(z.value());
        grows = r >= cfg.generic_escape_radius && std::abs(next.value()) >= r;
    } else {
        const double l = z.log_abs();
        grows = l >= std::log(cfg.generic_escape_radius) && next.log_abs() >= l;
    }
    return grows ? PairVerdict::Grows : PairVerdict::None;
}

// First-order relative error of e^{sign z + shift} + offset given the relative
// error of z. On a Directed result this is the absolute error of its phase.
inline double propagate_error(const ExtendedPoint& z, double err, const ExtendedPoint& next, complex shift,
                              complex offset) {
    constexpr double u = std::numeric_limits<double>::epsilon();
    const double mod_z = z.is_finite() ? std::abs(z.value()) : std::exp(z.log_modulus());
    if (std::isinf(mod_z)) return HUGE_VAL;
    const double dw = mod_z * err + (mod_z + std::abs(shift)) * u;
    if (next.is_directed()) return dw;
    const complex v = next.value();
    if (v == offset || std::abs(v) == 0.0) return dw + u;
    return dw * std::abs(v - offset) / std::abs(v) + u;
}

// Iterates from z0 until a termination rule fires. `visit_point` sees every
// iterate, including z0 and the terminal one.
template <class PointSink>
Classification run_classification(const MapExpr& map, const ExtendedPoint& z0, const IterationConfig& cfg,
                                  int& steps_taken, PointSink&& visit_point) {
    const MapShape shape = shape_of(map);
    // Family F / G only: the underflow rule is a proof only while the sign of
    // cos(angle) survives the error accumulated along the orbit.
    complex shift{}, offset{};
    if (auto f = map.as<FamilyF>()) shift = f->lambda, offset = f->xi;
    if (auto g = map.as<FamilyG>()) shift = g->mu, offset = g->zeta;
    double err = 0.0;
    bool grew = false;
    ExtendedPoint z = z0;
    steps_taken = 0;
    visit_point(z);
    if (!z.is_well_formed()) return Undetermined{UndeterminedReason::NotANumber};
    for (int n = 0;; ++n) {
        if (z.is_finite()) {
            if (shape == MapShape::FamilyF && z.re() >= 0.0)
                return NonEscapingProven{AbsorptionRule::RightHalfPlaneF, n};
            if (shape == MapShape::FamilyG && z.re() <= 0.0)
                return NonEscapingProven{AbsorptionRule::LeftHalfPlaneG, n};
        }
        if (n == cfg.max_iter) return BoundedAtBudget{};
        if (shape != MapShape::Generic && z.is_directed() && !(err < std::fabs(std::cos(z.angle()))))
            return Undetermined{UndeterminedReason::DegeneratePhase};

        const Step s = apply(map, z, cfg);
        if (s.status == StepStatus::Degenerate) return Undetermined{UndeterminedReason::DegeneratePhase};
        steps_taken = n + 1;
        visit_point(s.point);
        if (s.status == StepStatus::Collapsed)
            return NonEscapingProven{AbsorptionRule::UnderflowToFixedNeighborhood, n + 1};
        // A growing pair that involves a finite point only counts when the
        // previous pair grew as well.
        const PairVerdict verdict = escape_pair(shape, z, s.point, cfg);
        if (verdict == PairVerdict::Escapes || (verdict == PairVerdict::Grows && grew)) return Escaping{n};
        grew = verdict == PairVerdict::Grows;
        if (!s.point.is_well_formed()) return Undetermined{UndeterminedReason::NotANumber};
        if (shape != MapShape::Generic) err = propagate_error(z, err, s.point, shift, offset);
        z = s.point;
    }
}

}  // namespace detail

/// Classifies the orbit of z0. The map must be valid; use classify() for a
/// validating entry point.
inline Classification classify_unchecked(const MapExpr& map, const ExtendedPoint& z0, const IterationConfig& cfg) {
    int steps = 0;
    return detail::run_classification(map, z0, cfg, steps, [](const ExtendedPoint&) {});
}

inline Classification classify(const MapExpr& map, complex z0, const IterationConfig& cfg = {}) {
    require_valid(map);
    cfg.check();
    return classify_unchecked(map, ExtendedPoint(z0), cfg);
}

/// classify() with the trace retained when cfg.record_orbit is set.
inline OrbitRecord run_orbit(const MapExpr& map, complex z0, const IterationConfig& cfg) {
    require_valid(map);
    cfg.check();
    OrbitRecord rec{ExtendedPoint(z0), {}, BoundedAtBudget{}, 0};
    if (cfg.record_orbit) {
        rec.classification = detail::run_classification(
            map, rec.seed, cfg, rec.steps_taken, [&](const ExtendedPoint& p) { rec.points.push_back(p); });
    } else {
        rec.classification =
            detail::run_classification(map, rec.seed, cfg, rec.steps_taken, [](const ExtendedPoint&) {});
    }
    return rec;
}

/// "%.17g" formatting used by every CSV writer.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Orbit CSV: header "n,kind,a,b", one row per recorded point (F rows carry
/// Re/Im, D rows log-modulus/angle), then "# classification=<variant>,step=<n>".
/// For BoundedAtBudget / Undetermined the step is the number of steps taken.
inline void write_orbit_csv(const OrbitRecord& rec, std::ostream& out) {
    out << "n,kind,a,b\n";
    for (std::size_t n = 0; n < rec.points.size(); ++n) {
        const ExtendedPoint& p = rec.points[n];
        out << n << ',' << (p.is_finite() ? 'F' : 'D') << ',' << format_g17(p.is_finite() ? p.re() : p.log_modulus())
            << ',' << format_g17(p.is_finite() ? p.im() : p.angle()) << '\n';
    }
    const int step = is_determined(rec.classification) ? step_of(rec.classification) : rec.steps_taken;
    out << "# classification=" << variant_name(rec.classification) << ",step=" << step << '\n';
}

}  // namespace escset
