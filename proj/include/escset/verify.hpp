#pragma once

// Sampling-based checks of the escaping-set statements that can be tested
// numerically. Escaping is a numerical verdict and NonEscapingProven a
// rigorous one, so only Escaping-vs-NonEscapingProven pairs count as hard
// conflicts. BoundedAtBudget and Undetermined are always skipped.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "escset/eval.hpp"
#include "escset/field.hpp"
#include "escset/map_expr.hpp"
#include "escset/orbit.hpp"
#include "escset/parallel.hpp"
#include "escset/report.hpp"
#include "escset/sampling.hpp"
#include "escset/strips.hpp"

namespace escset {

/// The engine's classifier; verifiers accept any callable with this shape so
/// tests can plant conflicts.
struct EngineClassifier {
    Classification operator()(const MapExpr& map, const ExtendedPoint& z, const IterationConfig& cfg) const {
        return classify_unchecked(map, z, cfg);
    }
};

class NoKnownPeriodError : public std::invalid_argument {
public:
    explicit NoKnownPeriodError(const std::string& map)
        : std::invalid_argument("no-known-period: no additive period derivable for " + map) {}
};

/// Minimum fraction of agreeing verdicts among samples where both sides are
/// determined.
inline constexpr double kHeuristicAgreement = 0.99;

namespace detail {

// Per-sample findings, merged in sample order.
struct SampleOutcome {
    std::vector<Violation> violations;
    bool skipped = false;
    bool compared = false;  // both sides determined in the agreement pair
    bool agreed = false;
    bool flagged = false;   // suite-specific informational flag
};

inline bool rigorous_conflict(const Classification& a, const Classification& b) {
    return (is_escaping(a) && is_proven_non_escaping(b)) || (is_proven_non_escaping(a) && is_escaping(b));
}

inline void tally(VerificationReport& report, std::vector<SampleOutcome>& outcomes, bool check_agreement,
                  const char* flag_metric = nullptr) {
    std::size_t compared = 0, agreed = 0, flagged = 0;
    for (auto& o : outcomes) {
        for (auto& v : o.violations) report.violations.push_back(std::move(v));
        report.skipped_undetermined += o.skipped ? 1 : 0;
        compared += o.compared ? 1 : 0;
        agreed += o.agreed ? 1 : 0;
        flagged += o.flagged ? 1 : 0;
    }
    report.total = outcomes.size();
    if (flag_metric) report.metrics[flag_metric] = static_cast<double>(flagged);
    if (!check_agreement) return;
    const double ratio = compared == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(compared);
    report.metrics["compared"] = static_cast<double>(compared);
    report.metrics["agreement"] = ratio;
    if (ratio < kHeuristicAgreement) {
        report.violations.push_back({Violation::kAggregate, "all samples",
                                     "agreement >= " + format_real(kHeuristicAgreement),
                                     "agreement = " + format_real(ratio)});
    }
}

inline std::string show(const Classification& c) { return describe(c); }

inline std::string show(const ExtendedPoint& p) {
    if (p.is_finite()) return format_complex(p.value());
    return "Directed{" + format_real(p.log_modulus()) + ", " + format_real(p.angle()) + "}";
}

struct FamilyParams {
    Family family;
    complex exponent_shift;  // lambda or mu
    complex offset;          // xi or zeta
};

inline FamilyParams family_params(const MapExpr& map) {
    if (auto f = map.as<FamilyF>()) return {Family::F, f->lambda, f->xi};
    if (auto g = map.as<FamilyG>()) return {Family::Fprime, g->mu, g->zeta};
    throw std::invalid_argument("suite requires a family F or family G map, got " + to_string(map));
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// For samples in the absorbing half plane, every iterate k = 1..k_max stays
/// within |f^k(z)| <= 1 + |xi| (+1e-9); xi becomes zeta for family G.
inline VerificationReport verify_halfplane_bound(const MapExpr& map, const SampleSet& samples, int k_max,
                                                 const IterationConfig& cfg = {},
                                                 unsigned workers = default_workers()) {
    require_valid(map);
    const auto params = detail::family_params(map);
    const double bound = 1.0 + std::abs(params.offset) + 1e-9;
    for (const complex& z : samples.points) {
        const bool inside = params.family == Family::F ? z.real() >= 0.0 : z.real() <= 0.0;
        if (!inside)
            throw std::invalid_argument("halfplane-bound sample outside the absorbing half plane: " +
                                        format_complex(z));
    }
    auto report = make_report("halfplane-bound", to_string(map));
    std::vector<detail::SampleOutcome> outcomes(samples.points.size());
    parallel_for(samples.points.size(), workers, [&](std::size_t idx) {
        ExtendedPoint p(samples.points[idx]);
        for (int k = 1; k <= k_max; ++k) {
            p = step(map, p, cfg).point;
            const double modulus = p.is_finite() ? std::abs(p.value()) : HUGE_VAL;
            if (!(modulus <= bound)) {
                outcomes[idx].violations.push_back(
                    {idx, format_complex(samples.points[idx]),
                     "|f^" + std::to_string(k) + "(z)| <= " + format_real(bound),
                     "|f^" + std::to_string(k) + "(z)| = " + format_real(modulus)});
                break;
            }
        }
    });
    detail::tally(report, outcomes, false);
    report.metrics["k_max"] = k_max;
    report.metrics["bound"] = bound;
    return report;
}

/// Every Escaping cell of a field computed for a family F (resp. G) map lies
/// in the left (resp. right) half plane inside one of the strips.
inline VerificationReport verify_strip_containment(const EscapeField& field, const MapExpr& map,
                                                   StripForm form = StripForm::Offset) {
    require_valid(map);
    const auto params = detail::family_params(map);
    auto report = make_report("strip-containment", to_string(map));
    std::size_t escaping = 0;
    for (int j = 0; j < field.ny; ++j) {
        for (int i = 0; i < field.nx; ++i) {
            const Classification& c = field.at(i, j).classification;
            if (!is_determined(c)) ++report.skipped_undetermined;
            if (!is_escaping(c)) continue;
            ++escaping;
            const complex z = field.center(i, j);
            if (!strip_of(z, params.family, params.exponent_shift, form)) {
                const std::size_t idx = static_cast<std::size_t>(j) * field.nx + i;
                report.violations.push_back({idx, format_complex(z), "inside a strip", detail::show(c) + " outside all strips"});
            }
        }
    }
    report.total = field.cells.size();
    report.metrics["escaping_cells"] = static_cast<double>(escaping);
    return report;
}

/// No cell escapes in both fields.
inline VerificationReport verify_disjointness(const EscapeField& field_f, const EscapeField& field_g) {
    if (field_f.nx != field_g.nx || field_f.ny != field_g.ny || !(field_f.window == field_g.window))
        throw std::invalid_argument("disjointness: fields differ in window or resolution");
    auto report = make_report("disjointness", "");
    std::size_t escaping_f = 0, escaping_g = 0;
    for (int j = 0; j < field_f.ny; ++j) {
        for (int i = 0; i < field_f.nx; ++i) {
            const bool ef = is_escaping(field_f.at(i, j).classification);
            const bool eg = is_escaping(field_g.at(i, j).classification);
            escaping_f += ef;
            escaping_g += eg;
            if (ef && eg) {
                report.violations.push_back({static_cast<std::size_t>(j) * field_f.nx + i,
                                             format_complex(field_f.center(i, j)), "escaping in at most one field",
                                             "escaping in both"});
            }
        }
    }
    report.total = field_f.cells.size();
    report.metrics["escaping_cells_first"] = static_cast<double>(escaping_f);
    report.metrics["escaping_cells_second"] = static_cast<double>(escaping_g);
    return report;
}

/// With c a period of f and g = f^s + c: (a) g^n(z) = f^{ns}(z) + c along the
/// orbit while both stay below modulus 1e8, within relative 1e-6; (b) f and g
/// never receive conflicting verdicts.
template <class Classifier = EngineClassifier>
VerificationReport verify_period_shift(const MapExpr& f, int s, const SampleSet& samples,
                                       const IterationConfig& cfg = {}, Classifier classifier = {},
                                       unsigned workers = default_workers()) {
    require_valid(f);
    const auto period = period_of(f);
    if (!period) throw NoKnownPeriodError(to_string(f));
    const complex c = *period;
    const MapExpr g = MapExpr::shift(MapExpr::iterate(f, s), c);
    require_valid(g);
    constexpr double kModulusCap = 1e8;
    constexpr double kRelTol = 1e-6;

    auto report = make_report("period-shift", to_string(g) + " vs " + to_string(f));
    std::vector<detail::SampleOutcome> outcomes(samples.points.size());
    parallel_for(samples.points.size(), workers, [&](std::size_t idx) {
        auto& out = outcomes[idx];
        const complex z0 = samples.points[idx];
        ExtendedPoint gn(z0), fn(z0);
        for (int n = 1; n <= cfg.max_iter; ++n) {
            const Step gs = step(g, gn, cfg);
            Step fs{fn};
            for (int k = 0; k < s && fs.status != StepStatus::Degenerate; ++k) fs = step(f, fs.point, cfg);
            if (gs.status == StepStatus::Degenerate || fs.status == StepStatus::Degenerate) break;
            gn = gs.point;
            fn = fs.point;
            if (!gn.is_finite() || !fn.is_finite() || !gn.is_well_formed() || !fn.is_well_formed()) break;
            const double fmod = std::abs(fn.value());
            if (std::abs(gn.value()) > kModulusCap || fmod > kModulusCap) break;
            const double err = std::abs(gn.value() - (fn.value() + c));
            if (!(err <= kRelTol * (1.0 + fmod))) {
                out.violations.push_back({idx, format_complex(z0),
                                          "g^" + std::to_string(n) + " = f^" + std::to_string(n * s) + " + c",
                                          "deviation " + format_real(err) + " at n=" + std::to_string(n)});
                break;
            }
        }
        const Classification cf = classifier(f, ExtendedPoint(z0), cfg);
        const Classification cg = classifier(g, ExtendedPoint(z0), cfg);
        if (detail::rigorous_conflict(cf, cg))
            out.violations.push_back({idx, format_complex(z0), "f: " + detail::show(cf), "g: " + detail::show(cg)});
        if (is_determined(cf) && is_determined(cg)) {
            out.compared = true;
            out.agreed = cf.index() == cg.index();
        } else {
            out.skipped = true;
        }
    });
    detail::tally(report, outcomes, false);
    report.metrics["s"] = s;
    return report;
}

/// Commuting pair realized as g = f^j, F = f o g, H = f^i o g^j:
///   (a) F Escaping while f or g is proven non-escaping is a violation;
///   (b) F and H never conflict, and agree on >= 99% of samples where both
///       are determined;
///   (c) z and g(z) never receive conflicting verdicts under F.
template <class Classifier = EngineClassifier>
VerificationReport verify_composite_laws(const MapExpr& f, int i, int j, const SampleSet& samples,
                                         const IterationConfig& cfg = {}, Classifier classifier = {},
                                         unsigned workers = default_workers()) {
    require_valid(f);
    if (i < 1 || j < 1) throw std::invalid_argument("composite-laws requires i, j >= 1");
    const MapExpr g = MapExpr::iterate(f, j);
    const MapExpr fg = MapExpr::compose(f, g);
    const MapExpr h = MapExpr::compose(MapExpr::iterate(f, i), MapExpr::iterate(g, j));

    auto report = make_report("composite-laws", "f=" + to_string(f) + ", g=" + to_string(g));
    std::vector<detail::SampleOutcome> outcomes(samples.points.size());
    parallel_for(samples.points.size(), workers, [&](std::size_t idx) {
        auto& out = outcomes[idx];
        const complex z0 = samples.points[idx];
        const ExtendedPoint z(z0);
        const Classification c_fg = classifier(fg, z, cfg);
        const Classification c_h = classifier(h, z, cfg);

        if (is_escaping(c_fg)) {
            const Classification c_f = classifier(f, z, cfg);
            const Classification c_g = classifier(g, z, cfg);
            if (!is_escaping(c_f) && !is_escaping(c_g) &&
                (is_proven_non_escaping(c_f) || is_proven_non_escaping(c_g))) {
                out.violations.push_back({idx, format_complex(z0), "f o g escaping => f or g escaping",
                                          "f: " + detail::show(c_f) + ", g: " + detail::show(c_g)});
            }
        }

        if (detail::rigorous_conflict(c_fg, c_h)) {
            out.violations.push_back({idx, format_complex(z0), "f o g: " + detail::show(c_fg),
                                      "f^i o g^j: " + detail::show(c_h)});
        }
        if (is_determined(c_fg) && is_determined(c_h)) {
            out.compared = true;
            out.agreed = c_fg.index() == c_h.index();
        } else {
            out.skipped = true;
        }

        const Step gz = step(g, z, cfg);
        if (gz.status == StepStatus::Degenerate || !gz.point.is_well_formed()) return;
        const Classification c_image = classifier(fg, gz.point, cfg);
        if (detail::rigorous_conflict(c_fg, c_image)) {
            out.violations.push_back({idx, format_complex(z0), "f o g at z: " + detail::show(c_fg),
                                      "f o g at g(z) = " + detail::show(gz.point) + ": " + detail::show(c_image)});
        }
        if (is_escaping(c_fg) && std::holds_alternative<BoundedAtBudget>(c_image)) out.flagged = true;
    });
    detail::tally(report, outcomes, true, "invariance_bounded_flags");
    report.metrics["i"] = i;
    report.metrics["j"] = j;
    return report;
}

/// g = f^j: whenever f provably does not escape from w, it must not be judged
/// escaping from g(w) either.
template <class Classifier = EngineClassifier>
VerificationReport verify_image_superset(const MapExpr& f, int j, const SampleSet& samples,
                                         const IterationConfig& cfg = {}, Classifier classifier = {},
                                         unsigned workers = default_workers()) {
    require_valid(f);
    if (j < 1) throw std::invalid_argument("image-superset requires j >= 1");
    const MapExpr g = MapExpr::iterate(f, j);
    auto report = make_report("image-superset", "f=" + to_string(f) + ", g=" + to_string(g));
    std::vector<detail::SampleOutcome> outcomes(samples.points.size());
    parallel_for(samples.points.size(), workers, [&](std::size_t idx) {
        auto& out = outcomes[idx];
        const complex w0 = samples.points[idx];
        const ExtendedPoint w(w0);
        const Classification c_w = classifier(f, w, cfg);
        if (!is_proven_non_escaping(c_w)) {
            out.skipped = !is_determined(c_w);
            out.flagged = is_escaping(c_w);
            return;
        }
        const Step gw = step(g, w, cfg);
        if (gw.status == StepStatus::Degenerate || !gw.point.is_well_formed()) {
            out.skipped = true;
            return;
        }
        const Classification c_image = classifier(f, gw.point, cfg);
        if (is_escaping(c_image)) {
            out.violations.push_back({idx, format_complex(w0), "f at g(w) not escaping (f at w: " + detail::show(c_w) + ")",
                                      "f at g(w) = " + detail::show(gw.point) + ": " + detail::show(c_image)});
        } else if (!is_determined(c_image)) {
            out.skipped = true;
        }
    });
    detail::tally(report, outcomes, false, "not_applicable_escaping");
    report.metrics["j"] = j;
    return report;
}

/// g = phi o f o phi^{-1} with phi(z) = a z + b, classified directly (not by
/// delegation to f): f at z and g at phi(z) never conflict and agree on >= 99%
/// of samples where both are determined.
template <class Classifier = EngineClassifier>
VerificationReport verify_conjugacy(const MapExpr& f, complex a, complex b, const SampleSet& samples,
                                    const IterationConfig& cfg = {}, Classifier classifier = {},
                                    unsigned workers = default_workers()) {
    require_valid(f);
    const MapExpr g = MapExpr::conjugate(a, b, f);
    require_valid(g);
    auto report = make_report("conjugacy", to_string(g));
    std::vector<detail::SampleOutcome> outcomes(samples.points.size());
    parallel_for(samples.points.size(), workers, [&](std::size_t idx) {
        auto& out = outcomes[idx];
        const complex z0 = samples.points[idx];
        const Classification c_f = classifier(f, ExtendedPoint(z0), cfg);
        const Classification c_g = classifier(g, ExtendedPoint(a * z0 + b), cfg);
        if (detail::rigorous_conflict(c_f, c_g))
            out.violations.push_back({idx, format_complex(z0), "f: " + detail::show(c_f), "g at phi(z): " + detail::show(c_g)});
        if (is_determined(c_f) && is_determined(c_g)) {
            out.compared = true;
            out.agreed = c_f.index() == c_g.index();
        } else {
            out.skipped = true;
        }
    });
    detail::tally(report, outcomes, true);
    return report;
}

}  // namespace escset
