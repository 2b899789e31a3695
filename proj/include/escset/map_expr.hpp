#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "escset/extended_point.hpp"

namespace escset {

struct MapNode;

/// Immutable expression tree describing an entire map built from the two
/// exponential families, e^{lambda z}, and the iterate / shift / composition /
/// affine-conjugation combinators. Copies share structure.
class MapExpr {
public:
    explicit MapExpr(std::shared_ptr<const MapNode> node) : node_(std::move(node)) {}

    static MapExpr family_f(complex lambda, complex xi);
    static MapExpr family_g(complex mu, complex zeta);
    static MapExpr scaled_exp(complex lambda);
    static MapExpr iterate(MapExpr base, int s);
    static MapExpr shift(MapExpr base, complex c);
    static MapExpr compose(MapExpr outer, MapExpr inner);
    static MapExpr conjugate(complex a, complex b, MapExpr base);

    const MapNode& node() const { return *node_; }

    template <class Visitor>
    decltype(auto) visit(Visitor&& v) const;

    template <class T>
    const T* as() const;

    friend bool operator==(const MapExpr& lhs, const MapExpr& rhs);

private:
    std::shared_ptr<const MapNode> node_;
};

/// e^{-z + lambda} + xi, with Re lambda < 0 and Re xi >= 1.
struct FamilyF {
    complex lambda;
    complex xi;
};

/// e^{z + mu} + zeta, with Re mu < 0 and Re zeta <= -1.
struct FamilyG {
    complex mu;
    complex zeta;
};

/// e^{lambda z}, lambda != 0.
struct ScaledExp {
    complex lambda;
};

/// base composed with itself s times.
struct Iterate {
    MapExpr base;
    int s;
};

/// base + c.
struct Shift {
    MapExpr base;
    complex c;
};

/// outer(inner(z)).
struct Compose {
    MapExpr outer;
    MapExpr inner;
};

/// phi o base o phi^{-1} with phi(z) = a z + b.
struct Conjugate {
    complex a;
    complex b;
    MapExpr base;
};

struct MapNode : std::variant<FamilyF, FamilyG, ScaledExp, Iterate, Shift, Compose, Conjugate> {
    using variant::variant;
    const variant& base() const { return *this; }
};

inline MapExpr MapExpr::family_f(complex lambda, complex xi) {
    return MapExpr(std::make_shared<const MapNode>(FamilyF{lambda, xi}));
}
inline MapExpr MapExpr::family_g(complex mu, complex zeta) {
    return MapExpr(std::make_shared<const MapNode>(FamilyG{mu, zeta}));
}
inline MapExpr MapExpr::scaled_exp(complex lambda) {
    return MapExpr(std::make_shared<const MapNode>(ScaledExp{lambda}));
}
inline MapExpr MapExpr::iterate(MapExpr base, int s) {
    return MapExpr(std::make_shared<const MapNode>(Iterate{std::move(base), s}));
}
inline MapExpr MapExpr::shift(MapExpr base, complex c) {
    return MapExpr(std::make_shared<const MapNode>(Shift{std::move(base), c}));
}
inline MapExpr MapExpr::compose(MapExpr outer, MapExpr inner) {
    return MapExpr(std::make_shared<const MapNode>(Compose{std::move(outer), std::move(inner)}));
}
inline MapExpr MapExpr::conjugate(complex a, complex b, MapExpr base) {
    return MapExpr(std::make_shared<const MapNode>(Conjugate{a, b, std::move(base)}));
}

template <class Visitor>
decltype(auto) MapExpr::visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), node_->base());
}

template <class T>
const T* MapExpr::as() const {
    return std::get_if<T>(&node_->base());
}

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline bool same_bits(complex x, complex y) {
    return x.real() == y.real() && x.imag() == y.imag() &&
           std::signbit(x.real()) == std::signbit(y.real()) &&
           std::signbit(x.imag()) == std::signbit(y.imag());
}

}  // namespace detail

inline bool operator==(const MapExpr& lhs, const MapExpr& rhs) {
    if (lhs.node_ == rhs.node_) return true;
    const auto& l = lhs.node_->base();
    const auto& r = rhs.node_->base();
    if (l.index() != r.index()) return false;
    using detail::same_bits;
    return std::visit(
        detail::overloaded{
            [&](const FamilyF& a) {
                const auto& b = std::get<FamilyF>(r);
                return same_bits(a.lambda, b.lambda) && same_bits(a.xi, b.xi);
            },
            [&](const FamilyG& a) {
                const auto& b = std::get<FamilyG>(r);
                return same_bits(a.mu, b.mu) && same_bits(a.zeta, b.zeta);
            },
            [&](const ScaledExp& a) { return same_bits(a.lambda, std::get<ScaledExp>(r).lambda); },
            [&](const Iterate& a) {
                const auto& b = std::get<Iterate>(r);
                return a.s == b.s && a.base == b.base;
            },
            [&](const Shift& a) {
                const auto& b = std::get<Shift>(r);
                return same_bits(a.c, b.c) && a.base == b.base;
            },
            [&](const Compose& a) {
                const auto& b = std::get<Compose>(r);
                return a.outer == b.outer && a.inner == b.inner;
            },
            [&](const Conjugate& a) {
                const auto& b = std::get<Conjugate>(r);
                return same_bits(a.a, b.a) && same_bits(a.b, b.b) && a.base == b.base;
            },
        },
        l);
}

// ---------------------------------------------------------------------------
// Validation

struct ConstraintViolation {
    std::string path;        ///< e.g. "root.outer.base"
    std::string constraint;  ///< the inequality that failed, e.g. "Re(lambda) < 0"

    std::string describe() const { return constraint + " violated at " + path; }
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ConstraintViolation v)
        : std::runtime_error("validation error: " + v.describe()), violation_(std::move(v)) {}
    const ConstraintViolation& violation() const { return violation_; }

private:
    ConstraintViolation violation_;
};

namespace detail {

inline bool finite(complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline std::optional<ConstraintViolation> validate_at(const MapExpr& map, const std::string& path) {
    auto fail = [&](const char* what) {
        return std::optional<ConstraintViolation>(ConstraintViolation{path, what});
    };
    return map.visit(overloaded{
        [&](const FamilyF& f) -> std::optional<ConstraintViolation> {
            if (!finite(f.lambda) || !finite(f.xi)) return fail("finite parameters");
            if (!(f.lambda.real() < 0.0)) return fail("Re(lambda) < 0");
            if (!(f.xi.real() >= 1.0)) return fail("Re(xi) >= 1");
            return std::nullopt;
        },
        [&](const FamilyG& g) -> std::optional<ConstraintViolation> {
            if (!finite(g.mu) || !finite(g.zeta)) return fail("finite parameters");
            if (!(g.mu.real() < 0.0)) return fail("Re(mu) < 0");
            if (!(g.zeta.real() <= -1.0)) return fail("Re(zeta) <= -1");
            return std::nullopt;
        },
        [&](const ScaledExp& e) -> std::optional<ConstraintViolation> {
            if (!finite(e.lambda)) return fail("finite parameters");
            if (e.lambda == complex(0.0, 0.0)) return fail("lambda \xE2\x89\xA0 0");
            return std::nullopt;
        },
        [&](const Iterate& it) -> std::optional<ConstraintViolation> {
            if (it.s < 1) return fail("s >= 1");
            return validate_at(it.base, path + ".base");
        },
        [&](const Shift& sh) -> std::optional<ConstraintViolation> {
            if (!finite(sh.c)) return fail("finite parameters");
            return validate_at(sh.base, path + ".base");
        },
        [&](const Compose& c) -> std::optional<ConstraintViolation> {
            if (auto v = validate_at(c.outer, path + ".outer")) return v;
            return validate_at(c.inner, path + ".inner");
        },
        [&](const Conjugate& c) -> std::optional<ConstraintViolation> {
            if (!finite(c.a) || !finite(c.b)) return fail("finite parameters");
            if (c.a == complex(0.0, 0.0)) return fail("a \xE2\x89\xA0 0");
            return validate_at(c.base, path + ".base");
        },
    });
}

}  // namespace detail

/// First violated node constraint in pre-order, or nullopt when the whole
/// tree is valid.
inline std::optional<ConstraintViolation> validate(const MapExpr& map) {
    return detail::validate_at(map, "root");
}

inline void require_valid(const MapExpr& map) {
    if (auto v = validate(map)) throw ValidationError(std::move(*v));
}

// ---------------------------------------------------------------------------
// Structural period

/// An additive period c with map(z + c) = map(z), when derivable from the
/// tree. Compositions report none.
inline std::optional<complex> period_of(const MapExpr& map) {
    constexpr complex two_pi_i{0.0, 2.0 * std::numbers::pi};
    return map.visit(detail::overloaded{
        [&](const FamilyF&) -> std::optional<complex> { return two_pi_i; },
        [&](const FamilyG&) -> std::optional<complex> { return two_pi_i; },
        [&](const ScaledExp& e) -> std::optional<complex> { return two_pi_i / e.lambda; },
        [&](const Iterate& it) { return period_of(it.base); },
        [&](const Shift& sh) { return period_of(sh.base); },
        [&](const Compose&) -> std::optional<complex> { return std::nullopt; },
        [&](const Conjugate& c) -> std::optional<complex> {
            if (auto p = period_of(c.base)) return c.a * *p;
            return std::nullopt;
        },
    });
}

// ---------------------------------------------------------------------------
// Canonical text form

/// Shortest decimal that parses back to the same double.
inline std::string format_real(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// "a+bi" / "a-bi", both parts always present.
inline std::string format_complex(complex z) {
    std::string out = format_real(z.real());
    out += std::signbit(z.imag()) ? '-' : '+';
    out += format_real(std::fabs(z.imag()));
    out += 'i';
    return out;
}

inline std::string to_string(const MapExpr& map) {
    return map.visit(detail::overloaded{
        [](const FamilyF& f) {
            return "F(" + format_complex(f.lambda) + ", " + format_complex(f.xi) + ")";
        },
        [](const FamilyG& g) {
            return "G(" + format_complex(g.mu) + ", " + format_complex(g.zeta) + ")";
        },
        [](const ScaledExp& e) { return "exp(" + format_complex(e.lambda) + ")"; },
        [](const Iterate& it) {
            return "iter(" + to_string(it.base) + ", " + std::to_string(it.s) + ")";
        },
        [](const Shift& sh) {
            return "shift(" + to_string(sh.base) + ", " + format_complex(sh.c) + ")";
        },
        [](const Compose& c) {
            return "comp(" + to_string(c.outer) + ", " + to_string(c.inner) + ")";
        },
        [](const Conjugate& c) {
            return "conj(" + format_complex(c.a) + ", " + format_complex(c.b) + ", " +
                   to_string(c.base) + ")";
        },
    });
}

}  // namespace escset
