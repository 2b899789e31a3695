#pragma once

// Grammar for textual map specifications:
//
//   expr := "F(" c "," c ")" | "G(" c "," c ")" | "exp(" c ")"
//         | "iter(" expr "," int ")" | "shift(" expr "," c ")"
//         | "comp(" expr "," expr ")" | "conj(" c "," c "," expr ")"
//   c    := real | real ("+" | "-") real "i"
//   real := ["-" | "+"] digits ["." digits] [("e" | "E") ["+" | "-"] digits]
//
// Whitespace between tokens is ignored. Parsed trees are validated.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "escset/map_expr.hpp"

namespace escset {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("syntax error at byte " + std::to_string(offset) + ": " + what),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {

class MapParser {
public:
    explicit MapParser(std::string_view text) : text_(text) {}

    MapExpr parse_all() {
        MapExpr e = expr();
        skip_ws();
        if (pos_ != text_.size()) error("trailing input");
        return e;
    }

    complex complex_all() {
        complex c = complex_literal();
        skip_ws();
        if (pos_ != text_.size()) error("trailing input after complex literal");
        return c;
    }

private:
    [[noreturn]] void error(const std::string& what) const { throw ParseError(pos_, what); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) error(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    MapExpr expr() {
        const std::size_t start = (skip_ws(), pos_);
        const std::string_view name = identifier();
        expect('(');
        if (name == "F" || name == "G") {
            const complex p = complex_literal();
            expect(',');
            const complex q = complex_literal();
            expect(')');
            return name == "F" ? MapExpr::family_f(p, q) : MapExpr::family_g(p, q);
        }
        if (name == "exp") {
            const complex l = complex_literal();
            expect(')');
            return MapExpr::scaled_exp(l);
        }
        if (name == "iter") {
            MapExpr base = expr();
            expect(',');
            const int s = integer();
            expect(')');
            return MapExpr::iterate(std::move(base), s);
        }
        if (name == "shift") {
            MapExpr base = expr();
            expect(',');
            const complex c = complex_literal();
            expect(')');
            return MapExpr::shift(std::move(base), c);
        }
        if (name == "comp") {
            MapExpr outer = expr();
            expect(',');
            MapExpr inner = expr();
            expect(')');
            return MapExpr::compose(std::move(outer), std::move(inner));
        }
        if (name == "conj") {
            const complex a = complex_literal();
            expect(',');
            const complex b = complex_literal();
            expect(',');
            MapExpr base = expr();
            expect(')');
            return MapExpr::conjugate(a, b, std::move(base));
        }
        pos_ = start;
        error("unknown map constructor '" + std::string(name) + "'");
    }

    int integer() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) error("expected integer");
        int value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc{}) {
            pos_ = start;
            error("integer out of range");
        }
        return value;
    }

    // Scans an unsigned decimal (digits, optional fraction, optional
    // exponent) and returns its value.
    double unsigned_real() {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t d = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return pos_ - d;
        };
        std::size_t n = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) {
            pos_ = start;
            error("expected number");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            const std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = mark;
                error("malformed exponent");
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc{} || ptr != text_.data() + pos_) {
            pos_ = start;
            error("number out of range");
        }
        return value;
    }

    double signed_real() {
        double sign = 1.0;
        const char c = peek();
        if (c == '-' || c == '+') {
            sign = c == '-' ? -1.0 : 1.0;
            ++pos_;
            skip_ws();
        }
        return sign * unsigned_real();
    }

    complex complex_literal() {
        const double re = signed_real();
        const char c = peek();
        if (c != '+' && c != '-') return {re, 0.0};
        ++pos_;
        skip_ws();
        const double im = (c == '-' ? -1.0 : 1.0) * unsigned_real();
        expect('i');
        return {re, im};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses and validates a map specification. Throws ParseError (with byte
/// offset) or ValidationError.
inline MapExpr parse_map(std::string_view text) {
    MapExpr map = detail::MapParser(text).parse_all();
    require_valid(map);
    return map;
}

/// Parses a standalone complex literal ("a", "a+bi", "a-bi").
inline complex parse_complex(std::string_view text) {
    return detail::MapParser(text).complex_all();
}

}  // namespace escset
