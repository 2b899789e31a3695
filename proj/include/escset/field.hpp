#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "escset/iteration_config.hpp"
#include "escset/map_expr.hpp"
#include "escset/orbit.hpp"
#include "escset/parallel.hpp"
#include "escset/strips.hpp"
#include "escset/window.hpp"

namespace escset {

struct FieldCell {
    Classification classification = BoundedAtBudget{};
    std::optional<int> escape_step;

    friend bool operator==(const FieldCell&, const FieldCell&) = default;
};

/// Row-major grid of classified cell centers; row 0 is the top (y_max) edge.
struct EscapeField {
    Window window{};
    int nx = 0;
    int ny = 0;
    std::vector<FieldCell> cells;

    double dx() const { return window.width() / nx; }
    double dy() const { return window.height() / ny; }

    complex center(int i, int j) const {
        return {window.x_min + (i + 0.5) * dx(), window.y_max - (j + 0.5) * dy()};
    }

    FieldCell& at(int i, int j) { return cells[static_cast<std::size_t>(j) * nx + i]; }
    const FieldCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * nx + i]; }

    /// Field of the given shape with every cell BoundedAtBudget.
    static EscapeField blank(const Window& window, int nx, int ny) {
        window.check();
        if (nx < 1 || ny < 1) throw std::invalid_argument("grid resolution must be positive");
        return {window, nx, ny, std::vector<FieldCell>(static_cast<std::size_t>(nx) * ny)};
    }
};

inline FieldCell make_cell(Classification c) {
    FieldCell cell{c, std::nullopt};
    if (auto e = std::get_if<Escaping>(&c)) cell.escape_step = e->step;
    return cell;
}

/// Classifies every cell center. Rows are split across `workers` threads; the
/// result does not depend on the worker count.
inline EscapeField classify_grid(const MapExpr& map, const Window& window, int nx, int ny,
                                 const IterationConfig& cfg, unsigned workers = default_workers()) {
    require_valid(map);
    cfg.check();
    EscapeField field = EscapeField::blank(window, nx, ny);
    parallel_for(static_cast<std::size_t>(ny), workers, [&](std::size_t row) {
        const int j = static_cast<int>(row);
        for (int i = 0; i < nx; ++i)
            field.at(i, j) = make_cell(classify_unchecked(map, ExtendedPoint(field.center(i, j)), cfg));
    });
    return field;
}

// ---------------------------------------------------------------------------
// Strip overlay

struct MarkedField {
    EscapeField field;
    std::vector<std::uint8_t> marks;  ///< one per cell, 1 = draw white

    std::size_t mark_count() const {
        return static_cast<std::size_t>(std::count(marks.begin(), marks.end(), std::uint8_t{1}));
    }
};

/// Marks every cell whose vertical span (y - dy/2, y + dy/2] contains a strip
/// boundary y = (2m+1)pi/2 + offset. Classifications are untouched.
inline MarkedField overlay_strips(const EscapeField& field, Family family, complex param,
                                  StripForm form = StripForm::Offset) {
    constexpr double pi = std::numbers::pi;
    const double offset = strip_boundary_offset(family, param, form);
    MarkedField out{field, std::vector<std::uint8_t>(field.cells.size(), 0)};
    // Index of the highest boundary at or below y.
    auto boundary_index = [&](double y) { return std::floor((y - offset - 0.5 * pi) / pi); };
    for (int j = 0; j < field.ny; ++j) {
        const double top = field.window.y_max - j * field.dy();
        const double bottom = field.window.y_max - (j + 1) * field.dy();
        const bool crosses = boundary_index(top) != boundary_index(bottom);
        if (!crosses) continue;
        for (int i = 0; i < field.nx; ++i) out.marks[static_cast<std::size_t>(j) * field.nx + i] = 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// PPM

struct Rgb {
    std::uint8_t r, g, b;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline Rgb palette(const Classification& c) {
    return std::visit(detail::overloaded{
                          [](const Escaping& e) {
                              const int red = std::min(255, 8 + 4 * std::max(0, e.step));
                              return Rgb{static_cast<std::uint8_t>(red), 0, 64};
                          },
                          [](const NonEscapingProven&) { return Rgb{0, 0, 0}; },
                          [](const BoundedAtBudget&) { return Rgb{0, 48, 0}; },
                          [](const Undetermined&) { return Rgb{128, 128, 128}; },
                      },
                      c);
}

namespace detail {

inline void write_ppm(const EscapeField& field, const std::vector<std::uint8_t>* marks, std::ostream& out) {
    out << "P6\n" << field.nx << ' ' << field.ny << "\n255\n";
    std::string row(static_cast<std::size_t>(field.nx) * 3, '\0');
    for (int j = 0; j < field.ny; ++j) {
        for (int i = 0; i < field.nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * field.nx + i;
            const Rgb px = (marks && (*marks)[idx]) ? Rgb{255, 255, 255} : palette(field.cells[idx].classification);
            row[3 * i] = static_cast<char>(px.r);
            row[3 * i + 1] = static_cast<char>(px.g);
            row[3 * i + 2] = static_cast<char>(px.b);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    out.flush();
    if (!out) throw std::runtime_error("PPM sink write failure");
}

}  // namespace detail

/// Binary P6 image, rows top to bottom.
inline void render_ppm(const EscapeField& field, std::ostream& out) { detail::write_ppm(field, nullptr, out); }

inline void render_ppm(const MarkedField& marked, std::ostream& out) {
    detail::write_ppm(marked.field, &marked.marks, out);
}

// ---------------------------------------------------------------------------
// CSV

/// What the CSV carries for one cell.
struct CsvCell {
    int i = 0;
    int j = 0;
    double re = 0.0;
    double im = 0.0;
    char cls = 'B';
    std::optional<int> step;

    friend bool operator==(const CsvCell&, const CsvCell&) = default;
};

inline CsvCell csv_cell(const EscapeField& field, int i, int j) {
    const Classification& c = field.at(i, j).classification;
    const complex z = field.center(i, j);
    CsvCell row{i, j, z.real(), z.imag(), class_letter(c), std::nullopt};
    if (is_determined(c)) row.step = step_of(c);
    return row;
}

/// Rows in the order export_field_csv writes them.
inline std::vector<CsvCell> csv_cells(const EscapeField& field) {
    std::vector<CsvCell> rows;
    rows.reserve(field.cells.size());
    for (int j = 0; j < field.ny; ++j)
        for (int i = 0; i < field.nx; ++i) rows.push_back(csv_cell(field, i, j));
    return rows;
}

/// Header "i,j,re,im,class,step"; step is empty unless class is E or P.
inline void export_field_csv(const EscapeField& field, std::ostream& out) {
    out << "i,j,re,im,class,step\n";
    for (const CsvCell& c : csv_cells(field)) {
        out << c.i << ',' << c.j << ',' << format_g17(c.re) << ',' << format_g17(c.im) << ',' << c.cls << ',';
        if (c.step) out << *c.step;
        out << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("CSV sink write failure");
}

/// Parses a field CSV back into rows. Throws std::runtime_error on malformed
/// input, naming the line.
inline std::vector<CsvCell> read_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "i,j,re,im,class,step")
        throw std::runtime_error("field CSV: missing header");
    std::vector<CsvCell> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fail = [&] { throw std::runtime_error("field CSV: malformed line " + std::to_string(line_no)); };
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string part;
        while (std::getline(ss, part, ',')) parts.push_back(part);
        if (!line.empty() && line.back() == ',') parts.emplace_back();
        if (parts.size() != 6) fail();
        CsvCell c;
        auto parse_int = [&](const std::string& s, int& v) {
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) fail();
        };
        auto parse_double = [&](const std::string& s, double& v) {
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) fail();
        };
        parse_int(parts[0], c.i);
        parse_int(parts[1], c.j);
        parse_double(parts[2], c.re);
        parse_double(parts[3], c.im);
        if (parts[4].size() != 1 || std::string("EPBU").find(parts[4][0]) == std::string::npos) fail();
        c.cls = parts[4][0];
        if (!parts[5].empty()) {
            int s = 0;
            parse_int(parts[5], s);
            c.step = s;
        }
        if (c.step.has_value() != (c.cls == 'E' || c.cls == 'P')) fail();
        rows.push_back(c);
    }
    return rows;
}

}  // namespace escset
