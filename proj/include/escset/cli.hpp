#pragma once

// Command-line front end: orbit, render, strips, verify, parse.
//
// Exit codes: 0 success, 1 verification violations, 2 usage / parse /
// validation error, 3 numeric failure (NaN abort).

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "escset/escset.hpp"

namespace escset::cli {

enum ExitCode : int { kOk = 0, kViolations = 1, kUsage = 2, kNumeric = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_reals(const std::string& text, std::size_t expected, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        double v = 0.0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || p != part.data() + part.size())
            throw UsageError(std::string("malformed ") + what + ": '" + text + "'");
        out.push_back(v);
    }
    if (out.size() != expected)
        throw UsageError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated values");
    return out;
}

inline Window parse_window(const std::string& text) {
    const auto v = parse_reals(text, 4, "window");
    Window w{v[0], v[1], v[2], v[3]};
    try {
        w.check();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return w;
}

inline std::pair<int, int> parse_res(const std::string& text) {
    const auto v = parse_reals(text, 2, "resolution");
    if (v[0] < 1 || v[1] < 1 || v[0] != static_cast<int>(v[0]) || v[1] != static_cast<int>(v[1]))
        throw UsageError("resolution must be two positive integers");
    return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

// Reads "key = value" lines ('#' starts a comment) and turns them into
// option tokens. `flags` lists boolean options.
inline std::vector<std::string> config_tokens(const std::string& path, const std::set<std::string>& flags) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::vector<std::string> tokens;
    std::optional<std::string> nx, ny;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
        if (key == "nx") {
            nx = value;
            continue;
        }
        if (key == "ny") {
            ny = value;
            continue;
        }
        if (flags.count(key)) {
            if (value == "true" || value == "1" || value == "yes") tokens.push_back("--" + key);
            continue;
        }
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    if (nx || ny) {
        if (!nx || !ny) throw UsageError(path + ": nx and ny must be given together");
        tokens.push_back("--res");
        tokens.push_back(*nx + "," + *ny);
    }
    return tokens;
}

struct IterationFlags {
    std::optional<int> max_iter;
    std::optional<double> overflow_log_threshold;
    std::optional<double> escape_real_threshold;
    std::optional<double> degeneracy_eps;
    std::optional<double> generic_escape_radius;
    unsigned workers = default_workers();

    void attach(CLI::App* sub) {
        sub->add_option("--max-iter", max_iter, "iteration budget");
        sub->add_option("--overflow-log-threshold", overflow_log_threshold, "log-modulus where points become directed");
        sub->add_option("--escape-real-threshold", escape_real_threshold, "T: real-part escape threshold");
        sub->add_option("--degeneracy-eps", degeneracy_eps, "phase resolution for directed points");
        sub->add_option("--generic-escape-radius", generic_escape_radius, "R: modulus escape threshold");
        sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    }

    IterationConfig config(int default_max_iter = IterationConfig{}.max_iter) const {
        IterationConfig cfg;
        cfg.max_iter = max_iter.value_or(default_max_iter);
        if (overflow_log_threshold) cfg.overflow_log_threshold = *overflow_log_threshold;
        if (escape_real_threshold) cfg.escape_real_threshold = *escape_real_threshold;
        if (degeneracy_eps) cfg.degeneracy_eps = *degeneracy_eps;
        if (generic_escape_radius) cfg.generic_escape_radius = *generic_escape_radius;
        try {
            cfg.check();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }
};

struct VerifyFlags {
    std::string suite;
    std::uint64_t seed = 1;
    std::optional<std::size_t> samples;
    std::optional<std::string> map;
    std::optional<std::string> map2;
    std::optional<std::string> window;
    std::optional<std::string> res;
    std::optional<int> k_max;
    std::optional<int> s;
    std::optional<int> i;
    std::optional<int> j;
    std::optional<std::string> a;
    std::optional<std::string> b;
    bool literal_strips = false;
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"halfplane-bound", "strip-containment", "disjointness",
                                                   "period-shift",    "composite-laws",    "image-superset",
                                                   "conjugacy",       "all"};
    return names;
}

inline bool is_family_g(const MapExpr& m) { return m.as<FamilyG>() != nullptr; }

inline std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyFlags& v,
                                                 const IterationFlags& it, std::ostream& err) {
    const unsigned workers = it.workers;
    auto map_or = [&](const char* fallback) { return parse_map(v.map.value_or(fallback)); };
    auto window_or = [&](Window fallback) { return v.window ? parse_window(*v.window) : fallback; };
    auto samples_in = [&](Window w, std::size_t fallback) {
        return make_samples(v.seed, v.samples.value_or(fallback), w);
    };

    if (suite == "halfplane-bound") {
        const MapExpr m = map_or("F(-1+0i, 1+0i)");
        const Window w = window_or(is_family_g(m) ? Window{-100, 0, -100, 100} : Window{0, 100, -100, 100});
        return {verify_halfplane_bound(m, samples_in(w, 10000), v.k_max.value_or(200), it.config(), workers)};
    }
    if (suite == "strip-containment") {
        const MapExpr m = map_or("F(-1+0i, 1+0i)");
        const Window w = window_or(is_family_g(m) ? Window{-5, 30, -20, 20} : Window{-30, 5, -20, 20});
        const auto [nx, ny] = parse_res(v.res.value_or("500,500"));
        const EscapeField field = classify_grid(m, w, nx, ny, it.config(500), workers);
        return {verify_strip_containment(field, m, v.literal_strips ? StripForm::Literal : StripForm::Offset)};
    }
    if (suite == "disjointness") {
        const MapExpr mf = map_or("F(-1+0i, 1+0i)");
        const MapExpr mg = parse_map(v.map2.value_or("G(-1+0i, -1+0i)"));
        const Window w = window_or({-30, 30, -30, 30});
        const auto [nx, ny] = parse_res(v.res.value_or("500,500"));
        const IterationConfig cfg = it.config(500);
        auto report = verify_disjointness(classify_grid(mf, w, nx, ny, cfg, workers),
                                          classify_grid(mg, w, nx, ny, cfg, workers));
        report.subject = to_string(mf) + " vs " + to_string(mg);
        return {report};
    }
    if (suite == "period-shift") {
        const MapExpr m = map_or("exp(1+0i)");
        return {verify_period_shift(m, v.s.value_or(2), samples_in(window_or({-3, 3, -3, 3}), 2000), it.config(),
                                    EngineClassifier{}, workers)};
    }
    if (suite == "composite-laws") {
        const MapExpr m = map_or("exp(1+0i)");
        return {verify_composite_laws(m, v.i.value_or(2), v.j.value_or(1),
                                      samples_in(window_or({-2, 2, -2, 2}), 2000), it.config(), EngineClassifier{},
                                      workers)};
    }
    if (suite == "image-superset") {
        const MapExpr m = map_or("F(-1+0i, 1+0i)");
        return {verify_image_superset(m, v.j.value_or(2), samples_in(window_or({-10, 10, -10, 10}), 2000),
                                      it.config(), EngineClassifier{}, workers)};
    }
    if (suite == "conjugacy") {
        const MapExpr m = map_or("F(-1+0i, 1+0i)");
        const complex a = parse_complex(v.a.value_or("2"));
        const complex b = parse_complex(v.b.value_or("1"));
        return {verify_conjugacy(m, a, b, samples_in(window_or({-10, 2, -8, 8}), 2000), it.config(),
                                 EngineClassifier{}, workers)};
    }
    if (suite == "all") {
        if (v.map || v.map2 || v.window || v.res || v.samples)
            err << "verify all: suite-specific flags are ignored; each suite uses its defaults\n";
        VerifyFlags defaults;
        defaults.seed = v.seed;
        std::vector<VerificationReport> all;
        for (const std::string& name : suite_names()) {
            if (name == "all") continue;
            for (auto& r : run_suite(name, defaults, it, err)) all.push_back(std::move(r));
            if (name == "halfplane-bound" || name == "strip-containment") {
                VerifyFlags g = defaults;
                g.map = "G(-1+0i, -1+0i)";
                for (auto& r : run_suite(name, g, it, err)) all.push_back(std::move(r));
            }
        }
        return all;
    }
    throw UsageError("unknown suite '" + suite + "'");
}

}  // namespace detail

/// Runs the CLI on `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Escaping-set explorer for exponential families"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::string config_path;

    // orbit
    auto* orbit = app.add_subcommand("orbit", "trace one orbit, CSV on stdout");
    std::string orbit_map, orbit_z0;
    detail::IterationFlags orbit_it;
    orbit->add_option("--map", orbit_map, "map expression")->required();
    orbit->add_option("--z0", orbit_z0, "seed, complex literal")->required();
    orbit_it.attach(orbit);

    // render
    auto* render = app.add_subcommand("render", "classify a grid and write a PPM image");
    std::string render_map, render_window = "-30,5,-20,20", render_res = "500,500", render_out, render_csv;
    bool overlay = false;
    detail::IterationFlags render_it;
    render->add_option("--map", render_map, "map expression")->required();
    render->add_option("--window", render_window, "x_min,x_max,y_min,y_max");
    render->add_option("--res", render_res, "NX,NY");
    render->add_option("--out", render_out, "output PPM path")->required();
    render->add_flag("--overlay-strips", overlay, "draw strip boundaries in white");
    render->add_option("--csv", render_csv, "also write the field as CSV");
    render_it.attach(render);

    // strips
    auto* strips = app.add_subcommand("strips", "strip index of a point");
    std::string strips_family, strips_param, strips_z;
    bool strips_literal = false;
    strips->add_option("--family", strips_family, "F or G")->required()->check(CLI::IsMember({"F", "G"}));
    strips->add_option("--param", strips_param, "lambda (F) or mu (G)")->required();
    strips->add_option("--z", strips_z, "point, complex literal")->required();
    strips->add_flag("--literal", strips_literal, "ignore the imaginary offset of the parameter");

    // verify
    auto* verify = app.add_subcommand("verify", "run verification suites, JSON on stdout");
    detail::VerifyFlags vf;
    detail::IterationFlags verify_it;
    verify->add_option("--suite", vf.suite, "suite name")->required()->check(CLI::IsMember(detail::suite_names()));
    verify->add_option("--seed", vf.seed, "sample seed");
    verify->add_option("--samples", vf.samples, "number of samples");
    verify->add_option("--map", vf.map, "map under test");
    verify->add_option("--map2", vf.map2, "second map (disjointness)");
    verify->add_option("--window", vf.window, "x_min,x_max,y_min,y_max");
    verify->add_option("--res", vf.res, "NX,NY for field suites");
    verify->add_option("--k-max", vf.k_max, "iterates checked (halfplane-bound)");
    verify->add_option("--s", vf.s, "iterate count in g = f^s + c (period-shift)");
    verify->add_option("--i", vf.i, "outer iterate count (composite-laws)");
    verify->add_option("--j", vf.j, "g = f^j (composite-laws, image-superset)");
    verify->add_option("--a", vf.a, "conjugacy scale");
    verify->add_option("--b", vf.b, "conjugacy offset");
    verify->add_flag("--literal-strips", vf.literal_strips, "strips without imaginary offset");
    verify_it.attach(verify);

    // parse
    auto* parse = app.add_subcommand("parse", "print the canonical form of a map");
    std::string parse_map_text;
    parse->add_option("--map", parse_map_text, "map expression")->required();

    for (auto* sub : {orbit, render, strips, verify, parse})
        sub->add_option("--config", config_path, "key = value file; command-line flags win");

    try {
        // Splice config values in right after the subcommand so that later
        // command-line flags override them.
        for (std::size_t k = 0; k < args.size(); ++k) {
            std::string path;
            if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
            else if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
            if (path.empty()) continue;
            auto sub_pos = std::find_if(args.begin(), args.end(), [](const std::string& a) {
                return a == "orbit" || a == "render" || a == "strips" || a == "verify" || a == "parse";
            });
            if (sub_pos == args.end()) break;
            const auto tokens = detail::config_tokens(path, {"overlay-strips", "literal", "literal-strips"});
            args.insert(sub_pos + 1, tokens.begin(), tokens.end());
            break;
        }

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help();
            return kOk;
        } catch (const CLI::ParseError& e) {
            err << "usage error: " << e.what() << '\n';
            if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
                err << sub->help();
            return kUsage;
        }

        if (orbit->parsed()) {
            const MapExpr m = parse_map(orbit_map);
            IterationConfig cfg = orbit_it.config();
            cfg.record_orbit = true;
            const OrbitRecord rec = run_orbit(m, parse_complex(orbit_z0), cfg);
            write_orbit_csv(rec, out);
            err << describe(rec.classification) << " after " << rec.steps_taken << " steps\n";
            if (const auto* u = std::get_if<Undetermined>(&rec.classification);
                u && u->reason == UndeterminedReason::NotANumber)
                return kNumeric;
            return kOk;
        }
        if (render->parsed()) {
            const MapExpr m = parse_map(render_map);
            const Window w = detail::parse_window(render_window);
            const auto [nx, ny] = detail::parse_res(render_res);
            const EscapeField field = classify_grid(m, w, nx, ny, render_it.config(), render_it.workers);
            std::ofstream ppm(render_out, std::ios::binary);
            if (!ppm) throw std::runtime_error("cannot open '" + render_out + "' for writing");
            if (overlay) {
                const auto params = escset::detail::family_params(m);
                render_ppm(overlay_strips(field, params.family, params.exponent_shift), ppm);
            } else {
                render_ppm(field, ppm);
            }
            if (!render_csv.empty()) {
                std::ofstream csv(render_csv);
                if (!csv) throw std::runtime_error("cannot open '" + render_csv + "' for writing");
                export_field_csv(field, csv);
            }
            std::size_t counts[4] = {0, 0, 0, 0};
            for (const auto& c : field.cells) ++counts[c.classification.index()];
            err << "escaping=" << counts[0] << " proven=" << counts[1] << " bounded=" << counts[2]
                << " undetermined=" << counts[3] << '\n';
            return kOk;
        }
        if (strips->parsed()) {
            const Family family = strips_family == "F" ? Family::F : Family::Fprime;
            const auto id = strip_of(parse_complex(strips_z), family, parse_complex(strips_param),
                                     strips_literal ? StripForm::Literal : StripForm::Offset);
            if (id)
                out << "k=" << id->k << '\n';
            else
                out << "none\n";
            return kOk;
        }
        if (verify->parsed()) {
            const auto reports = detail::run_suite(vf.suite, vf, verify_it, err);
            bool ok = true;
            for (const auto& r : reports) {
                out << to_json_line(r) << '\n';
                err << r.suite_name << " [" << r.subject << "]: " << r.verdict() << " (" << r.violations.size()
                    << " violations, " << r.skipped_undetermined << " skipped of " << r.total << ")\n";
                ok = ok && r.passed();
            }
            return ok ? kOk : kViolations;
        }
        if (parse->parsed()) {
            out << to_string(parse_map(parse_map_text)) << '\n';
            return kOk;
        }
    } catch (const ParseError& e) {
        err << e.what() << '\n';
        return kUsage;
    } catch (const ValidationError& e) {
        err << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace escset::cli
