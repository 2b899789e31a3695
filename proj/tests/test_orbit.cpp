#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "escset/orbit.hpp"
#include "escset/sampling.hpp"

using namespace escset;

namespace {

const double pi = std::numbers::pi;
const MapExpr kF = MapExpr::family_f(-1.0, 1.0);
const MapExpr kG = MapExpr::family_g(-1.0, -1.0);

IterationConfig budget(int max_iter) {
    IterationConfig cfg;
    cfg.max_iter = max_iter;
    return cfg;
}

// Ten inverse-branch pullbacks of w under z -> e^{-z+lambda} + xi, each
// landing in the strip Im z in (pi/2, 3pi/2).
complex pullback_seed(complex lambda, complex xi, complex w, int depth) {
    for (int d = 0; d < depth; ++d) {
        complex z = lambda - std::log(w - xi);
        const double k = std::floor((z.imag() - pi / 2) / (2 * pi));
        z -= complex(0.0, 2 * pi * k);
        w = z;
    }
    return w;
}

complex random_family_param(SplitMix64& rng, double re_lo, double re_hi) {
    return {rng.uniform(re_lo, re_hi), rng.uniform(-5, 5)};
}

}  // namespace

TEST_CASE("classify examples for family F", "[orbit]") {
    CHECK(classify(kF, {3.0, 4.0}) == Classification{NonEscapingProven{AbsorptionRule::RightHalfPlaneF, 0}});
    CHECK(classify(kF, -0.5) == Classification{NonEscapingProven{AbsorptionRule::RightHalfPlaneF, 1}});
    CHECK(classify(kF, {0.0, 2 * pi}) == Classification{NonEscapingProven{AbsorptionRule::RightHalfPlaneF, 0}});
    CHECK(classify(kG, -3.0) == Classification{NonEscapingProven{AbsorptionRule::LeftHalfPlaneG, 0}});
}

TEST_CASE("pulled-back seeds escape within 100 steps", "[orbit]") {
    const complex z0 = pullback_seed(-1.0, 1.0, {-1e6, pi}, 10);
    CHECK(z0.imag() > pi / 2);
    CHECK(z0.imag() < 3 * pi / 2);
    const Classification c = classify(kF, z0);
    INFO(describe(c));
    REQUIRE(is_escaping(c));
    CHECK(step_of(c) <= 100);
}

TEST_CASE("pullback seeds escape for random family F parameters", "[orbit][property]") {
    SplitMix64 rng(77);
    for (int t = 0; t < 50; ++t) {
        const complex lambda = random_family_param(rng, -3.0, -0.1);
        const complex xi = random_family_param(rng, 1.0, 4.0);
        // Land in the escaping direction of the shifted strip.
        const complex w{-1e6, pi + lambda.imag()};
        complex z = w;
        for (int d = 0; d < 10; ++d) {
            z = lambda - std::log(z - xi);
            const double k = std::floor((z.imag() - lambda.imag() - pi / 2) / (2 * pi));
            z -= complex(0.0, 2 * pi * k);
        }
        const Classification c = classify(MapExpr::family_f(lambda, xi), z);
        INFO("lambda=" << format_complex(lambda) << " xi=" << format_complex(xi) << " -> " << describe(c));
        CHECK(is_escaping(c));
    }
}

TEST_CASE("directed collapse is proven non-escaping at the collapsed index", "[orbit]") {
    // -750 maps to Directed{749, 0}, which collapses onto xi at the next step.
    const Classification c = classify(kF, -750.0);
    INFO(describe(c));
    // Re z0 = -750 <= -T but Re z1 = e^749 > Re z0, so no escape at step 0.
    CHECK(c == Classification{NonEscapingProven{AbsorptionRule::UnderflowToFixedNeighborhood, 2}});
}

TEST_CASE("degenerate phase is undetermined", "[orbit]") {
    const Classification c = classify_unchecked(kF, ExtendedPoint::directed(800.0, pi / 2), IterationConfig{});
    CHECK(c == Classification{Undetermined{UndeterminedReason::DegeneratePhase}});
    const Classification n = classify(kF, {NAN, 0.0});
    CHECK(n == Classification{Undetermined{UndeterminedReason::NotANumber}});
}

TEST_CASE("budget exhaustion", "[orbit]") {
    // 0, 1, e, e^e: no escape verdict before the budget runs out.
    const Classification c = classify(MapExpr::scaled_exp(1.0), 0.0, budget(3));
    CHECK(c == Classification{BoundedAtBudget{}});
}

TEST_CASE("run_orbit records every iterate through the terminal one", "[orbit]") {
    IterationConfig cfg = budget(3);
    cfg.record_orbit = true;

    const OrbitRecord a = run_orbit(kF, -1.0, cfg);
    REQUIRE(a.points.size() == 2);
    CHECK(a.points[0].value() == complex(-1.0, 0.0));
    CHECK(a.points[1].value() == complex(2.0, 0.0));
    CHECK(a.classification == Classification{NonEscapingProven{AbsorptionRule::RightHalfPlaneF, 1}});
    CHECK(a.steps_taken == 1);
    // The continuation after the terminal point: e^{-3} + 1.
    CHECK(eval(kF, a.points[1]).re() == Catch::Approx(1.04978706836786394297934241565).epsilon(1e-15));

    const OrbitRecord b = run_orbit(kF, 5.0, cfg);
    REQUIRE(b.points.size() == 1);
    CHECK(b.points[0].value() == complex(5.0, 0.0));
    CHECK(b.classification == Classification{NonEscapingProven{AbsorptionRule::RightHalfPlaneF, 0}});

    cfg.max_iter = 1000;
    const OrbitRecord e = run_orbit(MapExpr::scaled_exp(1.0), 10.0, cfg);
    REQUIRE(is_escaping(e.classification));
    CHECK(step_of(e.classification) <= 3);
    REQUIRE(e.points.size() >= 3);
    CHECK(e.points[1].re() == Catch::Approx(22026.465794806718));
    CHECK(e.points[2].is_directed());
    CHECK(e.points.size() == static_cast<std::size_t>(e.steps_taken) + 1);

    const OrbitRecord silent = run_orbit(kF, -1.0, budget(3));
    CHECK(silent.points.empty());
    CHECK(silent.classification == a.classification);
}

TEST_CASE("orbit CSV format", "[orbit]") {
    IterationConfig cfg = budget(1000);
    cfg.record_orbit = true;
    std::ostringstream out;
    write_orbit_csv(run_orbit(kF, -1.0, cfg), out);
    CHECK(out.str() == "n,kind,a,b\n0,F,-1,0\n1,F,2,0\n# classification=NonEscapingProven,step=1\n");

    std::ostringstream directed;
    write_orbit_csv(run_orbit(MapExpr::scaled_exp(1.0), 10.0, cfg), directed);
    CHECK_THAT(directed.str(), Catch::Matchers::ContainsSubstring("\n2,D,22026.465794806718,0\n"));
    CHECK_THAT(directed.str(), Catch::Matchers::EndsWith("# classification=Escaping,step=2\n"));

    std::ostringstream bounded;
    cfg.max_iter = 3;
    write_orbit_csv(run_orbit(MapExpr::scaled_exp(1.0), 0.0, cfg), bounded);
    CHECK_THAT(bounded.str(), Catch::Matchers::EndsWith("# classification=BoundedAtBudget,step=3\n"));
}

TEST_CASE("classify rejects invalid input", "[orbit]") {
    CHECK_THROWS_AS(classify(MapExpr::family_f(-1.0, 0.0), 1.0), ValidationError);
    IterationConfig cfg;
    cfg.max_iter = 0;
    CHECK_THROWS_AS(classify(kF, 1.0, cfg), std::invalid_argument);
}

TEST_CASE("absorption is sound: the orbit stays within 1 of xi afterwards", "[orbit][property]") {
    SplitMix64 rng(101);
    int absorbed = 0;
    for (int t = 0; t < 40; ++t) {
        const complex lambda = random_family_param(rng, -3.0, -0.05);
        const complex xi = random_family_param(rng, 1.0, 5.0);
        const MapExpr f = MapExpr::family_f(lambda, xi);
        for (int k = 0; k < 50; ++k) {
            const complex z0{rng.uniform(-6, 6), rng.uniform(-10, 10)};
            IterationConfig cfg;
            cfg.record_orbit = true;
            const OrbitRecord rec = run_orbit(f, z0, cfg);
            const auto* p = std::get_if<NonEscapingProven>(&rec.classification);
            if (!p || p->rule != AbsorptionRule::RightHalfPlaneF) continue;
            ++absorbed;
            REQUIRE(rec.points.back().is_finite());
            complex z = rec.points.back().value();
            for (int m = 0; m < 100; ++m) {
                z = std::exp(-z + lambda) + xi;
                REQUIRE(std::abs(z - xi) < 1.0);
            }
        }
    }
    CHECK(absorbed > 500);
}

TEST_CASE("closed right half plane is forward invariant under F", "[orbit][property]") {
    SplitMix64 rng(202);
    for (int t = 0; t < 2000; ++t) {
        const MapExpr f = MapExpr::family_f(random_family_param(rng, -4, -0.01), random_family_param(rng, 1, 4));
        const MapExpr g = MapExpr::family_g(random_family_param(rng, -4, -0.01), random_family_param(rng, -4, -1));
        const complex z{rng.uniform(0, 50), rng.uniform(-50, 50)};
        CHECK(eval(f, z).real_part() > 0.0);
        CHECK(eval(g, -z).real_part() < 0.0);
    }
    CHECK(eval(kF, complex(0.0, 3.0)).real_part() > 0.0);
}

TEST_CASE("classification is exclusive across budgets and monotone for escapes", "[orbit][property]") {
    SplitMix64 rng(303);
    const MapExpr maps[] = {kF, kG, MapExpr::scaled_exp(1.0), MapExpr::compose(kF, MapExpr::iterate(kF, 2))};
    for (const MapExpr& f : maps) {
        for (int k = 0; k < 300; ++k) {
            const complex z0{rng.uniform(-20, 20), rng.uniform(-20, 20)};
            const Classification low = classify(f, z0, budget(20));
            const Classification high = classify(f, z0, budget(500));
            INFO(to_string(f) << " z0=" << format_complex(z0));
            CHECK_FALSE((is_escaping(low) && is_proven_non_escaping(high)));
            CHECK_FALSE((is_proven_non_escaping(low) && is_escaping(high)));
            if (is_determined(low)) CHECK(low == high);
            if (const auto* e = std::get_if<Escaping>(&high)) {
                CHECK(classify(f, z0, budget(e->step + 1)) == high);
            }
        }
    }
}

TEST_CASE("classify is deterministic", "[orbit][property]") {
    SplitMix64 rng(404);
    for (int k = 0; k < 500; ++k) {
        const complex z0{rng.uniform(-30, 5), rng.uniform(-20, 20)};
        const Classification a = classify(kF, z0);
        const Classification b = classify(kF, z0);
        CHECK(a == b);
    }
}

TEST_CASE("a directed phase swamped by accumulated error is undetermined", "[orbit]") {
    // z2 ~ -1.6e14 - 4.9e13i: the phase of z3 carries tens of radians of error.
    const Classification c = classify(kF, {-4.986463428531424, -4.010501880378307});
    CHECK(c == Classification{Undetermined{UndeterminedReason::DegeneratePhase}});
}

TEST_CASE("a resolvable directed phase still collapses", "[orbit]") {
    // cos(arg z3) = 0.8389 to high precision, so the orbit returns onto xi.
    const complex z0{-7.289689818917596, -4.662689778180063};
    CHECK(classify(kF, z0) == Classification{NonEscapingProven{AbsorptionRule::UnderflowToFixedNeighborhood, 4}});
    // The conjugated map sees one large modulus jump followed by the collapse.
    const Classification g = classify(MapExpr::conjugate(2.0, 1.0, kF), 2.0 * z0 + 1.0);
    INFO(describe(g));
    CHECK_FALSE(is_escaping(g));
}

TEST_CASE("generic escape needs two growing pairs unless both points are directed", "[orbit]") {
    IterationConfig cfg;
    cfg.record_orbit = true;
    // 10 -> 22026 -> Directed{22026} -> Directed{inf}: Directed chain.
    CHECK(run_orbit(MapExpr::scaled_exp(1.0), 10.0, cfg).classification == Classification{Escaping{2}});
    // 25 -> e^25 (>= R) -> Directed{e^25}: one growing pair involving a finite
    // point is not enough; the Directed chain after it decides.
    const OrbitRecord r = run_orbit(MapExpr::scaled_exp(1.0), 25.0, cfg);
    CHECK(r.classification == Classification{Escaping{2}});
}

TEST_CASE("a directed chain pinned at infinite log-modulus escapes", "[orbit]") {
    // On the real axis the orbit overflows to Directed{inf, 0}, which maps to itself.
    const MapExpr fg = MapExpr::compose(MapExpr::scaled_exp(1.0), MapExpr::scaled_exp(1.0));
    const Classification c = classify(fg, 2.2517);
    INFO(describe(c));
    CHECK(is_escaping(c));
    const ExtendedPoint inf = ExtendedPoint::directed(HUGE_VAL, 0.0);
    CHECK(is_escaping(classify_unchecked(MapExpr::scaled_exp(1.0), inf, IterationConfig{})));
}
