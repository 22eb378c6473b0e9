#include <doctest.h>

#include <cmath>

#include "caputo/presets.hpp"
#include "caputo/skew_product.hpp"

using caputo::DefectReport;
using caputo::EngineOptions;
using caputo::FractionalOrder;
using caputo::GridFunction;
using caputo::MetricParams;
using caputo::SemigroupEngine;
using caputo::SkewProductEngine;
using caputo::SkewState;
using caputo::TimedField;
using caputo::UniformGrid;
using caputo::Vec;
using caputo::VectorField;

namespace {

VectorField forced_field() { return caputo::make_field("linear_forced", {}); }

GridFunction const_history(const UniformGrid& g, double v) {
    return GridFunction(g, std::vector<Vec>(g.nodes(), Vec{v}));
}

double sup_gap(const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.grid().nodes(); ++j)
        s = std::max(s, caputo::dist2(a.at_node(j), b.at_node(j)));
    return s;
}

}  // namespace

TEST_CASE("timed fields carry and apply their accumulated offset") {
    const TimedField g(forced_field());
    CHECK(g.offset() == 0.0);
    CHECK(g.base().name() == "linear_forced");

    const TimedField g2(forced_field(), 1.5);
    CHECK(g2.offset() == 1.5);
    // -x + sin(offset + t) at x = 0, t = 0 reads sin(1.5).
    CHECK(g2(0.0, Vec{0.0})[0] == doctest::Approx(std::sin(1.5)).epsilon(1e-15));
    CHECK(g2(0.25, Vec{0.0})[0] == doctest::Approx(std::sin(1.75)).epsilon(1e-15));
    CHECK(g2(0.0, Vec{2.0})[0] ==
          doctest::Approx(-2.0 + std::sin(1.5)).epsilon(1e-15));

    CHECK_THROWS_AS(TimedField(forced_field(), -0.5), std::domain_error);
    CHECK_THROWS_AS(TimedField(forced_field(),
                               std::numeric_limits<double>::infinity()),
                    std::domain_error);

    const VectorField as_vf = g2.as_vector_field();
    CHECK(as_vf.time_dependent());
    CHECK(as_vf.dim() == 1);
    CHECK(as_vf.lipschitz() == 1.0);
    CHECK(as_vf(0.5, Vec{0.25}) == g2(0.5, Vec{0.25}));
}

TEST_CASE("shifting a field adds offsets") {
    const TimedField g(forced_field(), 0.75);
    const TimedField s1 = caputo::shift_field(g, 0.5);
    CHECK(s1.offset() == 1.25);
    const TimedField s2 = caputo::shift_field(s1, 0.25);
    CHECK(s2.offset() == 1.5);
    CHECK(s2(0.1, Vec{0.0})[0] == doctest::Approx(std::sin(1.6)).epsilon(1e-15));
    CHECK_THROWS_AS(caputo::shift_field(g, -0.1), std::domain_error);
    CHECK_THROWS_AS(caputo::shift_field(g, std::nan("")), std::domain_error);
}

TEST_CASE("engine validation") {
    CHECK_THROWS_AS(SkewProductEngine(FractionalOrder(0.5), 0.0), std::domain_error);
    CHECK_THROWS_AS(SkewProductEngine(FractionalOrder(0.5), -1.0), std::domain_error);
    const SkewProductEngine eng(FractionalOrder(0.5), 0.125);
    CHECK(eng.h() == 0.125);
    CHECK(eng.order().value() == 0.5);
}

TEST_CASE("Pi pairs the evolved history with the shifted field") {
    const double h = 1.0 / 32;
    const SkewProductEngine eng(FractionalOrder(0.5), h);
    const UniformGrid grid(h, 64);
    const SkewState s{const_history(grid, 1.0), TimedField(forced_field())};
    const SkewState out = caputo::apply_Pi(eng, 0.5, s);
    CHECK(out.g.offset() == 0.5);
    CHECK(out.f.horizon() == doctest::Approx(1.5));
    // The history component is exactly apply_T_skew (same deterministic path).
    const GridFunction direct = caputo::apply_T_skew(eng, 0.5, s);
    CHECK(sup_gap(out.f, direct) == 0.0);
}

TEST_CASE("autonomous fields reduce the skew product to the semigroup") {
    // For a field that ignores t, apply_T_skew must reproduce apply_T exactly
    // (identical arithmetic path, not merely close).
    const double h = 1.0 / 32;
    const VectorField logistic = caputo::make_field("logistic", {});
    const SkewProductEngine skew(FractionalOrder(0.5), h);
    const SemigroupEngine semi(FractionalOrder(0.5), logistic, h);
    const UniformGrid grid(h, 64);
    const GridFunction f = const_history(grid, 0.25);
    const GridFunction via_skew =
        caputo::apply_T_skew(skew, 0.5, SkewState{f, TimedField(logistic)});
    const GridFunction via_semi = caputo::apply_T(semi, 0.5, f);
    CHECK(sup_gap(via_skew, via_semi) == 0.0);
    // And the cocycle defect equals the semigroup defect for that field.
    const DefectReport dc =
        caputo::cocycle_defect(skew, 0.5, 0.5, SkewState{f, TimedField(logistic)});
    const DefectReport ds = caputo::semigroup_defect(semi, 0.5, 0.5, f);
    CHECK(dc.defect == ds.defect);
}

TEST_CASE("the time offset genuinely changes the evolution") {
    const double h = 1.0 / 32;
    const SkewProductEngine eng(FractionalOrder(0.5), h);
    const UniformGrid grid(h, 64);
    const GridFunction f = const_history(grid, 1.0);
    const GridFunction a =
        caputo::apply_T_skew(eng, 0.5, SkewState{f, TimedField(forced_field())});
    const GridFunction b = caputo::apply_T_skew(
        eng, 0.5, SkewState{f, TimedField(forced_field(), 2.0)});
    CHECK(sup_gap(a, b) > 1e-3);  // sin forcing sampled on disjoint phases
}

TEST_CASE("nonautonomous restart identity holds with offset bookkeeping") {
    // Continue x on [0,2] under g(t,.) versus: evolve to tau = 0.5, then solve
    // the remaining 1.5 with the shifted input AND the field offset by tau.
    // With startup corrections off this is exact to iteration accuracy.
    const double h = 1.0 / 64;
    EngineOptions plain;
    plain.solver.corrections = false;
    const SkewProductEngine eng(FractionalOrder(0.5), h, MetricParams(), plain);
    const UniformGrid full(h, 128);
    const GridFunction f = const_history(full, 1.0);
    const TimedField g(forced_field());

    const caputo::Trajectory whole =
        caputo::solve_pece(FractionalOrder(0.5), g.as_vector_field(), f, full,
                           plain.solver);
    const SkewState moved = caputo::apply_Pi(eng, 0.5, SkewState{f, g});
    const UniformGrid rest(h, 128 - 32);
    const caputo::Trajectory tail =
        caputo::solve_pece(FractionalOrder(0.5), moved.g.as_vector_field(), moved.f,
                           rest, plain.solver);
    double worst = 0.0;
    for (std::size_t j = 0; j <= rest.panels(); ++j)
        worst = std::max(worst, caputo::dist2(whole.at(32 + j), tail.at(j)));
    CHECK(worst < 1e-12);
}

TEST_CASE("cocycle defect refines and reports a zero field discrepancy") {
    double prev = 0.0;
    for (std::size_t den : {16, 32, 64}) {
        const double h = 1.0 / static_cast<double>(den);
        const SkewProductEngine eng(FractionalOrder(0.5), h);
        const UniformGrid grid(h, 4 * den);
        const SkewState s{const_history(grid, 1.0), TimedField(forced_field())};
        const DefectReport r = caputo::cocycle_defect(eng, 0.5, 0.5, s);
        CHECK(r.identity == "cocycle_law");
        CHECK(r.details.at("sigma") == 0.5);
        CHECK(r.details.at("tau") == 0.5);
        // Both composition orders shift the field by sigma+tau in total.
        CHECK(r.details.at("field_probe_distance") == 0.0);
        if (prev > 0.0) {
            CHECK(r.defect < prev);
            CHECK(std::log2(prev / r.defect) > 1.0);
        }
        prev = r.defect;
    }
    CHECK(prev < 2e-4);  // h = 1/64 level (measured 1.01e-4)
}

TEST_CASE("cocycle bookkeeping rejects exhausted horizons") {
    const double h = 0.25;
    const SkewProductEngine eng(FractionalOrder(0.5), h);
    const UniformGrid grid(h, 8);  // horizon 2
    const SkewState s{const_history(grid, 1.0), TimedField(forced_field())};
    CHECK_THROWS_AS(caputo::cocycle_defect(eng, 1.0, 1.0, s), std::invalid_argument);
    CHECK_THROWS_AS(caputo::cocycle_defect(eng, 0.75, 0.75, s),
                    std::invalid_argument);  // < 1 unit window left
    CHECK_NOTHROW(caputo::cocycle_defect(eng, 0.5, 0.5, s));
}
