#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "floquet/coefficients.hpp"
#include "floquet/json_io.hpp"

using namespace floquet;
using Catch::Approx;

namespace {

CoefficientSet hill_free() {
    CoefficientSet cs;
    cs.period_a = M_PI;
    cs.segments = {{0.0, M_PI, ConstantForm{1.0}, ConstantForm{1.0}, ConstantForm{0.0}}};
    return cs;
}

CoefficientSet square_well(double q = 0.0) {
    CoefficientSet cs;
    cs.period_a = 2.0;
    cs.segments = {{0.0, 1.0, ConstantForm{1.0}, ConstantForm{1.0}, ConstantForm{q}},
                   {1.0, 2.0, ConstantForm{-1.0}, ConstantForm{1.0}, ConstantForm{q}}};
    return cs;
}

}  // namespace

TEST_CASE("validate accepts the bundled sets and flags defects", "[coeffs]") {
    CHECK(validate(hill_free()).ok());
    CHECK(validate(square_well()).ok());

    CoefficientSet bad = hill_free();
    bad.segments[0].p_form = ConstantForm{0.0};
    const auto rep = validate(bad);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.issues[0].message.find("p not positive") != std::string::npos);

    CoefficientSet gap = square_well();
    gap.segments[1].x_lo = 1.25;
    CHECK_FALSE(validate(gap).ok());

    CoefficientSet nonint = hill_free();
    nonint.segments[0].w_form = PowerForm{{1.0}, -1.5, 0.5};
    CHECK_FALSE(validate(nonint).ok());
}

TEST_CASE("validate is pure and idempotent", "[coeffs]") {
    const CoefficientSet cs = square_well();
    const auto r1 = validate(cs);
    const auto r2 = validate(cs);
    REQUIRE(r1.issues.size() == r2.issues.size());
    for (std::size_t i = 0; i < r1.issues.size(); ++i) {
        CHECK(r1.issues[i].segment_index == r2.issues[i].segment_index);
        CHECK(r1.issues[i].message == r2.issues[i].message);
    }
}

TEST_CASE("turning points of the square well", "[coeffs]") {
    const auto tps = turning_points(square_well());
    REQUIRE(tps.size() == 2);
    // interior breakpoint at 1 and the wrap-around point 0 == 2
    CHECK(tps[0].location == Approx(1.0));
    CHECK(tps[1].location == Approx(0.0));
    for (const auto& tp : tps) {
        CHECK(tp.is_one_simple);
        CHECK(tp.tau_plus.value() == Approx(0.0));
        CHECK(tp.tau_minus.value() == Approx(0.0));
        CHECK(tp.p_bounded_near);
    }
}

TEST_CASE("definite weight has no turning points", "[coeffs]") {
    CHECK(turning_points(hill_free()).empty());
    const auto inf = infinity_condition(hill_free());
    CHECK(inf.holds);
    CHECK(inf.witnesses.empty());
}

TEST_CASE("power-form turning point exponents", "[coeffs]") {
    // w = -|x-1|^3 on the left of x0=1 (the polynomial (x-1)^3), +|x-1|^{1/2} on the right
    CoefficientSet cs;
    cs.period_a = 2.0;
    cs.segments = {{0.0, 1.0, PolynomialForm{{-1.0, 3.0, -3.0, 1.0}, 0.0},  // (x-1)^3
                    ConstantForm{1.0}, ConstantForm{0.0}},
                   {1.0, 2.0, PowerForm{{1.0}, 0.5, 1.0}, ConstantForm{1.0}, ConstantForm{0.0}}};
    REQUIRE(validate(cs).ok());
    const auto tps = turning_points(cs);
    REQUIRE(tps.size() == 2);
    CHECK(tps[0].location == Approx(1.0));
    CHECK(tps[0].tau_minus.value() == Approx(3.0));
    CHECK(tps[0].tau_plus.value() == Approx(0.5));
    CHECK(tps[0].is_one_simple);
}

TEST_CASE("mixed-sign segment raises UnresolvableSign", "[coeffs]") {
    CoefficientSet cs;
    cs.period_a = 1.0;
    cs.segments = {{0.0, 1.0, PolynomialForm{{-0.5, 1.0}, 0.0},  // x - 1/2 changes sign inside
                    ConstantForm{1.0}, ConstantForm{0.0}}};
    CHECK_THROWS_AS(turning_points(cs), UnresolvableSign);
    CHECK_THROWS_AS(infinity_condition(cs), UnresolvableSign);  // propagates
}

TEST_CASE("infinity condition verdicts", "[coeffs]") {
    CHECK(infinity_condition(square_well()).holds);

    // rho vanishing at the anchor breaks 1-simplicity
    CoefficientSet cs;
    cs.period_a = 2.0;
    cs.segments = {{0.0, 1.0, ConstantForm{-1.0}, ConstantForm{1.0}, ConstantForm{0.0}},
                   {1.0, 2.0, PowerForm{{0.0, 1.0}, -0.5, 1.0}, ConstantForm{1.0}, ConstantForm{0.0}}};
    const auto inf = infinity_condition(cs);
    CHECK_FALSE(inf.holds);
    REQUIRE(inf.witnesses.size() >= 1);
    CHECK(inf.witnesses[0].location == Approx(1.0));

    // unbounded p near the turning point also defeats the condition
    CoefficientSet cs2 = square_well();
    cs2.segments[1].p_form = PowerForm{{1.0}, 0.5, 1.0};
    const auto inf2 = infinity_condition(cs2);
    CHECK_FALSE(inf2.holds);
}

TEST_CASE("turning points commute with cell rotation", "[coeffs][property]") {
    // rotate the square well by its interior breakpoint: segments swap places
    const CoefficientSet cs = square_well();
    CoefficientSet rot;
    rot.period_a = 2.0;
    rot.segments = {{0.0, 1.0, ConstantForm{-1.0}, ConstantForm{1.0}, ConstantForm{0.0}},
                    {1.0, 2.0, ConstantForm{1.0}, ConstantForm{1.0}, ConstantForm{0.0}}};
    auto t1 = turning_points(cs);
    auto t2 = turning_points(rot);
    REQUIRE(t1.size() == t2.size());
    // locations shift by the rotation offset modulo the period
    std::vector<double> shifted;
    for (const auto& tp : t1) shifted.push_back(std::fmod(tp.location + 1.0, 2.0));
    std::sort(shifted.begin(), shifted.end());
    std::vector<double> loc2;
    for (const auto& tp : t2) loc2.push_back(tp.location);
    std::sort(loc2.begin(), loc2.end());
    for (std::size_t i = 0; i < loc2.size(); ++i) CHECK(shifted[i] == Approx(loc2[i]).margin(1e-12));
}

TEST_CASE("infinity condition invariant under segment refinement", "[coeffs][property]") {
    CoefficientSet cs = square_well();
    CoefficientSet fine;
    fine.period_a = 2.0;
    fine.segments = {{0.0, 0.5, ConstantForm{1.0}, ConstantForm{1.0}, ConstantForm{0.0}},
                     {0.5, 1.0, ConstantForm{1.0}, ConstantForm{1.0}, ConstantForm{0.0}},
                     {1.0, 2.0, ConstantForm{-1.0}, ConstantForm{1.0}, ConstantForm{0.0}}};
    CHECK(infinity_condition(cs).holds == infinity_condition(fine).holds);
    CHECK(turning_points(cs).size() == turning_points(fine).size());
}

TEST_CASE("JSON round trip and error pointers", "[coeffs][io]") {
    const char* text = R"({
      "period": 2.0,
      "segments": [
        {"lo": 0.0, "hi": 1.0, "w": {"const": 1.0}, "p": {"const": 1.0}, "q": {"const": 0.0}},
        {"lo": 1.0, "hi": 2.0, "w": {"const": -1.0}, "p": {"const": 1.0}, "q": {"const": 0.0}}
      ]
    })";
    const auto cs = coefficient_set_from_string(text);
    CHECK(cs.period_a == 2.0);
    REQUIRE(cs.segments.size() == 2);
    CHECK(validate(cs).ok());

    CHECK_THROWS_AS(coefficient_set_from_string("{\"period\": 1.0}"), ParseError);
    try {
        coefficient_set_from_string(R"({"period": 1.0, "segments": [{"lo":0,"hi":1,"w":{"bogus":1},"p":{"const":1},"q":{"const":0}}]})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("segments[0].w") != std::string::npos);
    }
}

TEST_CASE("definitized cell flips negative weight segments", "[coeffs]") {
    const auto pos = definitized(square_well());
    for (const auto& s : pos.segments) CHECK(form_constant_value(s.w_form) == Approx(1.0));
    CHECK(q_over_w_lower_bound(square_well(-1.0)) == Approx(-2.0));
    CHECK(q_over_w_lower_bound(square_well()) == Approx(-1.0));
}

TEST_CASE("uncertifiable q/|w| ratios are refused", "[coeffs]") {
    // w vanishing cubically at the breakpoint while q stays negative
    CoefficientSet cubic;
    cubic.period_a = 2.0;
    cubic.segments = {{0.0, 1.0, PolynomialForm{{-1.0, 3.0, -3.0, 1.0}, 0.0},  // (x-1)^3
                       ConstantForm{1.0}, ConstantForm{-1.0}},
                      {1.0, 2.0, PowerForm{{1.0}, 0.5, 1.0}, ConstantForm{1.0}, ConstantForm{-1.0}}};
    CHECK_THROWS_AS(q_over_w_lower_bound(cubic), Error);

    // q with a negative power singularity against a bounded weight
    CoefficientSet qsing;
    qsing.period_a = 1.0;
    qsing.segments = {{0.0, 1.0, ConstantForm{1.0}, ConstantForm{1.0},
                       PowerForm{{-0.5}, -0.4, 1.0}}};
    CHECK_THROWS_AS(q_over_w_lower_bound(qsing), Error);

    // the positive-singular counterpart stays certifiable
    CoefficientSet qpos;
    qpos.period_a = 1.0;
    qpos.segments = {{0.0, 1.0, ConstantForm{1.0}, ConstantForm{1.0},
                      PowerForm{{0.5}, -0.4, 1.0}}};
    CHECK(q_over_w_lower_bound(qpos) <= -1.0);
    CHECK(std::isfinite(q_over_w_lower_bound(qpos)));
}
