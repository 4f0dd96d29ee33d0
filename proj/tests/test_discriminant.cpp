#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "floquet/discriminant.hpp"

using namespace floquet;
using Catch::Approx;

namespace {

CoefficientSet hill_free(double a = M_PI, double q = 0.0) {
    CoefficientSet cs;
    cs.period_a = a;
    cs.segments = {{0.0, a, ConstantForm{1.0}, ConstantForm{1.0}, ConstantForm{q}}};
    return cs;
}

CoefficientSet square_well(double q = 0.0) {
    CoefficientSet cs;
    cs.period_a = 2.0;
    cs.segments = {{0.0, 1.0, ConstantForm{1.0}, ConstantForm{1.0}, ConstantForm{q}},
                   {1.0, 2.0, ConstantForm{-1.0}, ConstantForm{1.0}, ConstantForm{q}}};
    return cs;
}

double hill_D(double lam, double a = M_PI) {
    // 2 cos(a sqrt(lambda)) with the even extension through cosh for lambda < 0
    return lam >= 0.0 ? 2.0 * std::cos(a * std::sqrt(lam)) : 2.0 * std::cosh(a * std::sqrt(-lam));
}

double well_D(double lam) {
    const double r = std::sqrt(std::abs(lam));
    return 2.0 * std::cos(r) * std::cosh(r);
}

}  // namespace

TEST_CASE("discriminant oracles on the bundled sets", "[discriminant][oracle]") {
    for (int k = 0; k <= 100; ++k) {
        const double lam = -1.0 + 51.0 * k / 100.0;
        CHECK(std::abs(eval_D(hill_free(), lam).real() - hill_D(lam)) < 1e-9);
    }
    for (int k = 0; k <= 100; ++k) {
        const double lam = -60.0 + 120.0 * k / 100.0;
        const Complex d = eval_D(square_well(), lam);
        CHECK(std::abs(d.real() - well_D(lam)) < 1e-9);
        CHECK(std::abs(d.imag()) < 1e-10 * (1.0 + std::abs(d)));
    }
}

TEST_CASE("trivial discriminant values", "[discriminant]") {
    CHECK(eval_D(hill_free(), 0.0).real() == Approx(2.0));
    CHECK(eval_D(hill_free(), 1.0).real() == Approx(-2.0));
}

TEST_CASE("Ddot quadrature at the free-cell origin", "[discriminant][oracle]") {
    // limit of d/d lambda [2 cos(pi sqrt(lambda))] at 0 is -pi^2
    CHECK(eval_Ddot_quadrature(hill_free(), 0.0).real() == Approx(-M_PI * M_PI).epsilon(1e-10));
}

TEST_CASE("Ddot conjugation equivariance", "[discriminant][property]") {
    const Complex lam(3.7, 1.9);
    const Complex d1 = eval_Ddot_quadrature(square_well(), lam);
    const Complex d2 = eval_Ddot_quadrature(square_well(), std::conj(lam));
    CHECK(std::abs(d2 - std::conj(d1)) < 1e-11 * (1.0 + std::abs(d1)));
}

TEST_CASE("Ddot matches central differences on random samples", "[discriminant][oracle]") {
    // box chosen so the finite-difference reference itself stays meaningful:
    // deeper on the negative axis |D| ~ cosh(a sqrt|lambda|) amplifies the
    // truncation error of the h = 1e-5 (1+|lambda|) central difference
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> re(-15.0, 45.0), im(-6.0, 6.0);
    for (const auto& cs : {hill_free(), square_well()}) {
        for (int k = 0; k < 200; ++k) {
            const Complex lam(re(rng), im(rng));
            const Complex dq = eval_Ddot_quadrature(cs, lam);
            const Complex fd = eval_Ddot_numdiff(cs, lam);
            CHECK(std::abs(dq - fd) <= 1e-6 * (1.0 + std::abs(dq)));
        }
    }
}

TEST_CASE("entry derivatives", "[discriminant][oracle]") {
    CoefficientSet unit = hill_free(1.0);
    const auto ed = entry_derivatives(unit, 0.0);
    // d/d lambda psi(a) = phi(a) Qss - psi(a) Qps = 1/3 - 1/2 = -1/6
    CHECK(ed.a12.real() == Approx(-1.0 / 6.0).epsilon(1e-12));

    // trace of the entry derivatives is the Ddot formula
    const auto tr = transfer(square_well(), Complex(2.5, 0.5));
    const auto m = entry_derivatives(tr);
    CHECK(std::abs(m.trace() - eval_Ddot_quadrature(tr)) < 1e-13 * (1.0 + std::abs(m.trace())));

    // each entry against central differences of the transfer entries
    const Complex lam(4.2, -1.1);
    const double h = 1e-5 * (1.0 + std::abs(lam));
    const auto tp = transfer(square_well(), lam + h);
    const auto tm = transfer(square_well(), lam - h);
    const auto d = entry_derivatives(square_well(), lam);
    const Mat2 fd{(tp.L.a11 - tm.L.a11) / (2 * h), (tp.L.a12 - tm.L.a12) / (2 * h),
                  (tp.L.a21 - tm.L.a21) / (2 * h), (tp.L.a22 - tm.L.a22) / (2 * h)};
    CHECK((d - fd).norm() <= 1e-6 * (1.0 + d.norm()));
}

TEST_CASE("second derivative oracles", "[discriminant][oracle]") {
    // well: D = 2 - lambda^2/3 + O(lambda^4)  =>  Dddot(0) = -2/3
    CHECK(eval_Ddotdot(square_well(), 0.0).real() == Approx(-2.0 / 3.0).epsilon(1e-6));
    // free cell, a = pi: D = 2 - pi^2 lambda + pi^4 lambda^2 / 12 - ...
    CHECK(eval_Ddotdot(hill_free(), 0.0).real() == Approx(std::pow(M_PI, 4) / 6.0).epsilon(1e-6));
    // conjugation symmetry
    const Complex lam(1.3, 0.7);
    const Complex a = eval_Ddotdot(square_well(), lam);
    const Complex b = eval_Ddotdot(square_well(), std::conj(lam));
    CHECK(std::abs(b - std::conj(a)) < 1e-7 * (1.0 + std::abs(a)));
}

TEST_CASE("reality and non-constancy", "[discriminant][property]") {
    for (const auto& cs : {hill_free(), square_well()}) {
        double dmin = 1e300, dmax = -1e300;
        for (int k = 0; k < 120; ++k) {
            const double lam = -6.0 + 12.0 * k / 119.0;
            const Complex d = eval_D(cs, lam);
            CHECK(std::abs(d.imag()) <= 1e-10 * (1.0 + std::abs(d)));
            dmin = std::min(dmin, std::abs(d));
            dmax = std::max(dmax, std::abs(d));
        }
        CHECK(dmax - dmin > 0.0);
    }
}

TEST_CASE("discriminant sample carries the cross check", "[discriminant]") {
    const auto s = sample_discriminant(square_well(), Complex(5.0, 0.0), {}, true);
    CHECK(s.Ddot_route == DdotRoute::QuadratureFormula);
    CHECK(s.residual_cross_check < 1e-6);
    CHECK_FALSE(s.cross_check_flag);
    CHECK(std::abs(s.D - eval_D(square_well(), 5.0)) < 1e-12);
}
