#pragma once

#include <cmath>
#include <complex>

#include "floquet/transfer.hpp"

namespace floquet {

enum class DdotRoute { QuadratureFormula, NumericalDifference };

struct DiscriminantSample {
    Complex lambda{};
    Complex D{};
    Complex Ddot{};
    Complex Ddotdot{};
    DdotRoute Ddot_route = DdotRoute::QuadratureFormula;
    double residual_cross_check = 0.0;  // |Ddot_quad - Ddot_numdiff| / (1 + |Ddot|)
    bool cross_check_flag = false;      // residual above the warning threshold
};

inline Complex eval_D(const TransferResult& tr) { return tr.L.trace(); }

inline Complex eval_D(const CoefficientSet& cs, Complex lambda, const TransferOptions& opts = {}) {
    return eval_D(transfer(cs, lambda, opts));
}

/// Derivative of the Floquet discriminant assembled from one transfer pass:
/// Ddot = -psi(a) Qpp + (phi(a) - (p psi')(a)) Qps + (p phi')(a) Qss.
inline Complex eval_Ddot_quadrature(const TransferResult& tr) {
    return -tr.psi_a() * tr.Q_phiphi + (tr.phi_a() - tr.ppsi_prime_a()) * tr.Q_phipsi +
           tr.pphi_prime_a() * tr.Q_psipsi;
}

inline Complex eval_Ddot_quadrature(const CoefficientSet& cs, Complex lambda,
                                    const TransferOptions& opts = {}) {
    return eval_Ddot_quadrature(transfer(cs, lambda, opts));
}

/// Cross-check route: central difference of D with h = 1e-5 (1 + |lambda|).
inline Complex eval_Ddot_numdiff(const CoefficientSet& cs, Complex lambda,
                                 const TransferOptions& opts = {}) {
    const double h = 1e-5 * (1.0 + std::abs(lambda));
    return (eval_D(cs, lambda + h, opts) - eval_D(cs, lambda - h, opts)) / (2.0 * h);
}

/// Lambda-derivatives of all four monodromy entries from one transfer pass.
/// The trace of this matrix is eval_Ddot_quadrature.
inline Mat2 entry_derivatives(const TransferResult& tr) {
    const Complex phi = tr.phi_a(), psi = tr.psi_a();
    const Complex pphi = tr.pphi_prime_a(), ppsi = tr.ppsi_prime_a();
    Mat2 d;
    d.a11 = phi * tr.Q_phipsi - psi * tr.Q_phiphi;
    d.a21 = pphi * tr.Q_phipsi - ppsi * tr.Q_phiphi;
    d.a12 = phi * tr.Q_psipsi - psi * tr.Q_phipsi;
    d.a22 = pphi * tr.Q_psipsi - ppsi * tr.Q_phipsi;
    return d;
}

inline Mat2 entry_derivatives(const CoefficientSet& cs, Complex lambda, const TransferOptions& opts = {}) {
    return entry_derivatives(transfer(cs, lambda, opts));
}

/// Second derivative by Richardson-extrapolated central differences of the
/// quadrature-exact Ddot; two refinement levels with h = 1e-4 (1 + |lambda|).
inline Complex eval_Ddotdot(const CoefficientSet& cs, Complex lambda, const TransferOptions& opts = {}) {
    const double h = 1e-4 * (1.0 + std::abs(lambda));
    auto central = [&](double hh) {
        return (eval_Ddot_quadrature(cs, lambda + hh, opts) - eval_Ddot_quadrature(cs, lambda - hh, opts)) /
               (2.0 * hh);
    };
    const Complex a0 = central(h);
    const Complex a1 = central(0.5 * h);
    const Complex a2 = central(0.25 * h);
    const Complex r1 = (4.0 * a1 - a0) / 3.0;
    const Complex r2 = (4.0 * a2 - a1) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

/// Residual threshold above which a sample is flagged for inspection.
inline constexpr double kCrossCheckWarn = 1e-5;

inline DiscriminantSample sample_discriminant(const CoefficientSet& cs, Complex lambda,
                                              const TransferOptions& opts = {},
                                              bool with_second = false) {
    const TransferResult tr = transfer(cs, lambda, opts);
    DiscriminantSample s;
    s.lambda = lambda;
    s.D = eval_D(tr);
    s.Ddot = eval_Ddot_quadrature(tr);
    s.Ddot_route = DdotRoute::QuadratureFormula;
    const Complex fd = eval_Ddot_numdiff(cs, lambda, opts);
    s.residual_cross_check = std::abs(s.Ddot - fd) / (1.0 + std::abs(s.Ddot));
    s.cross_check_flag = s.residual_cross_check > kCrossCheckWarn;
    if (with_second) s.Ddotdot = eval_Ddotdot(cs, lambda, opts);
    return s;
}

}  // namespace floquet
