#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

namespace floquet {

/// Constant coefficient value on a segment.
struct ConstantForm {
    double value = 0.0;
};

/// Polynomial in the local coordinate (x - origin); origin is the segment's
/// left breakpoint when loaded from JSON.
struct PolynomialForm {
    std::vector<double> coeffs;  // coeffs[k] multiplies (x - origin)^k
    double origin = 0.0;
};

/// rho(x) * |x - anchor|^tau with rho a polynomial in (x - anchor) and
/// tau > -1 so the form stays integrable across the anchor.
struct PowerForm {
    std::vector<double> rho;  // rho[k] multiplies (x - anchor)^k
    double tau = 0.0;
    double anchor = 0.0;
};

using SegmentForm = std::variant<ConstantForm, PolynomialForm, PowerForm>;

namespace detail {

inline double poly_eval(const std::vector<double>& c, double u) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * u + c[i];
    return r;
}

inline std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
    return d;
}

/// integral of u^j * |u|^tau over [a, b], the interval not straddling 0.
inline double power_monomial_integral(int j, double tau, double a, double b) {
    const double e = static_cast<double>(j) + tau + 1.0;
    if (a >= 0.0) return (std::pow(b, e) - std::pow(a, e)) / e;
    // negative side: u^j |u|^tau = (-1)^j |u|^(j+tau)
    const double s = (j % 2 == 0) ? 1.0 : -1.0;
    return s * (std::pow(-a, e) - std::pow(-b, e)) / e;
}

}  // namespace detail

inline double form_value(const SegmentForm& f, double x) {
    if (const auto* c = std::get_if<ConstantForm>(&f)) return c->value;
    if (const auto* p = std::get_if<PolynomialForm>(&f)) return detail::poly_eval(p->coeffs, x - p->origin);
    const auto& pw = std::get<PowerForm>(f);
    const double u = x - pw.anchor;
    if (u == 0.0) return pw.tau > 0.0 ? 0.0 : (pw.tau == 0.0 ? detail::poly_eval(pw.rho, 0.0) : 0.0);
    return detail::poly_eval(pw.rho, u) * std::pow(std::abs(u), pw.tau);
}

inline bool form_is_constant(const SegmentForm& f) {
    if (std::holds_alternative<ConstantForm>(f)) return true;
    if (const auto* p = std::get_if<PolynomialForm>(&f)) {
        for (std::size_t k = 1; k < p->coeffs.size(); ++k)
            if (p->coeffs[k] != 0.0) return false;
        return true;
    }
    return false;
}

inline double form_constant_value(const SegmentForm& f) {
    if (const auto* c = std::get_if<ConstantForm>(&f)) return c->value;
    const auto& p = std::get<PolynomialForm>(f);
    return p.coeffs.empty() ? 0.0 : p.coeffs[0];
}

namespace detail {

/// Polynomial-times-linear in the same local basis: q(u) = p(u) * (u + d).
inline std::vector<double> poly_times_linear(const std::vector<double>& p, double d) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        q[k] += p[k] * d;
        q[k + 1] += p[k];
    }
    return q;
}

inline double poly_integral(const std::vector<double>& c, double a, double b) {
    double r = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
        r += c[k] * (std::pow(b, static_cast<double>(k) + 1) - std::pow(a, static_cast<double>(k) + 1)) /
             (static_cast<double>(k) + 1);
    return r;
}

inline double power_poly_integral(const std::vector<double>& rho, double tau, double a, double b) {
    double r = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j)
        r += rho[j] * power_monomial_integral(static_cast<int>(j), tau, a, b);
    return r;
}

}  // namespace detail

/// Exact definite integral of the form over [x0, x1]. Intervals straddling a
/// power anchor are split there; tau > -1 keeps both halves finite.
inline double form_integral(const SegmentForm& f, double x0, double x1) {
    if (x1 < x0) return -form_integral(f, x1, x0);
    if (const auto* c = std::get_if<ConstantForm>(&f)) return c->value * (x1 - x0);
    if (const auto* p = std::get_if<PolynomialForm>(&f))
        return detail::poly_integral(p->coeffs, x0 - p->origin, x1 - p->origin);
    const auto& pw = std::get<PowerForm>(f);
    const double a = x0 - pw.anchor, b = x1 - pw.anchor;
    if (a < 0.0 && b > 0.0)
        return detail::power_poly_integral(pw.rho, pw.tau, a, 0.0) +
               detail::power_poly_integral(pw.rho, pw.tau, 0.0, b);
    return detail::power_poly_integral(pw.rho, pw.tau, a, b);
}

/// Exact first moment about c: integral of f(x) * (x - c) over [x0, x1].
inline double form_moment1(const SegmentForm& f, double x0, double x1, double c) {
    if (x1 < x0) return -form_moment1(f, x1, x0, c);
    if (const auto* cf = std::get_if<ConstantForm>(&f)) {
        const double b = x1 - c, a = x0 - c;
        return cf->value * 0.5 * (b * b - a * a);
    }
    if (const auto* p = std::get_if<PolynomialForm>(&f)) {
        const auto q = detail::poly_times_linear(p->coeffs, p->origin - c);
        return detail::poly_integral(q, x0 - p->origin, x1 - p->origin);
    }
    const auto& pw = std::get<PowerForm>(f);
    const auto q = detail::poly_times_linear(pw.rho, pw.anchor - c);
    const double a = x0 - pw.anchor, b = x1 - pw.anchor;
    if (a < 0.0 && b > 0.0)
        return detail::power_poly_integral(q, pw.tau, a, 0.0) +
               detail::power_poly_integral(q, pw.tau, 0.0, b);
    return detail::power_poly_integral(q, pw.tau, a, b);
}

namespace detail {

/// Chebyshev sample points of [lo, hi], endpoints nudged inward so power
/// anchors sitting on a breakpoint are never evaluated exactly.
inline std::vector<double> sample_points(double lo, double hi, int n = 257) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n));
    const double eps = 1e-12 * (hi - lo);
    for (int k = 0; k < n; ++k) {
        const double ck = std::cos(M_PI * (static_cast<double>(k) + 0.5) / n);
        double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * ck;
        x = std::clamp(x, lo + eps, hi - eps);
        xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

}  // namespace detail

/// Minimum of the form over the interval interior. Sampled on a Chebyshev
/// grid; polynomial forms additionally refine around derivative sign changes,
/// so their interior extrema are located to full precision.
inline double form_min_on(const SegmentForm& f, double lo, double hi) {
    const auto xs = detail::sample_points(lo, hi);
    double m = form_value(f, xs.front());
    for (double x : xs) m = std::min(m, form_value(f, x));
    if (const auto* p = std::get_if<PolynomialForm>(&f)) {
        const auto d = detail::poly_derivative(p->coeffs);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            double a = xs[i], b = xs[i + 1];
            double fa = detail::poly_eval(d, a - p->origin), fb = detail::poly_eval(d, b - p->origin);
            if (fa == 0.0 || fa * fb < 0.0) {
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = detail::poly_eval(d, mid - p->origin);
                    if (fa * fm <= 0.0) { b = mid; fb = fm; }
                    else { a = mid; fa = fm; }
                }
                m = std::min(m, form_value(f, 0.5 * (a + b)));
            }
        }
    }
    return m;
}

inline double form_max_abs_on(const SegmentForm& f, double lo, double hi) {
    double m = 0.0;
    for (double x : detail::sample_points(lo, hi)) m = std::max(m, std::abs(form_value(f, x)));
    return m;
}

/// Sign of the form on the open interval: +1, -1, or 0 when the samples are
/// mixed or all negligible. Sampling-based; segments are expected to be cut
/// at genuine sign changes.
inline int form_sign_on(const SegmentForm& f, double lo, double hi) {
    const auto xs = detail::sample_points(lo, hi);
    double vmax = 0.0;
    for (double x : xs) vmax = std::max(vmax, std::abs(form_value(f, x)));
    if (vmax == 0.0) return 0;
    const double tol = 1e-13 * vmax;
    bool pos = false, neg = false;
    for (double x : xs) {
        const double v = form_value(f, x);
        if (v > tol) pos = true;
        if (v < -tol) neg = true;
    }
    if (pos && neg) return 0;
    return pos ? 1 : (neg ? -1 : 0);
}

}  // namespace floquet
