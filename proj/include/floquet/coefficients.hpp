#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "floquet/errors.hpp"
#include "floquet/forms.hpp"

namespace floquet {

struct Segment {
    double x_lo = 0.0;
    double x_hi = 0.0;
    SegmentForm w_form;
    SegmentForm p_form;
    SegmentForm q_form;
};

/// The periodic coefficient triple (w, p, q) on one period cell [0, a),
/// stored as contiguous segments. Immutable after construction.
struct CoefficientSet {
    double period_a = 0.0;
    std::vector<Segment> segments;
};

struct ValidationIssue {
    int segment_index = -1;  // -1 for set-level issues
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

/// Checks every CoefficientSet invariant and returns the violations.
/// Violations are data, not errors; a valid set yields an empty report.
inline ValidationReport validate(const CoefficientSet& cs) {
    ValidationReport rep;
    auto add = [&rep](int idx, std::string msg) { rep.issues.push_back({idx, std::move(msg)}); };

    if (!(cs.period_a > 0.0)) add(-1, "period must be positive");
    if (cs.segments.empty()) {
        add(-1, "no segments");
        return rep;
    }
    const double a = cs.period_a;
    const double tol = 1e-12 * std::max(1.0, std::abs(a));
    if (std::abs(cs.segments.front().x_lo) > tol) add(0, "first segment must start at 0");
    if (std::abs(cs.segments.back().x_hi - a) > tol) add(static_cast<int>(cs.segments.size()) - 1,
                                                         "last segment must end at the period");
    for (std::size_t i = 0; i < cs.segments.size(); ++i) {
        const auto& s = cs.segments[i];
        const int idx = static_cast<int>(i);
        if (!(s.x_lo < s.x_hi)) add(idx, "segment breakpoints must strictly increase");
        if (i > 0 && std::abs(cs.segments[i - 1].x_hi - s.x_lo) > tol)
            add(idx, "segments must cover the cell without gaps or overlaps");

        // p > 0 on the segment (sample points plus representable extrema)
        if (form_min_on(s.p_form, s.x_lo, s.x_hi) <= 0.0) add(idx, "p not positive");
        if (const auto* pw = std::get_if<PowerForm>(&s.p_form)) {
            // keep both p and 1/p integrable for power-weighted p
            if (std::abs(pw->tau) >= 1.0) add(idx, "power-weighted p needs |tau| < 1");
        }

        // w != 0 a.e.: reject identically negligible segments
        if (form_max_abs_on(s.w_form, s.x_lo, s.x_hi) == 0.0) add(idx, "w identically zero on segment");

        // integrability of w and q: tau > -1 for power forms
        for (const SegmentForm* f : {&s.w_form, &s.q_form}) {
            if (const auto* pw = std::get_if<PowerForm>(f)) {
                if (!(pw->tau > -1.0)) add(idx, "power form needs tau > -1 for integrability");
            }
        }
    }
    return rep;
}

struct TurningPointReport {
    double location = 0.0;  // in [0, a)
    bool is_one_simple = false;
    std::optional<double> tau_plus;
    std::optional<double> tau_minus;
    bool p_bounded_near = false;
};

namespace detail {

/// Local power behaviour of a form at one side of the point x0:
/// w ~ rho * |x - x0|^tau with rho != 0, or nullopt when no such reading
/// exists (power form with vanishing leading rho, or zero polynomial).
/// For polynomials approached from the left, the Taylor coefficient picks up
/// the (-1)^k from (x - x0)^k = (-1)^k |x - x0|^k.
struct SideBehaviour {
    double tau = 0.0;
    double rho_at = 0.0;
};

inline std::optional<SideBehaviour> side_behaviour(const SegmentForm& f, double x0, bool from_left) {
    if (const auto* c = std::get_if<ConstantForm>(&f)) {
        if (c->value == 0.0) return std::nullopt;
        return SideBehaviour{0.0, c->value};
    }
    if (const auto* p = std::get_if<PolynomialForm>(&f)) {
        // order of the zero at x0, detected through exact derivative values;
        // the k-th Taylor coefficient at x0 is P^(k)(x0)/k!
        std::vector<double> d = p->coeffs;
        double scale = 0.0;
        for (double ck : d) scale = std::max(scale, std::abs(ck));
        if (scale == 0.0) return std::nullopt;
        double fact = 1.0;
        for (int k = 0; k < static_cast<int>(p->coeffs.size()); ++k) {
            if (k > 0) fact *= static_cast<double>(k);
            double v = poly_eval(d, x0 - p->origin) / fact;
            if (std::abs(v) > 1e-12 * scale) {
                if (from_left && (k % 2 == 1)) v = -v;
                return SideBehaviour{static_cast<double>(k), v};
            }
            d = poly_derivative(d);
        }
        return std::nullopt;
    }
    const auto& pw = std::get<PowerForm>(f);
    if (std::abs(x0 - pw.anchor) > 1e-12) {
        const double v = form_value(f, x0);
        if (v == 0.0) return std::nullopt;
        return SideBehaviour{0.0, v};
    }
    if (pw.rho.empty() || pw.rho[0] == 0.0) return std::nullopt;
    return SideBehaviour{pw.tau, pw.rho[0]};
}

/// p and 1/p essentially bounded near x0, decided structurally.
inline bool p_bounded_side(const SegmentForm& p_form, double x0) {
    if (const auto* c = std::get_if<ConstantForm>(&p_form)) return c->value > 0.0;
    if (std::holds_alternative<PolynomialForm>(p_form))
        return std::abs(form_value(p_form, x0)) > 1e-12;
    const auto& pw = std::get<PowerForm>(p_form);
    if (std::abs(x0 - pw.anchor) > 1e-12) return std::abs(form_value(p_form, x0)) > 1e-12;
    return pw.tau == 0.0;  // bounded iff tau >= 0, 1/p bounded iff tau <= 0
}

inline int segment_w_sign(const CoefficientSet& cs, std::size_t i) {
    const auto& s = cs.segments[i];
    const int sgn = form_sign_on(s.w_form, s.x_lo, s.x_hi);
    if (sgn == 0)
        throw UnresolvableSign("w changes sign inside segment " + std::to_string(i) +
                                   "; re-segment the data at the sign change",
                               static_cast<int>(i));
    return sgn;
}

}  // namespace detail

/// Locates the breakpoints (including the wrap-around point 0 == a) where the
/// sign of w flips, and evaluates 1-simplicity and the boundedness of p, 1/p
/// at each of them. Throws UnresolvableSign when a segment's w is mixed-sign.
inline std::vector<TurningPointReport> turning_points(const CoefficientSet& cs) {
    std::vector<TurningPointReport> out;
    const std::size_t n = cs.segments.size();
    std::vector<int> sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = detail::segment_w_sign(cs, i);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;  // the cell is a circle
        if (sign[i] == sign[j]) continue;
        const bool wrap = (j == 0);
        const double x0 = wrap ? 0.0 : cs.segments[j].x_lo;

        TurningPointReport tp;
        tp.location = x0;
        // left side lives at the high edge of segment i, right side at the
        // low edge of segment j; at the wrap point the left edge is x = a.
        const double x_left = wrap ? cs.period_a : x0;
        const auto minus = detail::side_behaviour(cs.segments[i].w_form, x_left, true);
        const auto plus = detail::side_behaviour(cs.segments[j].w_form, x0, false);
        if (minus) tp.tau_minus = minus->tau;
        if (plus) tp.tau_plus = plus->tau;
        tp.is_one_simple = minus && plus && minus->tau > -1.0 && plus->tau > -1.0 &&
                           ((minus->rho_at > 0.0) != (plus->rho_at > 0.0));
        tp.p_bounded_near = detail::p_bounded_side(cs.segments[i].p_form, x_left) &&
                            detail::p_bounded_side(cs.segments[j].p_form, x0);
        out.push_back(tp);
    }
    return out;
}

struct InfinityCondition {
    bool holds = false;
    std::vector<TurningPointReport> witnesses;  // failing turning points
};

/// Static check of the coefficient hypotheses under which infinity is not a
/// spectral singularity: finitely many turning points (automatic for
/// piecewise data), all 1-simple, with p and 1/p bounded near each.
inline InfinityCondition infinity_condition(const CoefficientSet& cs) {
    InfinityCondition res;
    res.holds = true;
    for (const auto& tp : turning_points(cs)) {
        if (!tp.is_one_simple || !tp.p_bounded_near) {
            res.holds = false;
            res.witnesses.push_back(tp);
        }
    }
    return res;
}

inline const Segment& segment_at(const CoefficientSet& cs, double x) {
    for (const auto& s : cs.segments)
        if (x <= s.x_hi) return s;
    return cs.segments.back();
}

inline double eval_w(const CoefficientSet& cs, double x) {
    return form_value(segment_at(cs, x).w_form, x);
}
inline double eval_p(const CoefficientSet& cs, double x) {
    return form_value(segment_at(cs, x).p_form, x);
}
inline double eval_q(const CoefficientSet& cs, double x) {
    return form_value(segment_at(cs, x).q_form, x);
}

/// The same cell with w replaced by |w|; the discriminant of the resulting
/// definite expression drives the negative-squares count.
inline CoefficientSet definitized(const CoefficientSet& cs) {
    CoefficientSet out = cs;
    for (std::size_t i = 0; i < out.segments.size(); ++i) {
        if (detail::segment_w_sign(cs, i) >= 0) continue;
        auto& f = out.segments[i].w_form;
        if (auto* c = std::get_if<ConstantForm>(&f)) c->value = -c->value;
        else if (auto* p = std::get_if<PolynomialForm>(&f))
            for (auto& ck : p->coeffs) ck = -ck;
        else {
            auto& pw = std::get<PowerForm>(f);
            for (auto& rk : pw.rho) rk = -rk;
        }
    }
    return out;
}

namespace detail {

/// q/|w| diverges to minus infinity approaching x* from one side iff the
/// local powers satisfy alpha_q < alpha_w with a negative leading ratio.
inline bool ratio_diverges_below(const SegmentForm& q_form, const SegmentForm& w_form, double xs,
                                 bool from_left) {
    const auto bq = side_behaviour(q_form, xs, from_left);
    const auto bw = side_behaviour(w_form, xs, from_left);
    if (!bq) return false;            // q vanishes to all orders: ratio -> 0
    if (!bw) return true;             // w flat zero while q does not: unbounded
    if (bq->tau >= bw->tau) return false;
    return bq->rho_at / std::abs(bw->rho_at) < 0.0;
}

}  // namespace detail

/// Certified lower bound for the spectrum of the definite companion
/// operator: essinf(q/|w|) per segment, exact for constant forms and padded
/// sampling otherwise, minus a unit margin. Throws when the structural side
/// analysis shows the ratio is unbounded below (no certified window exists).
inline double q_over_w_lower_bound(const CoefficientSet& cs) {
    double essinf = 0.0;
    for (std::size_t i = 0; i < cs.segments.size(); ++i) {
        const auto& s = cs.segments[i];
        // points where q/|w| can blow up: segment endpoints and interior
        // power anchors of either form
        std::vector<double> hot = {s.x_lo, s.x_hi};
        for (const SegmentForm* f : {&s.w_form, &s.q_form})
            if (const auto* pw = std::get_if<PowerForm>(f))
                if (pw->anchor > s.x_lo && pw->anchor < s.x_hi) hot.push_back(pw->anchor);
        for (double xs : hot) {
            const bool check_right = xs < s.x_hi - 1e-14;
            const bool check_left = xs > s.x_lo + 1e-14;
            if ((check_right && detail::ratio_diverges_below(s.q_form, s.w_form, xs, false)) ||
                (check_left && detail::ratio_diverges_below(s.q_form, s.w_form, xs, true)))
                throw Error("q/|w| is unbounded below near x = " + std::to_string(xs) +
                            " (segment " + std::to_string(i) +
                            "); no certified eigenvalue window exists");
        }

        double seg;
        if (form_is_constant(s.q_form) && form_is_constant(s.w_form)) {
            seg = form_constant_value(s.q_form) / std::abs(form_constant_value(s.w_form));
        } else {
            double m = std::numeric_limits<double>::infinity();
            for (double x : detail::sample_points(s.x_lo, s.x_hi)) {
                const double w = std::abs(form_value(s.w_form, x));
                if (w == 0.0) continue;
                m = std::min(m, form_value(s.q_form, x) / w);
            }
            if (!std::isfinite(m))
                throw Error("cannot bound q/|w| on segment; weight vanishes on the sample grid");
            seg = m - 0.1 * (1.0 + std::abs(m));  // sampling safety margin
        }
        essinf = std::min(essinf, seg);
    }
    return std::min(0.0, essinf) - 1.0;
}

}  // namespace floquet
