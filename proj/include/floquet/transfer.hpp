#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "floquet/coefficients.hpp"
#include "floquet/errors.hpp"

namespace floquet {

using Complex = std::complex<double>;

struct Mat2 {
    Complex a11{}, a12{}, a21{}, a22{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2 operator*(const Mat2& r) const {
        return {a11 * r.a11 + a12 * r.a21, a11 * r.a12 + a12 * r.a22,
                a21 * r.a11 + a22 * r.a21, a21 * r.a12 + a22 * r.a22};
    }
    Mat2 operator-(const Mat2& r) const { return {a11 - r.a11, a12 - r.a12, a21 - r.a21, a22 - r.a22}; }
    Complex det() const { return a11 * a22 - a12 * a21; }
    Complex trace() const { return a11 + a22; }
    double norm() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)), std::max(std::abs(a21), std::abs(a22)));
    }
};

struct TransferOptions {
    double tol = 1e-10;          // integrator tolerance, accepted range [1e-14, 1e-3]
    bool force_adaptive = false; // drive constant segments through the RK path too
    int max_steps = 2000000;
};

/// Monodromy data for one period cell: the frame matrix L with columns from
/// phi and psi, and the three weighted quadratures over the cell that feed
/// the derivative formulas. The brackets [phi,conj-phi]_a etc. reduce to
/// plain w-weighted products because conjugating the second argument twice
/// cancels.
struct TransferResult {
    Mat2 L;
    Complex Q_phiphi{};  // integral of phi^2 w over the cell
    Complex Q_phipsi{};  // integral of phi psi w
    Complex Q_psipsi{};  // integral of psi^2 w
    double est_error = 0.0;

    Complex phi_a() const { return L.a11; }
    Complex psi_a() const { return L.a12; }
    Complex pphi_prime_a() const { return L.a21; }
    Complex ppsi_prime_a() const { return L.a22; }
};

struct SolutionTrace {
    std::vector<double> grid;
    std::vector<std::array<Complex, 4>> values;  // (phi, pphi', psi, ppsi') per point
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1]
inline constexpr std::array<double, 8> kGlNode = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGlWeight = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
inline void gl16(double lo, double hi, F&& f) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < 8; ++k) {
        const double dx = half * kGlNode[k];
        const double wt = half * kGlWeight[k];
        f(mid - dx, wt);
        f(mid + dx, wt);
    }
}

/// cosh(sqrt(zeta)) and sinh(sqrt(zeta))/sqrt(zeta); entire in zeta, so the
/// degenerate zeta -> 0 limit comes out of the series branch.
inline void cosh_sinhc(Complex zeta, Complex& c, Complex& s) {
    if (std::abs(zeta) < 1e-2) {
        c = 1.0 + zeta * (1.0 / 2 + zeta * (1.0 / 24 + zeta * (1.0 / 720 + zeta / 40320.0)));
        s = 1.0 + zeta * (1.0 / 6 + zeta * (1.0 / 120 + zeta * (1.0 / 5040 + zeta / 362880.0)));
        return;
    }
    const Complex mu = std::sqrt(zeta);
    c = std::cosh(mu);
    s = std::sinh(mu) / mu;
}

/// Exact propagator over step h for u' = v/p, v' = cp*u with constant
/// coefficients, where cc = cp/p = (q - lambda w)/p.
inline Mat2 constant_propagator(Complex cc, double h, double p) {
    Complex c, s;
    cosh_sinhc(cc * (h * h), c, s);
    return {c, h * s / p, p * cc * h * s, c};
}

struct SegmentConstants {
    bool all_constant = false;
    double w = 0.0, p = 0.0, q = 0.0;
};

inline SegmentConstants segment_constants(const Segment& s) {
    SegmentConstants k;
    k.all_constant = form_is_constant(s.w_form) && form_is_constant(s.p_form) && form_is_constant(s.q_form);
    if (k.all_constant) {
        k.w = form_constant_value(s.w_form);
        k.p = form_constant_value(s.p_form);
        k.q = form_constant_value(s.q_form);
    }
    return k;
}

/// Per-segment record for evaluating the fundamental frame anywhere in the
/// cell after one propagation pass.
struct SegmentEval {
    double x_lo = 0.0, x_hi = 0.0;
    bool exact = false;
    Complex cc{};    // (q - lambda w)/p for the exact branch
    double p = 1.0;  // constant p for the exact branch
    Mat2 frame_lo;   // frame at x_lo
    std::vector<double> xs;      // RK nodes (general branch)
    std::vector<Mat2> frames;    // frame at each node
    std::vector<Mat2> dframes;   // x-derivative of the frame at each node
};

struct CellData {
    Mat2 L = Mat2::identity();
    Complex q[3] = {};  // Qphiphi, Qphipsi, Qpsipsi
    double est_error = 0.0;
    std::vector<SegmentEval> segs;
};

inline void accumulate_q(Complex q[3], double wval, double wt, const Mat2& frame) {
    const Complex phi = frame.a11, psi = frame.a12;
    q[0] += wt * wval * phi * phi;
    q[1] += wt * wval * phi * psi;
    q[2] += wt * wval * psi * psi;
}

// --- adaptive Dormand-Prince 5(4) over the augmented 7-state system ---

using State7 = std::array<Complex, 7>;  // phi, pphi', psi, ppsi', Qpp, Qps, Qss

struct SegmentFns {
    const Segment* s;
    Complex lambda;
    void rhs(double x, const State7& y, State7& dy) const {
        const double w = form_value(s->w_form, x);
        const double p = form_value(s->p_form, x);
        const double qv = form_value(s->q_form, x);
        const Complex g = qv - lambda * w;
        dy[0] = y[1] / p;
        dy[1] = g * y[0];
        dy[2] = y[3] / p;
        dy[3] = g * y[2];
        dy[4] = w * y[0] * y[0];
        dy[5] = w * y[0] * y[2];
        dy[6] = w * y[2] * y[2];
    }
};

inline double rk_error_norm(const State7& e, const State7& y0, const State7& y1) {
    double m = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
        const double sc = 1.0 + std::max(std::abs(y0[i]), std::abs(y1[i]));
        m = std::max(m, std::abs(e[i]) / sc);
    }
    return m;
}

/// Anchor x-positions of power forms with tau != 0 inside or at the edge of
/// the segment; steps are graded toward these and never evaluate at them.
inline std::vector<double> segment_anchors(const Segment& s) {
    std::vector<double> out;
    for (const SegmentForm* f : {&s.w_form, &s.p_form, &s.q_form}) {
        if (const auto* pw = std::get_if<PowerForm>(f)) {
            if (pw->tau != 0.0 && pw->anchor >= s.x_lo - 1e-14 && pw->anchor <= s.x_hi + 1e-14)
                out.push_back(pw->anchor);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// First-order analytic hop over the sliver [xl, xr] around a singular
/// anchor: the coefficient integrals are exact per form, the frame is frozen
/// at xl. The sliver width is ~1e-9 of the segment, so the frozen-frame
/// error is far below integrator tolerance.
inline void anchor_jump(const Segment& s, Complex lambda, double xl, double xr, State7& y) {
    double ip;  // integral of 1/p
    if (const auto* pw = std::get_if<PowerForm>(&s.p_form); pw && pw->tau != 0.0) {
        const double r0 = poly_eval(pw->rho, 0.0);
        const double e = 1.0 - pw->tau;
        auto side = [&](double a, double b) {  // integral of |u|^-tau on one side
            if (a >= 0.0) return (std::pow(b, e) - std::pow(a, e)) / e;
            return (std::pow(-a, e) - std::pow(-b, e)) / e;
        };
        const double ua = xl - pw->anchor, ub = xr - pw->anchor;
        double v = (ua < 0.0 && ub > 0.0) ? side(ua, 0.0) + side(0.0, ub) : side(ua, ub);
        ip = v / r0;
    } else {
        ip = (xr - xl) / form_value(s.p_form, 0.5 * (xl + xr));
    }
    const Complex iqw = form_integral(s.q_form, xl, xr) - lambda * form_integral(s.w_form, xl, xr);
    const double iw = form_integral(s.w_form, xl, xr);

    const Complex phi = y[0], pphi = y[1], psi = y[2], ppsi = y[3];
    y[0] = phi + pphi * ip;
    y[1] = pphi + phi * iqw;
    y[2] = psi + ppsi * ip;
    y[3] = ppsi + psi * iqw;
    y[4] += iw * phi * phi;
    y[5] += iw * phi * psi;
    y[6] += iw * psi * psi;
}

struct RkRecorder {
    bool active = false;
    SegmentEval* seg = nullptr;
    void node(double x, const State7& y, const State7& dy) {
        if (!active) return;
        seg->xs.push_back(x);
        seg->frames.push_back({y[0], y[2], y[1], y[3]});
        seg->dframes.push_back({dy[0], dy[2], dy[1], dy[3]});
    }
};

inline void integrate_segment_adaptive(const Segment& s, int seg_index, Complex lambda,
                                       const TransferOptions& opts, double max_dx, State7& y,
                                       double& est_error, RkRecorder& rec) {
    static constexpr double kA[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double kE[7] = {35.0 / 384 - 5179.0 / 57600, 0.0, 500.0 / 1113 - 7571.0 / 16695,
                                     125.0 / 192 - 393.0 / 640,   -2187.0 / 6784 + 92097.0 / 339200,
                                     11.0 / 84 - 187.0 / 2100,    -1.0 / 40};

    const SegmentFns fns{&s, lambda};
    const double len = s.x_hi - s.x_lo;
    const double delta = 1e-9 * std::max(1.0, len);  // jump-zone half width
    const auto anchors = segment_anchors(s);

    double x = s.x_lo;
    // a segment may start on its own anchor
    for (double anc : anchors) {
        if (std::abs(x - anc) <= delta) {
            const double xr = std::min(anc + delta, s.x_hi);
            anchor_jump(s, lambda, x, xr, y);
            x = xr;
        }
    }

    double h = std::min(len / 64.0, max_dx);
    State7 k[7], dy0, err, ynew;
    fns.rhs(x, y, dy0);
    rec.node(x, y, dy0);
    int steps = 0;
    double weighted_err = 0.0;

    while (x < s.x_hi - 1e-14 * std::max(1.0, len)) {
        if (++steps > opts.max_steps)
            throw IntegratorFailure("step limit exceeded in segment " + std::to_string(seg_index),
                                    seg_index, x, s.x_hi);
        h = std::min({h, s.x_hi - x, max_dx});
        // grade toward the next anchor ahead and hop over its sliver
        for (double anc : anchors) {
            if (anc <= x + delta) continue;
            const double d = anc - x;
            if (d <= 4.0 * delta) {
                anchor_jump(s, lambda, x, std::min(anc + delta, s.x_hi), y);
                x = std::min(anc + delta, s.x_hi);
                fns.rhs(x, y, dy0);
                rec.node(x, y, dy0);
                h = std::min(h, len / 64.0);
            } else {
                h = std::min(h, std::max(0.5 * d, 4.0 * delta));
                if (x + h > anc - delta) h = anc - delta - x;
            }
            break;
        }
        if (x >= s.x_hi - 1e-14 * std::max(1.0, len)) break;
        if (h < 1e-14 * std::max(1.0, len))
            throw IntegratorFailure("step size underflow in segment " + std::to_string(seg_index),
                                    seg_index, x, s.x_hi);

        k[0] = dy0;
        for (int st = 1; st < 7; ++st) {
            State7 ys;
            for (std::size_t i = 0; i < 7; ++i) {
                Complex acc = y[i];
                for (int j = 0; j < st; ++j) acc += h * kA[st][j] * k[j][i];
                ys[i] = acc;
            }
            fns.rhs(x + kC[st] * h, ys, k[st]);
            if (st == 6) ynew = ys;  // FSAL: seventh stage sits at the solution
        }
        for (std::size_t i = 0; i < 7; ++i) {
            Complex e = 0.0;
            for (int j = 0; j < 7; ++j) e += h * kE[j] * k[j][i];
            err[i] = e;
        }
        const double en = rk_error_norm(err, y, ynew);
        if (en <= opts.tol) {
            x += h;
            y = ynew;
            dy0 = k[6];  // FSAL
            weighted_err += en * h;
            rec.node(x, y, dy0);
        }
        const double fac = (en > 0.0) ? 0.9 * std::pow(opts.tol / en, 0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
    est_error += weighted_err / std::max(len, 1e-300);
}

/// Single pass over the period cell. Constant-coefficient segments use the
/// exact propagator with per-panel Gauss quadrature for the Q states; all
/// other segments run the adaptive integrator on the augmented system.
inline CellData propagate_cell(const CoefficientSet& cs, Complex lambda, const TransferOptions& opts,
                               bool record, double max_dx = std::numeric_limits<double>::infinity()) {
    if (!(opts.tol >= 1e-14 && opts.tol <= 1e-3))
        throw Error("transfer tolerance must lie in [1e-14, 1e-3]");
    CellData cell;
    if (record) cell.segs.reserve(cs.segments.size());

    for (std::size_t i = 0; i < cs.segments.size(); ++i) {
        const auto& s = cs.segments[i];
        const auto kc = segment_constants(s);
        SegmentEval se;
        se.x_lo = s.x_lo;
        se.x_hi = s.x_hi;
        se.frame_lo = cell.L;

        if (kc.all_constant && !opts.force_adaptive) {
            const Complex cc = (kc.q - lambda * kc.w) / kc.p;
            const double len = s.x_hi - s.x_lo;
            const int panels =
                std::max(1, static_cast<int>(std::ceil(std::sqrt(std::abs(cc)) * len / 1.5)));
            for (int pan = 0; pan < panels; ++pan) {
                const double lo = s.x_lo + len * pan / panels;
                const double hi = s.x_lo + len * (pan + 1) / panels;
                gl16(lo, hi, [&](double xx, double wt) {
                    const Mat2 fr = constant_propagator(cc, xx - s.x_lo, kc.p) * cell.L;
                    accumulate_q(cell.q, kc.w, wt, fr);
                });
            }
            cell.L = constant_propagator(cc, len, kc.p) * cell.L;
            cell.est_error += 1e-15;
            se.exact = true;
            se.cc = cc;
            se.p = kc.p;
        } else {
            State7 y = {cell.L.a11, cell.L.a21, cell.L.a12, cell.L.a22, cell.q[0], cell.q[1], cell.q[2]};
            RkRecorder rec;
            rec.active = record;
            rec.seg = &se;
            integrate_segment_adaptive(s, static_cast<int>(i), lambda, opts,
                                       record ? std::min(max_dx, (s.x_hi - s.x_lo) / 8.0) : max_dx, y,
                                       cell.est_error, rec);
            cell.L = {y[0], y[2], y[1], y[3]};
            cell.q[0] = y[4];
            cell.q[1] = y[5];
            cell.q[2] = y[6];
        }
        if (record) cell.segs.push_back(std::move(se));
    }
    return cell;
}

}  // namespace detail

/// Propagates the canonical fundamental frame across one period and returns
/// the monodromy matrix together with the period-cell quadratures; both come
/// from the same pass.
inline TransferResult transfer(const CoefficientSet& cs, Complex lambda, const TransferOptions& opts = {}) {
    const auto cell = detail::propagate_cell(cs, lambda, opts, false);
    TransferResult r;
    r.L = cell.L;
    r.Q_phiphi = cell.q[0];
    r.Q_phipsi = cell.q[1];
    r.Q_psipsi = cell.q[2];
    r.est_error = cell.est_error;
    return r;
}

/// Evaluates the fundamental frame anywhere in [0, a] from one propagation
/// pass: exact in-segment propagators where coefficients are constant, cubic
/// Hermite interpolation of the integrator nodes elsewhere.
class FrameEvaluator {
public:
    FrameEvaluator(const CoefficientSet& cs, Complex lambda, const TransferOptions& opts = {},
                   double max_dx = std::numeric_limits<double>::infinity())
        : period_(cs.period_a) {
        auto cell = detail::propagate_cell(cs, lambda, opts, true, max_dx);
        segs_ = std::move(cell.segs);
        end_frame_ = cell.L;
        result_.L = cell.L;
        result_.Q_phiphi = cell.q[0];
        result_.Q_phipsi = cell.q[1];
        result_.Q_psipsi = cell.q[2];
        result_.est_error = cell.est_error;
    }

    const TransferResult& result() const { return result_; }

    Mat2 frame(double x) const {
        const auto& se = locate(x);
        if (se.exact) return detail::constant_propagator(se.cc, x - se.x_lo, se.p) * se.frame_lo;
        return hermite(se, x);
    }

    Complex phi(double x) const { return frame(x).a11; }
    Complex psi(double x) const { return frame(x).a12; }

private:
    const detail::SegmentEval& locate(double x) const {
        if (x <= segs_.front().x_lo) return segs_.front();
        for (const auto& se : segs_)
            if (x <= se.x_hi) return se;
        return segs_.back();
    }

    Mat2 hermite(const detail::SegmentEval& se, double x) const {
        const auto& xs = se.xs;
        std::size_t hi = std::lower_bound(xs.begin(), xs.end(), x) - xs.begin();
        if (hi == 0) hi = 1;
        if (hi >= xs.size()) hi = xs.size() - 1;
        const std::size_t lo = hi - 1;
        const double h = xs[hi] - xs[lo];
        if (h <= 0.0) return se.frames[lo];
        const double t = (x - xs[lo]) / h;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        Mat2 out;
        auto comp = [&](Complex f0, Complex f1, Complex d0, Complex d1) {
            return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
        };
        out.a11 = comp(se.frames[lo].a11, se.frames[hi].a11, se.dframes[lo].a11, se.dframes[hi].a11);
        out.a12 = comp(se.frames[lo].a12, se.frames[hi].a12, se.dframes[lo].a12, se.dframes[hi].a12);
        out.a21 = comp(se.frames[lo].a21, se.frames[hi].a21, se.dframes[lo].a21, se.dframes[hi].a21);
        out.a22 = comp(se.frames[lo].a22, se.frames[hi].a22, se.dframes[lo].a22, se.dframes[hi].a22);
        return out;
    }

    double period_;
    std::vector<detail::SegmentEval> segs_;
    Mat2 end_frame_;
    TransferResult result_;
};

/// Samples phi, psi and their quasi-derivatives on a grid of n_points
/// equidistant points merged with all segment breakpoints.
inline SolutionTrace solve_trace(const CoefficientSet& cs, Complex lambda, int n_points,
                                 const TransferOptions& opts = {}) {
    if (n_points < 2) throw Error("solve_trace needs n_points >= 2");
    FrameEvaluator ev(cs, lambda, opts, cs.period_a / 64.0);

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n_points) + cs.segments.size());
    for (int k = 0; k < n_points; ++k)
        grid.push_back(cs.period_a * static_cast<double>(k) / (n_points - 1));
    for (const auto& s : cs.segments) grid.push_back(s.x_hi);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [&](double u, double v) { return std::abs(u - v) < 1e-12 * cs.period_a; }),
               grid.end());

    SolutionTrace tr;
    tr.grid = grid;
    tr.values.reserve(grid.size());
    for (double x : grid) {
        const Mat2 f = ev.frame(x);
        tr.values.push_back({f.a11, f.a21, f.a12, f.a22});
    }
    return tr;
}

}  // namespace floquet
