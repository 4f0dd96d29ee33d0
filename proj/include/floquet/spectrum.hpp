#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "floquet/contour.hpp"
#include "floquet/discriminant.hpp"

namespace floquet {

struct RootRecord {
    Complex lambda{};
    int multiplicity = 1;
    double newton_residual = 0.0;
};

struct EigenvalueList {
    double t = 0.0;
    std::vector<RootRecord> roots;
    Box box;
    int contour_count = 0;  // argument-principle count of the (jittered) box
};

struct SpectrumOptions {
    TransferOptions transfer;
    double min_gap = 1e-6;        // contour-to-root separation before jitter
    double cluster_eps_rel = 1e-6; // box size treated as one multiple root
    int max_roots = 256;
};

namespace detail {

/// D(.) - target and its derivative from one transfer pass per point.
inline AnalyticFn discriminant_shift_fn(const CoefficientSet& cs, Complex target,
                                        const TransferOptions& opts) {
    return [&cs, target, opts](Complex lam) {
        const TransferResult tr = transfer(cs, lam, opts);
        return FnSample{eval_D(tr) - target, eval_Ddot_quadrature(tr)};
    };
}

/// Newton-polish one root (or one coincident cluster) out of the box.
/// Returns false when the iteration escapes the box or the two shrinking
/// verification circles disagree with the expected count.
inline bool polish_cluster(const AnalyticFn& fn, const Box& box, int count,
                           const SpectrumOptions& opts, std::vector<RootRecord>& out, bool strict) {
    const double cap = 4.0 * box.diag() + 1.0;
    auto nr = newton_polish(fn, box.center(), count, 1e-13, 60, cap);
    if (!nr.converged && count > 1) nr = newton_polish(fn, box.center(), 1, 1e-13, 60, cap);
    if (!nr.converged && strict) return false;
    if (!box.contains(nr.lambda, 0.5 * opts.min_gap)) return false;

    const int c1 = count_zeros_in_circle(fn, nr.lambda, 1e-3, opts.min_gap);
    const int c2 = count_zeros_in_circle(fn, nr.lambda, 1e-4, opts.min_gap);
    int m = count;
    if (c1 == c2 && c1 >= 1) m = c1;
    if (strict && (c1 != c2 || c1 != count)) return false;

    if (m >= 2) {
        // an m-fold zero of f is an (m-1)-fold zero of f'; polishing on f'
        // beats the sqrt(eps) noise floor of the flat |f| valley
        const AnalyticFn dfn = [&fn](Complex z) {
            const double h = 1e-6 * (1.0 + std::abs(z));
            const FnSample s = fn(z);
            const FnSample sp = fn(z + h);
            const FnSample sm = fn(z - h);
            return FnSample{s.fp, (sp.fp - sm.fp) / (2.0 * h)};
        };
        const auto nr2 = newton_polish(dfn, nr.lambda, m - 1);
        if (nr2.converged &&
            std::abs(nr2.lambda - nr.lambda) < 1e-3 * (1.0 + std::abs(nr.lambda))) {
            nr.lambda = nr2.lambda;
            nr.residual = std::abs(fn(nr2.lambda).f);
        }
    }
    out.push_back({nr.lambda, m, nr.residual});
    return true;
}

inline void collect_roots(const AnalyticFn& fn, Box box, int count, const SpectrumOptions& opts,
                          std::vector<RootRecord>& out, int depth = 0) {
    if (count == 0) return;
    const double scale = 1.0 + std::abs(box.center());
    const bool tiny = box.diag() < opts.cluster_eps_rel * scale;
    // proactive polish: an isolated root or coincident cluster ends the
    // recursion here, verified by the circle counts
    if (count <= 6 && polish_cluster(fn, box, count, opts, out, true)) return;
    if (tiny) {
        polish_cluster(fn, box, count, opts, out, false);
        return;
    }
    if (depth > 80)
        throw BoxCountUnstable("subdivision depth exhausted while separating roots", box.re_lo,
                               box.re_hi, box.im_lo, box.im_hi);

    // split the longer side; the children must exactly partition the parent,
    // so a cut landing near a root is moved, never padded outward
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double u = 0.38 + 0.24 * detail::box_hash_unit(box, 7 + depth + 31 * attempt);
        Box a = box, b = box;
        if (box.width() >= box.height()) {
            const double cut = box.re_lo + u * box.width();
            a.re_hi = cut;
            b.re_lo = cut;
        } else {
            const double cut = box.im_lo + u * box.height();
            a.im_hi = cut;
            b.im_lo = cut;
        }
        const auto na = detail::try_count_box(fn, a, opts.min_gap);
        if (!na) continue;
        const auto nb = detail::try_count_box(fn, b, opts.min_gap);
        if (!nb) continue;
        if (*na + *nb != count) continue;  // a root sat on the cut; try another
        collect_roots(fn, a, *na, opts, out, depth + 1);
        collect_roots(fn, b, *nb, opts, out, depth + 1);
        return;
    }
    // every admissible cut ran into the same roots: the box is one cluster
    polish_cluster(fn, box, count, opts, out, false);
}

}  // namespace detail

/// All roots of D(lambda) = 2 cos t inside the box, located by recursive
/// subdivision with argument-principle counts and polished by Newton using
/// the quadrature-exact derivative. The sum of multiplicities is checked
/// against the top-level contour count.
inline EigenvalueList eigenvalues_in_box(const CoefficientSet& cs, double t, Box box,
                                         int max_roots = 256, const SpectrumOptions& opts_in = {}) {
    SpectrumOptions opts = opts_in;
    opts.max_roots = max_roots;
    const Complex target = 2.0 * std::cos(t);
    const auto fn = detail::discriminant_shift_fn(cs, target, opts.transfer);

    EigenvalueList list;
    list.t = t;
    Box counted = box;
    list.contour_count = count_zeros_in_box(fn, counted, opts.min_gap);
    list.box = counted;
    if (list.contour_count > max_roots)
        throw MaxRootsExceeded("box holds " + std::to_string(list.contour_count) +
                               " roots, max_roots = " + std::to_string(max_roots));
    detail::collect_roots(fn, counted, list.contour_count, opts, list.roots);

    // merge duplicates produced by cuts straight through a cluster
    std::sort(list.roots.begin(), list.roots.end(), [](const RootRecord& a, const RootRecord& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    std::vector<RootRecord> merged;
    for (const auto& r : list.roots) {
        if (!merged.empty() &&
            std::abs(merged.back().lambda - r.lambda) < 1e-6 * (1.0 + std::abs(r.lambda))) {
            merged.back().multiplicity = std::max(merged.back().multiplicity, r.multiplicity);
            merged.back().newton_residual = std::min(merged.back().newton_residual, r.newton_residual);
        } else {
            merged.push_back(r);
        }
    }
    list.roots = std::move(merged);

    int total = 0;
    for (const auto& r : list.roots) total += r.multiplicity;
    if (total != list.contour_count)
        throw BoxCountUnstable("located multiplicities sum to " + std::to_string(total) +
                                   " but the contour count is " + std::to_string(list.contour_count),
                               counted.re_lo, counted.re_hi, counted.im_lo, counted.im_hi);
    return list;
}

enum class BandEdgeKind { CrossPlus2, CrossMinus2, WindowClip, TangentCritical };

struct Band {
    double lo = 0.0, hi = 0.0;
    double d_lo = 0.0, d_hi = 0.0;  // discriminant values at the endpoints
    BandEdgeKind lo_kind = BandEdgeKind::WindowClip;
    BandEdgeKind hi_kind = BandEdgeKind::WindowClip;
    bool monotone = false;  // Ddot nonzero throughout the band
};

struct BandScanOptions {
    TransferOptions transfer;
    int scan_points = 4096;
    double edge_tol = 1e-12;       // bisection width for |D| = 2 crossings
    double crit_rel = 1e-6;        // |Ddot| threshold marking a tangent edge
};

/// Maximal subintervals of [lo, hi] with D in [-2, 2], located by a dense
/// scan plus bisection refinement of the |D| = 2 crossings. Tangencies where
/// D touches +-2 from inside do not split a band.
inline std::vector<Band> real_bands(const CoefficientSet& cs, double lo, double hi,
                                    const BandScanOptions& opts = {}) {
    if (!(lo < hi)) throw Error("real_bands needs lo < hi");
    const int n = std::max(16, opts.scan_points);
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    std::vector<double> dv(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        xs[k] = lo + (hi - lo) * static_cast<double>(k) / n;
        dv[k] = eval_D(cs, xs[k], opts.transfer).real();
    }
    auto inside = [](double d) { return d >= -2.0 && d <= 2.0; };
    auto refine = [&](double a, double b, bool want_inside_right) {
        // bisect the boundary of the in-band set on [a, b]
        for (int it = 0; it < 64 && (b - a) > opts.edge_tol * (1.0 + std::abs(a)); ++it) {
            const double m = 0.5 * (a + b);
            const bool mi = inside(eval_D(cs, m, opts.transfer).real());
            if (mi == want_inside_right) b = m;
            else a = m;
        }
        return 0.5 * (a + b);
    };

    std::vector<Band> bands;
    std::optional<double> open_lo;
    std::optional<BandEdgeKind> open_kind;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const bool in = inside(dv[k]);
        if (in && !open_lo) {
            if (k == 0) {
                open_lo = xs[0];
                open_kind = BandEdgeKind::WindowClip;
            } else {
                open_lo = refine(xs[k - 1], xs[k], true);
                open_kind.reset();
            }
        } else if (!in && open_lo) {
            const double edge = refine(xs[k - 1], xs[k], false);
            Band b;
            b.lo = *open_lo;
            b.hi = edge;
            bands.push_back(b);
            open_lo.reset();
        }
        if (k + 1 == xs.size() && open_lo) {
            Band b;
            b.lo = *open_lo;
            b.hi = xs.back();
            bands.push_back(b);
        }
    }

    for (auto& b : bands) {
        const auto annotate = [&](double x, bool is_window_edge, double& dval, BandEdgeKind& kind) {
            const TransferResult tr = transfer(cs, x, opts.transfer);
            dval = eval_D(tr).real();
            if (is_window_edge && std::abs(std::abs(dval) - 2.0) > 1e-6) {
                kind = BandEdgeKind::WindowClip;
                return;
            }
            const double dd = std::abs(eval_Ddot_quadrature(tr));
            if (dd < opts.crit_rel * (1.0 + std::abs(x))) kind = BandEdgeKind::TangentCritical;
            else kind = dval > 0.0 ? BandEdgeKind::CrossPlus2 : BandEdgeKind::CrossMinus2;
        };
        annotate(b.lo, std::abs(b.lo - lo) < 1e-12 * (1.0 + std::abs(lo)), b.d_lo, b.lo_kind);
        annotate(b.hi, std::abs(b.hi - hi) < 1e-12 * (1.0 + std::abs(hi)), b.d_hi, b.hi_kind);

        b.monotone = true;
        int sign = 0;
        for (int k = 1; k <= 33; ++k) {
            const double x = b.lo + (b.hi - b.lo) * k / 34.0;
            const double dd = eval_Ddot_quadrature(cs, x, opts.transfer).real();
            if (std::abs(dd) < 1e-9 * (1.0 + std::abs(x))) {
                b.monotone = false;
                break;
            }
            const int s = dd > 0.0 ? 1 : -1;
            if (sign == 0) sign = s;
            else if (s != sign) {
                b.monotone = false;
                break;
            }
        }
    }
    return bands;
}

enum class CurveEnd { CriticalPoint, BandEdgeDPlus2, BandEdgeDMinus2, BoxBoundary };

struct CurvePoint {
    double t = 0.0;
    Complex lambda{};
};

struct SpectralCurve {
    std::vector<CurvePoint> points;  // ordered by strictly increasing t
    CurveEnd start_reason = CurveEnd::BoxBoundary;
    CurveEnd end_reason = CurveEnd::BoxBoundary;
    bool is_real = false;
};

struct TraceOptions {
    TransferOptions transfer;
    double dt_min = 1e-4;
    double dt_max = 1e-2;
    double crit_rel = 1e-6;      // |Ddot| stop threshold (relative)
    double dedup_rel = 1e-6;     // curve deduplication radius (relative)
    double real_tol = 1e-8;      // |Im lambda| below which a curve is real
    int max_points = 40000;
    int verify_grid = 40;
    bool verify_coverage = true;
};

namespace detail {

struct StepSample {
    Complex D, Ddot;
};

inline StepSample d_sample(const CoefficientSet& cs, Complex lam, const TransferOptions& topts) {
    const TransferResult tr = transfer(cs, lam, topts);
    return {eval_D(tr), eval_Ddot_quadrature(tr)};
}

/// One-direction continuation of D(lambda(t)) = 2 cos t from a seed.
inline void trace_one_direction(const CoefficientSet& cs, const TraceOptions& opts, const Box& box,
                                double t0, Complex lam0, int dir, std::vector<CurvePoint>& out,
                                CurveEnd& reason) {
    double t = t0;
    Complex lam = lam0;
    double dt = 8.0 * opts.dt_min;
    reason = CurveEnd::BoxBoundary;
    int guard = opts.max_points;

    while (guard-- > 0) {
        const StepSample here = d_sample(cs, lam, opts.transfer);
        if (std::abs(here.Ddot) < opts.crit_rel * (1.0 + std::abs(lam))) {
            reason = CurveEnd::CriticalPoint;
            return;
        }
        if (dir > 0 && t >= M_PI - 1e-12) {
            reason = CurveEnd::BandEdgeDMinus2;
            return;
        }
        if (dir < 0 && t <= 1e-12) {
            reason = CurveEnd::BandEdgeDPlus2;
            return;
        }
        if (!box.contains(lam, 1e-9 * (1.0 + std::abs(lam)))) {
            reason = CurveEnd::BoxBoundary;
            return;
        }

        const double tn = std::clamp(t + dir * dt, 0.0, M_PI);
        // predictor from Ddot(lam) * lamdot = -2 sin t
        const Complex pred = lam - 2.0 * std::sin(t) * (tn - t) / here.Ddot;
        const Complex target = 2.0 * std::cos(tn);
        const double step_cap = 1.0 + 100.0 * std::abs(pred - lam);
        Complex z = pred;
        bool ok = false;
        for (int it = 0; it < 8; ++it) {
            const StepSample s = d_sample(cs, z, opts.transfer);
            if (std::abs(s.Ddot) < 1e-14) break;
            const Complex step = (s.D - target) / s.Ddot;
            if (std::abs(step) > step_cap) break;
            z -= step;
            if (std::abs(step) < 1e-12 * (1.0 + std::abs(z))) {
                ok = std::abs(d_sample(cs, z, opts.transfer).D - target) <
                     1e-8 * (1.0 + std::abs(here.Ddot));
                break;
            }
        }
        const double jump_cap =
            10.0 * std::abs(pred - lam) + 1e-3 * (1.0 + std::abs(lam));
        if (!ok || std::abs(z - lam) > jump_cap) {
            dt *= 0.5;
            if (dt < opts.dt_min) {
                // corrector degenerates this close to a zero of Ddot
                reason = CurveEnd::CriticalPoint;
                return;
            }
            continue;
        }
        t = tn;
        lam = z;
        out.push_back({t, lam});
        dt = std::min(dt * 1.5, opts.dt_max);
    }
    throw Error("curve tracing exceeded the point budget");
}

inline double curve_point_dist(const SpectralCurve& c, double t, Complex lam) {
    // interpolate the polyline at the query t so curves traced with different
    // step sequences still recognize each other
    if (c.points.empty()) return 1e300;
    if (t < c.points.front().t - 0.02 || t > c.points.back().t + 0.02) return 1e300;
    const auto it = std::lower_bound(c.points.begin(), c.points.end(), t,
                                     [](const CurvePoint& p, double tt) { return p.t < tt; });
    if (it == c.points.begin()) return std::abs(it->lambda - lam);
    if (it == c.points.end()) return std::abs((it - 1)->lambda - lam);
    const auto& p1 = *(it - 1);
    const auto& p2 = *it;
    const double span = p2.t - p1.t;
    const double u = span > 0.0 ? (t - p1.t) / span : 0.0;
    const double d = std::abs((1.0 - u) * p1.lambda + u * p2.lambda - lam);
    // discount the local chord: the polyline only resolves the curve to its
    // own sampling density
    return std::max(0.0, d - 0.35 * std::abs(p2.lambda - p1.lambda));
}

inline bool curve_covers(const std::vector<SpectralCurve>& curves, double t, Complex lam, double rad) {
    for (const auto& c : curves)
        if (curve_point_dist(c, t, lam) <= rad) return true;
    return false;
}

struct Seed {
    double t = 0.0;
    Complex lambda{};
    int dirs = 0;  // +1 forward only, -1 backward only, 0 both
};

}  // namespace detail

/// Traces the spectral curves D(lambda(t)) = 2 cos t through the box,
/// seeding from the eigenvalues of A(0) and A(pi) plus a rectangular grid,
/// and verifies afterwards that a dense grid finds no uncovered spectrum.
inline std::vector<SpectralCurve> trace_curves(const CoefficientSet& cs, Box box, int seed_density,
                                               const TraceOptions& opts = {}) {
    std::vector<detail::Seed> seeds;
    SpectrumOptions sopts;
    sopts.transfer = opts.transfer;
    for (double t_edge : {0.0, M_PI}) {
        Box b = box;
        try {
            const auto eigs = eigenvalues_in_box(cs, t_edge, b, 512, sopts);
            for (const auto& r : eigs.roots)
                seeds.push_back({t_edge, r.lambda, t_edge == 0.0 ? +1 : -1});
        } catch (const BoxCountUnstable&) {
            // seeding stays best-effort; grid seeds and verification catch gaps
        }
    }
    const int nd = std::max(2, seed_density);
    for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
            const Complex g(box.re_lo + box.width() * (i + 0.5) / nd,
                            box.im_lo + box.height() * (j + 0.5) / nd);
            const detail::StepSample s = detail::d_sample(cs, g, opts.transfer);
            if (std::abs(s.D) > 6.0) continue;  // far from any curve
            const double re = std::clamp(s.D.real() / 2.0, -1.0, 1.0);
            const double th = std::acos(re);
            const Complex target = 2.0 * std::cos(th);
            const double cell_cap = 4.0 * std::max(box.width(), box.height()) / nd + 1.0;
            Complex z = g;
            bool ok = false;
            for (int it = 0; it < 12; ++it) {
                const detail::StepSample ss = detail::d_sample(cs, z, opts.transfer);
                if (std::abs(ss.Ddot) < 1e-13) break;
                const Complex step = (ss.D - target) / ss.Ddot;
                if (std::abs(step) > cell_cap) break;
                z -= step;
                if (std::abs(step) < 1e-12 * (1.0 + std::abs(z))) {
                    ok = true;
                    break;
                }
            }
            const double cell = std::max(box.width(), box.height()) / nd;
            if (ok && std::abs(z - g) < 2.0 * cell && box.contains(z, cell)) seeds.push_back({th, z, 0});
        }
    }
    std::sort(seeds.begin(), seeds.end(), [](const detail::Seed& a, const detail::Seed& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });

    std::vector<SpectralCurve> curves;
    auto trace_seed = [&](const detail::Seed& sd) {
        const double rad = 10.0 * opts.dedup_rel * (1.0 + std::abs(sd.lambda));
        if (detail::curve_covers(curves, sd.t, sd.lambda, rad)) return;
        SpectralCurve c;
        std::vector<CurvePoint> fwd, bwd;
        CurveEnd r_fwd = CurveEnd::BoxBoundary, r_bwd = CurveEnd::BoxBoundary;
        if (sd.dirs >= 0) detail::trace_one_direction(cs, opts, box, sd.t, sd.lambda, +1, fwd, r_fwd);
        if (sd.dirs <= 0) detail::trace_one_direction(cs, opts, box, sd.t, sd.lambda, -1, bwd, r_bwd);
        c.points.reserve(bwd.size() + 1 + fwd.size());
        for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) c.points.push_back(*it);
        c.points.push_back({sd.t, sd.lambda});
        for (const auto& p : fwd) c.points.push_back(p);
        // seeds pinned at a band edge start or end there by construction
        c.start_reason = sd.dirs > 0 ? CurveEnd::BandEdgeDPlus2 : r_bwd;
        c.end_reason = sd.dirs < 0 ? CurveEnd::BandEdgeDMinus2 : r_fwd;
        if (c.points.size() < 2) return;  // isolated spectrum cannot occur
        double max_im = 0.0;
        for (const auto& p : c.points) max_im = std::max(max_im, std::abs(p.lambda.imag()));
        c.is_real = max_im <= opts.real_tol;
        curves.push_back(std::move(c));
    };
    for (const auto& sd : seeds) trace_seed(sd);

    // canonical order, then drop curves mostly covered by earlier ones
    auto dedup = [&](std::vector<SpectralCurve> in) {
        for (auto& c : in)
            std::sort(c.points.begin(), c.points.end(),
                      [](const CurvePoint& a, const CurvePoint& b) { return a.t < b.t; });
        std::sort(in.begin(), in.end(), [](const SpectralCurve& a, const SpectralCurve& b) {
            if (a.points.size() != b.points.size()) return a.points.size() > b.points.size();
            const auto& pa = a.points.front();
            const auto& pb = b.points.front();
            if (pa.t != pb.t) return pa.t < pb.t;
            if (pa.lambda.real() != pb.lambda.real()) return pa.lambda.real() < pb.lambda.real();
            return pa.lambda.imag() < pb.lambda.imag();
        });
        std::vector<SpectralCurve> kept;
        for (auto& c : in) {
            std::size_t covered = 0;
            for (const auto& p : c.points)
                if (detail::curve_covers(kept, p.t, p.lambda,
                                         10.0 * opts.dedup_rel * (1.0 + std::abs(p.lambda))))
                    ++covered;
            if (c.points.empty() || covered * 10 >= c.points.size() * 9) continue;
            kept.push_back(std::move(c));
        }
        return kept;
    };
    std::vector<SpectralCurve> unique = dedup(curves);

    if (opts.verify_coverage) {
        // verification grid: bisect Im D sign changes along grid edges and
        // check every located spectral point against the traced curves
        const int nv = std::max(8, opts.verify_grid);
        std::vector<Complex> uncovered;
        auto check_point = [&](Complex z) {
            const detail::StepSample s = detail::d_sample(cs, z, opts.transfer);
            if (std::abs(s.D.imag()) > 1e-6) return;
            if (std::abs(s.D.real()) > 2.0 - 1e-4) return;  // band edges belong to real scans
            // curves stop at critical points by design; their neighborhoods
            // are owned by the critical-point classifier
            if (std::abs(s.Ddot) < 1e3 * opts.crit_rel * (1.0 + std::abs(z))) return;
            const double th = std::acos(std::clamp(s.D.real() / 2.0, -1.0, 1.0));
            const double rad = 1e-3 * (1.0 + std::abs(z));
            if (!detail::curve_covers(unique, th, z, rad)) uncovered.push_back(z);
        };
        auto imD = [&](Complex z) { return detail::d_sample(cs, z, opts.transfer).D.imag(); };
        for (int i = 0; i <= nv; ++i) {
            for (int j = 0; j <= nv; ++j) {
                const Complex z0(box.re_lo + box.width() * i / nv, box.im_lo + box.height() * j / nv);
                if (std::abs(z0.imag()) < 1e-9) continue;  // the real axis is handled below
                for (int dirn = 0; dirn < 2; ++dirn) {
                    const bool horiz = dirn == 0;
                    if (horiz && i == nv) continue;
                    if (!horiz && j == nv) continue;
                    const Complex z1 = horiz ? z0 + Complex(box.width() / nv, 0.0)
                                             : z0 + Complex(0.0, box.height() / nv);
                    if (z1.imag() * z0.imag() <= 0.0) continue;  // edge crosses the axis
                    double fa = imD(z0), fb = imD(z1);
                    if (fa == 0.0 || fa * fb >= 0.0) continue;
                    Complex a = z0, b = z1;
                    for (int it = 0; it < 40; ++it) {
                        const Complex m = 0.5 * (a + b);
                        const double fm = imD(m);
                        if (fa * fm <= 0.0) { b = m; fb = fm; }
                        else { a = m; fa = fm; }
                    }
                    check_point(0.5 * (a + b));
                }
            }
        }
        // real-axis segment of the box
        if (box.im_lo <= 0.0 && box.im_hi >= 0.0) {
            const int nr = 8 * nv;
            for (int i = 0; i <= nr; ++i) {
                const double x = box.re_lo + box.width() * i / nr;
                check_point(x);
            }
        }
        if (!uncovered.empty()) {
            // one reseeding round from the uncovered points themselves
            for (const Complex& z : uncovered) {
                const detail::StepSample s = detail::d_sample(cs, z, opts.transfer);
                const double th = std::acos(std::clamp(s.D.real() / 2.0, -1.0, 1.0));
                trace_seed({th, z, 0});
            }
            std::vector<Complex> still;
            for (const Complex& z : uncovered) {
                const detail::StepSample s = detail::d_sample(cs, z, opts.transfer);
                const double th = std::acos(std::clamp(s.D.real() / 2.0, -1.0, 1.0));
                if (!detail::curve_covers(curves, th, z, 1e-3 * (1.0 + std::abs(z))))
                    still.push_back(z);
            }
            if (!still.empty())
                throw SeedExhaustion("verification grid found spectrum not covered by any curve",
                                     still);
            unique = dedup(curves);
        }
    }
    return unique;
}

}  // namespace floquet
