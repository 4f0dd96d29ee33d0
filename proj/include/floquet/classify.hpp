#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "floquet/spectrum.hpp"

namespace floquet {

enum class SignType { PositiveType, NegativeType, Undecided };
enum class SignRoute { PsiRoute, PPhiRoute };

struct SignTypeVerdict {
    double lambda = 0.0;
    double t = 0.0;          // fiber parameter arccos(D/2)
    SignType verdict = SignType::Undecided;
    SignRoute route = SignRoute::PsiRoute;
    double witness = 0.0;    // Ddot psi(a) or Ddot (p phi')(a), by route
};

struct ClassifyOptions {
    TransferOptions transfer;
    double decision_rel = 1e-8;   // |psi|, |p phi'|, |Ddot| thresholds
    double spectral_tol = 1e-7;   // |D| <= 2 + tol counts as spectral
    double ddot2_rel = 1e-6;      // |Dddot| threshold in the regular test
};

/// Sign type of a real spectral point from the route with the stronger
/// boundary value: positive type iff Ddot psi(a) < 0, equivalently
/// Ddot (p phi')(a) > 0. Near-critical and off-spectrum points are errors.
inline SignTypeVerdict sign_type(const CoefficientSet& cs, double lambda,
                                 const ClassifyOptions& opts = {}) {
    const TransferResult tr = transfer(cs, lambda, opts.transfer);
    const double d = eval_D(tr).real();
    if (std::abs(d) > 2.0 + opts.spectral_tol)
        throw NotSpectral("D outside [-2, 2]; the point is not in the spectrum");
    const double ddot = eval_Ddot_quadrature(tr).real();
    const double thr = opts.decision_rel * (1.0 + std::abs(lambda));
    if (std::abs(ddot) < thr)
        throw NearCritical("Ddot below threshold; classify through critical_points");

    SignTypeVerdict v;
    v.lambda = lambda;
    v.t = std::acos(std::clamp(d / 2.0, -1.0, 1.0));
    const double psi_a = tr.psi_a().real();
    const double pphi_a = tr.pphi_prime_a().real();
    if (std::abs(psi_a) >= std::abs(pphi_a)) {
        v.route = SignRoute::PsiRoute;
        v.witness = ddot * psi_a;
        if (std::abs(psi_a) <= thr) return v;  // Undecided
        v.verdict = v.witness < 0.0 ? SignType::PositiveType : SignType::NegativeType;
    } else {
        v.route = SignRoute::PPhiRoute;
        v.witness = ddot * pphi_a;
        if (std::abs(pphi_a) <= thr) return v;
        v.verdict = v.witness > 0.0 ? SignType::PositiveType : SignType::NegativeType;
    }
    return v;
}

enum class IntervalType { Positive, Negative, MixedUnknown };

struct IntervalLabel {
    double lo = 0.0, hi = 0.0;
    IntervalType type = IntervalType::MixedUnknown;
    bool has_spectrum = true;
};

namespace detail {

/// Real zeros of Ddot in the window, by dense scan and bisection.
inline std::vector<double> real_critical_lambdas(const CoefficientSet& cs, double lo, double hi,
                                                 const TransferOptions& topts, int n = 2048) {
    std::vector<double> out;
    double xp = lo, fp = eval_Ddot_quadrature(cs, lo, topts).real();
    for (int k = 1; k <= n; ++k) {
        const double x = lo + (hi - lo) * k / n;
        const double f = eval_Ddot_quadrature(cs, x, topts).real();
        if (fp == 0.0) out.push_back(xp);
        else if (fp * f < 0.0) {
            double a = xp, b = x, fa = fp;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = eval_Ddot_quadrature(cs, m, topts).real();
                if (fa * fm <= 0.0) { b = m; } else { a = m; fa = fm; }
            }
            out.push_back(0.5 * (a + b));
        }
        xp = x;
        fp = f;
    }
    return out;
}

}  // namespace detail

/// Cuts the window at real critical points and sign-type changes; every
/// piece is labeled by sampling sign_type over its spectral bands.
inline std::vector<IntervalLabel> interval_partition(const CoefficientSet& cs, double lo, double hi,
                                                     const ClassifyOptions& opts = {}) {
    if (!(lo < hi)) throw Error("interval_partition needs lo < hi");
    BandScanOptions bopts;
    bopts.transfer = opts.transfer;
    const auto bands = real_bands(cs, lo, hi, bopts);
    const auto crits = detail::real_critical_lambdas(cs, lo, hi, opts.transfer);

    // pieces: band fragments between critical points, classified by sampling
    struct Piece {
        double lo, hi;
        IntervalType type;
    };
    std::vector<Piece> pieces;
    for (const auto& b : bands) {
        std::vector<double> cuts = {b.lo, b.hi};
        for (double c : crits)
            if (c > b.lo + 1e-10 && c < b.hi - 1e-10) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            int pos = 0, neg = 0;
            for (int s = 1; s <= 24; ++s) {
                const double x = cuts[k] + (cuts[k + 1] - cuts[k]) * s / 25.0;
                try {
                    const auto v = sign_type(cs, x, opts);
                    if (v.verdict == SignType::PositiveType) ++pos;
                    if (v.verdict == SignType::NegativeType) ++neg;
                } catch (const Error&) {
                    // near-critical or marginally off-band samples carry no vote
                }
            }
            IntervalType ty = IntervalType::MixedUnknown;
            if (pos > 0 && neg == 0) ty = IntervalType::Positive;
            if (neg > 0 && pos == 0) ty = IntervalType::Negative;
            pieces.push_back({cuts[k], cuts[k + 1], ty});
        }
    }
    if (pieces.empty()) return {{lo, hi, IntervalType::MixedUnknown, false}};

    // assemble window-covering intervals: boundaries at critical cuts or at
    // gap midpoints, merging neighbours of equal type
    std::vector<IntervalLabel> out;
    double cursor = lo;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        double right;
        if (k + 1 < pieces.size())
            right = (std::abs(pieces[k].hi - pieces[k + 1].lo) < 1e-9 * (1.0 + std::abs(pieces[k].hi)))
                        ? pieces[k].hi
                        : 0.5 * (pieces[k].hi + pieces[k + 1].lo);
        else
            right = hi;
        if (!out.empty() && out.back().type == pieces[k].type) out.back().hi = right;
        else out.push_back({cursor, right, pieces[k].type, true});
        cursor = right;
    }
    out.back().hi = hi;
    return out;
}

enum class CriticalVerdict { Regular, Singular, NonSpectral };

struct CriticalPointReport {
    Complex lambda0{};
    double t0 = 0.0;  // arccos(D/2) when spectral
    Complex D0{}, Ddot0{}, Ddotdot0{};
    Complex psi_a{}, pphi_prime_a{};
    CriticalVerdict verdict = CriticalVerdict::NonSpectral;
    std::optional<double> diagnostic_exponent;
};

/// Zeros of Ddot in the box, classified through the boundary-value test:
/// a spectral critical point is regular iff D = +-2, psi(a) and (p phi')(a)
/// vanish and Dddot does not.
inline std::vector<CriticalPointReport> critical_points(const CoefficientSet& cs, Box box,
                                                        const ClassifyOptions& opts = {}) {
    // contour function: Ddot and a cheap central-difference second derivative
    const auto fn = [&cs, &opts](Complex lam) {
        const double h = 1e-6 * (1.0 + std::abs(lam));
        const Complex d0 = eval_Ddot_quadrature(cs, lam, opts.transfer);
        const Complex dp = eval_Ddot_quadrature(cs, lam + h, opts.transfer);
        const Complex dm = eval_Ddot_quadrature(cs, lam - h, opts.transfer);
        return FnSample{d0, (dp - dm) / (2.0 * h)};
    };
    SpectrumOptions sopts;
    sopts.transfer = opts.transfer;

    Box counted = box;
    const int count = count_zeros_in_box(fn, counted, sopts.min_gap);
    std::vector<RootRecord> roots;
    detail::collect_roots(fn, counted, count, sopts, roots);

    std::vector<CriticalPointReport> out;
    for (const auto& r : roots) {
        CriticalPointReport rep;
        rep.lambda0 = r.lambda;
        const TransferResult tr = transfer(cs, r.lambda, opts.transfer);
        rep.D0 = eval_D(tr);
        rep.Ddot0 = eval_Ddot_quadrature(tr);
        rep.Ddotdot0 = eval_Ddotdot(cs, r.lambda, opts.transfer);
        rep.psi_a = tr.psi_a();
        rep.pphi_prime_a = tr.pphi_prime_a();
        const double scale = 1.0 + std::abs(r.lambda);
        const bool spectral = std::abs(rep.D0.imag()) <= opts.spectral_tol * scale &&
                              std::abs(rep.D0.real()) <= 2.0 + opts.spectral_tol;
        if (!spectral) {
            rep.verdict = CriticalVerdict::NonSpectral;
            out.push_back(rep);
            continue;
        }
        rep.t0 = std::acos(std::clamp(rep.D0.real() / 2.0, -1.0, 1.0));
        const double thr = opts.decision_rel * scale;
        const bool at_edge = std::abs(std::abs(rep.D0.real()) - 2.0) <= opts.spectral_tol;
        const bool entries_vanish = std::abs(rep.psi_a) <= thr && std::abs(rep.pphi_prime_a) <= thr;
        const bool curvature = std::abs(rep.Ddotdot0) > opts.ddot2_rel * scale;
        rep.verdict = (at_edge && entries_vanish && curvature) ? CriticalVerdict::Regular
                                                               : CriticalVerdict::Singular;
        out.push_back(rep);
    }
    std::sort(out.begin(), out.end(), [](const CriticalPointReport& a, const CriticalPointReport& b) {
        if (a.lambda0.real() != b.lambda0.real()) return a.lambda0.real() < b.lambda0.real();
        return a.lambda0.imag() < b.lambda0.imag();
    });
    return out;
}

struct DiagnosticWindow {
    double eps_lo = 1e-4;
    double eps_hi = 1e-2;
    int samples = 120;
};

namespace detail {

/// Continuation samples lambda(t0 + dir*eps) of the adjacent curve, on a
/// log-spaced eps grid. Empty when no curve can be continued on that side.
struct CurveSamples {
    std::vector<double> eps;
    std::vector<Complex> lambda;
};

inline CurveSamples continue_adjacent(const CoefficientSet& cs, Complex lambda0, double t0, int dir,
                                      const DiagnosticWindow& win, const TransferOptions& topts) {
    CurveSamples out;
    const double scale = 1.0 + std::abs(lambda0);
    // find a first curve point at the outer edge of the window
    const double eps0 = win.eps_hi;
    const double t1 = t0 + dir * eps0;
    if (t1 <= 0.0 || t1 >= M_PI) return out;
    Complex start{};
    bool found = false;
    for (const double r : {3e-2, 1e-2, 1e-1}) {
        for (int q = 0; q < 8 && !found; ++q) {
            const double th = 2.0 * M_PI * q / 8.0;
            Complex z = lambda0 + r * scale * Complex(std::cos(th), std::sin(th));
            const Complex target = 2.0 * std::cos(t1);
            for (int it = 0; it < 40; ++it) {
                const auto s = d_sample(cs, z, topts);
                if (std::abs(s.Ddot) < 1e-14) break;
                const Complex step = (s.D - target) / s.Ddot;
                if (std::abs(step) > scale) break;
                z -= step;
                if (std::abs(step) < 1e-12 * (1.0 + std::abs(z))) {
                    if (std::abs(z - lambda0) < 0.5 * scale) {
                        start = z;
                        found = true;
                    }
                    break;
                }
            }
        }
        if (found) break;
    }
    if (!found) return out;

    // march inward on a log grid, predictor-corrector per sample
    Complex lam = start;
    const double ratio = std::pow(win.eps_lo / win.eps_hi, 1.0 / (win.samples - 1));
    double eps = eps0;
    for (int k = 0; k < win.samples; ++k) {
        const double te = t0 + dir * eps;
        const Complex target = 2.0 * std::cos(te);
        Complex z = lam;
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            const auto s = d_sample(cs, z, topts);
            if (std::abs(s.Ddot) < 1e-16) break;
            const Complex step = (s.D - target) / s.Ddot;
            if (std::abs(step) > scale) break;
            z -= step;
            if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) {
                ok = true;
                break;
            }
        }
        if (!ok) break;
        lam = z;
        out.eps.push_back(eps);
        out.lambda.push_back(lam);
        eps *= ratio;
    }
    return out;
}

inline double fit_slope(const std::vector<double>& logx, const std::vector<double>& logy) {
    const double n = static_cast<double>(logx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logx.size(); ++i) {
        sx += logx[i];
        sy += logy[i];
        sxx += logx[i] * logx[i];
        sxy += logx[i] * logy[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// Divergence exponent of the windowed integral of |f/Ddot|^2 along the
/// adjacent spectral curve, where f runs over the entries of
/// L(lambda(t)) - e^{-it}. The integrand is fitted as (t - t0)^s, which makes
/// the integral over [t0+eps, t0+eps0] scale like eps^{-beta} with
/// beta = -(1+s); beta <= 0 means every entry stays square-integrable.
inline double singularity_diagnostic(const CoefficientSet& cs, const CriticalPointReport& report,
                                     const DiagnosticWindow& win = {},
                                     const ClassifyOptions& opts = {}) {
    if (report.verdict == CriticalVerdict::NonSpectral)
        throw CurveMissing("no spectral curve is adjacent to a non-spectral point");

    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int dir : {+1, -1}) {
        const auto samples =
            detail::continue_adjacent(cs, report.lambda0, report.t0, dir, win, opts.transfer);
        if (samples.eps.size() < 8) continue;
        any = true;
        // per-entry log-log fit of |entry/Ddot|^2 against (t - t0)
        std::vector<double> logx;
        std::array<std::vector<double>, 4> logy;
        for (std::size_t k = 0; k < samples.eps.size(); ++k) {
            const double te = report.t0 + dir * samples.eps[k];
            const TransferResult tr = transfer(cs, samples.lambda[k], opts.transfer);
            const Complex ddot = eval_Ddot_quadrature(tr);
            if (std::abs(ddot) == 0.0) continue;
            const Complex e = std::exp(Complex(0.0, -te));
            const Complex entries[4] = {tr.L.a11 - e, tr.L.a12, tr.L.a21, tr.L.a22 - e};
            logx.push_back(std::log(samples.eps[k]));
            for (int j = 0; j < 4; ++j) {
                const double v = std::abs(entries[j] / ddot);
                logy[j].push_back(2.0 * std::log(std::max(v, 1e-150)));
            }
        }
        if (logx.size() < 8) continue;
        for (int j = 0; j < 4; ++j) {
            const double s = detail::fit_slope(logx, logy[j]);
            best = std::max(best, -(1.0 + s));
        }
    }
    if (!any) throw CurveMissing("no adjacent spectral curve could be continued");
    return best;
}

struct NegativeSquares {
    double t = 0.0;
    int kappa = 0;
    double lower_bound_used = 0.0;
    int kappa_star = 0;  // max of kappa(0), kappa(pi)
};

namespace detail {

inline int kappa_at(const CoefficientSet& cs_pos, double lb, double t, const SpectrumOptions& sopts) {
    Box box{lb, 1e-9, -0.5, 0.5};
    const auto eigs = eigenvalues_in_box(cs_pos, t, box, 512, sopts);
    int kappa = 0;
    for (const auto& r : eigs.roots)
        if (r.lambda.real() < -1e-8 * (1.0 + std::abs(lb))) kappa += r.multiplicity;
    return kappa;
}

}  // namespace detail

/// kappa(t): negative eigenvalues of the definite companion operator,
/// counted as roots of its discriminant D+ = 2 cos t inside the certified
/// window (lower_bound_used, 0).
inline NegativeSquares negative_squares(const CoefficientSet& cs, double t,
                                        const ClassifyOptions& opts = {}) {
    const CoefficientSet pos = definitized(cs);
    const double lb = q_over_w_lower_bound(cs);
    SpectrumOptions sopts;
    sopts.transfer = opts.transfer;
    NegativeSquares res;
    res.t = t;
    res.lower_bound_used = lb;
    res.kappa = detail::kappa_at(pos, lb, t, sopts);
    const int k0 = (t == 0.0) ? res.kappa : detail::kappa_at(pos, lb, 0.0, sopts);
    const int kpi = (t == M_PI) ? res.kappa : detail::kappa_at(pos, lb, M_PI, sopts);
    res.kappa_star = std::max(k0, kpi);
    return res;
}

struct DefinitenessRadius {
    double R0 = 0.0;         // sqrt(2) max |non-real eigenvalue of A(0), A(pi)|
    double R_effective = 0.0;
};

/// R0 from the non-real eigenvalues of A(0) and A(pi) inside a box grown
/// until the non-real set stabilizes; R_effective is the empirical radius
/// outside which every sampled real spectral point carries the orientation
/// of its half axis and no traced non-real point appears.
inline DefinitenessRadius definiteness_radius(const CoefficientSet& cs,
                                              const ClassifyOptions& opts = {}) {
    SpectrumOptions sopts;
    sopts.transfer = opts.transfer;
    DefinitenessRadius out;

    std::vector<Complex> nonreal;
    for (double t : {0.0, M_PI}) {
        std::vector<Complex> found, prev;
        double b = 12.0;
        for (int round = 0; round < 6; ++round) {
            found.clear();
            Box box{-b, b, -b, b};
            const auto eigs = eigenvalues_in_box(cs, t, box, 512, sopts);
            for (const auto& r : eigs.roots)
                if (std::abs(r.lambda.imag()) > 1e-7 * (1.0 + std::abs(r.lambda)))
                    for (int m = 0; m < r.multiplicity; ++m) found.push_back(r.lambda);
            if (round > 0 && found.size() == prev.size()) break;
            prev = found;
            b *= 2.0;
        }
        nonreal.insert(nonreal.end(), found.begin(), found.end());
    }
    double rmax = 0.0;
    for (const Complex& z : nonreal) rmax = std::max(rmax, std::abs(z));
    out.R0 = std::sqrt(2.0) * rmax;

    // empirical radius: non-real curve extent plus the orientation scan.
    // With real edge spectra the whole spectrum is real and tracing is moot.
    const double w = std::max(2.0 * out.R0, 0.0) + 25.0;
    BandScanOptions bopts;
    bopts.transfer = opts.transfer;
    double viol = 0.0;
    for (const Complex& z : nonreal) viol = std::max(viol, std::abs(z));
    if (!nonreal.empty()) {
        TraceOptions topts;
        topts.transfer = opts.transfer;
        topts.verify_coverage = false;
        const double b = std::max(2.0 * out.R0, 5.0);
        for (const auto& c : trace_curves(cs, {-b, b, -b, b}, 12, topts))
            if (!c.is_real)
                for (const auto& p : c.points) viol = std::max(viol, std::abs(p.lambda));
    }
    auto wrong_at = [&](double x) {
        try {
            const auto v = sign_type(cs, x, opts);
            return (x > 0.0 && v.verdict == SignType::NegativeType) ||
                   (x < 0.0 && v.verdict == SignType::PositiveType);
        } catch (const Error&) {
            return false;  // near-critical samples do not move the radius
        }
    };
    for (const auto& b : real_bands(cs, -w, w, bopts)) {
        for (int s = 1; s <= 32; ++s) {
            const double x = b.lo + (b.hi - b.lo) * s / 33.0;
            if (!wrong_at(x)) continue;
            // the radius is set by the far boundary of the wrongly oriented
            // region, not by the sample that happened to land in it
            const double edge = x > 0.0 ? b.hi : b.lo;
            double in = x, out_b = edge;
            if (wrong_at(edge - 1e-9 * (edge - x))) {
                viol = std::max(viol, std::abs(edge));
            } else {
                for (int it = 0; it < 40; ++it) {
                    const double mid = 0.5 * (in + out_b);
                    (wrong_at(mid) ? in : out_b) = mid;
                }
                viol = std::max(viol, std::abs(in));
            }
        }
    }
    out.R_effective = viol;
    return out;
}

/// Relative mismatch of the eigenfunction identity
/// psi(a) [f_l, f_lbar]_a = -f_l(0) conj(f_lbar(0)) Ddot(lambda), with both
/// eigenfunctions built from adjugate columns of the monodromy matrix.
inline double verify_eigen_identity(const CoefficientSet& cs, double t, Complex lambda,
                                    const ClassifyOptions& opts = {}) {
    const TransferResult tr = transfer(cs, lambda, opts.transfer);
    const Complex mu = std::exp(Complex(0.0, t));

    auto kernel_vector = [&](Complex eigval, Complex& v0, Complex& v1) {
        const Mat2 m{tr.L.a11 - eigval, tr.L.a12, tr.L.a21, tr.L.a22 - eigval};
        // adjugate columns span the kernel of a singular 2x2 matrix
        const Complex c10 = m.a22, c11 = -m.a21;
        const Complex c20 = -m.a12, c21 = m.a11;
        const double n1 = std::abs(c10) + std::abs(c11);
        const double n2 = std::abs(c20) + std::abs(c21);
        const double scale = std::max(1.0, tr.L.norm());
        if (std::max(n1, n2) < 1e-10 * scale) return false;  // diagonal monodromy
        if (n1 >= n2) { v0 = c10 / n1; v1 = c11 / n1; }
        else { v0 = c20 / n2; v1 = c21 / n2; }
        return true;
    };

    Complex a0, a1, b0, b1;
    const bool ok_a = kernel_vector(mu, a0, a1);
    const bool ok_b = kernel_vector(std::conj(mu), b0, b1);
    if (!ok_a || !ok_b) return 0.0;  // both sides vanish identically
    const double na = std::abs(a0) + std::abs(a1), nb = std::abs(b0) + std::abs(b1);
    if (na < 1e-6 || nb < 1e-6)
        throw DegenerateEigenvector("monodromy eigenvector numerically ambiguous");

    const Complex bracket =
        a0 * b0 * tr.Q_phiphi + (a0 * b1 + a1 * b0) * tr.Q_phipsi + a1 * b1 * tr.Q_psipsi;
    const Complex lhs = tr.psi_a() * bracket;
    const Complex rhs = -a0 * b0 * eval_Ddot_quadrature(tr);
    return std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}

}  // namespace floquet
