#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <vector>

#include "floquet/errors.hpp"
#include "floquet/transfer.hpp"

namespace floquet {

struct Box {
    double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;

    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    double diag() const { return std::hypot(width(), height()); }
    Complex center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
    bool contains(Complex z, double pad = 0.0) const {
        return z.real() >= re_lo - pad && z.real() <= re_hi + pad && z.imag() >= im_lo - pad &&
               z.imag() <= im_hi + pad;
    }
    Box padded(double d) const { return {re_lo - d, re_hi + d, im_lo - d, im_hi + d}; }
};

/// Value and lambda-derivative of an analytic function at one point,
/// produced by a single transfer pass in all uses below.
struct FnSample {
    Complex f{};
    Complex fp{};
};

using AnalyticFn = std::function<FnSample(Complex)>;

namespace detail {

/// Thrown internally when a contour node sits too close to a root; the
/// caller re-jitters the contour and retries.
struct RootOnContour {
    Complex where;
};

struct PhaseWalker {
    const AnalyticFn& fn;
    double min_gap;          // required distance between contour and roots
    int max_depth = 44;
    double total = 0.0;      // accumulated argument change

    FnSample probe(Complex z) const {
        const FnSample s = fn(z);
        // first-order distance of the nearest root from the contour
        const double fp = std::abs(s.fp);
        if (fp > 0.0 && std::abs(s.f) / fp < min_gap) throw RootOnContour{z};
        if (s.f == Complex(0.0, 0.0)) throw RootOnContour{z};
        return s;
    }

    void edge(Complex za, const FnSample& fa, Complex zb, const FnSample& fb, int depth) {
        const double dphi = std::arg(fb.f / fa.f);
        const double ratio = std::abs(fb.f) / std::abs(fa.f);
        // measured endpoint args cannot see whole 2 pi wraps; bound the true
        // phase advance through |d log f| = |f'/f| at the endpoints
        const double rate = std::max(std::abs(fa.fp / fa.f), std::abs(fb.fp / fb.f));
        const double est = std::abs(zb - za) * rate;
        const bool resolved = std::abs(dphi) <= M_PI / 3.0 && ratio < 5.0 && ratio > 0.2 && est <= 1.0;
        if (resolved || depth >= max_depth) {
            total += dphi;
            return;
        }
        const Complex zm = 0.5 * (za + zb);
        const FnSample fm = probe(zm);
        edge(za, fa, zm, fm, depth + 1);
        edge(zm, fm, zb, fb, depth + 1);
    }

    double walk(const std::vector<Complex>& poly) {
        // a modest initial sampling of every edge keeps the recursion shallow
        std::vector<Complex> nodes;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Complex a = poly[i], b = poly[(i + 1) % poly.size()];
            for (int k = 0; k < 8; ++k) nodes.push_back(a + (b - a) * (static_cast<double>(k) / 8.0));
        }
        std::vector<FnSample> vals;
        vals.reserve(nodes.size());
        for (const Complex& z : nodes) vals.push_back(probe(z));
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t j = (i + 1) % nodes.size();
            edge(nodes[i], vals[i], nodes[j], vals[j], 0);
        }
        return total;
    }
};

inline int winding_from_phase(double total, const Box& where) {
    const double w = total / (2.0 * M_PI);
    const double r = std::round(w);
    if (std::abs(w - r) > 0.2)
        throw BoxCountUnstable("argument-principle phase did not close to an integer", where.re_lo,
                               where.re_hi, where.im_lo, where.im_hi);
    return static_cast<int>(r);
}

/// Deterministic jitter stream derived from the box geometry.
inline double box_hash_unit(const Box& b, std::uint64_t salt) {
    auto mix = [](std::uint64_t h, double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    };
    std::uint64_t h = salt;
    h = mix(h, b.re_lo);
    h = mix(h, b.re_hi);
    h = mix(h, b.im_lo);
    h = mix(h, b.im_hi);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return static_cast<double>(h % 1000000ull) / 1000000.0;
}

}  // namespace detail

namespace detail {

/// One phase-tracked walk around the rectangle; nullopt when a root sits
/// within min_gap of the boundary.
inline std::optional<int> try_count_box(const AnalyticFn& fn, const Box& b, double min_gap) {
    try {
        detail::PhaseWalker w{fn, min_gap};
        const std::vector<Complex> corners = {{b.re_lo, b.im_lo},
                                              {b.re_hi, b.im_lo},
                                              {b.re_hi, b.im_hi},
                                              {b.re_lo, b.im_hi}};
        return detail::winding_from_phase(w.walk(corners), b);
    } catch (const detail::RootOnContour&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Number of zeros (with multiplicity) of the analytic function inside the
/// rectangle, via phase tracking of the boundary argument. When a root sits
/// closer than min_gap to the boundary the rectangle is jittered outward a
/// few times before giving up; the box actually counted is written back.
inline int count_zeros_in_box(const AnalyticFn& fn, Box& box, double min_gap) {
    Box b = box;
    for (int attempt = 0; attempt < 6; ++attempt) {
        if (const auto n = detail::try_count_box(fn, b, min_gap)) {
            box = b;
            return *n;
        }
        const double pad = (2.0 + detail::box_hash_unit(b, attempt + 1)) * min_gap * (attempt + 1);
        b = b.padded(pad);
    }
    throw BoxCountUnstable("contour keeps hitting roots after repeated jitter", box.re_lo, box.re_hi,
                           box.im_lo, box.im_hi);
}

/// Zeros inside a circle, same phase-tracked counting.
inline int count_zeros_in_circle(const AnalyticFn& fn, Complex center, double radius, double min_gap) {
    const Box as_box{center.real() - radius, center.real() + radius, center.imag() - radius,
                     center.imag() + radius};
    for (int attempt = 0; attempt < 6; ++attempt) {
        try {
            detail::PhaseWalker w{fn, min_gap};
            std::vector<Complex> poly;
            const int n = 16;
            poly.reserve(n);
            for (int k = 0; k < n; ++k) {
                const double th = 2.0 * M_PI * k / n;
                poly.push_back(center + radius * Complex(std::cos(th), std::sin(th)));
            }
            return detail::winding_from_phase(w.walk(poly), as_box);
        } catch (const detail::RootOnContour&) {
            radius *= 1.0 + 0.13 * (attempt + 1);
        }
    }
    throw BoxCountUnstable("circle contour keeps hitting roots", as_box.re_lo, as_box.re_hi,
                           as_box.im_lo, as_box.im_hi);
}

struct NewtonResult {
    Complex lambda{};
    double residual = 0.0;  // |f| at the polished point
    bool converged = false;
    int iterations = 0;
};

/// Damped Newton iteration; multiplicity m > 1 restores quadratic
/// convergence at an m-fold zero. Steps larger than step_cap abort the
/// iteration: they mean the seed sits in a derivative valley and the next
/// evaluation would land absurdly far away.
inline NewtonResult newton_polish(const AnalyticFn& fn, Complex seed, int multiplicity = 1,
                                  double step_tol = 1e-13, int max_iter = 60,
                                  double step_cap = 1e4) {
    NewtonResult res;
    Complex z = seed;
    const double m = static_cast<double>(std::max(1, multiplicity));
    for (int it = 0; it < max_iter; ++it) {
        const FnSample s = fn(z);
        res.iterations = it + 1;
        if (s.fp == Complex(0.0, 0.0)) break;
        const Complex step = m * s.f / s.fp;
        if (std::abs(step) > step_cap) {
            res.lambda = z;
            res.residual = std::abs(s.f);
            return res;
        }
        z -= step;
        if (std::abs(step) < step_tol * (1.0 + std::abs(z))) {
            res.converged = true;
            break;
        }
    }
    res.lambda = z;
    res.residual = std::abs(fn(z).f);
    return res;
}

}  // namespace floquet
