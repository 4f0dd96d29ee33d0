#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "floquet/discriminant.hpp"
#include "floquet/transfer.hpp"

namespace floquet {

struct SampledFunction {
    std::vector<double> grid;     // increasing x in [0, a]
    std::vector<Complex> values;
};

struct ResolventRequest {
    Complex z{};       // Floquet parameter
    Complex lambda{};
    SampledFunction g;  // right-hand side, interpolated linearly between samples
};

struct ResolventResult {
    SampledFunction f;
    Complex pf_prime_0{};  // (p f')(0) from the kernel's derivative representation
    Complex pf_prime_a{};
};

namespace detail {

struct KernelParts {
    Mat2 M;      // (L - e^{-iz}) / d
    Complex d;   // 2 cos z - D
};

inline KernelParts kernel_parts(const TransferResult& tr, Complex z) {
    KernelParts kp;
    kp.d = 2.0 * std::cos(z) - eval_D(tr);
    if (std::abs(kp.d) <= 1e-10)
        throw ResolventPole("2 cos z - D(lambda) vanishes; the resolvent does not exist");
    const Complex e = std::exp(Complex(0.0, -1.0) * z);
    kp.M = {(tr.L.a11 - e) / kp.d, tr.L.a12 / kp.d, tr.L.a21 / kp.d, (tr.L.a22 - e) / kp.d};
    return kp;
}

}  // namespace detail

/// Resolvent kernel G_lambda(z, x, y) evaluated from a shared frame
/// evaluator: Psi(x)^T ((L - e^{-iz})/d + 1_{y<=x}) J Psi(y) with
/// J = [[0, 1], [-1, 0]].
inline Complex green_kernel(const FrameEvaluator& ev, Complex z, double x, double y) {
    const auto kp = detail::kernel_parts(ev.result(), z);
    const Mat2 fx = ev.frame(x), fy = ev.frame(y);
    const Complex phix = fx.a11, psix = fx.a12;
    const Complex phiy = fy.a11, psiy = fy.a12;
    Mat2 m = kp.M;
    if (y <= x) {
        m.a11 += 1.0;
        m.a22 += 1.0;
    }
    // J Psi(y) = (psi(y), -phi(y))
    const Complex v0 = m.a11 * psiy - m.a12 * phiy;
    const Complex v1 = m.a21 * psiy - m.a22 * phiy;
    return phix * v0 + psix * v1;
}

inline Complex green_kernel(const CoefficientSet& cs, Complex z, Complex lambda, double x, double y,
                            const TransferOptions& opts = {}) {
    FrameEvaluator ev(cs, lambda, opts, cs.period_a / 512.0);
    return green_kernel(ev, z, x, y);
}

/// Applies (A(z) - lambda)^{-1} to the sampled right-hand side by composite
/// Gauss quadrature of the kernel representation, split exactly at y = x
/// through the running prefix integral. One trace pass serves every x.
inline ResolventResult apply_resolvent(const CoefficientSet& cs, const ResolventRequest& req,
                                       const TransferOptions& opts = {}) {
    const auto& g = req.g;
    if (g.grid.size() < 2 || g.grid.size() != g.values.size())
        throw Error("resolvent right-hand side needs a grid with matching values");
    if (std::abs(g.grid.front()) > 1e-9 * cs.period_a ||
        std::abs(g.grid.back() - cs.period_a) > 1e-9 * cs.period_a)
        throw Error("resolvent right-hand side must span the full period cell [0, a]");
    FrameEvaluator ev(cs, req.lambda, opts, cs.period_a / 512.0);
    const auto kp = detail::kernel_parts(ev.result(), req.z);

    // quadrature intervals: g grid merged with the segment breakpoints,
    // because w jumps there
    std::vector<double> cuts = g.grid;
    for (const auto& s : cs.segments) cuts.push_back(s.x_hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double u, double v) { return std::abs(u - v) < 1e-13 * cs.period_a; }),
               cuts.end());

    auto g_at = [&](double y) {
        const auto it = std::upper_bound(g.grid.begin(), g.grid.end(), y);
        std::size_t hi = static_cast<std::size_t>(it - g.grid.begin());
        if (hi == 0) hi = 1;
        if (hi >= g.grid.size()) hi = g.grid.size() - 1;
        const std::size_t lo = hi - 1;
        const double span = g.grid[hi] - g.grid[lo];
        const double u = span > 0.0 ? (y - g.grid[lo]) / span : 0.0;
        return (1.0 - u) * g.values[lo] + u * g.values[hi];
    };

    // prefix integrals of Psi(y) g(y) w(y) dy at every g grid point
    std::vector<Complex> w_phi(g.grid.size(), 0.0), w_psi(g.grid.size(), 0.0);
    Complex acc_phi = 0.0, acc_psi = 0.0;
    std::size_t gi = 0;
    while (gi < g.grid.size() && g.grid[gi] <= cuts.front() + 1e-13 * cs.period_a) {
        w_phi[gi] = acc_phi;
        w_psi[gi] = acc_psi;
        ++gi;
    }
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        detail::gl16(cuts[k], cuts[k + 1], [&](double y, double wt) {
            const Mat2 fy = ev.frame(y);
            const Complex gw = g_at(y) * eval_w(cs, y);
            acc_phi += wt * fy.a11 * gw;
            acc_psi += wt * fy.a12 * gw;
        });
        while (gi < g.grid.size() && g.grid[gi] <= cuts[k + 1] + 1e-13 * cs.period_a) {
            w_phi[gi] = acc_phi;
            w_psi[gi] = acc_psi;
            ++gi;
        }
    }
    const Complex v_phi = acc_phi, v_psi = acc_psi;  // full-cell integrals

    // f(x) = Psi(x)^T M J V + Psi(x)^T J W(x), with J V = (V_psi, -V_phi)
    const Complex mv0 = kp.M.a11 * v_psi - kp.M.a12 * v_phi;
    const Complex mv1 = kp.M.a21 * v_psi - kp.M.a22 * v_phi;

    ResolventResult out;
    out.f.grid = g.grid;
    out.f.values.resize(g.grid.size());
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
        const Mat2 fx = ev.frame(g.grid[i]);
        const Complex local = fx.a11 * w_psi[i] - fx.a12 * w_phi[i];
        out.f.values[i] = fx.a11 * mv0 + fx.a12 * mv1 + local;
    }
    // derivative rows use (p phi', p psi') in place of (phi, psi)
    const Mat2 f0 = ev.frame(g.grid.front());
    const Mat2 fa = ev.frame(g.grid.back());
    out.pf_prime_0 = f0.a21 * mv0 + f0.a22 * mv1 + (f0.a21 * w_psi.front() - f0.a22 * w_phi.front());
    out.pf_prime_a = fa.a21 * mv0 + fa.a22 * mv1 + (fa.a21 * w_psi.back() - fa.a22 * w_phi.back());
    return out;
}

}  // namespace floquet
