// Acceptance suite for the spectral engine: every check prints one
// PASS/FAIL line; the exit status is the number of failed criteria.
//
// The coefficient sets used throughout:
//   hill_free       w = p = 1, q = 0,  a = pi   (definite reference)
//   square_well     w = +-1 blocks,  q = 0, a = 2 (indefinite, J-nonnegative)
//   hill_qm1        w = p = 1, q = -1, a = pi
//   square_well_qm1 w = +-1 blocks,  q = -1, a = 2 (non-real spectrum)

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "floquet/floquet.hpp"

using namespace floquet;

namespace {

int g_failures = 0;

void report(int idx, bool ok, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %02d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, what.c_str(),
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

double hill_D(double lam, double a) {
    return lam >= 0.0 ? 2.0 * std::cos(a * std::sqrt(lam)) : 2.0 * std::cosh(a * std::sqrt(-lam));
}

double well_D(double lam) {
    const double r = std::sqrt(std::abs(lam));
    return 2.0 * std::cos(r) * std::cosh(r);
}

CoefficientSet load(const std::string& name) {
    return load_coefficient_set(std::string(FLOQUET_DATA_DIR) + "/" + name + ".json");
}

}  // namespace

int main() {
    const CoefficientSet hill = load("hill_free");
    const CoefficientSet well = load("square_well");
    const CoefficientSet hill_qm1 = load("hill_qm1");
    const CoefficientSet well_qm1 = load("square_well_qm1");

    // 1. definite discriminant oracle
    {
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            const double lam = -1.0 + 51.0 * k / 499.0;
            worst = std::max(worst, std::abs(eval_D(hill, lam).real() - hill_D(lam, M_PI)));
        }
        report(1, worst <= 1e-8, "discriminant oracle, definite cell", "max dev " + fmt(worst));
    }

    // 2. indefinite discriminant oracle plus the even symmetry of this set
    {
        double worst = 0.0, worst_sym = 0.0;
        for (int k = 0; k < 500; ++k) {
            const double lam = -60.0 + 120.0 * k / 499.0;
            worst = std::max(worst, std::abs(eval_D(well, lam).real() - well_D(lam)));
            worst_sym = std::max(worst_sym,
                                 std::abs(eval_D(well, lam).real() - eval_D(well, -lam).real()));
        }
        report(2, worst <= 1e-8 && worst_sym <= 1e-10, "discriminant oracle, indefinite well",
               "max dev " + fmt(worst) + ", symmetry " + fmt(worst_sym));
    }

    // 3. Wronskian across the complex grid; the determinant inherits the
    //    product scale ||L||^2, so the bound is taken relative to it
    {
        double worst = 0.0;
        for (const auto* cs : {&hill, &well}) {
            for (int i = 0; i < 20; ++i) {
                for (int j = 0; j < 20; ++j) {
                    const Complex lam(-50.0 + 100.0 * i / 19.0, -20.0 + 40.0 * j / 19.0);
                    const auto tr = transfer(*cs, lam);
                    const double scale = std::max(1.0, tr.L.norm());
                    worst = std::max(worst, std::abs(tr.L.det() - 1.0) / (scale * scale));
                }
            }
        }
        report(3, worst <= 1e-10, "Wronskian det L = 1 on the 20x20 grid",
               "max normalized dev " + fmt(worst));
    }

    // 4. derivative identity against central differences, 200 random points
    //    per set in [-15, 45] x [-6, 6]i
    {
        std::mt19937_64 rng(420241);
        std::uniform_real_distribution<double> re(-15.0, 45.0), im(-6.0, 6.0);
        double worst = 0.0;
        for (const auto* cs : {&hill, &well}) {
            for (int k = 0; k < 200; ++k) {
                const Complex lam(re(rng), im(rng));
                const Complex dq = eval_Ddot_quadrature(*cs, lam);
                const Complex fd = eval_Ddot_numdiff(*cs, lam);
                worst = std::max(worst, std::abs(dq - fd) / (1.0 + std::abs(dq)));
            }
        }
        report(4, worst <= 1e-6, "quadrature Ddot vs central differences",
               "max rel mismatch " + fmt(worst));
    }

    // 5. periodic eigenvalues of the free cell
    {
        bool ok = true;
        std::string detail;
        try {
            const auto list = eigenvalues_in_box(hill, 0.0, {-1.0, 40.0, -1.0, 1.0});
            ok = list.contour_count == 7 && list.roots.size() == 4;
            const double expect[4] = {0.0, 4.0, 16.0, 36.0};
            const int mult[4] = {1, 2, 2, 2};
            double worst = 0.0;
            for (int k = 0; ok && k < 4; ++k) {
                worst = std::max(worst, std::abs(list.roots[k].lambda - expect[k]));
                ok = ok && std::abs(list.roots[k].lambda - expect[k]) <= 1e-8 &&
                     list.roots[k].multiplicity == mult[k];
            }
            detail = "count " + std::to_string(list.contour_count) + ", max root dev " + fmt(worst);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(5, ok, "eigenvalues {0 s, 4 d, 16 d, 36 d} at t = 0", detail);
    }

    // 6. critical-point classification on both reference sets
    {
        bool ok = true;
        std::string detail;
        try {
            const auto cw = critical_points(well, {-1.0, 1.0, -0.5, 0.5});
            const auto ch = critical_points(hill, {3.0, 5.0, -0.5, 0.5});
            ok = cw.size() == 1 && ch.size() == 1;
            if (ok) {
                ok = cw[0].verdict == CriticalVerdict::Singular &&
                     std::abs(cw[0].psi_a.real() - 2.0) <= 1e-10 &&
                     ch[0].verdict == CriticalVerdict::Regular &&
                     std::abs(ch[0].psi_a) <= 1e-8 && std::abs(ch[0].pphi_prime_a) <= 1e-8 &&
                     std::abs(ch[0].Ddotdot0) > 1e-3;
                detail = "well psi_a dev " + fmt(std::abs(cw[0].psi_a.real() - 2.0)) +
                         ", |Dddot(4)| " + fmt(std::abs(ch[0].Ddotdot0));
            } else {
                detail = "unexpected critical point counts";
            }
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(6, ok, "singular at 0 (well), regular at 4 (free cell)", detail);
    }

    // 7. integrability diagnostic cross-validates the verdicts
    {
        bool ok = true;
        std::string detail;
        try {
            const auto cw = critical_points(well, {-1.0, 1.0, -0.5, 0.5});
            const auto ch = critical_points(hill, {3.0, 5.0, -0.5, 0.5});
            const double beta_s = singularity_diagnostic(well, cw.at(0));
            const double beta_r = singularity_diagnostic(hill, ch.at(0));
            ok = beta_s > 0.5 && beta_r <= 0.0;
            detail = "beta(singular) " + fmt(beta_s) + ", beta(regular) " + fmt(beta_r);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(7, ok, "divergence exponent separates the verdicts", detail);
    }

    // 8. sign types in the outermost bands of the scanned window, plus
    //    agreement of the two routes wherever both apply
    {
        bool ok = true;
        std::string detail;
        int disagreements = 0;
        try {
            const auto bands = real_bands(well, -45.0, 45.0);
            double pos_lo = 0.0, pos_hi = 0.0, neg_lo = 0.0, neg_hi = 0.0;
            for (const auto& b : bands) {
                if (b.lo > 0.0 && b.hi > pos_hi) { pos_lo = b.lo; pos_hi = b.hi; }
                if (b.hi < 0.0 && b.lo < neg_lo) { neg_lo = b.lo; neg_hi = b.hi; }
            }
            ok = pos_hi > 0.0 && neg_lo < 0.0;
            for (int s = 1; ok && s <= 16; ++s) {
                const double xp = pos_lo + (pos_hi - pos_lo) * s / 17.0;
                const double xn = neg_lo + (neg_hi - neg_lo) * s / 17.0;
                ok = ok && sign_type(well, xp).verdict == SignType::PositiveType;
                ok = ok && sign_type(well, xn).verdict == SignType::NegativeType;
            }
            for (double lam : {0.3, 1.7, 5.5, 11.0, 20.0})
                ok = ok && sign_type(hill, lam).verdict == SignType::PositiveType;
            // route agreement over every sampled spectral point of the well
            ClassifyOptions copts;
            for (const auto& b : bands) {
                for (int s = 1; s <= 16; ++s) {
                    const double lam = b.lo + (b.hi - b.lo) * s / 17.0;
                    const auto tr = transfer(well, lam);
                    const double thr = copts.decision_rel * (1.0 + std::abs(lam));
                    const double psi = tr.psi_a().real(), pphi = tr.pphi_prime_a().real();
                    const double ddot = eval_Ddot_quadrature(tr).real();
                    if (std::abs(psi) < thr || std::abs(pphi) < thr || std::abs(ddot) < thr)
                        continue;
                    const bool pos_psi = ddot * psi < 0.0;
                    const bool pos_pphi = ddot * pphi > 0.0;
                    if (pos_psi != pos_pphi) ++disagreements;
                }
            }
            ok = ok && disagreements == 0;
            detail = "route disagreements " + std::to_string(disagreements);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(8, ok, "sign types carry the axis orientation", detail);
    }

    // 9. negative squares
    {
        bool ok = true;
        std::string detail = "";
        try {
            for (int k = 0; k < 20 && ok; ++k) {
                const double t = M_PI * k / 19.0;
                ok = ok && negative_squares(hill, t).kappa == 0 &&
                     negative_squares(well, t).kappa == 0;
            }
            const auto ns0 = negative_squares(hill_qm1, 0.0);
            ok = ok && ns0.kappa >= 1;
            int worst_gap = 0;
            for (int k = 0; k < 20; ++k) {
                const double t = M_PI * k / 19.0;
                for (const auto* cs : {&hill_qm1, &well_qm1}) {
                    const auto ns = negative_squares(*cs, t);
                    ok = ok && ns.kappa >= ns.kappa_star - 1 && ns.kappa <= ns.kappa_star;
                    worst_gap = std::max(worst_gap, ns.kappa_star - ns.kappa);
                }
            }
            detail = "kappa(0) of the q=-1 cell " + std::to_string(ns0.kappa) +
                     ", max kappa*-kappa " + std::to_string(worst_gap);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(9, ok, "negative squares and the kappa band", detail);
    }

    // 10. non-real spectrum: existence, conjugation symmetry, bounded disk.
    //     The q = -c well enters the non-real regime at c* = 0+: bisect the
    //     threshold and confirm the bundled c = 1 sits inside the regime.
    {
        bool ok = true;
        std::string detail;
        try {
            auto has_nonreal = [&](double c) {
                CoefficientSet cs = well;
                cs.segments[0].q_form = ConstantForm{-c};
                cs.segments[1].q_form = ConstantForm{-c};
                const auto eigs = eigenvalues_in_box(cs, 0.0, {-12.0, 12.0, -12.0, 12.0});
                for (const auto& r : eigs.roots)
                    if (std::abs(r.lambda.imag()) > 1e-6) return true;
                return false;
            };
            double lo = 0.0, hi = 1.0;  // A(0) real at c=0, non-real pair at c=1
            ok = !has_nonreal(lo) && has_nonreal(hi);
            for (int it = 0; it < 12 && ok; ++it) {
                const double mid = 0.5 * (lo + hi);
                (has_nonreal(mid) ? hi : lo) = mid;
            }
            const double c_star = hi;
            ok = ok && c_star <= 1.0;

            auto nonreal_extent = [&](double half) {
                const auto curves =
                    trace_curves(well_qm1, {-half, half, -half, half}, 12);
                std::vector<Complex> pts;
                for (const auto& c : curves)
                    if (!c.is_real)
                        for (const auto& p : c.points) pts.push_back(p.lambda);
                return pts;
            };
            const auto pts = nonreal_extent(8.0);
            ok = ok && !pts.empty();
            double haus = 0.0, rmax = 0.0;
            for (const Complex& z : pts) {
                double best = 1e300;
                for (const Complex& w : pts) best = std::min(best, std::abs(std::conj(z) - w));
                haus = std::max(haus, best);
                rmax = std::max(rmax, std::abs(z));
            }
            ok = ok && haus <= 1e-6;
            const auto pts2 = nonreal_extent(16.0);  // doubled box
            double rmax2 = 0.0;
            for (const Complex& z : pts2) rmax2 = std::max(rmax2, std::abs(z));
            ok = ok && std::abs(rmax2 - rmax) <= 1e-3 * (1.0 + rmax);
            detail = "threshold c* " + fmt(c_star) + ", Hausdorff " + fmt(haus) + ", extent " +
                     fmt(rmax) + " vs doubled " + fmt(rmax2);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(10, ok, "non-real curves: existence, symmetry, bounded disk", detail);
    }

    // 11. resolvent checks
    {
        bool ok = true;
        std::string detail;
        try {
            // boundary conditions under a random right-hand side
            std::mt19937_64 rng(77);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            double worst_bc = 0.0;
            for (const auto* cs : {&hill, &well}) {
                ResolventRequest req;
                req.z = 0.9;
                req.lambda = {0.9, 1.1};
                const int n = 800;
                for (int k = 0; k <= n; ++k) {
                    req.g.grid.push_back(cs->period_a * k / n);
                    req.g.values.push_back({u(rng), u(rng)});
                }
                const auto res = apply_resolvent(*cs, req);
                double fmax = 0.0;
                for (const Complex& v : res.f.values) fmax = std::max(fmax, std::abs(v));
                const Complex rot = std::exp(Complex(0.0, 1.0) * req.z);
                worst_bc = std::max(worst_bc,
                                    std::abs(res.f.values.back() - rot * res.f.values.front()) / fmax);
                worst_bc = std::max(worst_bc, std::abs(res.pf_prime_a - rot * res.pf_prime_0) /
                                                  std::max(1.0, std::abs(res.pf_prime_0)));
            }
            ok = worst_bc <= 1e-7;

            // diagonal action on a monodromy eigenfunction of the well
            const double t = 1.1;
            const auto eigs = eigenvalues_in_box(well, t, {-20.0, 20.0, -1.0, 1.0});
            const Complex mu = eigs.roots.front().lambda;
            FrameEvaluator ev(well, mu, {}, well.period_a / 512.0);
            const Complex e = std::exp(Complex(0.0, t));
            const Mat2 L = ev.result().L;
            const Complex c10 = L.a22 - e, c11 = -L.a21;
            const Complex c20 = -L.a12, c21 = L.a11 - e;
            Complex v0 = c10, v1 = c11;
            if (std::abs(c20) + std::abs(c21) > std::abs(c10) + std::abs(c11)) { v0 = c20; v1 = c21; }
            ResolventRequest req;
            req.z = t;
            req.lambda = mu - 2.7;
            const int n = 2048;
            double gmax = 0.0;
            for (int k = 0; k <= n; ++k) {
                const double x = well.period_a * k / n;
                const Mat2 fr = ev.frame(x);
                req.g.grid.push_back(x);
                req.g.values.push_back(v0 * fr.a11 + v1 * fr.a12);
                gmax = std::max(gmax, std::abs(req.g.values.back()));
            }
            const auto res = apply_resolvent(well, req);
            double worst_eig = 0.0;
            for (std::size_t k = 0; k < res.f.values.size(); ++k)
                worst_eig = std::max(
                    worst_eig, std::abs(res.f.values[k] - req.g.values[k] / (mu - req.lambda)) / gmax);
            ok = ok && worst_eig <= 1e-6;

            // (A(0) + 1)^{-1} 1 = 1 for the free cell
            ResolventRequest one;
            one.z = 0.0;
            one.lambda = -1.0;
            for (int k = 0; k <= 512; ++k) {
                one.g.grid.push_back(hill.period_a * k / 512);
                one.g.values.push_back(1.0);
            }
            const auto res1 = apply_resolvent(hill, one);
            double worst_one = 0.0;
            for (const Complex& v : res1.f.values) worst_one = std::max(worst_one, std::abs(v - 1.0));
            ok = ok && worst_one <= 1e-8;
            detail = "bc " + fmt(worst_bc) + ", eigen " + fmt(worst_eig) + ", unit " + fmt(worst_one);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(11, ok, "resolvent: boundary conditions, diagonal action, unit check", detail);
    }

    // 12. coefficient checker for the infinity condition
    {
        bool ok = true;
        std::string detail;
        try {
            ok = infinity_condition(well).holds;
            CoefficientSet bad;
            bad.period_a = 2.0;
            bad.segments = {
                {0.0, 1.0, ConstantForm{-1.0}, ConstantForm{1.0}, ConstantForm{0.0}},
                {1.0, 2.0, PowerForm{{0.0, 1.0}, -0.5, 1.0}, ConstantForm{1.0}, ConstantForm{0.0}}};
            const auto inf = infinity_condition(bad);
            ok = ok && !inf.holds && !inf.witnesses.empty();
            detail = "well holds, rho(x0) = 0 counterexample rejected with " +
                     std::to_string(inf.witnesses.size()) + " witness(es)";
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        report(12, ok, "infinity-condition checker", detail);
    }

    if (g_failures == 0) std::printf("all 12 acceptance criteria passed\n");
    else std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures;
}
