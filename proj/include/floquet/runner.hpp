#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "floquet/classify.hpp"
#include "floquet/greens.hpp"
#include "floquet/json_io.hpp"
#include "floquet/spectrum.hpp"

namespace floquet {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kEngineName = "floquet";

enum class Command { Scan, Bands, Curves, Eigs, Classify, Resolve, Check, Trace };
enum class OutputFormat { Csv, Json };

struct RunConfig {
    Command command = Command::Check;
    std::string input_path;
    std::string output_path;  // empty writes to stdout
    double tol = 1e-10;

    // scan / curves / eigs boxes
    double re_lo = -1.0, re_hi = 1.0;
    double im_lo = 0.0, im_hi = 0.0;
    int n = 101;

    // bands / classify window
    double window_lo = -1.0, window_hi = 1.0;

    double t = 0.0;            // eigs
    Complex z{}, lambda{};     // resolve
    std::string g_path;        // resolve right-hand side CSV
    int seed_density = 24;     // curves
    int max_roots = 256;       // eigs
};

namespace detail {

inline std::string reason_name(CurveEnd r) {
    switch (r) {
        case CurveEnd::CriticalPoint: return "CriticalPoint";
        case CurveEnd::BandEdgeDPlus2: return "BandEdgeDPlus2";
        case CurveEnd::BandEdgeDMinus2: return "BandEdgeDMinus2";
        case CurveEnd::BoxBoundary: return "BoxBoundary";
    }
    return "?";
}

inline std::string interval_type_name(IntervalType t) {
    switch (t) {
        case IntervalType::Positive: return "Positive";
        case IntervalType::Negative: return "Negative";
        case IntervalType::MixedUnknown: return "MixedUnknown";
    }
    return "?";
}

inline std::string verdict_name(CriticalVerdict v) {
    switch (v) {
        case CriticalVerdict::Regular: return "Regular";
        case CriticalVerdict::Singular: return "Singular";
        case CriticalVerdict::NonSpectral: return "NonSpectral";
    }
    return "?";
}

inline void write_payload(const RunConfig& cfg, const std::string& payload) {
    if (cfg.output_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + cfg.output_path);
    out << payload;
}

inline SampledFunction read_sampled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sampled-function file: " + path);
    SampledFunction g;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, re, im = 0.0;
        if (!(row >> x >> re)) throw ParseError("malformed row in " + path + ": " + line);
        row >> im;
        g.grid.push_back(x);
        g.values.emplace_back(re, im);
    }
    if (g.grid.size() < 2) throw ParseError("sampled function needs at least two rows: " + path);
    return g;
}

inline std::string run_scan(const CoefficientSet& cs, const RunConfig& cfg) {
    const TransferOptions topts{cfg.tol};
    std::ostringstream out;
    out << "# " << kEngineName << " scan v" << kSchemaVersion << "\n";
    out << "# re_lambda,im_lambda,re_D,im_D,re_Ddot,im_Ddot,residual_cross_check\n";
    const int n = std::max(2, cfg.n);
    const bool flat = cfg.im_hi <= cfg.im_lo;
    const int nim = flat ? 1 : n;
    for (int j = 0; j < nim; ++j) {
        const double im = flat ? cfg.im_lo : cfg.im_lo + (cfg.im_hi - cfg.im_lo) * j / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double re = cfg.re_lo + (cfg.re_hi - cfg.re_lo) * i / (n - 1);
            const auto s = sample_discriminant(cs, {re, im}, topts);
            out << format_double(re) << ',' << format_double(im) << ','
                << format_double(s.D.real()) << ',' << format_double(s.D.imag()) << ','
                << format_double(s.Ddot.real()) << ',' << format_double(s.Ddot.imag()) << ','
                << format_double(s.residual_cross_check) << "\n";
        }
    }
    return out.str();
}

inline std::string run_bands(const CoefficientSet& cs, const RunConfig& cfg) {
    BandScanOptions opts;
    opts.transfer.tol = cfg.tol;
    const auto bands = real_bands(cs, cfg.window_lo, cfg.window_hi, opts);
    std::ostringstream out;
    out << "# " << kEngineName << " bands v" << kSchemaVersion << "\n";
    out << "# lo,hi,d_lo,d_hi,monotone\n";
    for (const auto& b : bands)
        out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << format_double(b.d_lo)
            << ',' << format_double(b.d_hi) << ',' << (b.monotone ? 1 : 0) << "\n";
    return out.str();
}

inline std::string run_curves(const CoefficientSet& cs, const RunConfig& cfg) {
    TraceOptions opts;
    opts.transfer.tol = cfg.tol;
    const Box box{cfg.re_lo, cfg.re_hi, cfg.im_lo, cfg.im_hi};
    const auto curves = trace_curves(cs, box, cfg.seed_density, opts);
    nlohmann::json j;
    j["schema"] = std::string(kEngineName) + "/curves/v" + std::to_string(kSchemaVersion);
    j["curves"] = nlohmann::json::array();
    for (const auto& c : curves) {
        nlohmann::json cj;
        cj["start_reason"] = reason_name(c.start_reason);
        cj["end_reason"] = reason_name(c.end_reason);
        cj["is_real"] = c.is_real;
        auto pts = nlohmann::json::array();
        for (const auto& p : c.points)
            pts.push_back({p.t, p.lambda.real(), p.lambda.imag()});
        cj["points"] = std::move(pts);
        j["curves"].push_back(std::move(cj));
    }
    return j.dump(2) + "\n";
}

inline std::string run_eigs(const CoefficientSet& cs, const RunConfig& cfg) {
    SpectrumOptions opts;
    opts.transfer.tol = cfg.tol;
    const Box box{cfg.re_lo, cfg.re_hi, cfg.im_lo, cfg.im_hi};
    const auto list = eigenvalues_in_box(cs, cfg.t, box, cfg.max_roots, opts);
    nlohmann::json j;
    j["schema"] = std::string(kEngineName) + "/eigs/v" + std::to_string(kSchemaVersion);
    j["t"] = list.t;
    j["box"] = {list.box.re_lo, list.box.re_hi, list.box.im_lo, list.box.im_hi};
    j["contour_count"] = list.contour_count;
    j["roots"] = nlohmann::json::array();
    for (const auto& r : list.roots)
        j["roots"].push_back({{"re", r.lambda.real()},
                              {"im", r.lambda.imag()},
                              {"multiplicity", r.multiplicity},
                              {"newton_residual", r.newton_residual}});
    return j.dump(2) + "\n";
}

inline std::string run_classify(const CoefficientSet& cs, const RunConfig& cfg) {
    ClassifyOptions opts;
    opts.transfer.tol = cfg.tol;
    nlohmann::json j;
    j["schema"] = std::string(kEngineName) + "/classify/v" + std::to_string(kSchemaVersion);

    j["intervals"] = nlohmann::json::array();
    for (const auto& iv : interval_partition(cs, cfg.window_lo, cfg.window_hi, opts))
        j["intervals"].push_back(
            {{"lo", iv.lo}, {"hi", iv.hi}, {"type", interval_type_name(iv.type)}});

    const double pad = std::max(1.0, 0.05 * (cfg.window_hi - cfg.window_lo));
    Box box{cfg.window_lo, cfg.window_hi, -pad, pad};
    j["critical_points"] = nlohmann::json::array();
    for (const auto& cp : critical_points(cs, box, opts)) {
        nlohmann::json cj{{"re", cp.lambda0.real()},
                          {"im", cp.lambda0.imag()},
                          {"t0", cp.t0},
                          {"D", cp.D0.real()},
                          {"Ddotdot", cp.Ddotdot0.real()},
                          {"psi_a", cp.psi_a.real()},
                          {"pphi_prime_a", cp.pphi_prime_a.real()},
                          {"verdict", verdict_name(cp.verdict)}};
        if (cp.verdict != CriticalVerdict::NonSpectral) {
            try {
                cj["diagnostic_exponent"] = singularity_diagnostic(cs, cp, {}, opts);
            } catch (const CurveMissing&) {
                // leave the exponent absent when no curve can be continued
            }
        }
        j["critical_points"].push_back(std::move(cj));
    }

    j["kappa"] = nlohmann::json::array();
    for (const double tt : {0.0, M_PI / 4, M_PI / 2, 3 * M_PI / 4, M_PI}) {
        const auto ns = negative_squares(cs, tt, opts);
        j["kappa"].push_back({{"t", tt},
                              {"kappa", ns.kappa},
                              {"lower_bound_used", ns.lower_bound_used},
                              {"kappa_star", ns.kappa_star}});
    }

    const auto dr = definiteness_radius(cs, opts);
    j["radii"] = {{"R0", dr.R0}, {"R_effective", dr.R_effective}};
    return j.dump(2) + "\n";
}

inline std::string run_trace(const CoefficientSet& cs, const RunConfig& cfg) {
    const auto tr = solve_trace(cs, cfg.lambda, std::max(2, cfg.n), TransferOptions{cfg.tol});
    std::ostringstream out;
    out << "# " << kEngineName << " trace v" << kSchemaVersion << "\n";
    out << "# x,re_phi,im_phi,re_pphi_prime,im_pphi_prime,re_psi,im_psi,re_ppsi_prime,im_ppsi_prime\n";
    for (std::size_t i = 0; i < tr.grid.size(); ++i) {
        out << format_double(tr.grid[i]);
        for (const Complex& v : tr.values[i])
            out << ',' << format_double(v.real()) << ',' << format_double(v.imag());
        out << "\n";
    }
    return out.str();
}

inline std::string run_resolve(const CoefficientSet& cs, const RunConfig& cfg) {
    ResolventRequest req;
    req.z = cfg.z;
    req.lambda = cfg.lambda;
    req.g = read_sampled_csv(cfg.g_path);
    const auto res = apply_resolvent(cs, req, TransferOptions{cfg.tol});
    std::ostringstream out;
    out << "# " << kEngineName << " resolve v" << kSchemaVersion << "\n";
    out << "# x,re_f,im_f\n";
    for (std::size_t i = 0; i < res.f.grid.size(); ++i)
        out << format_double(res.f.grid[i]) << ',' << format_double(res.f.values[i].real()) << ','
            << format_double(res.f.values[i].imag()) << "\n";
    return out.str();
}

inline std::string run_check(const CoefficientSet& cs, const ValidationReport& rep) {
    nlohmann::json j;
    j["schema"] = std::string(kEngineName) + "/check/v" + std::to_string(kSchemaVersion);
    j["valid"] = rep.ok();
    j["violations"] = nlohmann::json::array();
    for (const auto& v : rep.issues)
        j["violations"].push_back({{"segment", v.segment_index}, {"message", v.message}});
    if (rep.ok()) {
        const auto inf = infinity_condition(cs);
        j["infinity_condition"] = {{"holds", inf.holds}};
        auto wj = nlohmann::json::array();
        for (const auto& tp : inf.witnesses) {
            nlohmann::json t{{"location", tp.location},
                             {"is_one_simple", tp.is_one_simple},
                             {"p_bounded_near", tp.p_bounded_near}};
            if (tp.tau_plus) t["tau_plus"] = *tp.tau_plus;
            if (tp.tau_minus) t["tau_minus"] = *tp.tau_minus;
            wj.push_back(std::move(t));
        }
        j["infinity_condition"]["witnesses"] = std::move(wj);
        auto tj = nlohmann::json::array();
        for (const auto& tp : turning_points(cs)) {
            nlohmann::json t{{"location", tp.location},
                             {"is_one_simple", tp.is_one_simple},
                             {"p_bounded_near", tp.p_bounded_near}};
            if (tp.tau_plus) t["tau_plus"] = *tp.tau_plus;
            if (tp.tau_minus) t["tau_minus"] = *tp.tau_minus;
            tj.push_back(std::move(t));
        }
        j["turning_points"] = std::move(tj);
    }
    return j.dump(2) + "\n";
}

}  // namespace detail

/// Executes one batch command. Exit status: 0 success, 2 validation or
/// parse failure, 3 numerical failure; diagnostics go to stderr as JSON.
inline int run(const RunConfig& cfg) {
    try {
        const CoefficientSet cs = load_coefficient_set(cfg.input_path);
        const ValidationReport rep = validate(cs);
        if (cfg.command == Command::Check) {
            detail::write_payload(cfg, detail::run_check(cs, rep));
            return rep.ok() ? 0 : 2;
        }
        if (!rep.ok()) {
            nlohmann::json err{{"error", "ValidationFailure"}};
            err["violations"] = nlohmann::json::array();
            for (const auto& v : rep.issues)
                err["violations"].push_back({{"segment", v.segment_index}, {"message", v.message}});
            std::cerr << err.dump() << "\n";
            return 2;
        }
        std::string payload;
        switch (cfg.command) {
            case Command::Scan: payload = detail::run_scan(cs, cfg); break;
            case Command::Bands: payload = detail::run_bands(cs, cfg); break;
            case Command::Curves: payload = detail::run_curves(cs, cfg); break;
            case Command::Eigs: payload = detail::run_eigs(cs, cfg); break;
            case Command::Classify: payload = detail::run_classify(cs, cfg); break;
            case Command::Resolve: payload = detail::run_resolve(cs, cfg); break;
            case Command::Trace: payload = detail::run_trace(cs, cfg); break;
            case Command::Check: break;  // handled above
        }
        detail::write_payload(cfg, payload);
        return 0;
    } catch (const ParseError& e) {
        std::cerr << nlohmann::json{{"error", "ParseError"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << nlohmann::json{{"error", "NumericalFailure"}, {"message", e.what()}}.dump()
                  << "\n";
        return 3;
    }
}

}  // namespace floquet
