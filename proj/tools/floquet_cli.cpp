// Batch front-end for the periodic Sturm-Liouville spectral engine.
// Subcommands mirror the library operations; outputs are deterministic
// CSV/JSON with a version header.

#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floquet/floquet.hpp"

namespace {

floquet::Complex parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral engine for periodic Sturm-Liouville expressions with indefinite weight"};
    app.require_subcommand(1);

    floquet::RunConfig cfg;
    if (const char* env_tol = std::getenv("FLOQUET_TOL")) cfg.tol = std::stod(env_tol);

    std::vector<double> re_range, im_range, window, box;
    std::string z_text = "0", lambda_text = "0";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", cfg.input_path, "coefficient-set JSON file")->required();
        sub->add_option("-o,--out", cfg.output_path, "output file (default: stdout)");
        sub->add_option("--tol", cfg.tol, "integrator tolerance");
    };

    auto* scan = app.add_subcommand("scan", "sample D and Ddot on a lambda grid (CSV)");
    add_common(scan);
    scan->add_option("--re", re_range, "real-axis range a,b")->delimiter(',')->expected(2)->required();
    scan->add_option("--im", im_range, "imaginary-axis range c,d")->delimiter(',')->expected(2);
    scan->add_option("--n", cfg.n, "grid points per axis");

    auto* bands = app.add_subcommand("bands", "real spectral bands in a window (CSV)");
    add_common(bands);
    bands->add_option("--window", window, "window lo,hi")->delimiter(',')->expected(2)->required();

    auto* curves = app.add_subcommand("curves", "trace spectral curves in a complex box (JSON)");
    add_common(curves);
    curves->add_option("--box", box, "box reLo,reHi,imLo,imHi")->delimiter(',')->expected(4)->required();
    curves->add_option("--seeds", cfg.seed_density, "seed grid density per axis");

    auto* eigs = app.add_subcommand("eigs", "eigenvalues of A(t) in a complex box (JSON)");
    add_common(eigs);
    eigs->add_option("--t", cfg.t, "Floquet parameter t in [0, pi]")->required();
    eigs->add_option("--box", box, "box reLo,reHi,imLo,imHi")->delimiter(',')->expected(4)->required();
    eigs->add_option("--max-roots", cfg.max_roots, "abort above this root count");

    auto* classify = app.add_subcommand("classify", "sign types, critical points, kappa, radii (JSON)");
    add_common(classify);
    classify->add_option("--window", window, "window lo,hi")->delimiter(',')->expected(2)->required();

    auto* resolve = app.add_subcommand("resolve", "apply the resolvent to a sampled function (CSV)");
    add_common(resolve);
    resolve->add_option("--z", z_text, "Floquet parameter z (re or re,im)")->required();
    resolve->add_option("--lambda", lambda_text, "spectral parameter lambda (re or re,im)")->required();
    resolve->add_option("--g", cfg.g_path, "right-hand side CSV (x, re g, im g)")->required();

    auto* check = app.add_subcommand("check", "validate coefficients and test the infinity condition");
    add_common(check);

    auto* trace = app.add_subcommand("trace", "sample the fundamental system across the cell (CSV)");
    add_common(trace);
    trace->add_option("--lambda", lambda_text, "spectral parameter lambda (re or re,im)")->required();
    trace->add_option("--n", cfg.n, "number of grid points");

    CLI11_PARSE(app, argc, argv);

    if (scan->parsed()) {
        cfg.command = floquet::Command::Scan;
        cfg.re_lo = re_range[0];
        cfg.re_hi = re_range[1];
        if (im_range.size() == 2) {
            cfg.im_lo = im_range[0];
            cfg.im_hi = im_range[1];
        }
    } else if (bands->parsed()) {
        cfg.command = floquet::Command::Bands;
        cfg.window_lo = window[0];
        cfg.window_hi = window[1];
    } else if (curves->parsed()) {
        cfg.command = floquet::Command::Curves;
        cfg.re_lo = box[0];
        cfg.re_hi = box[1];
        cfg.im_lo = box[2];
        cfg.im_hi = box[3];
    } else if (eigs->parsed()) {
        cfg.command = floquet::Command::Eigs;
        cfg.re_lo = box[0];
        cfg.re_hi = box[1];
        cfg.im_lo = box[2];
        cfg.im_hi = box[3];
    } else if (classify->parsed()) {
        cfg.command = floquet::Command::Classify;
        cfg.window_lo = window[0];
        cfg.window_hi = window[1];
    } else if (resolve->parsed()) {
        cfg.command = floquet::Command::Resolve;
        cfg.z = parse_complex(z_text);
        cfg.lambda = parse_complex(lambda_text);
    } else if (check->parsed()) {
        cfg.command = floquet::Command::Check;
    } else if (trace->parsed()) {
        cfg.command = floquet::Command::Trace;
        cfg.lambda = parse_complex(lambda_text);
    }
    return floquet::run(cfg);
}
