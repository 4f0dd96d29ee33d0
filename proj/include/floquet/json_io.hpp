#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "floquet/coefficients.hpp"
#include "floquet/errors.hpp"

namespace floquet {

/// Malformed coefficient documents; the message points at the offending key.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Shortest decimal representation that round-trips the IEEE double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline SegmentForm parse_form(const nlohmann::json& j, const std::string& where, double seg_lo) {
    if (!j.is_object()) throw ParseError(where + ": form must be an object");
    if (j.contains("const")) {
        if (!j["const"].is_number()) throw ParseError(where + ".const: expected a number");
        return ConstantForm{j["const"].get<double>()};
    }
    if (j.contains("poly")) {
        if (!j["poly"].is_array() || j["poly"].empty())
            throw ParseError(where + ".poly: expected a non-empty coefficient array");
        PolynomialForm p;
        p.origin = seg_lo;
        for (const auto& c : j["poly"]) {
            if (!c.is_number()) throw ParseError(where + ".poly: coefficients must be numbers");
            p.coeffs.push_back(c.get<double>());
        }
        return p;
    }
    if (j.contains("power")) {
        const auto& pj = j["power"];
        for (const char* key : {"rho", "tau", "anchor"})
            if (!pj.contains(key)) throw ParseError(where + ".power: missing \"" + key + "\"");
        PowerForm p;
        if (!pj["rho"].is_array() || pj["rho"].empty())
            throw ParseError(where + ".power.rho: expected a non-empty coefficient array");
        for (const auto& c : pj["rho"]) p.rho.push_back(c.get<double>());
        p.tau = pj["tau"].get<double>();
        p.anchor = pj["anchor"].get<double>();
        return p;
    }
    throw ParseError(where + ": form needs one of \"const\", \"poly\", \"power\"");
}

}  // namespace detail

inline CoefficientSet coefficient_set_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("document root must be an object");
    if (!j.contains("period")) throw ParseError("missing \"period\"");
    if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
        throw ParseError("\"segments\" must be a non-empty array");

    CoefficientSet cs;
    cs.period_a = j["period"].get<double>();
    int idx = 0;
    for (const auto& sj : j["segments"]) {
        const std::string where = "segments[" + std::to_string(idx) + "]";
        for (const char* key : {"lo", "hi", "w", "p", "q"})
            if (!sj.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
        Segment s;
        s.x_lo = sj["lo"].get<double>();
        s.x_hi = sj["hi"].get<double>();
        s.w_form = detail::parse_form(sj["w"], where + ".w", s.x_lo);
        s.p_form = detail::parse_form(sj["p"], where + ".p", s.x_lo);
        s.q_form = detail::parse_form(sj["q"], where + ".q", s.x_lo);
        cs.segments.push_back(std::move(s));
        ++idx;
    }
    return cs;
}

inline CoefficientSet load_coefficient_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open coefficient file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    return coefficient_set_from_json(j);
}

inline CoefficientSet coefficient_set_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return coefficient_set_from_json(j);
}

}  // namespace floquet
