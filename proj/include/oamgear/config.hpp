#pragma once

// JSON run configuration. Angles in the file are degrees.
//
//   { "l": 2, "theta0_deg": 0, "theta_deg": 45, "beta": 2.1,
//     "detect_mode": "dominant", "grid": {"n": 512, "extent": 2.5},
//     "annulus": {"r_inner": 1.0, "r_outer": 2.0} }

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pipeline.hpp"

namespace oamgear {

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::config, "field '" + field + "': " + what);
}

inline double number_field(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) field_error(field, "expected a number");
    return j.get<double>();
}

inline int integer_field(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_integer()) field_error(field, "expected an integer");
    return j.get<int>();
}

template <class Fn>
void for_each_field(const nlohmann::json& obj, const std::string& where, Fn&& fn) {
    if (!obj.is_object()) field_error(where, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) fn(it.key(), it.value());
}

}  // namespace detail

inline DetectMode parse_detect_mode(const std::string& s) {
    if (s == "dominant") return DetectMode::dominant;
    if (s == "full") return DetectMode::full;
    detail::field_error("detect_mode", "expected \"dominant\" or \"full\", got \"" + s + "\"");
}

/// Applies the keys present in `text` on top of `base`.
inline SimulationConfig parse_config(const std::string& text, SimulationConfig base = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::config, "JSON syntax error at " + detail::line_column(text, e.byte) + ": " + e.what());
    }
    SimulationConfig cfg = base;
    detail::for_each_field(doc, "<root>", [&](const std::string& key, const nlohmann::json& v) {
        if (key == "l") {
            cfg.l = OamIndex(detail::integer_field(v, key));
        } else if (key == "theta0_deg") {
            cfg.theta0 = to_radians(detail::number_field(v, key));
        } else if (key == "theta_deg") {
            cfg.theta = to_radians(detail::number_field(v, key));
        } else if (key == "beta") {
            cfg.beta = detail::number_field(v, key);
            if (!(cfg.beta > 0.0)) detail::field_error(key, "must be positive");
        } else if (key == "detect_mode") {
            if (!v.is_string()) detail::field_error(key, "expected a string");
            cfg.detect_mode = parse_detect_mode(v.get<std::string>());
        } else if (key == "grid") {
            detail::for_each_field(v, key, [&](const std::string& k, const nlohmann::json& g) {
                if (k == "n") {
                    cfg.n = detail::integer_field(g, "grid.n");
                    if (cfg.n < 32) detail::field_error("grid.n", "must be at least 32");
                } else if (k == "extent") {
                    cfg.extent = detail::number_field(g, "grid.extent");
                    if (!(cfg.extent > 0.0)) detail::field_error("grid.extent", "must be positive");
                } else {
                    detail::field_error("grid." + k, "unknown key");
                }
            });
        } else if (key == "annulus") {
            Annulus a;
            bool has_inner = false;
            bool has_outer = false;
            detail::for_each_field(v, key, [&](const std::string& k, const nlohmann::json& g) {
                if (k == "r_inner") {
                    a.r_inner = detail::number_field(g, "annulus.r_inner");
                    has_inner = true;
                } else if (k == "r_outer") {
                    a.r_outer = detail::number_field(g, "annulus.r_outer");
                    has_outer = true;
                } else {
                    detail::field_error("annulus." + k, "unknown key");
                }
            });
            if (!has_inner || !has_outer) detail::field_error(key, "needs both r_inner and r_outer");
            if (!(a.r_inner >= 0.0 && a.r_outer > a.r_inner))
                detail::field_error(key, "needs 0 <= r_inner < r_outer");
            cfg.annulus = a;
        } else {
            detail::field_error(key, "unknown key");
        }
    });
    return cfg;
}

inline SimulationConfig load_config(const std::string& path, SimulationConfig base = {}) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io_failure, "cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), base);
}

}  // namespace oamgear
