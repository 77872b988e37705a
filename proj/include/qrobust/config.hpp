#pragma once

/**
 * Sweep configuration.
 *
 * A config file is a JSON document with nested sections; every key is optional:
 *
 *   {
 *     "model":        { "alpha1": 1.0, "alpha2": [1.0, 0.0], "delta1": 0.1, "delta2": -0.1,
 *                       "s1": 1.0, "s2": 1.0, "gamma1_r": 0.0, "gamma2_r": 0.0,
 *                       "gamma1_phi": 0.0, "gamma2_phi": 0.0 },
 *     "reference":    { ...model keys... },          // steady-state fidelity reference
 *     "perturbation": "S7",
 *     "grid":         { "lo": 0.001, "hi": 1.0, "count": 61, "scale": "log" },  // or "lo:hi:count[:log]"
 *     "measures":     ["purity", "E_C", "E_F", "G", "T_norm0", "z1", "z1_bound"],
 *     "output":       { "path": "s7.csv", "format": "csv" },
 *     "allow_range_override": false,
 *     "workers": 0,                                   // 0 = hardware concurrency
 *     "sweeps": [ { "perturbation": "S2", "grid": "-0.2:0.2:81" }, ... ]   // concordance runs
 *   }
 *
 * Complex Rabi frequencies are given as [re, im]. Unknown keys are rejected.
 */

#include "qrobust/errors.hpp"
#include "qrobust/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qrobust {

inline constexpr std::string_view kVersion = "0.1.0";

enum class GridScale { Linear, Log };

struct Grid {
    double lo{0.0};
    double hi{1.0};
    int count{2};
    GridScale scale{GridScale::Linear};

    /// Throws ConfigError unless count >= 2, lo < hi, and lo > 0 for log grids.
    void validate() const {
        if (count < 2) throw ConfigError("grid: count must be >= 2, got " + std::to_string(count));
        if (!(lo < hi)) throw ConfigError("grid: lo must be < hi");
        if (scale == GridScale::Log && !(lo > 0.0)) throw ConfigError("grid: log grids require lo > 0");
    }

    [[nodiscard]] std::vector<double> points() const {
        validate();
        std::vector<double> out(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const double t = static_cast<double>(k) / (count - 1);
            out[static_cast<std::size_t>(k)] =
                scale == GridScale::Linear ? lo + (hi - lo) * t
                                           : std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * t);
        }
        out.front() = lo;
        out.back() = hi;
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Parses "lo:hi:count" or "lo:hi:count:log".
inline Grid parse_grid(std::string_view text) {
    std::vector<std::string> parts;
    std::string current;
    for (char ch : text) {
        if (ch == ':') {
            parts.push_back(current);
            current.clear();
        } else {
            current += ch;
        }
    }
    parts.push_back(current);
    if (parts.size() != 3 && parts.size() != 4)
        throw ConfigError("grid '" + std::string(text) + "': expected lo:hi:count[:log]");
    Grid g;
    try {
        std::size_t used = 0;
        g.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("lo");
        g.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("hi");
        g.count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("count");
    } catch (const std::logic_error&) {
        throw ConfigError("grid '" + std::string(text) + "': malformed number");
    }
    if (parts.size() == 4) {
        if (parts[3] == "log") g.scale = GridScale::Log;
        else if (parts[3] == "lin" || parts[3] == "linear") g.scale = GridScale::Linear;
        else throw ConfigError("grid '" + std::string(text) + "': unknown scale '" + parts[3] + "'");
    }
    g.validate();
    return g;
}

/// 61 log-spaced points over [1e-3, 1] for the dissipative structures, 81 linear points
/// over the admissible range otherwise.
inline Grid default_grid(PerturbationId id) {
    if (id == PerturbationId::S7 || id == PerturbationId::S9) return {1e-3, 1.0, 61, GridScale::Log};
    const auto range = perturbation(id).delta_range;
    return {range.lo, range.hi, 81, GridScale::Linear};
}

enum class OutputFormat { Csv, Json };

inline constexpr std::array<std::string_view, 7> kMeasureColumns = {"purity", "E_C", "E_F", "G",
                                                                    "T_norm0", "z1", "z1_bound"};

struct SweepSpec {
    ModelParams model;
    PerturbationId perturbation{PerturbationId::S2};
    Grid grid;
    std::vector<std::string> measures{kMeasureColumns.begin(), kMeasureColumns.end()};
    std::string output_path;  ///< empty = standard output
    OutputFormat format{OutputFormat::Csv};
    bool allow_range_override{false};
    int workers{0};
};

struct SweepEntry {
    PerturbationId perturbation;
    std::optional<Grid> grid;
};

/// Parsed config file; unset sections stay empty so command-line flags can fill them.
struct Config {
    ModelParams model;
    std::optional<ModelParams> reference;
    std::optional<PerturbationId> perturbation;
    std::optional<Grid> grid;
    std::optional<std::vector<std::string>> measures;
    std::optional<std::string> output_path;
    std::optional<OutputFormat> format;
    bool allow_range_override{false};
    std::optional<int> workers;
    std::vector<SweepEntry> sweeps;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("config field '" + where + (where.empty() ? "" : ".") + it.key() + "': unknown key");
    }
}

inline double get_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError("config field '" + field + "': expected a number");
    return v.get<double>();
}

inline cplx get_complex(const json& v, const std::string& field) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("config field '" + field + "': expected a number or [re, im]");
}

inline ModelParams parse_model(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config field '" + where + "': expected an object");
    reject_unknown_keys(obj,
                        {"alpha1", "alpha2", "delta1", "delta2", "s1", "s2", "gamma1_r", "gamma2_r", "gamma1_phi",
                         "gamma2_phi"},
                        where);
    ModelParams p = ModelParams::bare();
    auto num = [&](const char* key, double& out) {
        if (obj.contains(key)) out = get_number(obj[key], where + "." + key);
    };
    if (obj.contains("alpha1")) p.alpha1 = get_complex(obj["alpha1"], where + ".alpha1");
    if (obj.contains("alpha2")) p.alpha2 = get_complex(obj["alpha2"], where + ".alpha2");
    num("delta1", p.delta1);
    num("delta2", p.delta2);
    num("s1", p.s1);
    num("s2", p.s2);
    num("gamma1_r", p.gamma1_r);
    num("gamma2_r", p.gamma2_r);
    num("gamma1_phi", p.gamma1_phi);
    num("gamma2_phi", p.gamma2_phi);
    try {
        validate(p);
    } catch (const InvalidArgument& e) {
        throw ConfigError("config field '" + where + "': " + e.what());
    }
    return p;
}

inline PerturbationId parse_perturbation_field(const json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigError("config field '" + field + "': expected one of S2, S4, S5, S7, S9, S10");
    const auto id = parse_perturbation_id(v.get<std::string>());
    if (!id) throw ConfigError("config field '" + field + "': unknown perturbation '" + v.get<std::string>() + "'");
    return *id;
}

inline Grid parse_grid_field(const json& v, const std::string& field) {
    try {
        if (v.is_string()) return parse_grid(v.get<std::string>());
        if (!v.is_object()) throw ConfigError("expected an object or \"lo:hi:count[:log]\"");
        reject_unknown_keys(v, {"lo", "hi", "count", "scale"}, field);
        Grid g;
        if (!v.contains("lo") || !v.contains("hi") || !v.contains("count"))
            throw ConfigError("lo, hi and count are required");
        g.lo = get_number(v["lo"], field + ".lo");
        g.hi = get_number(v["hi"], field + ".hi");
        if (!v["count"].is_number_integer()) throw ConfigError("count must be an integer");
        g.count = v["count"].get<int>();
        if (v.contains("scale")) {
            const auto& s = v["scale"];
            if (s == "log") g.scale = GridScale::Log;
            else if (s == "linear") g.scale = GridScale::Linear;
            else throw ConfigError("scale must be \"linear\" or \"log\"");
        }
        g.validate();
        return g;
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind("config field", 0) == 0) throw;
        throw ConfigError("config field '" + field + "': " + msg);
    }
}

inline OutputFormat parse_format(const std::string& text, const std::string& field) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw ConfigError("config field '" + field + "': format must be \"csv\" or \"json\"");
}

inline std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace detail

inline std::vector<std::string> validate_measures(const std::vector<std::string>& names) {
    for (const auto& m : names)
        if (std::find(kMeasureColumns.begin(), kMeasureColumns.end(), m) == kMeasureColumns.end())
            throw ConfigError("config field 'measures': unknown measure '" + m + "'");
    return names;
}

inline Config parse_config(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = detail::line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    detail::reject_unknown_keys(doc,
                                {"model", "reference", "perturbation", "grid", "measures", "output",
                                 "allow_range_override", "workers", "sweeps"},
                                "");
    Config cfg;
    if (doc.contains("model")) cfg.model = detail::parse_model(doc["model"], "model");
    if (doc.contains("reference")) cfg.reference = detail::parse_model(doc["reference"], "reference");
    if (doc.contains("perturbation")) cfg.perturbation = detail::parse_perturbation_field(doc["perturbation"], "perturbation");
    if (doc.contains("grid")) cfg.grid = detail::parse_grid_field(doc["grid"], "grid");
    if (doc.contains("measures")) {
        const auto& m = doc["measures"];
        if (!m.is_array()) throw ConfigError("config field 'measures': expected an array of names");
        std::vector<std::string> names;
        for (const auto& v : m) {
            if (!v.is_string()) throw ConfigError("config field 'measures': expected strings");
            names.push_back(v.get<std::string>());
        }
        cfg.measures = validate_measures(names);
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        if (!o.is_object()) throw ConfigError("config field 'output': expected an object");
        detail::reject_unknown_keys(o, {"path", "format"}, "output");
        if (o.contains("path")) {
            if (!o["path"].is_string()) throw ConfigError("config field 'output.path': expected a string");
            cfg.output_path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) throw ConfigError("config field 'output.format': expected a string");
            cfg.format = detail::parse_format(o["format"].get<std::string>(), "output.format");
        }
    }
    if (doc.contains("allow_range_override")) {
        if (!doc["allow_range_override"].is_boolean())
            throw ConfigError("config field 'allow_range_override': expected true or false");
        cfg.allow_range_override = doc["allow_range_override"].get<bool>();
    }
    if (doc.contains("workers")) {
        if (!doc["workers"].is_number_integer() || doc["workers"].get<int>() < 0)
            throw ConfigError("config field 'workers': expected a nonnegative integer");
        cfg.workers = doc["workers"].get<int>();
    }
    if (doc.contains("sweeps")) {
        const auto& s = doc["sweeps"];
        if (!s.is_array()) throw ConfigError("config field 'sweeps': expected an array");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string where = "sweeps[" + std::to_string(i) + "]";
            if (!s[i].is_object()) throw ConfigError("config field '" + where + "': expected an object");
            detail::reject_unknown_keys(s[i], {"perturbation", "grid"}, where);
            if (!s[i].contains("perturbation")) throw ConfigError("config field '" + where + ".perturbation': required");
            SweepEntry e{detail::parse_perturbation_field(s[i]["perturbation"], where + ".perturbation"), std::nullopt};
            if (s[i].contains("grid")) e.grid = detail::parse_grid_field(s[i]["grid"], where + ".grid");
            cfg.sweeps.push_back(e);
        }
    }
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline nlohmann::json model_to_json(const ModelParams& p) {
    auto complex_json = [](cplx z) -> nlohmann::json {
        if (z.imag() == 0.0) return z.real();
        return nlohmann::json::array({z.real(), z.imag()});
    };
    return {{"alpha1", complex_json(p.alpha1)}, {"alpha2", complex_json(p.alpha2)}, {"delta1", p.delta1},
            {"delta2", p.delta2},           {"s1", p.s1},                        {"s2", p.s2},
            {"gamma1_r", p.gamma1_r},       {"gamma2_r", p.gamma2_r},            {"gamma1_phi", p.gamma1_phi},
            {"gamma2_phi", p.gamma2_phi}};
}

inline nlohmann::json grid_to_json(const Grid& g) {
    return {{"lo", g.lo}, {"hi", g.hi}, {"count", g.count}, {"scale", g.scale == GridScale::Log ? "log" : "linear"}};
}

/// Fully resolved spec in config-file form (round-trips through parse_config). The worker
/// count is an execution detail and is left out so that outputs do not depend on it.
inline nlohmann::json spec_to_json(const SweepSpec& s) {
    nlohmann::json out = {{"model", model_to_json(s.model)},
                          {"perturbation", std::string(to_string(s.perturbation))},
                          {"grid", grid_to_json(s.grid)},
                          {"measures", s.measures},
                          {"output", {{"format", s.format == OutputFormat::Csv ? "csv" : "json"}}},
                          {"allow_range_override", s.allow_range_override}};
    if (!s.output_path.empty()) out["output"]["path"] = s.output_path;
    return out;
}

} // namespace qrobust
