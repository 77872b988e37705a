#pragma once

// CSV/JSON emission of sweep tables, concordance reports and steady-state summaries.

#include "qrobust/analysis.hpp"
#include "qrobust/config.hpp"
#include "qrobust/stats.hpp"
#include "qrobust/sweep.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qrobust {

/// printf-style "%.12e"; non-finite values print as "nan".
inline std::string format_number(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

inline double column_value(const RobustnessRecord& r, std::string_view column) {
    if (column == "purity") return r.purity;
    if (column == "E_C") return r.concurrence_error;
    if (column == "E_F") return r.fidelity_error;
    if (column == "G") return r.stability_margin;
    if (column == "T_norm0") return r.transfer_norm0;
    if (column == "z1") return r.z1_distance;
    if (column == "z1_bound") return r.z1_bound;
    throw InvalidArgument("unknown column '" + std::string(column) + "'");
}

/// Selected measures in the fixed column order delta, purity, E_C, E_F, G, T_norm0, z1, z1_bound, flags.
inline std::vector<std::string_view> ordered_columns(const std::vector<std::string>& measures) {
    std::vector<std::string_view> out;
    for (auto col : kMeasureColumns)
        if (std::find(measures.begin(), measures.end(), col) != measures.end()) out.push_back(col);
    return out;
}

inline void write_csv(std::ostream& os, const SweepResult& result) {
    const auto columns = ordered_columns(result.spec.measures);
    os << "delta";
    for (auto c : columns) os << ',' << c;
    os << ",flags\n";
    for (const auto& r : result.records) {
        os << format_number(r.delta);
        for (auto c : columns) os << ',' << format_number(column_value(r, c));
        os << ',' << flags_to_string(r.flags) << '\n';
    }
}

/// Reads a table written by write_csv. Missing columns stay NaN.
inline std::vector<RobustnessRecord> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("csv: empty input");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string field;
        while (std::getline(ss, field, ',')) out.push_back(field);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    const auto header = split(line);
    if (header.empty() || header.front() != "delta") throw ConfigError("csv: first column must be 'delta'");
    std::vector<RobustnessRecord> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw ConfigError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(fields.size()));
        RobustnessRecord r;
        for (std::size_t i = 0; i < header.size(); ++i) {
            const auto& name = header[i];
            if (name == "flags") {
                r.flags = flags_from_string(fields[i]);
                continue;
            }
            const double v = fields[i] == "nan" ? std::nan("") : std::stod(fields[i]);
            if (name == "delta") r.delta = v;
            else if (name == "purity") r.purity = v;
            else if (name == "E_C") r.concurrence_error = v;
            else if (name == "E_F") r.fidelity_error = v;
            else if (name == "G") r.stability_margin = v;
            else if (name == "T_norm0") r.transfer_norm0 = v;
            else if (name == "z1") r.z1_distance = v;
            else if (name == "z1_bound") r.z1_bound = v;
            else throw ConfigError("csv: unknown column '" + name + "'");
        }
        out.push_back(r);
    }
    return out;
}

inline nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json metadata_json() {
    return {{"artifact", "qrobust"}, {"version", std::string(kVersion)}};
}

inline nlohmann::json sweep_to_json(const SweepResult& result) {
    const auto columns = ordered_columns(result.spec.measures);
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result.records) {
        nlohmann::json row = {{"delta", r.delta}};
        for (auto c : columns) row[std::string(c)] = number_or_null(column_value(r, c));
        row["flags"] = flags_to_string(r.flags);
        records.push_back(std::move(row));
    }
    nlohmann::json meta = metadata_json();
    meta["config"] = spec_to_json(result.spec);
    return {{"metadata", meta}, {"records", records}};
}

inline void write_sweep(std::ostream& os, const SweepResult& result, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_csv(os, result);
    } else {
        os << sweep_to_json(result).dump(2) << '\n';
    }
}

inline std::string pair_label(const MeasurePair& p) {
    return std::string(to_string(p.a)) + ":" + std::string(to_string(p.b));
}

/// CSV: one row per perturbation plus a "mean" row; undefined taus print as "undefined".
inline void write_concordance_csv(std::ostream& os, const ConcordanceReport& report) {
    os << "perturbation,samples";
    for (const auto& p : kConcordancePairs) os << ",tau_" << pair_label(p);
    os << '\n';
    auto cell = [](const std::optional<double>& t) { return t ? format_number(*t) : std::string("undefined"); };
    for (const auto& row : report.rows) {
        os << row.perturbation_id << ',' << row.samples;
        for (const auto& t : row.tau) os << ',' << cell(t);
        os << '\n';
    }
    os << "mean,";
    for (const auto& t : report.mean_tau) os << ',' << cell(t);
    os << '\n';
}

inline nlohmann::json concordance_to_json(const ConcordanceRun& run) {
    auto tau_json = [](const TauRow& row) {
        nlohmann::json out = nlohmann::json::object();
        for (std::size_t k = 0; k < kConcordancePairs.size(); ++k)
            out[pair_label(kConcordancePairs[k])] = row[k] ? nlohmann::json(*row[k]) : nlohmann::json(nullptr);
        return out;
    };
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : run.report.rows)
        rows.push_back({{"perturbation", row.perturbation_id}, {"samples", row.samples}, {"tau", tau_json(row.tau)}});
    nlohmann::json sweeps = nlohmann::json::array();
    for (const auto& s : run.sweeps) sweeps.push_back(spec_to_json(s.spec));
    nlohmann::json meta = metadata_json();
    meta["config"] = {{"sweeps", sweeps}, {"tie_tolerance", kConcordanceTieTol}};
    return {{"metadata", meta}, {"concordance", rows}, {"mean_tau", tau_json(run.report.mean_tau)}};
}

inline void write_concordance(std::ostream& os, const ConcordanceRun& run, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_concordance_csv(os, run.report);
    } else {
        os << concordance_to_json(run).dump(2) << '\n';
    }
}

inline nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json steady_state_to_json(const SteadyStateReport& rep) {
    nlohmann::json out = metadata_json();
    out["model"] = model_to_json(rep.model);
    out["unique"] = rep.unique;
    out["stability_margin"] = rep.stability_margin;
    nlohmann::json spec = nlohmann::json::array();
    for (Eigen::Index i = 0; i < rep.spectrum.size(); ++i) spec.push_back(complex_json(rep.spectrum(i)));
    out["spectrum"] = spec;
    if (!rep.diagnostic.empty()) out["diagnostic"] = rep.diagnostic;
    if (rep.unique) {
        out["purity"] = rep.purity;
        out["concurrence"] = rep.concurrence;
        out["fidelity"] = rep.fidelity ? nlohmann::json(*rep.fidelity) : nlohmann::json(nullptr);
        out["residual"] = rep.state->residual;
        nlohmann::json rho = nlohmann::json::array();
        for (Eigen::Index i = 0; i < rep.state->rho.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < rep.state->rho.cols(); ++j) row.push_back(complex_json(rep.state->rho(i, j)));
            rho.push_back(row);
        }
        out["rho"] = rho;
    }
    return out;
}

inline void write_steady_state_text(std::ostream& os, const SteadyStateReport& rep) {
    os << "stability margin G: " << format_number(rep.stability_margin) << '\n';
    if (!rep.unique) {
        os << "steady state: not unique\n" << rep.diagnostic << '\n';
        return;
    }
    os << "purity:      " << format_number(rep.purity) << '\n';
    os << "concurrence: " << format_number(rep.concurrence) << '\n';
    os << "fidelity:    " << (rep.fidelity ? format_number(*rep.fidelity) : std::string("n/a")) << '\n';
    os << "residual:    " << format_number(rep.state->residual) << '\n';
    if (!rep.diagnostic.empty()) os << rep.diagnostic << '\n';
    os << "rho (re, im):\n";
    for (Eigen::Index i = 0; i < rep.state->rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rep.state->rho.cols(); ++j) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " (%+.6f,%+.6f)", rep.state->rho(i, j).real(), rep.state->rho(i, j).imag());
            os << buf;
        }
        os << '\n';
    }
}

inline void write_spectrum(std::ostream& os, const CVector& ev, double margin, OutputFormat format) {
    if (format == OutputFormat::Json) {
        nlohmann::json out = metadata_json();
        nlohmann::json arr = nlohmann::json::array();
        for (Eigen::Index i = 0; i < ev.size(); ++i) arr.push_back(complex_json(ev(i)));
        out["spectrum"] = arr;
        out["stability_margin"] = margin;
        os << out.dump(2) << '\n';
        return;
    }
    os << "re,im\n";
    for (Eigen::Index i = 0; i < ev.size(); ++i) os << format_number(ev(i).real()) << ',' << format_number(ev(i).imag()) << '\n';
}

} // namespace qrobust
