// qrobust command-line interface: sweep, concordance, steady-state, spectrum.
//
// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 range violation.

#include "qrobust/qrobust.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

using namespace qrobust;

enum ExitCode { kOk = 0, kConfigFailure = 1, kNumericalFailure = 2, kRangeFailure = 3 };

struct CommonOptions {
    std::string config_path;
    std::string perturbation;
    std::string grid;
    std::string out;
    std::string format;
    bool allow_range_override{false};
    int workers{-1};
    std::optional<double> delta;
};

Config load(const CommonOptions& opts) {
    return opts.config_path.empty() ? Config{} : load_config(opts.config_path);
}

std::optional<PerturbationId> perturbation_from(const CommonOptions& opts, const Config& cfg) {
    if (!opts.perturbation.empty()) {
        auto id = parse_perturbation_id(opts.perturbation);
        if (!id) throw ConfigError("--perturbation: unknown structure '" + opts.perturbation + "'");
        return id;
    }
    return cfg.perturbation;
}

OutputFormat format_from(const CommonOptions& opts, const Config& cfg) {
    if (opts.format == "csv") return OutputFormat::Csv;
    if (opts.format == "json") return OutputFormat::Json;
    if (!opts.format.empty()) throw ConfigError("--format: expected csv or json");
    return cfg.format.value_or(OutputFormat::Csv);
}

std::string out_path_from(const CommonOptions& opts, const Config& cfg) {
    return !opts.out.empty() ? opts.out : cfg.output_path.value_or("");
}

int workers_from(const CommonOptions& opts, const Config& cfg) {
    return opts.workers >= 0 ? opts.workers : cfg.workers.value_or(0);
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    write(out);
}

ModelParams model_for(const CommonOptions& opts, const Config& cfg) {
    const auto id = perturbation_from(opts, cfg);
    if (!opts.delta) return cfg.model;
    if (!id) throw ConfigError("--delta requires --perturbation");
    return perturb(cfg.model, perturbation(*id), *opts.delta, opts.allow_range_override || cfg.allow_range_override);
}

int cmd_sweep(const CommonOptions& opts) {
    const Config cfg = load(opts);
    const auto id = perturbation_from(opts, cfg);
    if (!id) throw ConfigError("sweep: a perturbation is required (--perturbation or config 'perturbation')");
    SweepSpec spec;
    spec.model = cfg.model;
    spec.perturbation = *id;
    spec.grid = !opts.grid.empty() ? parse_grid(opts.grid) : cfg.grid.value_or(default_grid(*id));
    if (cfg.measures) spec.measures = *cfg.measures;
    spec.output_path = out_path_from(opts, cfg);
    spec.format = format_from(opts, cfg);
    spec.allow_range_override = opts.allow_range_override || cfg.allow_range_override;
    spec.workers = workers_from(opts, cfg);
    const SweepResult result = run_sweep(spec);
    emit(spec.output_path, [&](std::ostream& os) { write_sweep(os, result, spec.format); });
    return kOk;
}

int cmd_concordance(const CommonOptions& opts) {
    const Config cfg = load(opts);
    std::vector<SweepSpec> specs;
    auto make = [&](PerturbationId id, const std::optional<Grid>& grid) {
        SweepSpec s = default_spec(id, cfg.model);
        if (grid) s.grid = *grid;
        s.allow_range_override = opts.allow_range_override || cfg.allow_range_override;
        s.workers = workers_from(opts, cfg);
        return s;
    };
    if (const auto id = perturbation_from(opts, cfg)) {
        const std::optional<Grid> grid = !opts.grid.empty() ? std::optional<Grid>(parse_grid(opts.grid)) : cfg.grid;
        specs.push_back(make(*id, grid));
    } else if (!cfg.sweeps.empty()) {
        for (const auto& e : cfg.sweeps) specs.push_back(make(e.perturbation, e.grid));
    } else {
        for (auto id : kCatalog) specs.push_back(make(id, std::nullopt));
    }
    const ConcordanceRun run = run_concordance(specs);
    const auto format = format_from(opts, cfg);
    emit(out_path_from(opts, cfg), [&](std::ostream& os) { write_concordance(os, run, format); });
    return kOk;
}

int cmd_steady_state(const CommonOptions& opts) {
    const Config cfg = load(opts);
    const ModelParams model = model_for(opts, cfg);
    const SteadyStateReport rep = steady_state_report(model, cfg.reference.value_or(ModelParams::bare()));
    const bool json = opts.format == "json" || (opts.format.empty() && cfg.format == OutputFormat::Json);
    if (!opts.format.empty() && opts.format != "json" && opts.format != "text" && opts.format != "csv")
        throw ConfigError("--format: expected csv, json or text");
    emit(out_path_from(opts, cfg), [&](std::ostream& os) {
        if (json) os << steady_state_to_json(rep).dump(2) << '\n';
        else write_steady_state_text(os, rep);
    });
    if (!rep.unique) {
        std::cerr << "error: " << rep.diagnostic << '\n';
        return kNumericalFailure;
    }
    return kOk;
}

int cmd_spectrum(const CommonOptions& opts) {
    const Config cfg = load(opts);
    const BlochGenerator gen = build_bloch(model_for(opts, cfg));
    const CVector ev = spectrum(gen.matrix());
    const double margin = stability_margin(gen.matrix());
    const auto format = format_from(opts, cfg);
    emit(out_path_from(opts, cfg), [&](std::ostream& os) { write_spectrum(os, ev, margin, format); });
    return kOk;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_grid, bool with_delta) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--perturbation", opts.perturbation, "Structured perturbation: S2, S4, S5, S7, S9 or S10");
    if (with_grid) cmd->add_option("--grid", opts.grid, "Delta grid lo:hi:count[:log]");
    if (with_delta) cmd->add_option("--delta", opts.delta, "Perturbation strength applied to the model");
    cmd->add_option("--out", opts.out, "Output path (default: standard output)");
    cmd->add_option("--format", opts.format, "Output format: csv or json");
    cmd->add_flag("--allow-range-override", opts.allow_range_override, "Permit deltas outside the admissible range");
    cmd->add_option("--workers", opts.workers, "Worker threads (0 = hardware concurrency)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robustness analysis of dissipatively coupled two-qubit systems"};
    app.set_version_flag("--version", std::string(qrobust::kVersion));
    app.require_subcommand(1);

    CommonOptions opts;
    auto* sweep = app.add_subcommand("sweep", "Robustness records along a perturbation grid");
    add_common(sweep, opts, true, false);
    auto* concord = app.add_subcommand("concordance", "Kendall tau concordance between robustness measures");
    add_common(concord, opts, true, false);
    auto* steady = app.add_subcommand("steady-state", "Steady state, purity, concurrence, fidelity and margin");
    add_common(steady, opts, false, true);
    auto* spec = app.add_subcommand("spectrum", "Eigenvalues of the Bloch generator");
    add_common(spec, opts, false, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigFailure;
    }

    try {
        if (*sweep) return cmd_sweep(opts);
        if (*concord) return cmd_concordance(opts);
        if (*steady) return cmd_steady_state(opts);
        if (*spec) return cmd_spectrum(opts);
    } catch (const qrobust::RangeViolation& e) {
        std::cerr << "range error: " << e.what() << '\n';
        return kRangeFailure;
    } catch (const qrobust::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const qrobust::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigFailure;
    }
    return kConfigFailure;
}
