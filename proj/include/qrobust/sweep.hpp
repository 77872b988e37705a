#pragma once

// Sweep orchestration: robustness records over a delta grid, concordance across the
// catalog, and single-model steady-state summaries.

#include "qrobust/analysis.hpp"
#include "qrobust/config.hpp"
#include "qrobust/model.hpp"
#include "qrobust/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace qrobust {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs task(i) for i in [0, count) on a pool of workers. Results must be written by index.
/// The exception of the lowest failing index is rethrown after all workers finish.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    const auto pool = static_cast<std::size_t>(std::max(1, std::min<int>(workers, static_cast<int>(count))));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(pool);
        for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct SweepResult {
    SweepSpec spec;
    std::vector<RobustnessRecord> records;
};

/// Builds the spec for one catalog perturbation with its default grid.
inline SweepSpec default_spec(PerturbationId id, const ModelParams& model = ModelParams::bare()) {
    SweepSpec s;
    s.model = model;
    s.perturbation = id;
    s.grid = default_grid(id);
    return s;
}

/// One record per grid point, in grid order. Points outside the admissible range raise
/// RangeViolation before any work is done, unless the spec allows overrides.
inline SweepResult run_sweep(const SweepSpec& spec) {
    const auto structure = perturbation(spec.perturbation);
    const auto deltas = spec.grid.points();
    if (!spec.allow_range_override) {
        for (double d : deltas)
            if (!structure.delta_range.contains(d))
                throw RangeViolation("sweep: delta = " + std::to_string(d) + " lies outside the admissible range [" +
                                     std::to_string(structure.delta_range.lo) + ", " +
                                     std::to_string(structure.delta_range.hi) + "] of " +
                                     std::string(to_string(spec.perturbation)) + " (use --allow-range-override)");
    }
    const NominalAnalysis nominal = analyze_nominal(spec.model);
    SweepResult out;
    out.spec = spec;
    out.records.resize(deltas.size());
    parallel_for(deltas.size(), resolve_workers(spec.workers), [&](std::size_t i) {
        out.records[i] = evaluate_perturbation(nominal, structure, deltas[i], spec.allow_range_override);
    });
    return out;
}

struct ConcordanceRun {
    std::vector<SweepResult> sweeps;
    ConcordanceReport report;
};

inline ConcordanceRun run_concordance(const std::vector<SweepSpec>& specs) {
    if (specs.empty()) throw ConfigError("concordance: at least one sweep is required");
    ConcordanceRun run;
    std::vector<LabeledSweep> labeled;
    for (const auto& spec : specs) {
        run.sweeps.push_back(run_sweep(spec));
        labeled.push_back({std::string(to_string(spec.perturbation)), run.sweeps.back().records});
    }
    run.report = concordance_suite(labeled);
    return run;
}

struct SteadyStateReport {
    ModelParams model;
    bool unique{false};
    std::string diagnostic;
    std::optional<SteadyState> state;
    double purity{0};
    double concurrence{0};
    std::optional<double> fidelity;  ///< against the reference steady state, when it is pure
    double stability_margin{0};
    CVector spectrum;
};

/// One-shot inspection of a single parameter set. Fidelity is taken against the steady
/// state of `reference` (bare parameters by default).
inline SteadyStateReport steady_state_report(const ModelParams& model,
                                             const ModelParams& reference = ModelParams::bare()) {
    SteadyStateReport rep;
    rep.model = model;
    const BlochGenerator gen = build_bloch(model);
    rep.spectrum = spectrum(gen.matrix());
    rep.stability_margin = stability_margin(gen.matrix());
    try {
        rep.state = steady_state(gen);
    } catch (const NonUniqueSteadyState& e) {
        rep.diagnostic = e.what();
        return rep;
    }
    rep.unique = true;
    rep.purity = purity(rep.state->rho);
    rep.concurrence = concurrence(rep.state->rho);
    try {
        const SteadyState ref = steady_state(build_bloch(reference));
        rep.fidelity = fidelity(rep.state->rho, ref.rho);
    } catch (const Error& e) {
        rep.diagnostic = std::string("fidelity unavailable: ") + e.what();
    }
    return rep;
}

} // namespace qrobust
