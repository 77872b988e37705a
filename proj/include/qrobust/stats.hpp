#pragma once

// Kendall rank correlation between robustness measures along a sweep.

#include "qrobust/analysis.hpp"
#include "qrobust/errors.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrobust {

/// Sweep measures closer than this are treated as tied. Concurrence is only resolved to
/// about sqrt(machine epsilon) because it takes square roots of near-zero eigenvalues.
inline constexpr double kConcordanceTieTol = 1e-7;

/// Tie-corrected Kendall tau-b by O(n^2) pair counting:
///     tau = (concordant - discordant) / sqrt((n0 - ties_x)(n0 - ties_y)),  n0 = n(n-1)/2.
/// Pairs with |x_i - x_j| <= tie_tol count as tied in x (likewise for y).
/// Returns nullopt when x or y is entirely tied, where tau-b is undefined.
inline std::optional<double> kendall_tau(std::span<const double> x, std::span<const double> y, double tie_tol = 0.0) {
    if (x.size() != y.size())
        throw InvalidArgument("kendall_tau: sequences differ in length (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
    if (x.size() < 2) throw InvalidArgument("kendall_tau: at least two observations required");
    long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            const bool tx = std::abs(dx) <= tie_tol;
            const bool ty = std::abs(dy) <= tie_tol;
            ties_x += tx;
            ties_y += ty;
            if (tx || ty) continue;
            ((dx > 0) == (dy > 0) ? concordant : discordant) += 1;
        }
    }
    const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double denom = std::sqrt((n0 - static_cast<double>(ties_x)) * (n0 - static_cast<double>(ties_y)));
    if (denom == 0.0) return std::nullopt;
    return static_cast<double>(concordant - discordant) / denom;
}

enum class Measure { StabilityMargin, ConcurrenceError, FidelityError, Z1Distance };

inline std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::StabilityMargin: return "G";
        case Measure::ConcurrenceError: return "E_C";
        case Measure::FidelityError: return "E_F";
        case Measure::Z1Distance: return "z1";
    }
    return "?";
}

inline double measure_value(const RobustnessRecord& r, Measure m) {
    switch (m) {
        case Measure::StabilityMargin: return r.stability_margin;
        case Measure::ConcurrenceError: return r.concurrence_error;
        case Measure::FidelityError: return r.fidelity_error;
        case Measure::Z1Distance: return r.z1_distance;
    }
    return std::nan("");
}

struct MeasurePair {
    Measure a;
    Measure b;
};

inline constexpr std::array<MeasurePair, 5> kConcordancePairs = {{
    {Measure::StabilityMargin, Measure::ConcurrenceError},
    {Measure::StabilityMargin, Measure::FidelityError},
    {Measure::ConcurrenceError, Measure::FidelityError},
    {Measure::ConcurrenceError, Measure::Z1Distance},
    {Measure::FidelityError, Measure::Z1Distance},
}};

using TauRow = std::array<std::optional<double>, kConcordancePairs.size()>;

struct PerturbationConcordance {
    std::string perturbation_id;
    std::size_t samples{0};
    TauRow tau;
};

struct ConcordanceReport {
    std::vector<PerturbationConcordance> rows;
    TauRow mean_tau;  ///< mean over perturbations with a defined tau; nullopt if none
};

/// Five pairwise taus for one sweep. Flagged records and records with an undefined
/// measure are excluded.
inline PerturbationConcordance concordance_for(std::string perturbation_id, std::span<const RobustnessRecord> records,
                                               double tie_tol = kConcordanceTieTol) {
    std::vector<const RobustnessRecord*> valid;
    for (const auto& r : records) {
        if (r.flags != kFlagNone) continue;
        bool finite = true;
        for (const auto& pair : kConcordancePairs)
            finite = finite && std::isfinite(measure_value(r, pair.a)) && std::isfinite(measure_value(r, pair.b));
        if (finite) valid.push_back(&r);
    }
    if (valid.size() < 2)
        throw InvalidArgument("concordance: " + perturbation_id + " has fewer than two valid records");

    PerturbationConcordance out;
    out.perturbation_id = std::move(perturbation_id);
    out.samples = valid.size();
    for (std::size_t k = 0; k < kConcordancePairs.size(); ++k) {
        std::vector<double> xs, ys;
        xs.reserve(valid.size());
        ys.reserve(valid.size());
        for (const auto* r : valid) {
            xs.push_back(measure_value(*r, kConcordancePairs[k].a));
            ys.push_back(measure_value(*r, kConcordancePairs[k].b));
        }
        out.tau[k] = kendall_tau(xs, ys, tie_tol);
    }
    return out;
}

struct LabeledSweep {
    std::string perturbation_id;
    std::vector<RobustnessRecord> records;
};

inline ConcordanceReport concordance_suite(std::span<const LabeledSweep> sweeps, double tie_tol = kConcordanceTieTol) {
    if (sweeps.empty()) throw InvalidArgument("concordance: no sweeps supplied");
    ConcordanceReport report;
    for (const auto& s : sweeps) report.rows.push_back(concordance_for(s.perturbation_id, s.records, tie_tol));
    for (std::size_t k = 0; k < kConcordancePairs.size(); ++k) {
        double sum = 0.0;
        int count = 0;
        for (const auto& row : report.rows) {
            if (row.tau[k]) {
                sum += *row.tau[k];
                ++count;
            }
        }
        if (count > 0) report.mean_tau[k] = sum / count;
    }
    return report;
}

} // namespace qrobust
