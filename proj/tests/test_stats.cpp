#include "qrobust/stats.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

#include <random>

using namespace qrobust;

namespace {

RobustnessRecord record(double g, double ec, double ef, double z1) {
    RobustnessRecord r;
    r.stability_margin = g;
    r.concurrence_error = ec;
    r.fidelity_error = ef;
    r.z1_distance = z1;
    return r;
}

} // namespace

TEST_CASE("kendall_tau basic values", "[stats]") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> rev{4, 3, 2, 1};
    const std::vector<double> one_swap{1, 3, 2, 4};
    CHECK(*kendall_tau(x, x) == 1.0);
    CHECK(*kendall_tau(x, rev) == -1.0);
    CHECK(*kendall_tau(x, one_swap) == Approx(4.0 / 6.0));

    // Ties: x = (1,1,2,3), y = (1,2,3,4): 5 concordant, 1 tie in x -> 5 / sqrt(5 * 6).
    const std::vector<double> tied{1, 1, 2, 3};
    CHECK(*kendall_tau(tied, x) == Approx(5.0 / std::sqrt(30.0)));

    const std::vector<double> flat{2, 2, 2, 2};
    CHECK(!kendall_tau(flat, x).has_value());

    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(kendall_tau(x, three), InvalidArgument);
    const std::vector<double> single{1};
    CHECK_THROWS_AS(kendall_tau(single, single), InvalidArgument);
}

TEST_CASE("kendall_tau tie tolerance", "[stats]") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> noisy{0.5, 0.5 + 3e-9, 0.5 - 2e-9, 0.5 + 1e-9, 0.5};
    CHECK(kendall_tau(x, noisy).has_value());
    CHECK(!kendall_tau(x, noisy, 1e-7).has_value());
    const std::vector<double> y{1, 2, 3, 4, 5.5};
    CHECK(*kendall_tau(x, y, 1e-7) == 1.0);
}

TEST_CASE("kendall_tau properties", "[stats][property]") {
    std::mt19937 rng(77);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> small(0, 5);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 5 + k % 20;
        std::vector<double> x(n), y(n), xi(n), yi(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = nd(rng);
            y[i] = x[i] + nd(rng);
            xi[i] = small(rng);
            yi[i] = small(rng);
        }
        const double t = *kendall_tau(x, y);
        CHECK(t >= -1.0);
        CHECK(t <= 1.0);
        CHECK(*kendall_tau(y, x) == Approx(t).margin(1e-15));

        std::vector<double> ex(n), cube(n), neg(n);
        for (std::size_t i = 0; i < n; ++i) {
            ex[i] = std::exp(x[i]);
            cube[i] = y[i] * y[i] * y[i];
            neg[i] = -y[i];
        }
        CHECK(*kendall_tau(ex, cube) == Approx(t).margin(1e-15));
        CHECK(*kendall_tau(x, neg) == Approx(-t).margin(1e-15));

        // Integer sequences with many ties against the sign-matrix formulation.
        const auto ti = kendall_tau(xi, yi);
        if (ti) CHECK(*ti == Approx(oracle::kendall_sign_matrix(xi, yi)).margin(1e-12));
    }
}

TEST_CASE("measure labels and pairs", "[stats]") {
    CHECK(to_string(Measure::StabilityMargin) == "G");
    CHECK(to_string(Measure::ConcurrenceError) == "E_C");
    CHECK(to_string(Measure::FidelityError) == "E_F");
    CHECK(to_string(Measure::Z1Distance) == "z1");
    const auto r = record(1, 2, 3, 4);
    CHECK(measure_value(r, Measure::StabilityMargin) == 1);
    CHECK(measure_value(r, Measure::Z1Distance) == 4);
    CHECK(kConcordancePairs.size() == 5);
}

TEST_CASE("concordance_for excludes flagged and undefined records", "[stats]") {
    std::vector<RobustnessRecord> recs;
    for (int i = 0; i < 5; ++i) recs.push_back(record(i, i, i, i));
    auto bad = record(100, -100, 100, -100);
    bad.flags = kFlagNonUniqueSteadyState;
    recs.push_back(bad);
    recs.push_back(record(50, std::nan(""), 50, 50));

    const auto c = concordance_for("S2", recs);
    CHECK(c.perturbation_id == "S2");
    CHECK(c.samples == 5);
    for (const auto& t : c.tau) CHECK(*t == 1.0);

    std::vector<RobustnessRecord> too_few{record(1, 1, 1, 1), bad};
    CHECK_THROWS_AS(concordance_for("S5", too_few), InvalidArgument);
}

TEST_CASE("concordance_suite averages defined taus", "[stats]") {
    std::vector<LabeledSweep> sweeps(2);
    sweeps[0].perturbation_id = "A";
    sweeps[1].perturbation_id = "B";
    for (int i = 0; i < 4; ++i) {
        sweeps[0].records.push_back(record(i, i, i, i));
        sweeps[1].records.push_back(record(i, -i, 1.0, i));
    }
    const auto report = concordance_suite(sweeps);
    REQUIRE(report.rows.size() == 2);
    CHECK(*report.rows[1].tau[0] == -1.0);
    CHECK(!report.rows[1].tau[1].has_value());
    CHECK(*report.mean_tau[0] == 0.0);
    CHECK(*report.mean_tau[1] == 1.0);
    CHECK(*report.mean_tau[3] == 0.0);

    CHECK_THROWS_AS(concordance_suite(std::span<const LabeledSweep>{}), InvalidArgument);
}
