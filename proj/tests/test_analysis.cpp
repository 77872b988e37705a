#include "qrobust/analysis.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

#include <random>

using namespace qrobust;

namespace {

ModelParams decay_only() {
    ModelParams p;
    p.alpha1 = p.alpha2 = 0.0;
    p.gamma1_r = p.gamma2_r = 0.1;
    return p;
}

ModelParams unitary() {
    ModelParams p;
    p.s1 = p.s2 = 0.0;
    return p;
}

} // namespace

TEST_CASE("steady_state of a decay-only model is the ground state", "[analysis]") {
    const auto gen = build_bloch(decay_only());
    const auto ss = steady_state(gen);
    CHECK((ss.rho - oracle::ground00()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ss.residual < 1e-12);
    CHECK(ss.full(gen.trace_component())(15) == 0.5);
}

TEST_CASE("steady_state single-qubit amplitude damping", "[analysis]") {
    const auto gen = build_generator(CMatrix::Zero(2, 2), {{pauli::lowering(), 1.0}}, build_basis(2));
    const auto ss = steady_state(gen);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(ss.r1(0)) < 1e-14);
    CHECK(std::abs(ss.r1(1)) < 1e-14);
    CHECK(ss.r1(2) == Approx(h).margin(1e-14));
}

TEST_CASE("steady_state of the bare model", "[analysis]") {
    const auto gen = build_bloch(ModelParams::bare());
    const auto ss = steady_state(gen);
    CHECK(ss.residual < 1e-12);
    CHECK(purity(ss.rho) == Approx(1.0).margin(1e-10));
    CHECK(concurrence(ss.rho) == Approx(2.0 / (0.01 + 2.0)).margin(1e-8));
    CHECK((gen.matrix() * ss.full(gen.trace_component())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_NOTHROW(validate_density(ss.rho));

    // Independent route: null vector of the full generator, normalized on the trace coordinate.
    RVector null = oracle::null_vector(gen.matrix());
    null *= 0.5 / null(15);
    CHECK((null.head(15) - ss.r1).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("steady_state rejects unitary dynamics", "[analysis]") {
    CHECK_THROWS_AS(steady_state(build_bloch(unitary())), NonUniqueSteadyState);
    CHECK_THROWS_AS(d_vector(build_bloch(unitary())), NonUniqueSteadyState);
}

TEST_CASE("concurrence known states", "[analysis]") {
    CHECK(concurrence(oracle::bell_plus()) == Approx(1.0).margin(1e-7));
    CHECK(concurrence(oracle::singlet()) == Approx(1.0).margin(1e-7));
    CHECK(concurrence(oracle::ground00()) == Approx(0.0).margin(1e-7));
    CHECK(concurrence(CMatrix::Identity(4, 4) / 4.0) == 0.0);
    CHECK(concurrence(oracle::werner(0.5)) == Approx(0.25).margin(1e-10));
    CHECK(concurrence(oracle::werner(1.0 / 3.0)) == Approx(0.0).margin(1e-8));
    CHECK_THROWS_AS(concurrence(CMatrix::Identity(2, 2) / 2.0), DimensionMismatch);
    CHECK_THROWS_AS(concurrence(CMatrix::Identity(4, 4)), InvalidArgument);
}

TEST_CASE("concurrence agrees with the explicit-root oracle", "[analysis][property]") {
    std::mt19937 rng(1234);
    for (int k = 0; k < 100; ++k) {
        const CMatrix rho = k % 2 == 0 ? oracle::random_density(4, rng) : oracle::random_pure(4, rng);
        const double c = concurrence(rho);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0 + 1e-12);
        CHECK(std::abs(c - oracle::concurrence_explicit(rho)) < 1e-6);
    }
}

TEST_CASE("fidelity", "[analysis]") {
    CHECK(fidelity(oracle::bell_plus(), oracle::bell_plus()) == Approx(1.0));
    CHECK(fidelity(oracle::singlet(), oracle::bell_plus()) == Approx(0.0).margin(1e-15));
    CHECK(fidelity(CMatrix::Identity(4, 4) / 4.0, oracle::bell_plus()) == Approx(0.25));
    CHECK_THROWS_AS(fidelity(oracle::bell_plus(), oracle::werner(0.5)), ImpureReference);
    CHECK_THROWS_AS(fidelity(oracle::bell_plus(), CMatrix::Identity(2, 2)), DimensionMismatch);
}

TEST_CASE("stability_margin matches the Liouvillian oracle", "[analysis][property]") {
    std::vector<ModelParams> cases{ModelParams::bare(), decay_only()};
    ModelParams noisy;
    noisy.gamma2_r = 0.3;
    noisy.gamma1_phi = 0.2;
    cases.push_back(noisy);
    for (const auto& p : cases) {
        const double g = stability_margin(build_bloch(p).matrix());
        Eigen::ComplexEigenSolver<CMatrix> es(oracle::liouvillian(hamiltonian(p), jump_operators(p)), false);
        CHECK(g > 0.0);
        CHECK(std::abs(g - oracle::margin_from_spectrum(es.eigenvalues())) < 1e-9);
    }
    CHECK(stability_margin(build_bloch(ModelParams::bare()).matrix()) == Approx(0.0035196158).margin(1e-9));
}

TEST_CASE("stability_margin edge cases", "[analysis]") {
    CHECK(stability_margin(RMatrix::Zero(4, 4)) == 0.0);
    RMatrix rot = RMatrix::Zero(2, 2);
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    CHECK(stability_margin(rot) == 0.0);
    RMatrix diag = RMatrix::Zero(3, 3);
    diag(0, 0) = -2.0;
    diag(1, 1) = -0.5;
    CHECK(stability_margin(diag) == Approx(0.5));
    CHECK(stability_margin(build_bloch(unitary()).matrix()) == 0.0);
    CHECK_THROWS_AS(spectrum(RMatrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("spectrum is sorted by decreasing real part", "[analysis]") {
    const CVector ev = spectrum(build_bloch(ModelParams::bare()).matrix());
    REQUIRE(ev.size() == 16);
    for (Eigen::Index i = 1; i < ev.size(); ++i) CHECK(ev(i - 1).real() >= ev(i).real());
    CHECK(std::abs(ev(0)) < 1e-9);
}

TEST_CASE("hash_inverse", "[analysis]") {
    const auto gen = build_bloch(ModelParams::bare());
    const RMatrix a = gen.matrix();
    for (cplx s : {cplx(0, 0), cplx(0.5, 0), cplx(0, 0.7), cplx(-0.2, 1.3)}) {
        const CMatrix h = hash_inverse(a, s);
        const CMatrix m = s * CMatrix::Identity(15, 15) - a.topLeftCorner(15, 15).cast<cplx>();
        CHECK((m * h.topLeftCorner(15, 15) - CMatrix::Identity(15, 15)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(h.row(15).cwiseAbs().maxCoeff() == 0.0);
        CHECK(h.col(15).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(hash_inverse(build_bloch(unitary()).matrix(), cplx(0, 0)), PoleError);
    CHECK_THROWS_AS(hash_inverse(RMatrix::Zero(3, 4), cplx(0, 0)), DimensionMismatch);
}

TEST_CASE("d_vector equals the steady state with trace coordinate", "[analysis]") {
    const auto gen = build_bloch(ModelParams::bare());
    const RVector d = d_vector(gen);
    const auto ss = steady_state(gen);
    CHECK((d - ss.full(gen.trace_component())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.norm() == Approx(1.0).margin(1e-10));
    CHECK(d(15) == 0.5);
}

TEST_CASE("transfer_matrix", "[analysis]") {
    const auto p = ModelParams::bare();
    const auto gen = build_bloch(p);
    const auto s2 = perturbation(PerturbationId::S2);

    const auto zero = transfer_matrix(gen, RMatrix::Zero(16, 16), cplx(0, 0));
    CHECK(zero.norm == 0.0);

    const RMatrix da = structure_matrix(p, s2, 0.1);
    const auto t0 = transfer_matrix(gen, da, cplx(0, 0), 0.1);
    CHECK(t0.delta == 0.1);
    CHECK(t0.t.row(15).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t0.norm > 0.0);

    // T(0) d is exactly the steady-state shift.
    const auto ss_q = steady_state(build_bloch(perturb(p, s2, 0.1)));
    const auto ss = steady_state(gen);
    const CVector shift = t0.t * d_vector(gen).cast<cplx>();
    CHECK((shift.head(15).real() - (ss_q.r1 - ss.r1)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(shift.imag().cwiseAbs().maxCoeff() < 1e-14);

    // Real generators give conjugate-symmetric transfer norms.
    const auto tp = transfer_matrix(gen, da, cplx(0, 0.5));
    const auto tm = transfer_matrix(gen, da, cplx(0, -0.5));
    CHECK(tp.norm == Approx(tm.norm).epsilon(1e-10));

    RMatrix bad = RMatrix::Zero(16, 16);
    bad(15, 0) = 1.0;
    CHECK_THROWS_AS(transfer_matrix(gen, bad, cplx(0, 0)), ConsistencyError);
    CHECK_THROWS_AS(transfer_matrix(gen, RMatrix::Zero(4, 4), cplx(0, 0)), DimensionMismatch);
    // A perturbation that removes all dissipation puts a pole at s = 0.
    const RMatrix to_unitary = build_bloch(unitary()).matrix() - gen.matrix();
    CHECK_THROWS_AS(transfer_matrix(gen, to_unitary, cplx(0, 0)), PoleError);
}

TEST_CASE("propagate", "[analysis]") {
    const auto gen = build_bloch(ModelParams::bare());
    const auto& basis = two_qubit_basis();
    std::mt19937 rng(8);
    const RVector r0 = density_to_bloch(oracle::random_density(4, rng), basis);
    CHECK(propagate(gen, r0, 0.0) == r0);
    CHECK_THROWS_AS(propagate(gen, r0, -1.0), InvalidArgument);
    CHECK_THROWS_AS(propagate(gen, RVector::Zero(4), 1.0), DimensionMismatch);

    // r(t) = r0 + t A r0 + O(t^2).
    const double dt = 1e-6;
    CHECK((propagate(gen, r0, dt) - r0 - dt * gen.matrix() * r0).cwiseAbs().maxCoeff() < 1e-10);

    // Semigroup property.
    const RVector a = propagate(gen, propagate(gen, r0, 1.5), 2.5);
    CHECK((a - propagate(gen, r0, 4.0)).cwiseAbs().maxCoeff() < 1e-10);

    // Trace is preserved and the state stays physical.
    const RVector r = propagate(gen, r0, 10.0);
    CHECK(r(15) == Approx(0.5).margin(1e-12));
    CHECK_NOTHROW(validate_density(bloch_to_density(r, basis), 1e-8));
}

TEST_CASE("propagate converges to the steady state", "[analysis][property]") {
    const auto gen = build_bloch(ModelParams::bare());
    const auto& basis = two_qubit_basis();
    const RVector target = steady_state(gen).full(gen.trace_component());
    std::mt19937 rng(2024);
    for (int k = 0; k < 20; ++k) {
        const RVector r0 = density_to_bloch(oracle::random_density(4, rng), basis);
        CHECK((propagate(gen, r0, 1e4) - target).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("flags round trip", "[analysis]") {
    CHECK(flags_to_string(kFlagNone).empty());
    CHECK(flags_to_string(kFlagNonUniqueSteadyState) == "non_unique_steady_state");
    CHECK(flags_to_string(kFlagNonUniqueSteadyState | kFlagImpureReference) == "non_unique_steady_state|impure_reference");
    for (unsigned f = 0; f < 4; ++f) CHECK(flags_from_string(flags_to_string(f)) == f);
}

TEST_CASE("evaluate_perturbation", "[analysis]") {
    const auto nominal = analyze_nominal(ModelParams::bare());
    CHECK(nominal.reference_pure);

    const auto at_zero = evaluate_perturbation(nominal, perturbation(PerturbationId::S7), 0.0);
    CHECK(at_zero.flags == kFlagNone);
    CHECK(at_zero.z1_distance == 0.0);
    CHECK(at_zero.transfer_norm0 == 0.0);
    CHECK(at_zero.fidelity_error == Approx(0.0).margin(1e-12));
    CHECK(at_zero.concurrence_error == Approx(1.0 - 2.0 / 2.01).margin(1e-8));

    for (auto id : kCatalog) {
        const auto s = perturbation(id);
        for (double delta : {s.delta_range.lo * 0.5, s.delta_range.hi * 0.5}) {
            const auto r = evaluate_perturbation(nominal, s, delta);
            REQUIRE(r.unique());
            CHECK(r.z1_distance <= r.z1_bound * (1.0 + 1e-9) + 1e-14);
            CHECK(r.purity <= 1.0 + 1e-9);
            CHECK(r.stability_margin > 0.0);
        }
    }

    const auto flagged = evaluate_perturbation(nominal, perturbation(PerturbationId::S5), -1.0);
    CHECK(!flagged.unique());
    CHECK(flagged.stability_margin == 0.0);
    CHECK(std::isnan(flagged.concurrence_error));
    CHECK(std::isnan(flagged.z1_distance));

    CHECK_THROWS_AS(evaluate_perturbation(nominal, perturbation(PerturbationId::S2), 0.5), RangeViolation);

    const auto direct = steady_state_shift_and_bound(ModelParams::bare(), perturbation(PerturbationId::S2), 0.1);
    const auto via_nominal = evaluate_perturbation(nominal, perturbation(PerturbationId::S2), 0.1);
    CHECK(direct.z1_distance == via_nominal.z1_distance);
}

TEST_CASE("impure nominal state flags fidelity", "[analysis]") {
    ModelParams p;
    p.gamma1_phi = 0.3;
    const auto nominal = analyze_nominal(p);
    CHECK(!nominal.reference_pure);
    const auto r = evaluate_perturbation(nominal, perturbation(PerturbationId::S2), 0.1);
    CHECK((r.flags & kFlagImpureReference) != 0);
    CHECK(std::isnan(r.fidelity_error));
    CHECK(std::isfinite(r.concurrence_error));
}
