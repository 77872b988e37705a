#pragma once

// Two qubits collectively coupled through an adiabatically eliminated lossy cavity,
// plus the catalog of structured parameter perturbations.

#include "qrobust/bloch.hpp"
#include "qrobust/errors.hpp"
#include "qrobust/linalg.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qrobust {

/// Physical parameters; frequencies in units of 10 MHz. Gammas are amplitudes (rate = gamma^2).
struct ModelParams {
    cplx alpha1{1.0, 0.0};
    cplx alpha2{1.0, 0.0};
    double delta1{0.1};
    double delta2{-0.1};
    double s1{1.0};
    double s2{1.0};
    double gamma1_r{0.0};
    double gamma2_r{0.0};
    double gamma1_phi{0.0};
    double gamma2_phi{0.0};

    /// Parameter set producing the highly entangled reference steady state.
    static ModelParams bare() { return {}; }

    /// Exchanges the roles of qubit 1 and qubit 2.
    [[nodiscard]] ModelParams swapped() const {
        return {alpha2, alpha1, delta2, delta1, s2, s1, gamma2_r, gamma1_r, gamma2_phi, gamma1_phi};
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline void validate(const ModelParams& p) {
    const double gammas[] = {p.gamma1_r, p.gamma2_r, p.gamma1_phi, p.gamma2_phi};
    for (double g : gammas)
        if (!(g >= 0.0)) throw InvalidArgument("model parameters: decay and dephasing amplitudes must be >= 0");
}

enum class PerturbationId { S2, S4, S5, S7, S9, S10 };

inline constexpr std::array<PerturbationId, 6> kCatalog = {PerturbationId::S2, PerturbationId::S4,
                                                           PerturbationId::S5, PerturbationId::S7,
                                                           PerturbationId::S9, PerturbationId::S10};

inline std::string_view to_string(PerturbationId id) {
    switch (id) {
        case PerturbationId::S2: return "S2";
        case PerturbationId::S4: return "S4";
        case PerturbationId::S5: return "S5";
        case PerturbationId::S7: return "S7";
        case PerturbationId::S9: return "S9";
        case PerturbationId::S10: return "S10";
    }
    return "?";
}

inline std::optional<PerturbationId> parse_perturbation_id(std::string_view text) {
    for (auto id : kCatalog)
        if (to_string(id) == text) return id;
    return std::nullopt;
}

struct Interval {
    double lo{0.0};
    double hi{0.0};
    [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
};

/// A fixed direction in the 10-dimensional parameter space
/// (alpha1, alpha2, Delta1, Delta2, s1, s2, gamma1_r, gamma2_r, gamma1_phi, gamma2_phi)
/// together with the admissible range of its strength.
struct PerturbationStructure {
    PerturbationId id{PerturbationId::S2};
    std::array<double, 10> direction{};
    Interval delta_range;
};

/// Catalog entry. The detuning range is +-|Delta2| of the bare model, the antisymmetric
/// coupling range mirrors the symmetric one.
inline PerturbationStructure perturbation(PerturbationId id) {
    PerturbationStructure s;
    s.id = id;
    switch (id) {
        case PerturbationId::S2:
            s.direction[1] = 1.0;
            s.delta_range = {-0.2, 0.2};
            break;
        case PerturbationId::S4: {
            s.direction[3] = 1.0;
            const double mag = std::abs(ModelParams::bare().delta2);
            s.delta_range = {-mag, mag};
            break;
        }
        case PerturbationId::S5:
            s.direction[4] = 1.0;
            s.direction[5] = 1.0;
            s.delta_range = {-1.0, 1.0};
            break;
        case PerturbationId::S7:
            s.direction[7] = 1.0;
            s.delta_range = {0.0, 1.0};
            break;
        case PerturbationId::S9:
            s.direction[9] = 1.0;
            s.delta_range = {0.0, 1.0};
            break;
        case PerturbationId::S10:
            s.direction[4] = 1.0;
            s.direction[5] = -1.0;
            s.delta_range = {-1.0, 1.0};
            break;
    }
    return s;
}

/// Two-qubit operator acting on one qubit; qubit 1 is the left tensor factor.
inline CMatrix on_qubit(int qubit, const CMatrix& op) {
    return qubit == 1 ? kron(op, pauli::identity()) : kron(pauli::identity(), op);
}

/// H = sum_l alpha_l s_l^+ + conj(alpha_l) s_l^- + Delta_l s_l^+ s_l^-.
inline CMatrix hamiltonian(const ModelParams& p) {
    const CMatrix sp = pauli::raising();
    const CMatrix sm = pauli::lowering();
    const CMatrix num = sp * sm;
    auto single = [&](cplx alpha, double detuning) -> CMatrix {
        return alpha * sp + std::conj(alpha) * sm + detuning * num;
    };
    return on_qubit(1, single(p.alpha1, p.delta1)) + on_qubit(2, single(p.alpha2, p.delta2));
}

/// Collective coupling V_c = s1 s_1^- + s2 s_2^- at unit rate, then single-qubit decay
/// and dephasing with rate gamma^2 on unit-normalized operators.
inline std::vector<JumpOperator> jump_operators(const ModelParams& p) {
    validate(p);
    const CMatrix sm1 = on_qubit(1, pauli::lowering());
    const CMatrix sm2 = on_qubit(2, pauli::lowering());
    return {
        {p.s1 * sm1 + p.s2 * sm2, 1.0},
        {sm1, p.gamma1_r * p.gamma1_r},
        {sm2, p.gamma2_r * p.gamma2_r},
        {on_qubit(1, pauli::z()), p.gamma1_phi * p.gamma1_phi},
        {on_qubit(2, pauli::z()), p.gamma2_phi * p.gamma2_phi},
    };
}

inline const HermitianBasis& two_qubit_basis() {
    static const HermitianBasis basis = build_basis(4);
    return basis;
}

inline BlochGenerator build_bloch(const ModelParams& p) {
    return build_generator(hamiltonian(p), jump_operators(p), two_qubit_basis());
}

/// p + delta * direction. Range checking can be lifted with allow_range_override, but
/// negative amplitudes are always rejected.
inline ModelParams perturb(const ModelParams& p, const PerturbationStructure& s, double delta,
                           bool allow_range_override = false) {
    if (!std::isfinite(delta)) throw RangeViolation("perturb: delta is not finite");
    if (!allow_range_override && !s.delta_range.contains(delta))
        throw RangeViolation("perturb: delta = " + std::to_string(delta) + " outside admissible range [" +
                             std::to_string(s.delta_range.lo) + ", " + std::to_string(s.delta_range.hi) + "] of " +
                             std::string(to_string(s.id)));
    const auto& d = s.direction;
    ModelParams q = p;
    q.alpha1 += delta * d[0];
    q.alpha2 += delta * d[1];
    q.delta1 += delta * d[2];
    q.delta2 += delta * d[3];
    q.s1 += delta * d[4];
    q.s2 += delta * d[5];
    q.gamma1_r += delta * d[6];
    q.gamma2_r += delta * d[7];
    q.gamma1_phi += delta * d[8];
    q.gamma2_phi += delta * d[9];
    if (q.gamma1_r < 0 || q.gamma2_r < 0 || q.gamma1_phi < 0 || q.gamma2_phi < 0)
        throw RangeViolation("perturb: delta = " + std::to_string(delta) + " makes a decay or dephasing amplitude negative");
    return q;
}

/// Exact generator change A(perturb(p, s, delta)) - A(p). Quadratic in delta for coupling
/// and dissipative structures, linear only for Hamiltonian ones.
inline RMatrix structure_matrix(const ModelParams& p, const PerturbationStructure& s, double delta,
                                bool allow_range_override = false) {
    const ModelParams q = perturb(p, s, delta, allow_range_override);
    return build_bloch(q).matrix() - build_bloch(p).matrix();
}

} // namespace qrobust
