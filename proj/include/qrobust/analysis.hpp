#pragma once

/**
 * Steady states, performance measures and robustness quantities for Bloch generators.
 *
 * Conventions: Bloch vectors use the orthonormal basis of bloch.hpp, so the trace
 * coordinate is the constant 1/sqrt(N). The reduced steady state is r1 = -A11^{-1} c,
 * the #-inverse of (sI - A) is blockdiag((sI' - A11)^{-1}, 0), and the error transfer
 * matrix of a structured change dA is
 *
 *     T(s) = [ Theta11 dA11   Theta11 dA12 ]     Theta11 = (sI' - A11 - dA11)^{-1}.
 *            [      0              0       ]
 */

#include "qrobust/bloch.hpp"
#include "qrobust/errors.hpp"
#include "qrobust/linalg.hpp"
#include "qrobust/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace qrobust {

/// Eigenvalues with |lambda| at or below this are the structural zero mode(s).
inline constexpr double kZeroEigenTol = 1e-9;

struct SteadyState {
    RVector r1;          ///< reduced Bloch coordinates (first N^2 - 1 entries)
    DensityMatrix rho;   ///< reconstructed density matrix
    double residual{0};  ///< ||A11 r1 + c||

    /// Full Bloch vector with the constant trace coordinate appended.
    [[nodiscard]] BlochVector full(double trace_component) const {
        BlochVector r(r1.size() + 1);
        r << r1, trace_component;
        return r;
    }
};

namespace detail {

template <typename Derived>
void require_invertible_a11(const Eigen::MatrixBase<Derived>& a11, const char* what) {
    const double cond = condition_number(a11);
    if (!(cond <= kSingularCondition)) {
        std::ostringstream os;
        os << what << ": reduced generator A11 is singular (condition number " << cond
           << "); the steady state is not unique";
        throw NonUniqueSteadyState(os.str());
    }
}

inline std::string format_complex(cplx z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "j";
    return os.str();
}

// Throws PoleError naming the eigenvalue of `block` closest to s when sI' - block is
// numerically singular.
inline void require_no_pole(const RMatrix& block, cplx s, const CMatrix& resolvent_arg, const char* what) {
    const double cond = condition_number(resolvent_arg);
    if (cond <= kSingularCondition) return;
    Eigen::EigenSolver<RMatrix> es(block, false);
    const auto& ev = es.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i)
        if (std::abs(ev(i) - s) < std::abs(ev(best) - s)) best = i;
    std::ostringstream os;
    os << what << ": s = " << format_complex(s) << " is a pole (eigenvalue " << format_complex(ev(best))
       << ", condition number " << cond << ")";
    throw PoleError(os.str());
}

} // namespace detail

/// Solves A11 r1 + c = 0. Throws NonUniqueSteadyState when A11 is singular, which happens
/// for purely unitary evolution.
inline SteadyState steady_state(const BlochGenerator& gen) {
    const RMatrix a11 = gen.a11();
    detail::require_invertible_a11(a11, "steady_state");
    const RVector c = gen.c();
    SteadyState ss;
    ss.r1 = a11.colPivHouseholderQr().solve(-c);
    ss.residual = (a11 * ss.r1 + c).norm();
    ss.rho = bloch_to_density(ss.full(gen.trace_component()), build_basis(gen.hilbert_dim()));
    return ss;
}

/// Tr(rho^2).
inline double purity(const DensityMatrix& rho) { return trace_product(rho, rho).real(); }

/// Spin-flipped state (sigma_y x sigma_y) rho^* (sigma_y x sigma_y).
inline DensityMatrix spin_flip(const DensityMatrix& rho) {
    const CMatrix yy = kron(pauli::y(), pauli::y());
    return yy * rho.conjugate() * yy;
}

/// Wootters concurrence of a two-qubit state, from the square roots of the eigenvalues
/// of rho * spin_flip(rho) in decreasing order.
inline double concurrence(const DensityMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw DimensionMismatch("concurrence: two-qubit (4x4) state required");
    validate_density(rho, 1e-8);
    const CMatrix product = rho * spin_flip(rho);
    Eigen::ComplexEigenSolver<CMatrix> es(product, false);
    std::array<double, 4> lambda{};
    for (int i = 0; i < 4; ++i) lambda[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

/// Overlap Tr(rho_b rho_ss) against a pure reference.
inline double fidelity(const DensityMatrix& rho_ss, const DensityMatrix& rho_b) {
    if (rho_ss.rows() != rho_b.rows() || rho_ss.cols() != rho_b.cols())
        throw DimensionMismatch("fidelity: states differ in dimension");
    const double p = purity(rho_b);
    if (std::abs(p - 1.0) > 1e-6)
        throw ImpureReference("fidelity: reference state has purity " + std::to_string(p) +
                              "; the overlap formula needs a pure reference (use a general mixed-state fidelity)");
    return trace_product(rho_b, rho_ss).real();
}

/// All eigenvalues of a real square matrix, sorted by decreasing real part.
inline CVector spectrum(const RMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("spectrum: matrix must be square");
    if (a.size() == 0) return {};
    Eigen::EigenSolver<RMatrix> es(a, false);
    CVector ev = es.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    return ev;
}

/// Distance of the rightmost nonzero eigenvalue from the imaginary axis, |max Re lambda|
/// over eigenvalues with |lambda| > kZeroEigenTol. Zero when no such eigenvalue exists or
/// when they are all purely imaginary.
inline double stability_margin(const RMatrix& a) {
    const CVector ev = spectrum(a);
    double rightmost = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > kZeroEigenTol) rightmost = std::max(rightmost, ev(i).real());
    if (!std::isfinite(rightmost) || std::abs(rightmost) <= kZeroEigenTol) return 0.0;
    return std::abs(rightmost);
}

/// Block pseudo-resolvent [(sI' - A11)^{-1}, 0; 0, 0].
inline CMatrix hash_inverse(const RMatrix& a, cplx s) {
    if (a.rows() != a.cols() || a.rows() < 2) throw DimensionMismatch("hash_inverse: square matrix of size >= 2 required");
    const Eigen::Index n = a.rows() - 1;
    const RMatrix a11 = a.topLeftCorner(n, n);
    const CMatrix m = s * CMatrix::Identity(n, n) - a11.cast<cplx>();
    detail::require_no_pole(a11, s, m, "hash_inverse");
    CMatrix out = CMatrix::Zero(n + 1, n + 1);
    out.topLeftCorner(n, n) = m.colPivHouseholderQr().solve(CMatrix::Identity(n, n));
    return out;
}

struct TransferMatrixEval {
    cplx s;
    double delta{0};
    CMatrix t;
    double norm{0};  ///< largest singular value
};

/// Error transfer matrix for the exact generator change delta_a (from structure_matrix).
inline TransferMatrixEval transfer_matrix(const BlochGenerator& gen, const RMatrix& delta_a, cplx s, double delta = 0.0) {
    const Eigen::Index n2 = gen.size();
    if (delta_a.rows() != n2 || delta_a.cols() != n2) throw DimensionMismatch("transfer_matrix: perturbation size mismatch");
    if (delta_a.row(n2 - 1).cwiseAbs().maxCoeff() > kStateTol)
        throw ConsistencyError("transfer_matrix: perturbation does not preserve trace (nonzero last row)");
    const Eigen::Index n = n2 - 1;
    const RMatrix perturbed11 = gen.a11() + delta_a.topLeftCorner(n, n);
    const CMatrix m = s * CMatrix::Identity(n, n) - perturbed11.cast<cplx>();
    detail::require_no_pole(perturbed11, s, m, "transfer_matrix");

    TransferMatrixEval out;
    out.s = s;
    out.delta = delta;
    out.t = CMatrix::Zero(n2, n2);
    const auto qr = m.colPivHouseholderQr();
    out.t.topLeftCorner(n, n) = qr.solve(delta_a.topLeftCorner(n, n).cast<cplx>());
    out.t.topRightCorner(n, 1) = qr.solve(delta_a.topRightCorner(n, 1).cast<cplx>());
    out.norm = spectral_norm(out.t);
    return out;
}

/// lim_{s->0} s r_hat(s) = [-A11^{-1} A12; 1] * (trace coordinate).
inline RVector d_vector(const BlochGenerator& gen) {
    const RMatrix a11 = gen.a11();
    detail::require_invertible_a11(a11, "d_vector");
    const double t = gen.trace_component();
    RVector d(gen.size());
    d.head(gen.reduced_size()) = -a11.colPivHouseholderQr().solve(RVector(gen.a12())) * t;
    d(gen.size() - 1) = t;
    return d;
}

/// r(t) = exp(A t) r0 (Pade scaling and squaring).
inline BlochVector propagate(const BlochGenerator& gen, const BlochVector& r0, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("propagate: time must be nonnegative");
    if (r0.size() != gen.size()) throw DimensionMismatch("propagate: Bloch vector size mismatch");
    if (t == 0.0) return r0;
    const RMatrix scaled = gen.matrix() * t;
    const RMatrix propagator = scaled.exp();
    return propagator * r0;
}

// ---------------------------------------------------------------------------------------
// Robustness records

enum RecordFlag : unsigned {
    kFlagNone = 0,
    kFlagNonUniqueSteadyState = 1u << 0,  ///< perturbed A11 singular; measures undefined
    kFlagImpureReference = 1u << 1,       ///< nominal state mixed; fidelity undefined
};

inline std::string flags_to_string(unsigned flags) {
    std::string out;
    auto add = [&](const char* name) {
        if (!out.empty()) out += '|';
        out += name;
    };
    if (flags & kFlagNonUniqueSteadyState) add("non_unique_steady_state");
    if (flags & kFlagImpureReference) add("impure_reference");
    return out;
}

inline unsigned flags_from_string(const std::string& text) {
    unsigned flags = kFlagNone;
    if (text.find("non_unique_steady_state") != std::string::npos) flags |= kFlagNonUniqueSteadyState;
    if (text.find("impure_reference") != std::string::npos) flags |= kFlagImpureReference;
    return flags;
}

struct RobustnessRecord {
    double delta{0};
    double purity{std::numeric_limits<double>::quiet_NaN()};
    double concurrence_error{std::numeric_limits<double>::quiet_NaN()};
    double fidelity_error{std::numeric_limits<double>::quiet_NaN()};
    double stability_margin{0};
    double transfer_norm0{std::numeric_limits<double>::quiet_NaN()};
    double z1_distance{std::numeric_limits<double>::quiet_NaN()};
    double z1_bound{std::numeric_limits<double>::quiet_NaN()};
    unsigned flags{kFlagNone};

    [[nodiscard]] bool unique() const { return (flags & kFlagNonUniqueSteadyState) == 0; }
};

/// Quantities of the unperturbed model shared by every point of a sweep.
struct NominalAnalysis {
    ModelParams params;
    BlochGenerator gen;
    SteadyState ss;
    RVector d;
    bool reference_pure{false};
};

inline NominalAnalysis analyze_nominal(const ModelParams& p) {
    NominalAnalysis n;
    n.params = p;
    n.gen = build_bloch(p);
    n.ss = steady_state(n.gen);
    n.d = d_vector(n.gen);
    n.reference_pure = std::abs(purity(n.ss.rho) - 1.0) <= 1e-6;
    return n;
}

/// Measures of the perturbed steady state, the steady-state shift and its transfer-norm bound.
/// A singular perturbed generator yields a flagged record (only G is filled in).
inline RobustnessRecord evaluate_perturbation(const NominalAnalysis& nominal, const PerturbationStructure& s,
                                              double delta, bool allow_range_override = false) {
    const ModelParams q = perturb(nominal.params, s, delta, allow_range_override);
    const BlochGenerator gen_q = build_bloch(q);

    RobustnessRecord rec;
    rec.delta = delta;
    rec.stability_margin = stability_margin(gen_q.matrix());

    SteadyState ss_q;
    try {
        ss_q = steady_state(gen_q);
    } catch (const NonUniqueSteadyState&) {
        rec.flags |= kFlagNonUniqueSteadyState;
        return rec;
    }

    rec.purity = purity(ss_q.rho);
    rec.concurrence_error = 1.0 - concurrence(ss_q.rho);
    if (nominal.reference_pure) {
        rec.fidelity_error = 1.0 - fidelity(ss_q.rho, nominal.ss.rho);
    } else {
        rec.flags |= kFlagImpureReference;
    }

    const RMatrix delta_a = gen_q.matrix() - nominal.gen.matrix();
    const auto t0 = transfer_matrix(nominal.gen, delta_a, cplx(0.0, 0.0), delta);
    rec.transfer_norm0 = t0.norm;
    rec.z1_distance = (ss_q.r1 - nominal.ss.r1).norm();
    rec.z1_bound = t0.norm * nominal.d.norm();
    return rec;
}

inline RobustnessRecord steady_state_shift_and_bound(const ModelParams& p, const PerturbationStructure& s, double delta,
                                                     bool allow_range_override = false) {
    return evaluate_perturbation(analyze_nominal(p), s, delta, allow_range_override);
}

} // namespace qrobust
