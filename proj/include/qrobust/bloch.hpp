#pragma once

/**
 * Real Bloch-space representation of Lindblad dynamics.
 *
 * A density matrix of dimension N is expanded over an orthonormal Hermitian basis
 * {nu_1, ..., nu_{N^2}} with the identity-proportional element last, nu_{N^2} = I/sqrt(N).
 * The coordinates r_n = Tr(nu_n rho) then evolve as dr/dt = A r with
 *
 *     A = [ A11  A12 ]
 *         [  0    0  ]
 *
 * where the zero last row expresses trace preservation. The reduced dynamics of the
 * first N^2 - 1 coordinates is dr1/dt = A11 r1 + c with c = A12 / sqrt(N).
 */

#include "qrobust/errors.hpp"
#include "qrobust/linalg.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qrobust {

using DensityMatrix = CMatrix;
using BlochVector = RVector;

/// A jump operator paired with its (nonnegative) rate gamma^2.
struct JumpOperator {
    CMatrix op;
    double rate{1.0};
};

struct HermitianBasis {
    int dim{0};
    std::vector<CMatrix> elements;

    [[nodiscard]] std::size_t size() const { return elements.size(); }
    const CMatrix& operator[](std::size_t i) const { return elements[i]; }

    /// Constant value of the last Bloch coordinate for any unit-trace state.
    [[nodiscard]] double trace_component() const { return 1.0 / std::sqrt(static_cast<double>(dim)); }
};

namespace detail {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Pauli strings over log2(N) qubits, lexicographic in (x, y, z, I) per factor, so the
// all-identity string comes last.
inline std::vector<CMatrix> pauli_string_basis(int n) {
    const CMatrix single[4] = {pauli::x(), pauli::y(), pauli::z(), pauli::identity()};
    std::vector<CMatrix> out{CMatrix::Identity(1, 1)};
    for (int q = 1; q < n; q *= 2) {
        std::vector<CMatrix> next;
        next.reserve(out.size() * 4);
        for (const auto& left : out)
            for (const auto& s : single) next.push_back(kron(left, s));
        out = std::move(next);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& m : out) m *= scale;
    return out;
}

// Generalized Gell-Mann matrices for dimensions that are not powers of two.
inline std::vector<CMatrix> gell_mann_basis(int n) {
    std::vector<CMatrix> out;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            CMatrix sym = CMatrix::Zero(n, n);
            sym(j, k) = sym(k, j) = inv_sqrt2;
            out.push_back(sym);
            CMatrix asym = CMatrix::Zero(n, n);
            asym(j, k) = cplx(0, -inv_sqrt2);
            asym(k, j) = cplx(0, inv_sqrt2);
            out.push_back(asym);
        }
    }
    for (int l = 1; l < n; ++l) {
        CMatrix diag = CMatrix::Zero(n, n);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -l * norm;
        out.push_back(diag);
    }
    out.push_back(CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n)));
    return out;
}

inline double real_part_checked(cplx v, double scale, const char* what) {
    if (std::abs(v.imag()) > 1e-12 * std::max(1.0, scale))
        throw ConsistencyError(std::string(what) + ": imaginary residue " + std::to_string(v.imag()));
    return v.real();
}

inline void require_square(const CMatrix& m, int dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim)
        throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(dim) + "x" +
                                std::to_string(dim) + ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
}

} // namespace detail

/// Orthonormal Hermitian basis with the identity element last.
/// Powers of two use normalized Pauli strings (sigma_i x sigma_j)/2 for N = 4, ordered
/// lexicographically over (x, y, z, I); other dimensions use generalized Gell-Mann matrices.
inline HermitianBasis build_basis(int n) {
    if (n < 2) throw InvalidArgument("build_basis: dimension must be >= 2, got " + std::to_string(n));
    HermitianBasis basis;
    basis.dim = n;
    basis.elements = detail::is_power_of_two(n) ? detail::pauli_string_basis(n) : detail::gell_mann_basis(n);
    return basis;
}

inline BlochVector density_to_bloch(const DensityMatrix& rho, const HermitianBasis& basis) {
    detail::require_square(rho, basis.dim, "density_to_bloch");
    const double scale = rho.cwiseAbs().maxCoeff();
    BlochVector r(basis.size());
    for (std::size_t n = 0; n < basis.size(); ++n)
        r(static_cast<Eigen::Index>(n)) =
            detail::real_part_checked(trace_product(basis[n], rho), scale, "density_to_bloch");
    return r;
}

/// Inverse expansion rho = sum_n r_n nu_n. Positivity is not enforced.
inline DensityMatrix bloch_to_density(const BlochVector& r, const HermitianBasis& basis) {
    if (static_cast<std::size_t>(r.size()) != basis.size())
        throw DimensionMismatch("bloch_to_density: vector has " + std::to_string(r.size()) + " entries, basis has " +
                                std::to_string(basis.size()));
    DensityMatrix rho = DensityMatrix::Zero(basis.dim, basis.dim);
    for (std::size_t n = 0; n < basis.size(); ++n) rho += r(static_cast<Eigen::Index>(n)) * basis[n];
    return rho;
}

/// (A_H)_mn = Tr(i H [nu_m, nu_n]); the Bloch image of -i[H, .]. Antisymmetric.
inline RMatrix hamiltonian_generator(const CMatrix& h, const HermitianBasis& basis) {
    detail::require_square(h, basis.dim, "hamiltonian_generator");
    if (!is_hermitian(h)) throw InvalidArgument("hamiltonian_generator: Hamiltonian is not Hermitian");
    const auto n2 = static_cast<Eigen::Index>(basis.size());
    const double scale = h.cwiseAbs().maxCoeff();
    const cplx i_unit(0, 1);
    RMatrix a = RMatrix::Zero(n2, n2);
    for (Eigen::Index m = 0; m < n2; ++m) {
        for (Eigen::Index n = m + 1; n < n2; ++n) {
            const cplx v = i_unit * trace_product(h, commutator(basis[m], basis[n]));
            const double re = detail::real_part_checked(v, scale, "hamiltonian_generator");
            a(m, n) = re;
            a(n, m) = -re;
        }
    }
    return a;
}

/// rate * Tr(V^dag nu_m V nu_n - 1/2 V^dag V {nu_m, nu_n}); the Bloch image of rate * D[V].
inline RMatrix lindblad_generator(const CMatrix& v, double rate, const HermitianBasis& basis) {
    detail::require_square(v, basis.dim, "lindblad_generator");
    if (!(rate >= 0.0)) throw InvalidArgument("lindblad_generator: rate must be nonnegative");
    const auto n2 = static_cast<Eigen::Index>(basis.size());
    RMatrix a = RMatrix::Zero(n2, n2);
    if (rate == 0.0) return a;
    const CMatrix vd = v.adjoint();
    const CMatrix vdv = vd * v;
    const double scale = std::max(1.0, rate * vdv.cwiseAbs().maxCoeff());
    for (Eigen::Index m = 0; m < n2; ++m) {
        const CMatrix left = vd * basis[m] * v;
        for (Eigen::Index n = 0; n < n2; ++n) {
            const cplx val =
                trace_product(left, basis[n]) - 0.5 * trace_product(vdv, anticommutator(basis[m], basis[n]));
            a(m, n) = detail::real_part_checked(rate * val, scale, "lindblad_generator");
        }
    }
    return a;
}

/// Affine term of the reduced dynamics, c_m = (1/N) sum_k rate_k Tr([V_k, V_k^dag] nu_m).
/// Equals A12 / sqrt(N) for the generator assembled from the same jump operators.
inline RVector c_vector(const std::vector<JumpOperator>& jumps, const HermitianBasis& basis) {
    const auto n2 = static_cast<Eigen::Index>(basis.size());
    RVector c = RVector::Zero(n2 - 1);
    for (const auto& j : jumps) {
        detail::require_square(j.op, basis.dim, "c_vector");
        if (!(j.rate >= 0.0)) throw InvalidArgument("c_vector: rate must be nonnegative");
        if (j.rate == 0.0) continue;
        const CMatrix comm = commutator(j.op, j.op.adjoint());
        const double scale = std::max(1.0, j.rate * comm.cwiseAbs().maxCoeff());
        for (Eigen::Index m = 0; m < n2 - 1; ++m)
            c(m) += detail::real_part_checked(j.rate * trace_product(comm, basis[static_cast<std::size_t>(m)]), scale,
                                              "c_vector");
    }
    return c / static_cast<double>(basis.dim);
}

class BlochGenerator {
public:
    BlochGenerator() = default;

    /// Validates the trace-preserving block form; throws ConsistencyError otherwise.
    BlochGenerator(RMatrix a, int hilbert_dim) : a_(std::move(a)), dim_(hilbert_dim) {
        const auto n2 = static_cast<Eigen::Index>(dim_) * dim_;
        if (a_.rows() != n2 || a_.cols() != n2)
            throw DimensionMismatch("BlochGenerator: matrix must be N^2 x N^2");
        const double last_row = a_.row(n2 - 1).cwiseAbs().maxCoeff();
        if (last_row > kStateTol)
            throw ConsistencyError("BlochGenerator: last row is not zero (max |entry| = " +
                                   std::to_string(last_row) + ")");
        a_.row(n2 - 1).setZero();
    }

    [[nodiscard]] const RMatrix& matrix() const { return a_; }
    [[nodiscard]] int hilbert_dim() const { return dim_; }
    [[nodiscard]] Eigen::Index size() const { return a_.rows(); }
    [[nodiscard]] Eigen::Index reduced_size() const { return a_.rows() - 1; }

    [[nodiscard]] auto a11() const { return a_.topLeftCorner(reduced_size(), reduced_size()); }
    [[nodiscard]] auto a12() const { return a_.topRightCorner(reduced_size(), 1); }

    [[nodiscard]] double trace_component() const { return 1.0 / std::sqrt(static_cast<double>(dim_)); }
    [[nodiscard]] RVector c() const { return a12() * trace_component(); }

private:
    RMatrix a_;
    int dim_{0};
};

/// A = A_H + sum_k A_{V_k}.
inline BlochGenerator assemble(const RMatrix& a_h, const std::vector<RMatrix>& a_v, int hilbert_dim) {
    RMatrix a = a_h;
    for (const auto& term : a_v) {
        if (term.rows() != a.rows() || term.cols() != a.cols())
            throw DimensionMismatch("assemble: generator summands differ in size");
        a += term;
    }
    return BlochGenerator(std::move(a), hilbert_dim);
}

/// Generator for H and a list of jump operators over the given basis.
inline BlochGenerator build_generator(const CMatrix& h, const std::vector<JumpOperator>& jumps,
                                      const HermitianBasis& basis) {
    std::vector<RMatrix> dissipators;
    dissipators.reserve(jumps.size());
    for (const auto& j : jumps) dissipators.push_back(lindblad_generator(j.op, j.rate, basis));
    return assemble(hamiltonian_generator(h, basis), dissipators, basis.dim);
}

/// Throws InvalidArgument unless rho is Hermitian, unit trace and positive semidefinite
/// (smallest eigenvalue >= -psd_tol).
inline void validate_density(const DensityMatrix& rho, double psd_tol = kStateTol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidArgument("density matrix must be square");
    if (hermiticity_defect(rho) > kStateTol) throw InvalidArgument("density matrix is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > kStateTol) throw InvalidArgument("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw InvalidArgument("density matrix is not positive semidefinite (min eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()) + ")");
}

} // namespace qrobust
