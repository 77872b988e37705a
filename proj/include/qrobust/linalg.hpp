#pragma once

// Small dense helpers shared by the Bloch and analysis layers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace qrobust {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Hermiticity, trace and positivity checks use this absolute tolerance.
inline constexpr double kStateTol = 1e-10;
/// Generators are declared singular above this 2-norm condition number.
inline constexpr double kSingularCondition = 1e12;

namespace pauli {

inline CMatrix identity() { return CMatrix::Identity(2, 2); }

inline CMatrix x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline CMatrix y() {
    CMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}

inline CMatrix z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// Raising operator maps |0> (ground) to |1> (excited).
inline CMatrix raising() {
    CMatrix m(2, 2);
    m << 0, 0, 1, 0;
    return m;
}

inline CMatrix lowering() { return raising().adjoint(); }

} // namespace pauli

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

inline CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

inline double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const CMatrix& m, double tol = kStateTol) {
    return m.rows() == m.cols() && (m.size() == 0 || hermiticity_defect(m) <= tol);
}

/// Tr(a b) without forming the product.
inline cplx trace_product(const CMatrix& a, const CMatrix& b) {
    return (a.transpose().array() * b.array()).sum();
}

/// 2-norm condition number; infinity for an exactly singular matrix.
template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived>& m) {
    Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0.0;
    const double smin = sv(sv.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

/// Largest singular value.
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
    return svd.singularValues()(0);
}

} // namespace qrobust
