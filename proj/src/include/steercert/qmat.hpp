#ifndef STEERCERT_QMAT_HPP
#define STEERCERT_QMAT_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <utility>

namespace steercert {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline const Complex kI{0.0, 1.0};

inline Mat identity(int n) { return Mat::Identity(n, n); }

inline Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Mat pauli_y() {
    Mat m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}
inline Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Mat dag(const Mat& m) { return m.adjoint(); }

inline bool is_hermitian(const Mat& m, double tol = 1e-12) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/** Tensor (Kronecker) product of two operators. */
inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/** Tensor product of two state vectors. */
inline Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (int i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

struct EigResult {
    RVec eigenvalues;  // sorted descending
    Mat eigenvectors;  // columns match eigenvalues
};

/**
 * Hermitian eigendecomposition with eigenvalues sorted descending.
 * Rejects non-Hermitian input.
 */
inline EigResult eig_hermitian(const Mat& h, double herm_tol = 1e-10) {
    if (!is_hermitian(h, herm_tol))
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const int n = static_cast<int>(h.rows());
    EigResult r;
    r.eigenvalues = RVec(n);
    r.eigenvectors = Mat(n, n);
    for (int i = 0; i < n; ++i) {
        r.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        r.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return r;
}

/** PSD test: true iff the minimum eigenvalue is >= -tol; returns that margin. */
inline std::pair<bool, double> is_psd(const Mat& h, double tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const double margin = es.eigenvalues()(0);
    return {margin >= -tol, margin};
}

inline double min_eig(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    return es.eigenvalues()(0);
}

/** <psi|rho|psi> for a density matrix and a pure target. */
inline double fidelity_pure(const Mat& rho, const Vec& psi) {
    if (std::abs(rho.trace().real() - 1.0) > 1e-9 || std::abs(rho.trace().imag()) > 1e-9)
        throw std::invalid_argument("fidelity_pure: trace(rho) != 1");
    return (psi.adjoint() * rho * psi)(0).real();
}

enum class Side { A, B };

/** Partial trace of a two-qubit density matrix, keeping the requested side. */
inline Mat partial_trace(const Mat& rho, Side keep) {
    Mat out = Mat::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                if (keep == Side::A)
                    out(i, j) += rho(2 * i + k, 2 * j + k);
                else
                    out(i, j) += rho(2 * k + i, 2 * k + j);
            }
    return out;
}

}  // namespace steercert

#endif
