#ifndef STEERCERT_RELATIONS_HPP
#define STEERCERT_RELATIONS_HPP

#include "model.hpp"

namespace steercert {

struct RelationResidual {
    std::string relation_id;  // R1, R2, ANTICOMM_ZX, ANTICOMM_ZY
    double norm;
};

namespace detail {

struct TildeOps {
    Mat Zt, Xt;  // effective Bob-side Z and X (2x2)
    Mat Yt;      // effective Bob-side Y, 3-setting families only (else empty)
    bool has_y = false;
};

/**
 * Effective Bob observables: (B0+B1)/2cos(mu) and (B0-B1)/2sin(mu) for the
 * tilted analog (mu recovered from the spectral norms), B0/B1/B2 directly for
 * the marginal families. Off the extremal point these are not exactly unitary
 * and are used as written.
 */
inline TildeOps tilde_ops(const SteeringInequality& ineq, const BobSettings& bob) {
    TildeOps t;
    const Mat B0 = bob.observables[0].matrix(), B1 = bob.observables[1].matrix();
    if (ineq.family == Family::TiltedAnalog) {
        const double cmu = 0.5 * eig_hermitian(Mat(B0 + B1)).eigenvalues.cwiseAbs().maxCoeff();
        const double smu = 0.5 * eig_hermitian(Mat(B0 - B1)).eigenvalues.cwiseAbs().maxCoeff();
        if (cmu < 1e-9 || smu < 1e-9)
            throw std::invalid_argument("tilde_ops: degenerate settings (mu near 0 or pi/2)");
        t.Zt = (B0 + B1) / (2 * cmu);
        t.Xt = (B0 - B1) / (2 * smu);
    } else {
        t.Zt = B0;
        t.Xt = B1;
        if (ineq.n_settings() == 3) {
            t.Yt = bob.observables[2].matrix();
            t.has_y = true;
        }
    }
    return t;
}

/**
 * Two-sided SWAP isometry output vector in H_AB (x) H_A'B' (dim 16), primed
 * registers last, Alice's primed register the more significant qubit.
 */
inline Vec swap_apply(const Vec& psi, const TildeOps& t) {
    const Mat I2 = identity(2), I4 = identity(4);
    const Mat ZA = kron(pauli_z(), I2), XA = kron(pauli_x(), I2);
    const Mat ZtB = kron(I2, t.Zt), XtB = kron(I2, t.Xt);
    Vec out = Vec::Zero(16);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Mat op = (I4 + (a ? -1.0 : 1.0) * ZA) / 2 * ((I4 + (b ? -1.0 : 1.0) * ZtB) / 2);
            if (a) op = XA * op;
            if (b) op = XtB * op;
            Vec branch = op * psi;
            const int reg = 2 * a + b;
            for (int k = 0; k < 4; ++k) out(4 * k + reg) += branch(k);
        }
    return out;
}

/** Reduced state on the primed registers: trace out the original pair. */
inline Mat primed_state(const Vec& out16) {
    Mat rho = Mat::Zero(4, 4);
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
            for (int k = 0; k < 4; ++k) rho(x, y) += out16(4 * k + x) * std::conj(out16(4 * k + y));
    return rho;
}

}  // namespace detail

/**
 * Residual norms of the extremal-state relations: R1 = (Z_A - Z~_B)|psi>,
 * R2 = (sin(t) X_A (I + Z~_B) - cos(t) X~_B (I - Z_A))|psi>, and the
 * anti-commutator actions {Z~, X~}_B |psi> (plus {Z~, Y~}_B for 3 settings).
 * All vanish at exact maximal violation.
 */
inline std::vector<RelationResidual> relation_residuals(const SteeringInequality& ineq,
                                                        const Vec& psi,
                                                        const BobSettings& bob) {
    ineq.validate();
    auto t = detail::tilde_ops(ineq, bob);
    const double th = target_theta(ineq);
    const Mat I2 = identity(2);
    const Mat ZA = kron(pauli_z(), I2), XA = kron(pauli_x(), I2);
    const Mat ZtB = kron(I2, t.Zt), XtB = kron(I2, t.Xt);

    std::vector<RelationResidual> out;
    out.push_back({"R1", (ZA * psi - ZtB * psi).norm()});
    out.push_back(
        {"R2", (std::sin(th) * XA * (psi + ZtB * psi) - std::cos(th) * XtB * (psi - ZA * psi))
                   .norm()});
    out.push_back({"ANTICOMM_ZX", (kron(I2, Mat(t.Zt * t.Xt + t.Xt * t.Zt)) * psi).norm()});
    if (t.has_y)
        out.push_back({"ANTICOMM_ZY", (kron(I2, Mat(t.Zt * t.Yt + t.Yt * t.Zt)) * psi).norm()});
    return out;
}

struct SwapOutput {
    Mat extracted;          // 4x4 state on the primed registers
    double target_fidelity; // overlap with |Phi(theta)> of the family
    bool degraded = false;  // isometry output norm drifted off 1 (off-extremal)
};

/** Apply the SWAP isometry to a pure state and compare with the target. */
inline SwapOutput swap_isometry_output(const Vec& psi, const SteeringInequality& ineq,
                                       const BobSettings& bob) {
    ineq.validate();
    auto t = detail::tilde_ops(ineq, bob);
    Vec out16 = detail::swap_apply(psi, t);
    SwapOutput res;
    const double n2 = out16.squaredNorm();
    res.degraded = std::abs(n2 - 1.0) > 1e-8;
    Mat rho = detail::primed_state(out16) / n2;
    res.extracted = rho;
    res.target_fidelity = fidelity_pure(rho, target_state(target_theta(ineq)));
    return res;
}

/** Convex extension of the SWAP output to mixed inputs. */
inline SwapOutput swap_isometry_output(const Mat& rho_in, const SteeringInequality& ineq,
                                       const BobSettings& bob) {
    ineq.validate();
    auto t = detail::tilde_ops(ineq, bob);
    auto eig = eig_hermitian(rho_in);
    Mat rho = Mat::Zero(4, 4);
    double tot = 0;
    bool degraded = false;
    for (int k = 0; k < 4; ++k) {
        const double w = eig.eigenvalues(k);
        if (w < 1e-14) continue;
        Vec out16 = detail::swap_apply(Vec(eig.eigenvectors.col(k)), t);
        degraded |= std::abs(out16.squaredNorm() - 1.0) > 1e-8;
        rho += w * detail::primed_state(out16);
        tot += w * out16.squaredNorm();
    }
    SwapOutput res;
    res.extracted = rho / tot;
    res.degraded = degraded;
    res.target_fidelity = fidelity_pure(res.extracted, target_state(target_theta(ineq)));
    return res;
}

/**
 * Max fidelity defect between Phi(O~_B |psi>) and (I (x) sigma)|Phi(theta)>
 * over the available measurement branches (Z~ -> sigma_z, X~ -> sigma_x,
 * Y~ -> sigma_y). Zero at the extremal configuration.
 */
inline double measurement_selftest_residual(const SteeringInequality& ineq, const Vec& psi,
                                            const BobSettings& bob) {
    ineq.validate();
    auto t = detail::tilde_ops(ineq, bob);
    const double th = target_theta(ineq);
    const Mat I2 = identity(2);
    const Vec phi = target_state(th);
    double worst = 0;
    std::vector<std::pair<Mat, Mat>> branches{{t.Zt, pauli_z()}, {t.Xt, pauli_x()}};
    if (t.has_y) branches.push_back({t.Yt, pauli_y()});
    for (const auto& [op, sigma] : branches) {
        Vec out16 = detail::swap_apply(Vec(kron(I2, op) * psi), t);
        Mat rho = detail::primed_state(out16) / out16.squaredNorm();
        Vec target = kron(I2, sigma) * phi;
        worst = std::max(worst, 1.0 - fidelity_pure(rho, target / target.norm()));
    }
    return worst;
}

}  // namespace steercert

#endif
