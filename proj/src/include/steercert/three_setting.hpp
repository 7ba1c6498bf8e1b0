#ifndef STEERCERT_THREE_SETTING_HPP
#define STEERCERT_THREE_SETTING_HPP

#include "certify_analytic.hpp"
#include "sdp_solver.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <atomic>
#include <mutex>
#include <thread>

namespace steercert {

namespace detail {

/** Real symmetric embedding of a Hermitian matrix: [[Re, -Im], [Im, Re]]. */
inline RMat herm_embed(const Mat& h) {
    const int n = static_cast<int>(h.rows());
    RMat out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.bottomRightCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    return out;
}

inline Mat pauli(int i) {
    switch (i) {
        case 0: return pauli_x();
        case 1: return pauli_y();
        default: return pauli_z();
    }
}

}  // namespace detail

/**
 * Per-point witness of the three-setting certificate: the q-probabilities,
 * the third-branch state M (both marginals I/2, i.e. a mixture of local
 * unitaries applied to the Bell state), and the G1/G2 split margins.
 */
struct ThreeSettingPointWitness {
    double mu, mu1, mu2;
    double q1, q2;
    double kappa;          // scale of the retained psi1/psi2 weight in G1
    double margin_full;    // min eig of the unsplit G
    double margin_g2;      // min eig of G2 = G - kappa*(q1 P1 + q2 P2)
    bool used_sdp;
};

struct ThreeSettingCertificate {
    double s, tau;
    double worst_margin_full = 1e300;
    double worst_margin_g2 = 1e300;
    long n_points = 0, n_sdp = 0;
    ThreeSettingPointWitness worst;

    double fidelity_raw(double observed) const { return s * observed + tau; }
    double fidelity(double observed) const {
        return std::clamp(fidelity_raw(observed), 0.0, 1.0);
    }
};

namespace detail {

using C4 = Eigen::Matrix4cd;
using V4 = Eigen::Vector4cd;

struct ThreeSettingScratch {
    V4 psi1, psi2;
    C4 P1, P2, I4;
    ThreeSettingScratch() {
        const double c8 = std::cos(M_PI / 8), s8 = std::sin(M_PI / 8);
        // mu-independent eigenvectors of Z B0 + X B1 in the pi/8-rotated basis
        psi1 << c8, s8, s8, -c8;
        psi1 /= std::sqrt(2.0);
        psi2 << c8, -s8, s8, c8;
        psi2 /= std::sqrt(2.0);
        P1 = psi1 * psi1.adjoint();
        P2 = psi2 * psi2.adjoint();
        I4 = C4::Identity();
    }
};

inline double min_eig4(const C4& a) {
    Eigen::SelfAdjointEigenSolver<C4> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/** PSD test with slack: true iff min eig of a exceeds -tol (Cholesky based). */
inline bool psd4(const C4& a, double tol) {
    Eigen::LLT<C4> llt(a + tol * C4::Identity());
    return llt.info() == Eigen::Success;
}

/** Nearest maximally entangled projector to the pure state v (polar part). */
inline C4 polar_me(const V4& v) {
    Eigen::Matrix2cd r;
    r << v(0), v(1), v(2), v(3);
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix2cd u = svd.matrixU() * svd.matrixV().adjoint();
    V4 me;
    me << u(0, 0), u(0, 1), u(1, 0), u(1, 1);
    me /= std::sqrt(2.0);
    return me * me.adjoint();
}

/**
 * Best closed-form candidate for the q3-branch state at this grid point:
 * psi1 itself, then the maximally entangled state nearest the most negative
 * eigenvector of F0, then a short Frank-Wolfe ascent of the smallest
 * eigenvalue over mixtures of maximally entangled states (the extreme points
 * of the set of two-qubit states with both marginals I/2).
 */
inline double best_candidate_margin(const C4& F0, const ThreeSettingScratch& sc,
                                    C4& best_m) {
    best_m = sc.P1;
    double best = min_eig4(F0 + 0.5 * sc.P1);
    if (best >= -1e-10) return best;

    Eigen::SelfAdjointEigenSolver<C4> es(F0);
    C4 M = polar_me(es.eigenvectors().col(0));
    double m = min_eig4(F0 + 0.5 * M);
    if (m > best) {
        best = m;
        best_m = M;
    }
    for (int it = 0; it < 60 && m < -1e-11; ++it) {
        Eigen::SelfAdjointEigenSolver<C4> eg(F0 + 0.5 * M);
        m = eg.eigenvalues()(0);
        if (m >= -1e-11) break;
        const C4 D = polar_me(eg.eigenvectors().col(0));
        double step_best = m, gamma = 0;
        for (double g : {1.0, 0.5, 0.25, 0.12, 0.06, 0.03, 0.015}) {
            const double cand = min_eig4(F0 + 0.5 * ((1 - g) * M + g * D));
            if (cand > step_best) {
                step_best = cand;
                gamma = g;
            }
        }
        if (gamma == 0) break;
        M = (1 - gamma) * M + gamma * D;
        m = step_best;
        if (m > best) {
            best = m;
            best_m = M;
        }
    }
    return best;
}

/** SDP fallback: maximize the PSD margin over all valid third-branch states. */
inline double sdp_channel_margin(const Mat& F0, Mat& best_m) {
    LmiProblem p;
    p.F0 = {herm_embed(identity(4) / 4.0), herm_embed(F0)};
    p.b = RVec::Zero(10);
    p.b(9) = 1.0;
    p.Fi.resize(10);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Mat s = kron(pauli(i), pauli(j)) / 4.0;
            p.Fi[3 * i + j] = {herm_embed(s), herm_embed(0.5 * s)};
        }
    p.Fi[9] = {RMat::Zero(8, 8), -RMat::Identity(8, 8)};

    RVec y0 = RVec::Zero(10);
    y0(9) = min_eig(F0 + identity(4) / 8.0) - 0.1;
    auto res = solve_lmi(p, 1e-7, y0);

    Mat M = identity(4) / 4.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M += res.y(3 * i + j) * kron(pauli(i), pauli(j)) / 4.0;
    best_m = M;
    return min_eig(F0 + 0.5 * M);
}

}  // namespace detail

/**
 * Evaluate the certificate at one (mu, mu1, mu2) grid point: fixed q3 = 1/2,
 * q2 = max(0, s*lambda2 + tau), q1 = 1/2 - q2; the third branch state is the
 * best closed-form candidate, falling back to an exact small SDP search over
 * the set of states with both marginals I/2.
 */
inline ThreeSettingPointWitness three_setting_point(double mu, double mu1, double mu2,
                                                    double s, double tau,
                                                    double split_tol = 1e-10) {
    static const detail::ThreeSettingScratch sc;
    const double l2 = std::sqrt(2.0) * (std::cos(mu) - std::sin(mu));

    ThreeSettingPointWitness w{};
    w.mu = mu;
    w.mu1 = mu1;
    w.mu2 = mu2;
    w.q2 = std::max(0.0, s * l2 + tau);
    w.q1 = 0.5 - w.q2;

    using detail::C4;
    const Eigen::Matrix2cd X = pauli_x(), Y = pauli_y(), Z = pauli_z();
    const Eigen::Matrix2cd B0 = std::cos(mu) * Z + std::sin(mu) * X;
    const Eigen::Matrix2cd B1 = std::cos(mu) * Z - std::sin(mu) * X;
    const Eigen::Matrix2cd B2 = std::cos(mu1) * std::cos(mu2) * Z +
                                std::cos(mu1) * std::sin(mu2) * X + std::sin(mu1) * Y;
    C4 S3;
    S3 = Eigen::kroneckerProduct(Z, B0);
    S3 += Eigen::kroneckerProduct(X, B1);
    S3 += Eigen::kroneckerProduct(Y, B2);
    const C4 F0 = w.q1 * sc.P1 + w.q2 * sc.P2 - s * S3 - tau * sc.I4;

    C4 M;
    w.used_sdp = false;
    double m = detail::best_candidate_margin(F0, sc, M);
    if (m < -1e-10) {
        w.used_sdp = true;
        Mat Md;
        m = detail::sdp_channel_margin(F0, Md);
        M = Md;
    }
    w.margin_full = m;

    // G1 = kappa*(q1 P1 + q2 P2); scale kappa up while G2 stays PSD
    const C4 W = w.q1 * sc.P1 + w.q2 * sc.P2;
    const C4 G = F0 + 0.5 * M;
    double lo = 0, hi = 1;
    if (detail::psd4(G - W, split_tol)) {
        lo = 1;
    } else {
        for (int it = 0; it < 14; ++it) {
            const double mid = 0.5 * (lo + hi);
            (detail::psd4(G - mid * W, split_tol) ? lo : hi) = mid;
        }
    }
    w.kappa = lo;
    w.margin_g2 = detail::min_eig4(G - lo * W);
    return w;
}

/**
 * Certificate F >= s*S + tau for the three-setting inequality (alpha=0, beta=1),
 * s = 3/(12-4 sqrt2), verified over the (mu, mu1, mu2) grid with local
 * refinement around the worst margins. Threaded over mu slices.
 */
inline ThreeSettingCertificate certify_three_setting(int grid = 64, int n_threads = 0) {
    ThreeSettingCertificate cert;
    cert.s = 3.0 / (12 - 4 * std::sqrt(2.0));
    cert.tau = 1 - 3 * cert.s;

    if (n_threads <= 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    std::mutex mtx;
    std::atomic<int> next{0};

    auto worker = [&] {
        ThreeSettingCertificate local = cert;
        int i;
        while ((i = next.fetch_add(1)) < grid) {
            const double mu = (i + 1) * (M_PI / 4) / grid;
            for (int j = 0; j <= grid; ++j) {
                const double mu1 = -M_PI / 2 + j * M_PI / grid;
                for (int k = 0; k <= grid; ++k) {
                    const double mu2 = -M_PI / 2 + k * M_PI / grid;
                    auto w = three_setting_point(mu, mu1, mu2, cert.s, cert.tau);
                    ++local.n_points;
                    if (w.used_sdp) ++local.n_sdp;
                    local.worst_margin_g2 = std::min(local.worst_margin_g2, w.margin_g2);
                    if (w.margin_full < local.worst_margin_full) {
                        local.worst_margin_full = w.margin_full;
                        local.worst = w;
                    }
                }
            }
        }
        std::lock_guard<std::mutex> g(mtx);
        cert.n_points += local.n_points;
        cert.n_sdp += local.n_sdp;
        cert.worst_margin_g2 = std::min(cert.worst_margin_g2, local.worst_margin_g2);
        if (local.worst_margin_full < cert.worst_margin_full) {
            cert.worst_margin_full = local.worst_margin_full;
            cert.worst = local.worst;
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // refinement near the worst point
    const double h = (M_PI / 4) / grid;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c) {
                const double mu = std::clamp(cert.worst.mu + a * h / 2, 1e-6, M_PI / 4);
                const double m1 = std::clamp(cert.worst.mu1 + b * h, -M_PI / 2, M_PI / 2);
                const double m2 = std::clamp(cert.worst.mu2 + c * h, -M_PI / 2, M_PI / 2);
                auto w = three_setting_point(mu, m1, m2, cert.s, cert.tau);
                ++cert.n_points;
                if (w.used_sdp) ++cert.n_sdp;
                cert.worst_margin_g2 = std::min(cert.worst_margin_g2, w.margin_g2);
                if (w.margin_full < cert.worst_margin_full) {
                    cert.worst_margin_full = w.margin_full;
                    cert.worst = w;
                }
            }

    if (cert.worst_margin_full < -1e-9 || cert.worst_margin_g2 < -1e-9)
        throw std::runtime_error("certify_three_setting: certificate failed on the grid");
    return cert;
}

}  // namespace steercert

#endif
