#ifndef STEERCERT_SDP_SOLVER_HPP
#define STEERCERT_SDP_SOLVER_HPP

#include "qmat.hpp"

#include <functional>
#include <string>
#include <vector>

namespace steercert {

/**
 * Dual-form linear matrix inequality problem:
 *
 *   maximize    b^T y
 *   subject to  F0[k] + sum_i y_i * Fi[i][k]  >= 0   for every block k
 *
 * All matrices are real symmetric. This covers both uses in this artifact:
 * the three-setting extraction-channel search (maximize a PSD margin) and the
 * dual of the moment-matrix fidelity SDP (every feasible y is a valid lower
 * bound on the primal minimum by weak duality).
 */
struct LmiProblem {
    std::vector<RMat> F0;               // per block
    std::vector<std::vector<RMat>> Fi;  // [variable][block]
    RVec b;

    int n_vars() const { return static_cast<int>(b.size()); }
    int n_blocks() const { return static_cast<int>(F0.size()); }
};

struct LmiResult {
    RVec y;
    double objective = 0;       // b^T y at the returned (strictly feasible) y
    double gap = 0;             // estimated duality gap (barrier nu / t)
    std::vector<RMat> X;        // recovered primal block matrices, X = F^-1 / t
    std::string status;         // "optimal", "infeasible", "max_iter"
};

namespace detail {

inline std::vector<RMat> eval_lmi(const LmiProblem& p, const RVec& y) {
    std::vector<RMat> F = p.F0;
    for (int i = 0; i < p.n_vars(); ++i)
        for (int k = 0; k < p.n_blocks(); ++k) F[k] += y(i) * p.Fi[i][k];
    return F;
}

inline bool all_pd(const std::vector<RMat>& F, std::vector<Eigen::LLT<RMat>>& llts) {
    llts.clear();
    for (const auto& f : F) {
        llts.emplace_back(f);
        if (llts.back().info() != Eigen::Success) return false;
    }
    return true;
}

/**
 * Newton barrier minimization of  -t b^T y - sum_k log det F_k(y)
 * from a strictly feasible y. Returns false if Newton stalls.
 */
inline bool center(const LmiProblem& p, double t, RVec& y, int max_newton = 60) {
    const int n = p.n_vars();
    for (int it = 0; it < max_newton; ++it) {
        auto F = eval_lmi(p, y);
        std::vector<Eigen::LLT<RMat>> llts;
        if (!all_pd(F, llts)) return false;

        RVec g = -t * p.b;
        RMat H = RMat::Zero(n, n);
        // W_i = L^-1 Fi L^-T per block; g_i -= tr(W_i), H_ij = <W_i, W_j>
        std::vector<std::vector<RMat>> W(n);
        for (int i = 0; i < n; ++i) {
            W[i].resize(p.n_blocks());
            for (int k = 0; k < p.n_blocks(); ++k) {
                const RMat& L = llts[k].matrixL();
                RMat tmp = L.triangularView<Eigen::Lower>().solve(p.Fi[i][k]);
                W[i][k] = L.triangularView<Eigen::Lower>()
                              .solve(RMat(tmp.transpose()))
                              .transpose();
                g(i) -= W[i][k].trace();
            }
        }
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double h = 0;
                for (int k = 0; k < p.n_blocks(); ++k)
                    h += (W[i][k].array() * W[j][k].array()).sum();
                H(i, j) = H(j, i) = h;
            }

        double ridge = 1e-12 * (1 + H.diagonal().maxCoeff());
        RVec dy;
        double decrement = -1;
        for (int attempt = 0; attempt < 8 && decrement < 0; ++attempt) {
            Eigen::LDLT<RMat> hsolve(H + ridge * RMat::Identity(n, n));
            dy = -hsolve.solve(g);
            decrement = -g.dot(dy);
            ridge *= 100;  // indefinite solve from roundoff: re-try stiffer
        }
        if (decrement < 0) return false;
        if (decrement < 1e-18) return true;

        // backtracking line search preserving positive definiteness
        double step = 1.0;
        auto phi = [&](const RVec& yy, double& val) {
            auto Ft = eval_lmi(p, yy);
            std::vector<Eigen::LLT<RMat>> ll;
            if (!all_pd(Ft, ll)) return false;
            val = -t * p.b.dot(yy);
            for (const auto& l : ll) {
                const RMat& L = l.matrixL();
                for (int d = 0; d < L.rows(); ++d) val -= 2 * std::log(L(d, d));
            }
            return true;
        };
        double f0;
        phi(y, f0);
        for (int ls = 0; ls < 60; ++ls) {
            RVec cand = y + step * dy;
            double fc;
            if (phi(cand, fc) && fc <= f0 - 0.25 * step * decrement) {
                y = cand;
                break;
            }
            step *= 0.5;
            if (ls == 59) return true;  // no progress possible; treat as centered
        }
        if (decrement < 1e-10) return true;
    }
    return true;
}

}  // namespace detail

/**
 * Find a strictly feasible starting point by maximizing the smallest
 * eigenvalue margin (augmented variable). Returns false if the LMI appears
 * infeasible (best achievable margin <= 0).
 */
inline bool lmi_find_feasible(const LmiProblem& p, RVec& y, double target_margin = 1e-6) {
    auto F = detail::eval_lmi(p, y);
    std::vector<Eigen::LLT<RMat>> ll;
    double worst = 1e300;
    for (const auto& f : F) worst = std::min(worst, min_eig(f.cast<Complex>()));
    if (worst > target_margin) return true;

    LmiProblem aug = p;
    const int n = p.n_vars();
    aug.b = RVec::Zero(n + 1);
    aug.b(n) = 1.0;
    aug.Fi.push_back({});
    for (int k = 0; k < p.n_blocks(); ++k)
        aug.Fi[n].push_back(-RMat::Identity(p.F0[k].rows(), p.F0[k].cols()));

    RVec ya(n + 1);
    ya.head(n) = y;
    ya(n) = worst - 1.0;
    double t = 1.0;
    const double nu = [&] {
        double s = 0;
        for (const auto& f : p.F0) s += static_cast<double>(f.rows());
        return s;
    }();
    double mult = 5.0;
    RVec ya_good = ya;
    double t_good = t;
    for (int outer = 0; outer < 120; ++outer) {
        if (!detail::center(aug, t, ya)) {
            ya = ya_good;
            mult = std::sqrt(mult);
            if (mult < 1.1) break;
            t = t_good * mult;
            continue;
        }
        ya_good = ya;
        t_good = t;
        if (ya(n) > target_margin) {
            y = ya.head(n);
            return true;
        }
        if (nu / t < 1e-9 && ya(n) <= 0) return false;
        t *= mult;
    }
    ya = ya_good;
    if (ya(n) > 0) {
        y = ya.head(n);
        return true;
    }
    return false;
}

/** Barrier path-following solve from any starting point (phase 1 included). */
inline LmiResult solve_lmi(const LmiProblem& p, double tol = 1e-8, RVec y0 = RVec()) {
    LmiResult res;
    RVec y = y0.size() == p.n_vars() ? y0 : RVec::Zero(p.n_vars());
    if (!lmi_find_feasible(p, y)) {
        res.status = "infeasible";
        return res;
    }
    double nu = 0;
    for (const auto& f : p.F0) nu += static_cast<double>(f.rows());

    double t = 1.0, t_good = 1.0, mult = 8.0;
    RVec y_good = y;
    res.status = "max_iter";
    for (int outer = 0; outer < 300; ++outer) {
        if (!detail::center(p, t, y)) {
            // back off: re-center from the last good point with gentler growth
            y = y_good;
            mult = std::sqrt(mult);
            if (mult < 1.1) break;
            t = t_good * mult;
            continue;
        }
        y_good = y;
        t_good = t;
        if (nu / t < tol) {
            res.status = "optimal";
            break;
        }
        t *= mult;
    }
    res.y = y_good;
    res.objective = p.b.dot(y_good);
    res.gap = nu / t_good;
    auto F = detail::eval_lmi(p, y_good);
    for (const auto& f : F) {
        Eigen::LLT<RMat> llt(f);
        RMat inv = llt.solve(RMat::Identity(f.rows(), f.cols()));
        res.X.push_back(inv / t_good);
    }
    return res;
}

}  // namespace steercert

#endif
