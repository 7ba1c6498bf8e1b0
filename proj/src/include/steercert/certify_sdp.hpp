#ifndef STEERCERT_CERTIFY_SDP_HPP
#define STEERCERT_CERTIFY_SDP_HPP

#include "model.hpp"
#include "sdp_solver.hpp"

#include <atomic>
#include <map>
#include <sstream>
#include <thread>

namespace steercert {

/** Word over the untrusted projectors E_0|k, reduced under idempotence. */
struct BobWord {
    std::vector<int> letters;

    bool operator<(const BobWord& o) const { return letters < o.letters; }
    bool operator==(const BobWord& o) const { return letters == o.letters; }
};

inline BobWord word_reduce(const BobWord& w) {
    BobWord r;
    for (int l : w.letters)
        if (r.letters.empty() || r.letters.back() != l) r.letters.push_back(l);
    return r;
}

inline BobWord word_dag(const BobWord& w) {
    BobWord r = w;
    std::reverse(r.letters.begin(), r.letters.end());
    return r;
}

/** Canonical word of w_i^dag w_j. */
inline BobWord word_concat(const BobWord& wi, const BobWord& wj) {
    BobWord r = word_dag(wi);
    r.letters.insert(r.letters.end(), wj.letters.begin(), wj.letters.end());
    return word_reduce(r);
}

/** The fixed word sets: 7 words for 3 settings, 5 for 2. */
inline std::vector<BobWord> gamma_words(int n_settings) {
    if (n_settings == 3)
        return {{{}}, {{0}}, {{1}}, {{2}}, {{1, 0}}, {{2, 0}}, {{2, 1}}};
    if (n_settings == 2) return {{{}}, {{0}}, {{1}}, {{0, 1}}, {{1, 0}}};
    throw std::invalid_argument("gamma_words: n_settings must be 2 or 3");
}

/**
 * Moment-matrix pattern: which block positions (i, j) share a canonical
 * assemblage label. Blocks are stored transposed (see assemble_gamma), which
 * is the PSD-correct intra-block orientation.
 */
struct GammaPattern {
    int n_settings;
    std::vector<BobWord> words;
    std::vector<BobWord> class_words;
    std::vector<std::vector<std::pair<int, int>>> classes;  // all positions per class

    int n_words() const { return static_cast<int>(words.size()); }
    int dim() const { return 2 * n_words(); }
};

inline GammaPattern build_gamma_pattern(int n_settings) {
    GammaPattern p;
    p.n_settings = n_settings;
    p.words = gamma_words(n_settings);
    std::map<BobWord, int> idx;
    for (int i = 0; i < p.n_words(); ++i)
        for (int j = 0; j < p.n_words(); ++j) {
            BobWord w = word_concat(p.words[i], p.words[j]);
            auto it = idx.find(w);
            if (it == idx.end()) {
                idx.emplace(w, static_cast<int>(p.classes.size()));
                p.class_words.push_back(w);
                p.classes.push_back({{i, j}});
            } else {
                p.classes[it->second].push_back({i, j});
            }
        }
    return p;
}

/** Product of projectors E_0|l along the word. */
inline Mat word_operator(const BobWord& w, const std::vector<Mat>& E) {
    Mat op = identity(2);
    for (int l : w.letters) op *= E[l];
    return op;
}

/**
 * Exact moment matrix of a strategy (state rho on trusted (x) untrusted,
 * projectors E on the untrusted side). Block (i, j) holds the transpose of
 * the assemblage element sigma_w = Tr_untrusted[(I (x) W) rho] for the
 * canonical word W of w_i^dag w_j; this orientation makes Gamma PSD.
 */
inline Mat assemble_gamma(const Mat& rho, const std::vector<Mat>& E, const GammaPattern& p) {
    const int n = p.n_words();
    Mat G = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Mat W = word_operator(word_concat(p.words[i], p.words[j]), E);
            const Mat sigma = partial_trace(Mat(kron(identity(2), W) * rho), Side::A);
            G.block(2 * i, 2 * j, 2, 2) = sigma.transpose();
        }
    return G;
}

/**
 * Objective matrix M with Tr(M Gamma) = the SWAP fidelity with |Phi(theta)>.
 * Derived from the isometry expansion; matches the five printed entries.
 */
inline RMat objective_m(double theta, int n_settings = 3) {
    if (!(theta > 0 && theta <= M_PI / 4 + 1e-12))
        throw std::invalid_argument("objective_m: theta outside (0, pi/4]");
    const int n = static_cast<int>(gamma_words(n_settings).size());
    RMat M = RMat::Zero(2 * n, 2 * n);
    const double s2 = std::sin(theta) * std::sin(theta);
    const double c2 = std::cos(theta) * std::cos(theta);
    const double st = std::sin(2 * theta);
    M(1, 1) = s2;   // <1| rho_C |1>
    M(2, 2) = c2;   // <0| sigma_0|0 |0>
    M(3, 3) = -s2;  // -<1| sigma_0|0 |1>
    M(1, 8) = M(8, 1) = st;    // word (0|1)(0|0) cross term
    M(8, 9) = M(9, 8) = -st;   // words (0|1)(0|0) and (0|0)(0|1)
    return M;
}

namespace detail {

/** Real symmetric embedding of a Hermitian matrix (declared in three_setting too). */
inline RMat herm_embed_sdp(const Mat& h) {
    const int n = static_cast<int>(h.rows());
    RMat out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.bottomRightCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    return out;
}

/** Hermitian matrix A with Tr(A Gamma) = the steering functional. */
inline Mat functional_matrix(const SteeringInequality& ineq, const GammaPattern& p) {
    const Mat Z = pauli_z(), X = pauli_x(), Y = pauli_y(), I2 = identity(2);
    const double a = ineq.alpha, b = ineq.beta;
    const bool three = p.n_settings == 3;
    Mat rho_term, s00_term;
    if (ineq.has_untrusted_marginal()) {
        rho_term = -a * I2 - b * Z - X - (three ? Y : Mat(Mat::Zero(2, 2)));
        s00_term = 2 * (a * I2 + b * Z);
    } else {
        rho_term = (a - b) * Z - X - (three ? Y : Mat(Mat::Zero(2, 2)));
        s00_term = 2 * b * Z;
    }
    Mat C = Mat::Zero(p.dim(), p.dim());
    // Tr(C Gamma) = sum_blocks Tr[C_(i,j) Gamma_(j,i)]; blocks hold sigma^T
    C.block(0, 0, 2, 2) = rho_term.transpose();
    C.block(2, 0, 2, 2) = s00_term.transpose();
    C.block(4, 0, 2, 2) = 2 * X.transpose();
    if (three) C.block(6, 0, 2, 2) = 2 * Y.transpose();
    return (C + dag(C)) / 2;
}

struct SdpConstraints {
    std::vector<Mat> As;  // Hermitian; the last one is the steering functional
    RVec b;               // b for all but the functional slot (set per solve)
};

/**
 * Equality classes + unit trace + functional. The homogeneous class
 * constraints are heavily redundant as generated; they are replaced by an
 * orthonormal basis of their span (same constraint subspace, b = 0), which
 * keeps the dual Newton system well conditioned.
 */
inline SdpConstraints sdp_constraints(const SteeringInequality& ineq, const GammaPattern& p) {
    const int n = p.dim();
    SdpConstraints sc;
    std::vector<Mat> raw;
    for (size_t c = 0; c < p.classes.size(); ++c) {
        const auto [i0, j0] = p.classes[c][0];
        for (size_t m = 1; m < p.classes[c].size(); ++m) {
            const auto [i, j] = p.classes[c][m];
            for (int q = 0; q < 2; ++q)
                for (int r = 0; r < 2; ++r) {
                    Mat P = Mat::Zero(n, n);
                    P(2 * i + q, 2 * j + r) = 1;
                    P(2 * i0 + q, 2 * j0 + r) -= 1;
                    raw.push_back((P + dag(P)) / 2);
                    Mat Q = kI * P;
                    raw.push_back((Q + dag(Q)) / 2);
                }
        }
    }
    // modified Gram-Schmidt over the Frobenius inner product
    auto ip = [](const Mat& a, const Mat& b) { return (dag(a) * b).trace().real(); };
    for (const auto& cand : raw) {
        Mat v = cand;
        for (const auto& u : sc.As) v -= ip(u, v) * u;
        for (const auto& u : sc.As) v -= ip(u, v) * u;  // second pass for stability
        const double nv = v.norm();
        if (nv > 1e-10) sc.As.push_back(v / nv);
    }
    std::vector<double> bs(sc.As.size(), 0.0);
    Mat T = Mat::Zero(n, n);
    T(0, 0) = T(1, 1) = 1;  // Tr rho_C = 1
    sc.As.push_back(T);
    bs.push_back(1.0);
    sc.As.push_back(functional_matrix(ineq, p));
    bs.push_back(0.0);  // placeholder, set to the observed value per solve
    sc.b = Eigen::Map<RVec>(bs.data(), static_cast<long>(bs.size()));
    return sc;
}

/** Exact SWAP fidelity of a strategy, used as the test oracle. */
inline double swap_fidelity_strategy(const Mat& rho, const std::vector<Mat>& E, double theta) {
    auto eig = eig_hermitian(rho);
    Mat P = eig.eigenvectors;  // columns scaled below: purification on env dim 4
    for (int k = 0; k < 4; ++k) P.col(k) *= std::sqrt(std::max(0.0, eig.eigenvalues(k)));
    const Mat K0 = E[0];
    const Mat K1 = (2.0 * E[1] - identity(2)) * (identity(2) - E[0]);
    // out[t][u][env][anc]
    Complex out[2][2][4][2];
    for (int t = 0; t < 2; ++t)
        for (int u = 0; u < 2; ++u)
            for (int k = 0; k < 4; ++k) {
                Complex v0 = 0, v1 = 0;
                for (int b = 0; b < 2; ++b) {
                    v0 += K0(u, b) * P(2 * t + b, k);
                    v1 += K1(u, b) * P(2 * t + b, k);
                }
                out[t][u][k][0] = v0;
                out[t][u][k][1] = v1;
            }
    Mat rs = Mat::Zero(4, 4);  // on (trusted, ancilla)
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int w = 0; w < 2; ++w) {
                    Complex acc = 0;
                    for (int u = 0; u < 2; ++u)
                        for (int k = 0; k < 4; ++k)
                            acc += out[x][u][k][y] * std::conj(out[z][u][k][w]);
                    rs(2 * x + y, 2 * z + w) = acc;
                }
    const Vec tgt = target_state(theta);
    return (tgt.adjoint() * rs * tgt)(0).real();
}

}  // namespace detail

struct SdpResult {
    double f_min = 0;       // dual objective: a true lower bound by weak duality
    double dual_gap = 0;    // estimated gap to the primal minimum
    std::string status;     // "optimal", "max_iter", "infeasible"
};

/**
 * Lower bound on the extractable fidelity with |Phi(theta)> given the
 * observed steering value: minimize Tr(M Gamma) over PSD moment matrices with
 * the label-equality pattern, unit-trace rho_C, and functional = observed.
 * Solved in dual form, so the returned value is a valid lower bound even at
 * loose tolerance.
 */
inline SdpResult solve_min_fidelity(const SteeringInequality& ineq, double theta,
                                    double observed, double solver_tol = 1e-6) {
    ineq.validate();
    if (ineq.family == Family::TiltedAnalog)
        throw std::invalid_argument("solve_min_fidelity: marginal families only");
    SdpResult out;
    const double q = quantum_bound(ineq);
    if (observed > q + 1e-6) {
        out.status = "infeasible";
        return out;
    }
    observed = std::min(observed, q);  // absorb rounding right at the bound
    const auto pattern = build_gamma_pattern(ineq.n_settings());
    auto sc = detail::sdp_constraints(ineq, pattern);
    sc.b(sc.b.size() - 1) = observed;

    LmiProblem p;
    p.F0 = {detail::herm_embed_sdp(objective_m(theta, ineq.n_settings()).cast<Complex>())};
    p.b = sc.b;
    const int nv = static_cast<int>(sc.As.size());
    p.Fi.resize(nv);
    for (int i = 0; i < nv; ++i) p.Fi[i] = {RMat(-detail::herm_embed_sdp(sc.As[i]))};
    // the dual variables along the homogeneous constraints are unconstrained
    // directions; bound each with a 2x2 box block (|y_i| <= R) so barrier
    // centering stays well posed. Any feasible y is still a valid lower bound.
    const double box = 1e3;
    for (int i = 0; i < nv; ++i) {
        p.F0.push_back(box * RMat::Identity(2, 2));
        for (int j = 0; j < nv; ++j) p.Fi[j].push_back(RMat::Zero(2, 2));
        RMat off(2, 2);
        off << 0, 1, 1, 0;
        p.Fi[i].back() = off;
    }

    auto res = solve_lmi(p, 2 * solver_tol);  // embedded gap is twice the original
    out.f_min = res.objective;
    out.dual_gap = res.gap / 2;
    out.status = res.status;
    return out;
}

struct SweepRow {
    double observed;
    double f_min;
    std::string status;
    double dual_gap;
};

/** Fidelity bound along a grid of observed values; rows solve independently. */
inline std::vector<SweepRow> sweep_curve(const SteeringInequality& ineq, double theta,
                                         const std::vector<double>& grid,
                                         double solver_tol = 1e-6, int n_threads = 0) {
    std::vector<SweepRow> rows(grid.size());
    if (n_threads <= 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<int>(n_threads, static_cast<int>(grid.size()));
    std::atomic<size_t> next{0};
    auto worker = [&] {
        size_t i;
        while ((i = next.fetch_add(1)) < grid.size()) {
            auto r = solve_min_fidelity(ineq, theta, grid[i], solver_tol);
            rows[i] = {grid[i], r.f_min, r.status, r.dual_gap};
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

/** CSV serialization, header `observed,f_min,status,dual_gap`. */
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "observed,f_min,status,dual_gap\n";
    for (const auto& r : rows)
        out << r.observed << "," << r.f_min << "," << r.status << "," << r.dual_gap << "\n";
    return out.str();
}

}  // namespace steercert

#endif
