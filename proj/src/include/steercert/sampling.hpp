#ifndef STEERCERT_SAMPLING_HPP
#define STEERCERT_SAMPLING_HPP

#include "certify_analytic.hpp"

#include <cstdint>
#include <random>

namespace steercert {

/**
 * Virtual guessing game equivalent to a trusted-marginal steering functional:
 * Bob's setting-i outcome selects which rotated Alice observable is queried.
 */
struct VirtualGame {
    double theta;  // sin(2 theta) = 2/sqrt(4+alpha^2)
    Mat A0, A1;    // cos(2 theta) sigma_z +- sin(2 theta) sigma_x
};

inline VirtualGame virtual_game(double alpha) {
    if (alpha < 0) throw std::invalid_argument("virtual_game: alpha must be >= 0");
    const double s2t = 2 / std::sqrt(4 + alpha * alpha);
    const double theta = 0.5 * std::asin(s2t);
    const double c2t = std::cos(2 * theta);
    VirtualGame g;
    g.theta = theta;
    g.A0 = c2t * pauli_z() + s2t * pauli_x();
    g.A1 = c2t * pauli_z() - s2t * pauli_x();
    return g;
}

/**
 * Frobenius residual of the game identity
 *   (alpha/2) Z (x) I + X (x) B1
 *     = (sqrt(4+alpha^2)/2) (A0 (x) B1^0 + A1 (x) B1^1)
 *     = (sqrt(4+alpha^2)/2) (2 A0^0 (x) B1^0 + 2 A1^0 (x) B1^1 - I (x) I)
 * evaluated with B1 = sigma_x. Vanishes exactly at sin(2 theta) =
 * 2/sqrt(4+alpha^2); the theta overload exposes the failure off that angle.
 */
inline double game_identity_residual(double alpha, double theta) {
    if (alpha < 0) throw std::invalid_argument("game_identity_residual: alpha must be >= 0");
    const double c2t = std::cos(2 * theta), s2t = std::sin(2 * theta);
    const Mat A0 = c2t * pauli_z() + s2t * pauli_x();
    const Mat A1 = c2t * pauli_z() - s2t * pauli_x();
    const Mat I2 = identity(2), B1 = pauli_x();
    const Mat B1p = (I2 + B1) / 2, B1m = (I2 - B1) / 2;
    const double w = std::sqrt(4 + alpha * alpha) / 2;
    const Mat lhs = (alpha / 2) * kron(pauli_z(), I2) + kron(pauli_x(), B1);
    const Mat rhs1 = w * (kron(A0, B1p) + kron(A1, B1m));
    const Mat rhs2 =
        w * (2 * kron(Mat((I2 + A0) / 2), B1p) + 2 * kron(Mat((I2 + A1) / 2), B1m) -
             kron(I2, I2));
    return std::max((lhs - rhs1).norm(), (lhs - rhs2).norm());
}

inline double game_identity_residual(double alpha) {
    return game_identity_residual(alpha, virtual_game(alpha).theta);
}

/**
 * Guessing probability of the testing game at the given functional value:
 * p = 1/2 + observed/(2 S_Q) for the trusted-marginal families, and the
 * 4-term XOR-game average 1/2 + observed/8 for the tilted analog (the source
 * text prints observed/4, which exceeds 1 at the quantum bound). No testing
 * game is known for the untrusted-marginal families.
 */
inline double guessing_probability(const SteeringInequality& ineq, double observed) {
    ineq.validate();
    if (ineq.has_untrusted_marginal())
        throw std::invalid_argument(
            "guessing_probability: no testing game for untrusted-marginal families");
    const double sq = quantum_bound(ineq);
    if (observed > sq + 1e-9)
        throw std::invalid_argument("guessing_probability: observed exceeds the quantum bound");
    if (ineq.family == Family::TiltedAnalog) return 0.5 + observed / 8.0;
    return 0.5 + observed / (2 * sq);
}

enum class PlanRegime { Coinciding, Quadratic };

inline std::string plan_regime_name(PlanRegime r) {
    return r == PlanRegime::Coinciding ? "COINCIDING" : "QUADRATIC";
}

struct SamplePlan {
    double epsilon = 0;     // infidelity target
    double delta = 0;       // significance level
    double c = 0;           // 1/(2 s S_Q)
    long long n_required = 0;
    PlanRegime regime = PlanRegime::Coinciding;
    std::string note;       // "order-of-magnitude" for the quadratic regime
};

/**
 * Copies needed so the average extractable fidelity exceeds 1 - epsilon at
 * confidence 1 - delta, assuming i.i.d. rounds. Coinciding quantum/algebraic
 * game bounds (trusted-marginal families): N = ceil(ln d^-1 / ln (1-c e)^-1).
 * Tilted analog (bounds differ): N = ceil(ln d^-1 / (c e)^2) with unit
 * constant, reported as an order-of-magnitude plan.
 */
inline SamplePlan sample_count(const SteeringInequality& ineq, double epsilon, double delta,
                               double cert_s) {
    ineq.validate();
    if (ineq.has_untrusted_marginal())
        throw std::invalid_argument(
            "sample_count: no testing game for untrusted-marginal families");
    if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1))
        throw std::invalid_argument("sample_count: epsilon and delta must lie in (0, 1)");
    if (!(cert_s > 0)) throw std::invalid_argument("sample_count: certificate slope must be > 0");
    SamplePlan plan;
    plan.epsilon = epsilon;
    plan.delta = delta;
    plan.c = 1 / (2 * cert_s * quantum_bound(ineq));
    if (plan.c * epsilon >= 1)
        throw std::invalid_argument("sample_count: infeasible plan (c*epsilon >= 1)");
    const double ld = std::log(1 / delta);
    if (ineq.family == Family::TiltedAnalog) {
        plan.regime = PlanRegime::Quadratic;
        plan.note = "order-of-magnitude";
        plan.n_required =
            static_cast<long long>(std::ceil(ld / (plan.c * plan.c * epsilon * epsilon)));
    } else {
        plan.regime = PlanRegime::Coinciding;
        plan.n_required = static_cast<long long>(std::ceil(ld / std::log(1 / (1 - plan.c * epsilon))));
    }
    plan.n_required = std::max<long long>(plan.n_required, 1);
    return plan;
}

inline SamplePlan sample_count(const SteeringInequality& ineq, double epsilon, double delta,
                               const RobustnessCertificate& cert) {
    return sample_count(ineq, epsilon, delta, cert.s);
}

/**
 * Operator whose expectation is the win probability of the weighted game
 * (setting-0 agreement plus the virtual sub-games on the other settings):
 * equals I/2 + S_hat/(2 S_Q) for any Bob settings.
 */
inline Mat game_win_operator(const SteeringInequality& ineq, const BobSettings& bob) {
    ineq.validate();
    if (ineq.family == Family::TiltedAnalog || ineq.has_untrusted_marginal())
        throw std::invalid_argument("game_win_operator: trusted-marginal families only");
    const double a = ineq.alpha, b = ineq.beta;
    const int n = ineq.n_settings();
    const double root = n == 3 ? std::sqrt(4 + a * a) : std::sqrt(1 + a * a);
    const Mat I2 = identity(2);
    const double c2t = a / root, s2t = (n == 3 ? 2 : 1) / root;

    // setting-0 agreement term
    const Mat B0 = bob.observables[0].matrix();
    Mat O = b * (kron(Mat((I2 + pauli_z()) / 2), Mat((I2 + B0) / 2)) +
                 kron(Mat((I2 - pauli_z()) / 2), Mat((I2 - B0) / 2)));
    // virtual sub-games: Bob's setting-k outcome selects the rotated Alice
    // observable built on sigma_x (k=1) or sigma_y (k=2)
    const double wk = n == 3 ? root / 2 : root;
    for (int k = 1; k < n; ++k) {
        const Mat sig = k == 1 ? pauli_x() : pauli_y();
        const Mat A0 = c2t * pauli_z() + s2t * sig;
        const Mat A1 = c2t * pauli_z() - s2t * sig;
        const Mat Bk = bob.observables[k].matrix();
        O += wk * (kron(Mat((I2 + A0) / 2), Mat((I2 + Bk) / 2)) +
                   kron(Mat((I2 + A1) / 2), Mat((I2 - Bk) / 2)));
    }
    return O / (root + b);
}

/**
 * Monte-Carlo simulation of the game on state rho with the given settings;
 * returns the empirical win frequency over n_trials seeded rounds.
 */
inline double simulate_game(const SteeringInequality& ineq, const Mat& rho,
                            const BobSettings& bob, int n_trials, std::uint64_t seed) {
    ineq.validate();
    if (ineq.family == Family::TiltedAnalog || ineq.has_untrusted_marginal())
        throw std::invalid_argument("simulate_game: trusted-marginal families only");
    const double a = ineq.alpha, b = ineq.beta;
    const int n = ineq.n_settings();
    const double root = n == 3 ? std::sqrt(4 + a * a) : std::sqrt(1 + a * a);
    const double c2t = a / root, s2t = (n == 3 ? 2 : 1) / root;
    const Mat I2 = identity(2);

    // per-sub-game win projectors and their selection weights
    std::vector<double> weights{b};
    std::vector<Mat> win_ops;
    {
        const Mat B0 = bob.observables[0].matrix();
        win_ops.push_back(kron(Mat((I2 + pauli_z()) / 2), Mat((I2 + B0) / 2)) +
                          kron(Mat((I2 - pauli_z()) / 2), Mat((I2 - B0) / 2)));
    }
    for (int k = 1; k < n; ++k) {
        weights.push_back(n == 3 ? root / 2 : root);
        const Mat sig = k == 1 ? pauli_x() : pauli_y();
        const Mat A0 = c2t * pauli_z() + s2t * sig;
        const Mat A1 = c2t * pauli_z() - s2t * sig;
        const Mat Bk = bob.observables[k].matrix();
        win_ops.push_back(kron(Mat((I2 + A0) / 2), Mat((I2 + Bk) / 2)) +
                          kron(Mat((I2 + A1) / 2), Mat((I2 - Bk) / 2)));
    }
    std::vector<double> pwin;
    for (const auto& w : win_ops) pwin.push_back(std::clamp((w * rho).trace().real(), 0.0, 1.0));

    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long long wins = 0;
    for (int t = 0; t < n_trials; ++t)
        if (u(rng) < pwin[pick(rng)]) ++wins;
    return static_cast<double>(wins) / n_trials;
}

}  // namespace steercert

#endif
