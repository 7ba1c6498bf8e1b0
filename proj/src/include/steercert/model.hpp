#ifndef STEERCERT_MODEL_HPP
#define STEERCERT_MODEL_HPP

#include "qmat.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace steercert {

/**
 * The five steering-inequality families.
 *
 * TiltedAnalog      : alpha<Z> + <Z(B0+B1)> + <X(B0-B1)>            (beta fixed to 1)
 * TwoSetTrusted     : alpha<Z> + beta<Z B0> + <X B1>                (S^(1))
 * TwoSetUntrusted   : alpha<B0> + beta<Z B0> + <X B1>               (S^(2))
 * ThreeSetTrusted   : alpha<Z> + beta<Z B0> + <X B1> + <Y B2>       (I^(1))
 * ThreeSetUntrusted : alpha<B0> + beta<Z B0> + <X B1> + <Y B2>      (I^(2))
 */
enum class Family {
    TiltedAnalog,
    TwoSetTrusted,
    TwoSetUntrusted,
    ThreeSetTrusted,
    ThreeSetUntrusted,
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::TiltedAnalog: return "tilted-analog";
        case Family::TwoSetTrusted: return "two-trusted";
        case Family::TwoSetUntrusted: return "two-untrusted";
        case Family::ThreeSetTrusted: return "three-trusted";
        case Family::ThreeSetUntrusted: return "three-untrusted";
    }
    return "?";
}

struct SteeringInequality {
    Family family;
    double alpha = 0.0;
    double beta = 1.0;

    int n_settings() const {
        return (family == Family::ThreeSetTrusted || family == Family::ThreeSetUntrusted) ? 3 : 2;
    }
    bool has_untrusted_marginal() const {
        return family == Family::TwoSetUntrusted || family == Family::ThreeSetUntrusted;
    }

    /** Throws std::invalid_argument if (alpha, beta) is outside the family's region. */
    void validate() const {
        if (!(alpha >= 0)) throw std::invalid_argument("alpha must be >= 0");
        switch (family) {
            case Family::TiltedAnalog:
                if (!(alpha < 2)) throw std::invalid_argument("tilted-analog requires alpha < 2");
                if (beta != 1.0) throw std::invalid_argument("tilted-analog fixes beta = 1");
                break;
            case Family::TwoSetUntrusted:
                if (!(beta * beta >= alpha * alpha + 1))
                    throw std::invalid_argument("two-untrusted requires beta >= sqrt(1+alpha^2)");
                break;
            case Family::ThreeSetUntrusted:
                if (!(beta >= std::sqrt(4 + alpha * alpha)))
                    throw std::invalid_argument("three-untrusted requires beta >= sqrt(4+alpha^2)");
                break;
            default:
                if (!(beta > 0)) throw std::invalid_argument("beta must be > 0");
                break;
        }
    }
};

struct BobObservable {
    std::array<double, 3> bloch;  // (nx, ny, nz)

    Mat matrix() const {
        return bloch[0] * pauli_x() + bloch[1] * pauli_y() + bloch[2] * pauli_z();
    }
};

struct BobSettings {
    std::vector<BobObservable> observables;
};

/** |Phi(theta)> = cos(theta)|00> + sin(theta)|11>. */
inline Vec target_state(double theta) {
    Vec v = Vec::Zero(4);
    v(0) = std::cos(theta);
    v(3) = std::sin(theta);
    return v;
}

/** Target angle theta in (0, pi/4], from the family's sin(2 theta) relation. */
inline double target_theta(const SteeringInequality& ineq) {
    ineq.validate();
    const double a = ineq.alpha;
    double s2t;
    switch (ineq.family) {
        case Family::TiltedAnalog: s2t = std::sqrt((4 - a * a) / (4 + a * a)); break;
        case Family::TwoSetTrusted:
        case Family::TwoSetUntrusted: s2t = 1.0 / std::sqrt(1 + a * a); break;
        default: s2t = 2.0 / std::sqrt(4 + a * a); break;
    }
    return 0.5 * std::asin(s2t);
}

/** Bob settings attaining the quantum bound. */
inline BobSettings ideal_bob_settings(const SteeringInequality& ineq) {
    ineq.validate();
    if (ineq.family == Family::TiltedAnalog) {
        const double mu = std::atan(std::sin(2 * target_theta(ineq)));
        return {{{{std::sin(mu), 0, std::cos(mu)}}, {{-std::sin(mu), 0, std::cos(mu)}}}};
    }
    BobSettings s{{{{0, 0, 1}}, {{1, 0, 0}}}};
    if (ineq.n_settings() == 3) s.observables.push_back({{0, -1, 0}});
    return s;
}

/** 4x4 Hermitian operator whose expectation is the inequality's left-hand side. */
inline Mat steering_operator(const SteeringInequality& ineq, const BobSettings& bob) {
    ineq.validate();
    if (static_cast<int>(bob.observables.size()) != ineq.n_settings())
        throw std::invalid_argument("steering_operator: setting count mismatch");
    const Mat I2 = identity(2), Z = pauli_z(), X = pauli_x(), Y = pauli_y();
    const Mat B0 = bob.observables[0].matrix();
    const Mat B1 = bob.observables[1].matrix();
    switch (ineq.family) {
        case Family::TiltedAnalog:
            return ineq.alpha * kron(Z, I2) + kron(Z, Mat(B0 + B1)) + kron(X, Mat(B0 - B1));
        case Family::TwoSetTrusted:
            return ineq.alpha * kron(Z, I2) + ineq.beta * kron(Z, B0) + kron(X, B1);
        case Family::TwoSetUntrusted:
            return ineq.alpha * kron(I2, B0) + ineq.beta * kron(Z, B0) + kron(X, B1);
        case Family::ThreeSetTrusted: {
            const Mat B2 = bob.observables[2].matrix();
            return ineq.alpha * kron(Z, I2) + ineq.beta * kron(Z, B0) + kron(X, B1) + kron(Y, B2);
        }
        case Family::ThreeSetUntrusted: {
            const Mat B2 = bob.observables[2].matrix();
            return ineq.alpha * kron(I2, B0) + ineq.beta * kron(Z, B0) + kron(X, B1) + kron(Y, B2);
        }
    }
    throw std::logic_error("unreachable");
}

/** Closed-form LHS (local-hidden-state) bound. */
inline double lhs_bound_closed_form(const SteeringInequality& ineq) {
    ineq.validate();
    const double a = ineq.alpha, b = ineq.beta;
    switch (ineq.family) {
        case Family::TiltedAnalog: return a + 2;
        case Family::TwoSetTrusted: return std::sqrt(1 + (a + b) * (a + b));
        case Family::TwoSetUntrusted: return a + std::sqrt(1 + b * b);
        case Family::ThreeSetTrusted: return std::sqrt(2 + (a + b) * (a + b));
        case Family::ThreeSetUntrusted: return a + std::sqrt(2 + b * b);
    }
    throw std::logic_error("unreachable");
}

/**
 * LHS bound by brute force: max over deterministic sign assignments b_k of the
 * largest eigenvalue of the resulting trusted-side 2x2 operator.
 */
inline double lhs_bound(const SteeringInequality& ineq) {
    ineq.validate();
    const int n = ineq.n_settings();
    const Mat Z = pauli_z(), X = pauli_x(), Y = pauli_y(), I2 = identity(2);
    double best = -1e300;
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::array<double, 3> s{};
        for (int k = 0; k < n; ++k) s[k] = (mask >> k) & 1 ? 1.0 : -1.0;
        Mat O;
        switch (ineq.family) {
            case Family::TiltedAnalog:
                O = ineq.alpha * Z + (s[0] + s[1]) * Z + (s[0] - s[1]) * X;
                break;
            case Family::TwoSetTrusted:
                O = ineq.alpha * Z + ineq.beta * s[0] * Z + s[1] * X;
                break;
            case Family::TwoSetUntrusted:
                O = ineq.alpha * s[0] * I2 + ineq.beta * s[0] * Z + s[1] * X;
                break;
            case Family::ThreeSetTrusted:
                O = ineq.alpha * Z + ineq.beta * s[0] * Z + s[1] * X + s[2] * Y;
                break;
            case Family::ThreeSetUntrusted:
                O = ineq.alpha * s[0] * I2 + ineq.beta * s[0] * Z + s[1] * X + s[2] * Y;
                break;
        }
        best = std::max(best, eig_hermitian(O).eigenvalues(0));
    }
    return best;
}

/** Maximum quantum value of the inequality. */
inline double quantum_bound(const SteeringInequality& ineq) {
    ineq.validate();
    const double a = ineq.alpha, b = ineq.beta;
    switch (ineq.family) {
        case Family::TiltedAnalog: return std::sqrt(8 + 2 * a * a);
        case Family::TwoSetTrusted:
        case Family::TwoSetUntrusted: return b + std::sqrt(1 + a * a);
        default: return b + std::sqrt(4 + a * a);
    }
}

/** Tr(rho * S) for the given settings; imaginary residue is a consistency error. */
inline double violation(const SteeringInequality& ineq, const Mat& rho, const BobSettings& bob) {
    const Complex v = (steering_operator(ineq, bob) * rho).trace();
    if (std::abs(v.imag()) > 1e-10)
        throw std::runtime_error("violation: non-real expectation value");
    return v.real();
}

/** v |Phi(theta)><Phi(theta)| + (1-v) I/4. */
inline Mat noisy_state(double theta, double visibility) {
    if (visibility < 0 || visibility > 1)
        throw std::invalid_argument("noisy_state: visibility outside [0,1]");
    const Vec phi = target_state(theta);
    return visibility * (phi * phi.adjoint()) + (1 - visibility) * identity(4) / 4.0;
}

}  // namespace steercert

#endif
