#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steercert/model.hpp>

#include <random>

using namespace steercert;

TEST_CASE("target_theta per family") {
    CHECK(target_theta({Family::TiltedAnalog, 0}) == doctest::Approx(M_PI / 4));
    double s2t = std::sin(2 * target_theta({Family::TiltedAnalog, 1}));
    CHECK(s2t == doctest::Approx(std::sqrt(3.0 / 5.0)));
    CHECK(target_theta({Family::TwoSetTrusted, 1, 1}) == doctest::Approx(M_PI / 8));
    CHECK(std::sin(2 * target_theta({Family::ThreeSetTrusted, 1, 1})) ==
          doctest::Approx(2 / std::sqrt(5.0)));
}

TEST_CASE("ideal settings and quantum bound attainment") {
    std::vector<SteeringInequality> cases = {
        {Family::TiltedAnalog, 0},          {Family::TiltedAnalog, 0.7},
        {Family::TwoSetTrusted, 0.5, 1.3},  {Family::TwoSetUntrusted, 0.5, 2.0},
        {Family::ThreeSetTrusted, 0.8, 0.6}, {Family::ThreeSetUntrusted, 1.0, 3.0},
    };
    for (const auto& ineq : cases) {
        auto bob = ideal_bob_settings(ineq);
        Vec phi = target_state(target_theta(ineq));
        double v = violation(ineq, phi * phi.adjoint(), bob);
        CHECK(v == doctest::Approx(quantum_bound(ineq)).epsilon(1e-9));
        CHECK(quantum_bound(ineq) > lhs_bound_closed_form(ineq));
    }

    auto bob3 = ideal_bob_settings({Family::ThreeSetTrusted, 0.3, 1});
    CHECK(bob3.observables[2].bloch[1] == doctest::Approx(-1.0));
}

TEST_CASE("tilted analog operator values") {
    SteeringInequality ineq{Family::TiltedAnalog, 0};
    auto bob = ideal_bob_settings(ineq);
    Vec bell = target_state(M_PI / 4);
    CHECK(violation(ineq, bell * bell.adjoint(), bob) == doctest::Approx(2 * std::sqrt(2.0)));

    Vec v00 = Vec::Zero(4);
    v00(0) = 1;
    CHECK(violation(ineq, v00 * v00.adjoint(), bob) == doctest::Approx(std::sqrt(2.0)));

    CHECK(violation(ineq, identity(4) / 4.0, bob) == doctest::Approx(0.0));
}

TEST_CASE("lhs_bound brute force matches closed form") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.0, 1.9), ub(0.1, 3.0);
    for (int t = 0; t < 50; ++t) {
        for (auto fam : {Family::TiltedAnalog, Family::TwoSetTrusted, Family::TwoSetUntrusted,
                         Family::ThreeSetTrusted, Family::ThreeSetUntrusted}) {
            SteeringInequality ineq{fam, ua(rng), ub(rng)};
            if (fam == Family::TiltedAnalog) ineq.beta = 1;
            if (fam == Family::TwoSetUntrusted)
                ineq.beta = std::sqrt(1 + ineq.alpha * ineq.alpha) + ub(rng);
            if (fam == Family::ThreeSetUntrusted)
                ineq.beta = std::sqrt(4 + ineq.alpha * ineq.alpha) + ub(rng);
            CHECK(lhs_bound(ineq) ==
                  doctest::Approx(lhs_bound_closed_form(ineq)).epsilon(1e-10));
        }
    }
    CHECK(lhs_bound({Family::TiltedAnalog, 0.5}) == doctest::Approx(2.5));
    CHECK(lhs_bound({Family::ThreeSetTrusted, 0, 1}) == doctest::Approx(std::sqrt(3.0)));
    CHECK(lhs_bound({Family::TwoSetTrusted, 1, std::sqrt(2.0)}) ==
          doctest::Approx(std::sqrt(1 + std::pow(1 + std::sqrt(2.0), 2))));
}

TEST_CASE("quantum bounds") {
    CHECK(quantum_bound({Family::TiltedAnalog, 1}) == doctest::Approx(std::sqrt(10.0)));
    CHECK(quantum_bound({Family::ThreeSetTrusted, 0, 1}) == doctest::Approx(3.0));
    CHECK(quantum_bound({Family::TwoSetTrusted, 1, std::sqrt(2.0)}) ==
          doctest::Approx(2 * std::sqrt(2.0)));
}

TEST_CASE("noisy_state and violation linearity") {
    Mat rho = noisy_state(M_PI / 4, 0.9);
    CHECK(rho.trace().real() == doctest::Approx(1.0));
    CHECK(is_psd(rho).first);
    CHECK(fidelity_pure(noisy_state(0.6, 0.4), target_state(0.6)) ==
          doctest::Approx(0.4 + 0.6 / 4));

    SteeringInequality ineq{Family::TiltedAnalog, 0};
    CHECK(violation(ineq, noisy_state(M_PI / 4, 0.9), ideal_bob_settings(ineq)) ==
          doctest::Approx(0.9 * 2 * std::sqrt(2.0)));

    CHECK((noisy_state(0.5, 0.0) - identity(4) / 4.0).norm() < 1e-12);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SteeringInequality({Family::TiltedAnalog, 2.0}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(SteeringInequality({Family::TwoSetUntrusted, 1, 1}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(SteeringInequality({Family::ThreeSetUntrusted, 0, 1.5}).validate(),
                    std::invalid_argument);
    CHECK_NOTHROW(SteeringInequality({Family::TwoSetUntrusted, 1, std::sqrt(2.0)}).validate());
}

TEST_CASE("steering_operator linear in Bloch vectors") {
    SteeringInequality ineq{Family::TwoSetTrusted, 0.5, 1.0};
    BobSettings a{{{{1, 0, 0}}, {{0, 0, 1}}}};
    BobSettings b{{{{0, 1, 0}}, {{0, 0, 1}}}};
    BobSettings mid{{{{0.5, 0.5, 0}}, {{0, 0, 1}}}};
    Mat lhs = steering_operator(ineq, mid);
    Mat rhs = 0.5 * steering_operator(ineq, a) + 0.5 * steering_operator(ineq, b);
    CHECK((lhs - rhs).norm() < 1e-12);
}
