#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steercert/relations.hpp>

using namespace steercert;

namespace {

std::vector<SteeringInequality> extremal_cases() {
    return {
        {Family::TiltedAnalog, 0.0, 1.0},  {Family::TiltedAnalog, 0.5, 1.0},
        {Family::TiltedAnalog, 0.7, 1.0},  {Family::TwoSetTrusted, 0.0, 1.0},
        {Family::TwoSetTrusted, 0.8, 1.7}, {Family::TwoSetUntrusted, 0.5, 1.6},
        {Family::ThreeSetTrusted, 0.0, 1.0}, {Family::ThreeSetTrusted, 1.0, 2.0},
        {Family::ThreeSetUntrusted, 0.5, 2.4},
    };
}

}  // namespace

TEST_CASE("relation residuals vanish at exact maximal violation") {
    for (const auto& ineq : extremal_cases()) {
        CAPTURE(family_name(ineq.family));
        auto bob = ideal_bob_settings(ineq);
        const Vec psi = target_state(target_theta(ineq));
        for (const auto& r : relation_residuals(ineq, psi, bob)) {
            CAPTURE(r.relation_id);
            CHECK(r.norm < 1e-10);
        }
    }
}

TEST_CASE("ANTICOMM_ZY appears exactly for 3-setting families") {
    SteeringInequality two{Family::TwoSetTrusted, 0.0, 1.0};
    SteeringInequality three{Family::ThreeSetTrusted, 0.0, 1.0};
    auto r2 = relation_residuals(two, target_state(target_theta(two)), ideal_bob_settings(two));
    auto r3 =
        relation_residuals(three, target_state(target_theta(three)), ideal_bob_settings(three));
    CHECK(r2.size() == 3);
    CHECK(r3.size() == 4);
    CHECK(r3.back().relation_id == "ANTICOMM_ZY");
    CHECK(r3.back().norm < 1e-10);
}

TEST_CASE("residuals grow continuously off the extremal point") {
    SteeringInequality ineq{Family::TiltedAnalog, 0.5, 1.0};
    const Vec psi = target_state(target_theta(ineq));
    const double mu = std::atan(std::sin(2 * target_theta(ineq)));
    // perturb B0 alone so the derived Z~ actually tilts away from Z
    BobSettings bob{{{{std::sin(mu + 0.05), 0, std::cos(mu + 0.05)}},
                     {{-std::sin(mu), 0, std::cos(mu)}}}};
    auto rs = relation_residuals(ineq, psi, bob);
    CHECK(rs[0].norm > 1e-3);  // R1

    // a trusted-marginal family is sensitive to its B0 directly
    SteeringInequality s1{Family::TwoSetTrusted, 0.0, 1.0};
    BobSettings bob1{{{{0.05, 0, std::sqrt(1 - 0.05 * 0.05)}}, {{1, 0, 0}}}};
    auto rs1 = relation_residuals(s1, target_state(M_PI / 4), bob1);
    CHECK(rs1[0].norm > 1e-3);
}

TEST_CASE("degenerate tilted settings rejected") {
    SteeringInequality ineq{Family::TiltedAnalog, 0.0, 1.0};
    BobSettings bob{{{{0, 0, 1}}, {{0, 0, 1}}}};  // mu = 0: B0 = B1
    CHECK_THROWS_AS(relation_residuals(ineq, target_state(M_PI / 4), bob),
                    std::invalid_argument);
}

TEST_CASE("swap isometry extracts the target at maximal violation") {
    for (const auto& ineq : extremal_cases()) {
        CAPTURE(family_name(ineq.family));
        auto bob = ideal_bob_settings(ineq);
        const Vec psi = target_state(target_theta(ineq));
        auto out = swap_isometry_output(psi, ineq, bob);
        CHECK_FALSE(out.degraded);
        CHECK(std::abs(1 - out.target_fidelity) < 1e-10);
    }
}

TEST_CASE("bell state at theta = pi/4") {
    SteeringInequality ineq{Family::TwoSetTrusted, 0.0, 1.0};
    auto out = swap_isometry_output(target_state(M_PI / 4), ineq, ideal_bob_settings(ineq));
    CHECK(out.target_fidelity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement branches extract the flipped targets") {
    for (const auto& ineq : extremal_cases()) {
        CAPTURE(family_name(ineq.family));
        auto bob = ideal_bob_settings(ineq);
        const Vec psi = target_state(target_theta(ineq));
        CHECK(measurement_selftest_residual(ineq, psi, bob) < 1e-10);
    }
}

TEST_CASE("perturbed settings degrade the measurement branches") {
    SteeringInequality ineq{Family::ThreeSetTrusted, 0.0, 1.0};
    const Vec psi = target_state(target_theta(ineq));
    BobSettings bob{{{{0.12, 0, 0.992774}}, {{1, 0, 0}}, {{0, -1, 0}}}};
    CHECK(measurement_selftest_residual(ineq, psi, bob) > 1e-3);
}

TEST_CASE("swap fidelity is continuous in the settings") {
    SteeringInequality ineq{Family::TwoSetTrusted, 0.0, 1.0};
    const Vec psi = target_state(target_theta(ineq));
    double prev = -1;
    for (int k = 0; k <= 40; ++k) {
        const double eps = 0.01 * k / 40;
        BobSettings bob{{{{std::sin(eps), 0, std::cos(eps)}}, {{1, 0, 0}}}};
        auto out = swap_isometry_output(psi, ineq, bob);
        if (prev >= 0) CHECK(std::abs(out.target_fidelity - prev) < 10 * (0.01 / 40) + 1e-9);
        prev = out.target_fidelity;
    }
}

TEST_CASE("mixed-state convex extension stays below 1 and sane") {
    SteeringInequality ineq{Family::ThreeSetTrusted, 0.0, 1.0};
    auto bob = ideal_bob_settings(ineq);
    Mat rho = noisy_state(target_theta(ineq), 0.9);
    auto out = swap_isometry_output(rho, ineq, bob);
    CHECK(out.target_fidelity < 1.0);
    CHECK(out.target_fidelity > 0.5);
    CHECK(std::abs(out.extracted.trace().real() - 1.0) < 1e-12);
    CHECK(is_psd(out.extracted).first);
}
