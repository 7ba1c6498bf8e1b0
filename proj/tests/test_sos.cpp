#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steercert/sos.hpp>

using namespace steercert;

TEST_CASE("all 13 ids are operator identities over randomized settings") {
    struct Pt {
        SosId id;
        double a, b;
    };
    std::vector<Pt> pts;
    for (SosId id : all_sos_ids) {
        double a = 0.7, b = 1.9;
        switch (sos_family(id)) {
            case Family::TiltedAnalog: b = 1.0; break;
            case Family::TwoSetUntrusted: b = std::max(b, std::sqrt(1 + a * a) + 0.2); break;
            case Family::ThreeSetUntrusted: b = std::max(b, std::sqrt(4 + a * a) + 0.2); break;
            default: break;
        }
        pts.push_back({id, a, b});
    }
    for (const auto& p : pts) {
        CAPTURE(sos_id_name(p.id));
        CHECK(sos_max_residual(p.id, p.a, p.b, 100) < 1e-10);
    }
}

TEST_CASE("spot checks at other parameter points") {
    CHECK(sos_max_residual(SosId::MainSos1, 0.0, 1.0, 20) < 1e-10);
    CHECK(sos_max_residual(SosId::MainSos2, 1.5, 1.0, 20) < 1e-10);
    // feasibility boundary for the untrusted 2-setting family
    CHECK(sos_max_residual(SosId::DS2Sos1, 1.0, std::sqrt(2.0), 20) < 1e-10);
    CHECK(sos_max_residual(SosId::DI2Sos1, 0.0, 2.0, 20) < 1e-10);
    CHECK(sos_max_residual(SosId::DI1Sos1, 0.0, 1.0, 100) < 1e-10);
}

TEST_CASE("coefficients match the closed forms where parseable") {
    // tilted analog: both weights are 1/(2 S_Q)
    for (double a : {0.0, 1.0}) {
        const double sq2 = 2 * std::sqrt(2 + 0.5 * a * a);
        for (SosId id : {SosId::MainSos1, SosId::MainSos2}) {
            auto x = sos_coefficients(id, a, 1.0);
            REQUIRE(x.size() == 2);
            CHECK(x[0] == doctest::Approx(1 / (2 * sq2)).epsilon(1e-9));
            CHECK(x[1] == doctest::Approx(1 / (2 * sq2)).epsilon(1e-9));
        }
    }
    {  // S1 first decomposition: {beta/2, sqrt(1+alpha^2)/2}
        auto x = sos_coefficients(SosId::DS1Sos1, 0.7, 1.9);
        CHECK(x[0] == doctest::Approx(1.9 / 2).epsilon(1e-9));
        CHECK(x[1] == doctest::Approx(std::sqrt(1.49) / 2).epsilon(1e-9));
    }
    {  // I1 first decomposition: {beta/2, sqrt(4+alpha^2)/4 twice}
        auto x = sos_coefficients(SosId::DI1Sos1, 1.0, 3.0);
        CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-9));
        CHECK(x[1] == doctest::Approx(std::sqrt(5.0) / 4).epsilon(1e-9));
        CHECK(x[2] == doctest::Approx(std::sqrt(5.0) / 4).epsilon(1e-9));
    }
    {  // S1 second: {beta sqrt(1+alpha^2)/(2 S_Q), 1/(2 S_Q)}
        const double sq1 = std::sqrt(1.49), SQ = 1.9 + sq1;
        auto x = sos_coefficients(SosId::DS1Sos2, 0.7, 1.9);
        CHECK(x[0] == doctest::Approx(1.9 * sq1 / (2 * SQ)).epsilon(1e-9));
        CHECK(x[1] == doctest::Approx(1 / (2 * SQ)).epsilon(1e-9));
    }
    {  // I1 second (augmented): printed alpha1^2 = alpha2^2 and alpha3^2 = 1/(2 S_Q)
        const double SQ = 1.9 + std::sqrt(4.49);
        auto x = sos_coefficients(SosId::DI1Sos2, 0.7, 1.9);
        CHECK(x[0] == doctest::Approx(1.9 * std::sqrt(4.49) / (4 * SQ)).epsilon(1e-8));
        CHECK(x[1] == doctest::Approx(x[0]).epsilon(1e-9));
        CHECK(x[2] == doctest::Approx(1 / (2 * SQ)).epsilon(1e-8));
    }
    {  // I2 second: relation x4 = x5 = Delta * x6
        const double a = 1.0, b = 3.0, D = b / std::sqrt(4 + a * a);
        auto x = sos_coefficients(SosId::DI2Sos2, a, b);
        CHECK(x[3] == doctest::Approx(x[4]).epsilon(1e-9));
        CHECK(x[5] == doctest::Approx(x[6]).epsilon(1e-9));
        CHECK(x[3] == doctest::Approx(D * x[5]).epsilon(1e-8));
    }
}

TEST_CASE("all coefficients nonnegative inside the feasibility region") {
    for (SosId id : all_sos_ids) {
        double a = 0.5, b = 1.3;
        switch (sos_family(id)) {
            case Family::TiltedAnalog: b = 1.0; break;
            case Family::TwoSetUntrusted: b = std::sqrt(1 + a * a) + 0.4; break;
            case Family::ThreeSetUntrusted: b = std::sqrt(4 + a * a) + 0.4; break;
            default: break;
        }
        CAPTURE(sos_id_name(id));
        for (double x : sos_coefficients(id, a, b)) CHECK(x >= -1e-10);
    }
}

TEST_CASE("feasibility boundaries are tight to 1e-6") {
    const double a = 0.8;
    const double b2 = std::sqrt(1 + a * a), b3 = std::sqrt(4 + a * a);
    CHECK(sos_feasibility(SosId::DS2Sos1, a, b2 + 1e-6).ok);
    CHECK_FALSE(sos_feasibility(SosId::DS2Sos1, a, b2 - 1e-6).ok);
    CHECK(sos_feasibility(SosId::DI2Sos1, a, b3 + 1e-6).ok);
    CHECK_FALSE(sos_feasibility(SosId::DI2Sos1, a, b3 - 1e-6).ok);
    // spec'd example points
    CHECK_FALSE(sos_feasibility(SosId::DS2Sos1, 1.0, 1.0).ok);
    CHECK(sos_feasibility(SosId::DI2Sos1, 0.0, 2.0).ok);
    CHECK(sos_feasibility(SosId::DS1Sos1, 3.0, 0.1).ok);
    // rejection carries the violated condition
    CHECK_THROWS_AS(sos_coefficients(SosId::DS2Sos1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("P_i annihilate the extremal state") {
    for (SosId id : all_sos_ids) {
        SteeringInequality ineq{sos_family(id), 0.6, 1.0};
        if (ineq.family == Family::TwoSetUntrusted) ineq.beta = std::sqrt(1.36) + 0.3;
        if (ineq.family == Family::ThreeSetUntrusted) ineq.beta = std::sqrt(4.36) + 0.3;
        auto bob = ideal_bob_settings(ineq);
        const Vec psi = target_state(target_theta(ineq));
        auto sys = detail::sos_system(id, ineq.alpha, ineq.beta, bob);
        auto x = sos_coefficients(id, ineq.alpha, ineq.beta);
        CAPTURE(sos_id_name(id));
        // shift annihilates psi (max violation), so every weighted P_i must too
        CHECK((sys.shift * psi).norm() < 1e-9);
        for (size_t t = 0; t < sys.terms.size(); ++t) {
            if (x[t] < 1e-8) continue;
            CHECK((sys.terms[t] * psi).norm() < 1e-8);
        }
    }
}

TEST_CASE("verifier report") {
    auto rep = sos_report(0.7, 1.9, 10);
    CHECK(rep.find("MAIN_SOS1") != std::string::npos);
    CHECK(rep.find("D_I1_SOS3") != std::string::npos);
    CHECK(rep.find("sqrt(alpha^2+4)") != std::string::npos);
}
