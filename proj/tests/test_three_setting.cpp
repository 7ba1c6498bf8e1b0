#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steercert/three_setting.hpp>

using namespace steercert;

TEST_CASE("certificate constants") {
    ThreeSettingCertificate c;
    c.s = 3.0 / (12 - 4 * std::sqrt(2.0));
    c.tau = 1 - 3 * c.s;
    CHECK(c.s == doctest::Approx(0.4730).epsilon(1e-4));
    CHECK(c.s > 1 / (2 * (3 - std::sqrt(3.0))));  // paper admits non-optimality
    CHECK(c.fidelity_raw(3.0) == doctest::Approx(1.0));
    // F = 0.5 threshold
    CHECK(3 - 0.5 / c.s == doctest::Approx(1.94289).epsilon(1e-4));
}

TEST_CASE("tight point is handled exactly by the closed-form candidate") {
    const double s = 3.0 / (12 - 4 * std::sqrt(2.0)), tau = 1 - 3 * s;
    // mu = pi/4, B2 = +Y: the certificate is exactly tight here
    auto w = three_setting_point(M_PI / 4, M_PI / 2, 0.0, s, tau);
    CHECK_FALSE(w.used_sdp);
    CHECK(w.margin_full >= -1e-9);
    CHECK(w.margin_full <= 1e-6);
    CHECK(w.q2 == doctest::Approx(0.0));
    CHECK(w.q1 == doctest::Approx(0.5));
}

TEST_CASE("sdp fallback point") {
    const double s = 3.0 / (12 - 4 * std::sqrt(2.0)), tau = 1 - 3 * s;
    // a point where the closed-form candidates were observed to fail
    auto w = three_setting_point(0.785, 1.374, -0.98, s, tau);
    CHECK(w.margin_full >= -1e-9);
    CHECK(w.margin_g2 >= -1e-9);
}

TEST_CASE("grid certification (reduced grid)") {
    auto cert = certify_three_setting(20);
    CHECK(cert.worst_margin_full >= -1e-9);
    CHECK(cert.worst_margin_g2 >= -1e-9);
    CHECK(cert.n_points > 20 * 21 * 21);
    CHECK(cert.s == doctest::Approx(0.472951).epsilon(1e-5));
}

TEST_CASE("guessing-probability thresholds (Fig. 3 advantage)") {
    const double s3 = 3.0 / (12 - 4 * std::sqrt(2.0));
    const double S3 = 3 - 0.5 / s3;                  // 3-setting F=0.5 threshold
    const double p3 = 0.5 + S3 / 6.0;
    const double S2 = std::sqrt(2.0);                // 2-setting F=0.5 threshold
    const double p2 = 0.5 + S2 / 4.0;
    CHECK(p3 == doctest::Approx(0.82381).epsilon(1e-4));
    CHECK(p2 == doctest::Approx(0.85355).epsilon(1e-4));
    CHECK(p3 < p2 - 1e-4);
}

TEST_CASE("lmi solver sanity on a known problem") {
    // maximize t s.t. diag(1,2) - t I >= 0  ->  t = 1
    LmiProblem p;
    RMat d = RMat::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 2;
    p.F0 = {d};
    p.b = RVec::Ones(1);
    p.Fi = {{-RMat::Identity(2, 2)}};
    auto r = solve_lmi(p, 1e-9);
    CHECK(r.status == "optimal");
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));

    // infeasible: -I + t*0... constraint -I - y*0 >= 0
    LmiProblem q;
    q.F0 = {-RMat::Identity(2, 2)};
    q.b = RVec::Ones(1);
    q.Fi = {{RMat::Zero(2, 2)}};
    CHECK(solve_lmi(q).status == "infeasible");
}
