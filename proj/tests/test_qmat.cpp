#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <steercert/qmat.hpp>

#include <random>

using namespace steercert;

namespace {
std::mt19937_64 rng(12345);

Mat random_hermitian(int n) {
    std::normal_distribution<double> g;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return Mat(0.5 * (m + m.adjoint()));
}

Vec random_pure(int n) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
    return v / v.norm();
}
}  // namespace

TEST_CASE("kron basics") {
    CHECK((kron(identity(2), identity(2)) - identity(4)).norm() == doctest::Approx(0.0));

    Vec v00 = Vec::Zero(4);
    v00(0) = 1;
    Vec flipped = kron(pauli_x(), pauli_x()) * v00;
    CHECK(std::abs(flipped(3) - Complex(1, 0)) < 1e-15);

    Vec zz = kron(pauli_z(), pauli_z()) * v00;
    CHECK((zz - v00).norm() < 1e-15);
}

TEST_CASE("eig_hermitian ordering and reconstruction") {
    auto r = eig_hermitian(pauli_z());
    CHECK(r.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(r.eigenvalues(1) == doctest::Approx(-1.0));

    auto id = eig_hermitian(identity(4));
    for (int i = 0; i < 4; ++i) CHECK(id.eigenvalues(i) == doctest::Approx(1.0));

    for (int t = 0; t < 20; ++t) {
        Mat h = random_hermitian(4);
        auto e = eig_hermitian(h);
        Mat recon = Mat::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            recon += e.eigenvalues(i) * (e.eigenvectors.col(i) * e.eigenvectors.col(i).adjoint());
        CHECK((recon - h).norm() < 1e-10);
        CHECK((e.eigenvectors.adjoint() * e.eigenvectors - identity(4)).norm() < 1e-10);
        for (int i = 1; i < 4; ++i) CHECK(e.eigenvalues(i - 1) >= e.eigenvalues(i));
    }

    Mat bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(eig_hermitian(bad), std::invalid_argument);
}

TEST_CASE("is_psd") {
    auto [ok, margin] = is_psd(identity(2));
    CHECK(ok);
    CHECK(margin == doctest::Approx(1.0));

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = -1e-3;
    CHECK_FALSE(is_psd(d, 1e-9).first);

    // agree with a Cholesky-style attempt on random PSD/indefinite matrices
    for (int t = 0; t < 100; ++t) {
        Mat h = random_hermitian(4);
        if (t % 2 == 0) h = Mat(h * h.adjoint());  // force PSD
        auto [psd, m] = is_psd(h, 1e-9);
        Eigen::LLT<Mat> llt(h + 1e-9 * identity(4));
        bool chol_ok = (llt.info() == Eigen::Success);
        if (m > 1e-7 || m < -1e-7) CHECK(psd == chol_ok);
    }
}

TEST_CASE("fidelity_pure") {
    Vec phi = random_pure(4);
    CHECK(fidelity_pure(phi * phi.adjoint(), phi) == doctest::Approx(1.0));
    CHECK(fidelity_pure(identity(4) / 4.0, random_pure(4)) == doctest::Approx(0.25));

    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1 / std::sqrt(2.0);
    Mat rho = 0.9 * (bell * bell.adjoint()) + 0.1 * identity(4) / 4.0;
    CHECK(fidelity_pure(rho, bell) == doctest::Approx(0.925));

    for (int t = 0; t < 20; ++t) {
        Vec a = random_pure(4), b = random_pure(4);
        double f = fidelity_pure(a * a.adjoint(), b);
        double ov = std::norm((a.adjoint() * b)(0));
        CHECK(f == doctest::Approx(ov).epsilon(1e-10));
    }

    CHECK_THROWS_AS(fidelity_pure(2.0 * identity(4) / 4.0, random_pure(4)),
                    std::invalid_argument);
}

TEST_CASE("partial_trace") {
    double c = std::cos(0.4), s = std::sin(0.4);
    Vec phi = Vec::Zero(4);
    phi(0) = c;
    phi(3) = s;
    Mat rho = phi * phi.adjoint();
    Mat ra = partial_trace(rho, Side::A);
    CHECK(ra(0, 0).real() == doctest::Approx(c * c));
    CHECK(ra(1, 1).real() == doctest::Approx(s * s));

    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1 / std::sqrt(2.0);
    Mat rb = partial_trace(bell * bell.adjoint(), Side::B);
    CHECK((rb - identity(2) / 2.0).norm() < 1e-12);

    // product state and linearity / trace preservation
    for (int t = 0; t < 10; ++t) {
        Mat a = random_hermitian(2), b = random_hermitian(2);
        a = Mat(a * a.adjoint());
        b = Mat(b * b.adjoint());
        a /= a.trace().real();
        b /= b.trace().real();
        CHECK((partial_trace(kron(a, b), Side::A) - a).norm() < 1e-12);
        Mat h = random_hermitian(4);
        CHECK(partial_trace(h, Side::B).trace().real() ==
              doctest::Approx(h.trace().real()).epsilon(1e-12));
    }
}
