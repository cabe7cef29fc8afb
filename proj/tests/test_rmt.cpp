#include <brownedge/density.hpp>
#include <brownedge/rmt.hpp>

#include <doctest.h>

#include <numbers>

using namespace brownedge;
using doctest::Approx;

TEST_CASE("Philox4x32-10 known answers") {
    using A = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("frozen 2x2 Ginibre sample") {
    const Eigen::MatrixXcd X = sample_ginibre(2, 7);
    const cplx want[2][2] = {{{-0.2224953883442416, 0.54959472831161094}, {0.027441567897923239, -0.24291306473619997}},
                             {{-0.75953249526709143, -0.20657786817125376}, {0.32092726757441231, 0.76400596268884224}}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(X(i, j).real() == Approx(want[i][j].real()).epsilon(1e-14));
            CHECK(X(i, j).imag() == Approx(want[i][j].imag()).epsilon(1e-14));
        }
    CHECK(sample_ginibre(2, 7) == X);
    CHECK(sample_ginibre(2, 8) != X);
}

TEST_CASE("uniforms lie strictly inside (0,1)") {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto u = uniform_pair(3, RngRole::ginibre, i);
        CHECK(u[0] > 0);
        CHECK(u[0] < 1);
        CHECK(u[1] > 0);
        CHECK(u[1] < 1);
    }
}

TEST_CASE("Ginibre normalization") {
    const int N = 300;
    const Eigen::MatrixXcd X = sample_ginibre(N, 11);
    CHECK((X * X.adjoint()).trace().real() / N == Approx(1).epsilon(0.02));
    CHECK(std::abs(X.mean()) < 0.01);
}

TEST_CASE("empirical f of a diagonal matrix") {
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(3, 3);
    W.diagonal() << 1, cplx(0, 2), 0.5;
    const double eta = 0.3;
    double want = 0;
    for (double r2 : {1.0, 4.0, 0.25}) want += 1 / (r2 + eta * eta);
    CHECK(empirical_f(W, eta) == Approx(want / 3).epsilon(1e-13));
}

TEST_CASE("matrix realizations reproduce the model") {
    const SpectralModel a4(Atomic{{{1, 0.25}, {cplx(0, 1), 0.25}, {-1, 0.25}, {cplx(0, -1), 0.25}}});
    const auto r = realize_matrix(a4, 8, 0);
    CHECK(r.N == 8);
    int ones = 0;
    for (int i = 0; i < 8; ++i) ones += r.A(i, i) == cplx(1, 0);
    CHECK(ones == 2);
    CHECK_FALSE(r.provenance.empty());

    // nilpotent shift: *-moments approach those of a Haar unitary as N grows
    const auto h = realize_matrix(SpectralModel(HaarUnitary{}), 64, 0);
    CHECK((h.A.adjoint() * h.A).trace().real() == Approx(63));
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(64, 64);
    for (int k = 0; k < 64; ++k) P = P * h.A;
    CHECK(P.norm() == 0);

    const auto b = realize_matrix(SpectralModel(HermitianBeta{3, 4}), 400, 0);
    CHECK(b.A.diagonal().real().mean() == Approx(3.0 / 7).epsilon(1e-3));
    CHECK_THROWS_AS(realize_matrix(SpectralModel(TwoLine{}), 7, 0), DomainError);
}

TEST_CASE("empirical v and density for the circular law") {
    const SpectralModel pm(Atomic{{{0, 1}}});
    const double eta = 0.05, t = 1;
    const auto ev = empirical_v(pm, 0.3, eta, t, 256, {1, 2});
    CHECK(ev.mean == Approx(ev.analytic.v).epsilon(0.03));
    const double r = empirical_rho_reg(pm, 0.2, 0.1, t, 256, 0, 1);
    CHECK(r == Approx(rho_reg(pm, 0.2, 0.1, t)).epsilon(0.1));
    // t = 0 leaves only the regularization
    CHECK(empirical_v(pm, 0.3, eta, 0, 16, {1}).mean == Approx(eta).epsilon(1e-12));
}

TEST_CASE("validation report on a small grid") {
    const SpectralModel pm(Atomic{{{0, 1}}});
    const auto rep = validate(pm, 1, GridSpec::square(1.5, 3), 128, 0.1, {1, 2});
    CHECK(rep.rows.size() == 9);
    CHECK(rep.median_v_error < 0.05);
    const auto j = to_json(rep);
    CHECK(j["rows"].size() == 9);
    CHECK(j["N"] == 128);
}
