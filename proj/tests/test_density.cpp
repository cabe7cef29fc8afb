#include "oracles.hpp"

#include <brownedge/density.hpp>

#include <doctest.h>

using namespace brownedge;
using doctest::Approx;

namespace {

const SpectralModel point_mass(Atomic{{{0, 1}}});
const SpectralModel a4(Atomic{{{1, 0.25}, {cplx(0, 1), 0.25}, {-1, 0.25}, {cplx(0, -1), 0.25}}});
constexpr double kPi = oracle::pi;

}  // namespace

TEST_CASE("circular law") {
    for (cplx z : {cplx(0, 0), cplx(0.5, -0.3), cplx(-0.1, 0.98)}) CHECK(rho(point_mass, z, 1) == Approx(1 / kPi).epsilon(1e-12));
    CHECK(rho(point_mass, cplx(0.7, 0.75), 1) == 0);
    CHECK(rho(point_mass, 0.5, 4) == Approx(1 / (4 * kPi)).epsilon(1e-12));
}

TEST_CASE("regularized density equals the Laplacian of the envelope potential") {
    const auto ref = oracle::four_atoms();
    const double t = 0.5;
    for (double eta : {0.2, 0.05})
        for (cplx z : {cplx(0.3, 0.1), cplx(0.9, 0.4), cplx(0.1, 0.05), cplx(1.6, -0.2)}) {
            auto F = [&](cplx w) { return oracle::envelope_potential(ref, w, eta, t); };
            const double want = oracle::laplacian(F, z, 1e-3) / (4 * kPi);
            CHECK(rho_reg(a4, z, eta, t) == Approx(want).epsilon(2e-5));
        }
}

TEST_CASE("density at eta = 0 equals the Laplacian of the limiting potential inside D_t") {
    const auto ref = oracle::four_atoms();
    const double t = 0.5;
    for (cplx z : {cplx(0.8, 0.1), cplx(0.95, 0.3)}) {
        REQUIRE(ref.m1(z, 0) > 1 / t + 0.1);
        auto F = [&](cplx w) { return oracle::envelope_potential(ref, w, 0, t); };
        CHECK(rho(a4, z, t) == Approx(oracle::laplacian(F, z, 1e-3) / (4 * kPi)).epsilon(2e-5));
    }
}

TEST_CASE("density is bounded by 1/(pi t) and regularization converges") {
    const double t = 0.5;
    for (cplx z : {cplx(0.8, 0.1), cplx(0.3, 0.7), cplx(0.1, 0.1)}) {
        const double r0 = rho(a4, z, t);
        CHECK(r0 <= 1 / (kPi * t) * (1 + 1e-12));
        CHECK(r0 >= 0);
        if (r0 > 0) CHECK(rho_reg(a4, z, 1e-7, t) == Approx(r0).epsilon(1e-5));
    }
}

TEST_CASE("edge jump: two expressions agree and the regularized limit is two thirds of it") {
    const double t = 1;
    const EdgeJump j = edge_jump(point_mass, 1, t);
    // |g|^2 / (pi m2) at |z| = 1 for a point mass is 1/pi
    CHECK(j.value == Approx(1 / kPi).epsilon(1e-12));
    CHECK(j.via_gradient == Approx(j.via_g).epsilon(1e-8));
    CHECK_FALSE(j.critical);
    CHECK(rho_reg(point_mass, 1, 1e-12, t) / j.value == Approx(2.0 / 3).epsilon(1e-4));
    CHECK_THROWS_AS(edge_jump(point_mass, 0.5, t), DomainError);
}

TEST_CASE("quadratic form at the Haar critical point") {
    const SpectralModel haar(HaarUnitary{});
    const QuadForm q = quad_form(haar, 0, 1);
    CHECK(q(Vec2(1, 0)) == Approx(2 / kPi).epsilon(1e-6));
    CHECK(q(Vec2(0.6, 0.8)) == Approx(2 / kPi).epsilon(1e-6));
    CHECK(q.P.norm() < 1e-12);
    CHECK_THROWS_AS(quad_form(point_mass, 1, 1), DomainError);
}

TEST_CASE("null projector") {
    Mat2 H;
    H << 2, 0, 0, 0;
    const Mat2 P = null_projector(H);
    CHECK(P(1, 1) == Approx(1));
    CHECK(std::abs(P(0, 0)) < 1e-12);
    CHECK(null_projector(Mat2::Identity()).norm() == 0);
}

TEST_CASE("edge profiles") {
    std::vector<double> s;
    for (int k = 0; k < 10; ++k) s.push_back(1e-3 * std::pow(10.0, 1.5 * k / 9));

    const SpectralModel haar(HaarUnitary{});
    const EdgeReport quad = edge_profile(haar, 0, 1, Vec2(1, 0), s);
    CHECK(quad.type == EdgeType::quadratic);
    CHECK(quad.slope == Approx(2).epsilon(0.02));
    CHECK(quad.fitted_prefactor == Approx(2 / kPi).epsilon(0.02));
    CHECK(quad.predicted_prefactor == Approx(2 / kPi).epsilon(1e-6));

    const EdgeReport sh = edge_profile(point_mass, 1, 1, Vec2(-1, 0), s);
    CHECK(sh.type == EdgeType::sharp);
    CHECK(sh.fitted_jump == Approx(1 / kPi).epsilon(1e-6));
    CHECK(sh.jump == Approx(1 / kPi).epsilon(1e-12));
}
