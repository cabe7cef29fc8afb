#include "oracles.hpp"

#include <brownedge/dyson.hpp>
#include <brownedge/fit.hpp>

#include <doctest.h>

using namespace brownedge;
using doctest::Approx;

namespace {

const SpectralModel point_mass(Atomic{{{0, 1}}});
const SpectralModel a4(Atomic{{{1, 0.25}, {cplx(0, 1), 0.25}, {-1, 0.25}, {cplx(0, -1), 0.25}}});

}  // namespace

TEST_CASE("point mass: v = sqrt(t - |z|^2) inside, 0 outside") {
    for (double t : {0.25, 1.0, 3.0}) {
        for (double r : {0.0, 0.3, 0.9}) {
            const cplx z = std::polar(r * std::sqrt(t), 0.7);
            const VSolution s = solve_v(point_mass, z, 0, t);
            CHECK(s.regime == Regime::interior);
            CHECK(s.v == Approx(std::sqrt(t - std::norm(z))).epsilon(1e-11));
        }
        const VSolution out = solve_v(point_mass, 1.2 * std::sqrt(t), 0, t);
        CHECK(out.regime == Regime::exterior);
        CHECK(out.v == 0);
    }
}

TEST_CASE("regularized v matches bisection on the cubic") {
    const auto ref = oracle::four_atoms();
    for (double eta : {1e-1, 1e-3, 1e-6})
        for (cplx z : {cplx(0, 0), cplx(0.6, 0.2), cplx(1.7, 0.4), cplx(0.5, 0.5)}) {
            const double t = 0.5;
            const double want = oracle::bisect_v([&](double v) { return ref.m1(z, v); }, eta, t);
            const VSolution s = solve_v(a4, z, eta, t);
            CHECK(s.v == Approx(want).epsilon(1e-10));
            CHECK(s.v > eta);
        }
}

TEST_CASE("Haar unitary interior v in closed form") {
    const SpectralModel m(HaarUnitary{});
    const double t = 1;
    for (double r : {0.1, 0.7, 1.3}) {
        // 1/sqrt((1+r^2+v^2)^2 - 4r^2) = 1/t
        const double v2 = std::sqrt(t * t + 4 * r * r) - 1 - r * r;
        CHECK(solve_v(m, r, 0, t).v == Approx(std::sqrt(v2)).epsilon(1e-10));
    }
    CHECK(solve_v(m, 1.5, 0, t).regime == Regime::exterior);
}

TEST_CASE("classification uses a relative band") {
    CHECK(classify(2.0, 0.5) == Regime::boundary_band);
    CHECK(classify(2.0 + 1e-12, 0.5) == Regime::boundary_band);
    CHECK(classify(2.0 + 1e-6, 0.5) == Regime::interior);
    CHECK(classify(2.0 - 1e-6, 0.5) == Regime::exterior);
    CHECK(to_string(Regime::boundary_band) == "boundary-band");
}

TEST_CASE("inputs are validated") {
    CHECK_THROWS_AS(solve_v(a4, 0.3, -1, 0.5), DomainError);
    CHECK_THROWS_AS(solve_v(a4, 0.3, 0, 0), DomainError);
    CHECK(solve_v(a4, 1, 0, 0.5).regime == Regime::interior);
}

TEST_CASE("v profile is decreasing in eta and follows the boundary and exterior laws") {
    const double t = 0.5;
    std::vector<double> etas;
    for (int k = 0; k <= 12; ++k) etas.push_back(std::pow(10.0, -3 - 0.25 * k));
    // exterior: f = 1 at 0 < 1/t
    {
        const auto prof = v_profile(a4, 0, etas, t);
        for (std::size_t k = 1; k < prof.size(); ++k) CHECK(prof[k].v < prof[k - 1].v);
        std::vector<double> v;
        for (const auto& s : prof) v.push_back(s.v);
        CHECK(fit_loglog(etas, v).slope == Approx(1).epsilon(0.01));
        // v ~ eta / (1 - t f)
        CHECK(prof.back().v / etas.back() == Approx(1 / (1 - t * 1.0)).epsilon(1e-3));
    }
}

TEST_CASE("small-v expansion near the boundary") {
    // point mass: v / sqrt(f - 1/t) -> m2^{-1/2} as f -> 1/t
    const double t = 1;
    const auto c = v0_expansion_check(point_mass, 0.999, t);
    CHECK(c.deviation < 1e-2);
    CHECK(c.predicted == Approx(1 / std::sqrt(c.m2)));
    CHECK_THROWS_AS(v0_expansion_check(point_mass, 1.5, t), DomainError);
}
