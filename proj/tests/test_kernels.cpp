#include "oracles.hpp"

#include <brownedge/kernels.hpp>

#include <doctest.h>

using namespace brownedge;
using doctest::Approx;

namespace {

SpectralModel four_atoms() {
    return SpectralModel(Atomic{{{1, 0.25}, {cplx(0, 1), 0.25}, {-1, 0.25}, {cplx(0, -1), 0.25}}});
}

}  // namespace

TEST_CASE("atomic moments match direct sums") {
    const auto m = four_atoms();
    const auto ref = oracle::four_atoms();
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.7, 0.45), cplx(2, -1)}) {
        for (double v : {0.0, 0.05, 0.7}) {
            const MomentSet s = moments(m, z, v);
            CHECK(s.m1 == Approx(ref.m1(z, v)).epsilon(1e-14));
            CHECK(s.m2 == Approx(ref.m2(z, v)).epsilon(1e-14));
            CHECK(s.mixed == Approx(s.m2).epsilon(1e-14));
        }
        CHECK(f_eval(m, z) == Approx(ref.m1(z, 0)).epsilon(1e-14));
    }
    CHECK(f_eval(m, 0) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gradient and Hessian agree with finite differences of f") {
    const auto ref = oracle::four_atoms();
    const auto m = four_atoms();
    const cplx z(0.31, -0.22);
    const double h = 1e-4;
    auto f = [&](cplx w) { return ref.m1(w, 0); };
    const Vec2 g = grad_f(m, z);
    CHECK(g(0) == Approx((f(z + h) - f(z - h)) / (2 * h)).epsilon(1e-7));
    CHECK(g(1) == Approx((f(z + cplx(0, h)) - f(z - cplx(0, h))) / (2 * h)).epsilon(1e-7));
    const Mat2 H = hess_f(m, z);
    const double hh = 1e-3;
    CHECK(H(0, 0) == Approx((f(z + hh) - 2 * f(z) + f(z - hh)) / (hh * hh)).epsilon(1e-5));
    CHECK(H(1, 1) == Approx((f(z + cplx(0, hh)) - 2 * f(z) + f(z - cplx(0, hh))) / (hh * hh)).epsilon(1e-5));
    const double hxy = (f(z + cplx(hh, hh)) - f(z + cplx(hh, -hh)) - f(z + cplx(-hh, hh)) + f(z + cplx(-hh, -hh))) /
                       (4 * hh * hh);
    CHECK(H(0, 1) == Approx(hxy).epsilon(1e-5));
    CHECK(H(0, 1) == Approx(H(1, 0)));
}

TEST_CASE("Haar unitary f and Hessian at the origin") {
    const SpectralModel m(HaarUnitary{});
    for (cplx z : {cplx(0.2, 0.1), cplx(1.3, -0.4), cplx(0, 3)})
        for (double v : {0.0, 0.3}) CHECK(moments(m, z, v).m1 == Approx(oracle::haar_m1(z, v)).epsilon(1e-12));
    CHECK(f_eval(m, std::sqrt(2.0)) == Approx(1.0).epsilon(1e-12));
    const Mat2 H = hess_f(m, 0);
    CHECK(H(0, 0) == Approx(2).epsilon(1e-6));
    CHECK(H(1, 1) == Approx(2).epsilon(1e-6));
    CHECK(std::abs(H(0, 1)) < 1e-6);
}

TEST_CASE("Beta(3,4) moments") {
    const SpectralModel m(HermitianBeta{3, 4});
    CHECK(f_eval(m, 0) == Approx(15).epsilon(1e-10));
    CHECK(f_eval(m, 1) == Approx(5).epsilon(1e-10));
    for (cplx z : {cplx(0.4, 0.2), cplx(-0.3, 0.05), cplx(0.9, -0.5)})
        CHECK(f_eval(m, z) == Approx(oracle::beta_f(3, 4, z)).epsilon(1e-9));
}

TEST_CASE("product power f against a one-dimensional reference") {
    const SpectralModel m(ProductPower{1, 1.5});
    for (cplx z : {cplx(0, 0), cplx(-0.5, -0.5), cplx(1.4, 0.3), cplx(-0.2, 0.6)})
        CHECK(f_eval(m, z) == Approx(oracle::product_f(z)).epsilon(1e-8));
}

TEST_CASE("two-line model is a probability measure") {
    const SpectralModel m(TwoLine{});
    // Far away, f ~ 1/|z|^2 exactly when the total mass is 1.
    const double R = 1e4;
    CHECK(f_eval(m, R) * R * R == Approx(1).epsilon(1e-3));
    // (35/384) * 2 * int_{-1}^{1} (1+y^2)^2 dy
    CHECK(f_eval(m, 0) == Approx(35.0 / 384 * 2 * 56 / 15).epsilon(1e-10));
    CHECK(std::abs(grad_f(m, 0).norm()) < 1e-8);
}

TEST_CASE("matrix model: diagonal matches atoms, Jordan block closed form") {
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(4, 4);
    D.diagonal() << 1, cplx(0, 1), -1, cplx(0, -1);
    const SpectralModel md(MatrixState{D});
    const auto ma = four_atoms();
    const cplx z(0.2, 0.35);
    CHECK(f_eval(md, z) == Approx(f_eval(ma, z)).epsilon(1e-13));
    CHECK((grad_f(md, z) - grad_f(ma, z)).norm() < 1e-7);
    CHECK((hess_f(md, z) - hess_f(ma, z)).norm() < 1e-5 * hess_f(ma, z).norm());

    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(2, 2);
    J(0, 1) = 1;
    const SpectralModel mj(MatrixState{J});
    CHECK_FALSE(mj.is_normal());
    for (cplx w : {cplx(0.5, 0.5), cplx(-1.2, 0.3)}) {
        const double r2 = std::norm(w);
        CHECK(f_eval(mj, w) == Approx(1 / r2 + 0.5 / (r2 * r2)).epsilon(1e-12));
    }
}

TEST_CASE("JSON round trip and validation") {
    for (const char* s : {R"({"type":"atomic","atoms":[{"re":0.5,"im":-1,"w":0.3},{"re":0,"im":0,"w":0.7}]})",
                          R"({"type":"haar_unitary"})", R"({"type":"product_power","p":1,"q":1.5})",
                          R"({"type":"hermitian_beta","alpha":3,"beta":4})", R"({"type":"two_line"})",
                          R"({"type":"hermitian_tabulated","points":[0,1,2],"values":[0,1,0]})",
                          R"({"type":"matrix","rows":[[1,[0,1]],[{"re":0,"im":0},2]]})"}) {
        const auto m = SpectralModel::from_json(nlohmann::json::parse(s));
        const auto back = SpectralModel::from_json(m.to_json());
        CHECK(back.to_json() == m.to_json());
        CHECK(f_eval(back, cplx(3.1, 2.7)) == Approx(f_eval(m, cplx(3.1, 2.7))));
    }
    using nlohmann::json;
    CHECK_THROWS_AS(SpectralModel::from_json(json::parse(R"({"type":"atomic","atoms":[{"re":0,"w":0.5}]})")),
                    ConfigError);
    CHECK_THROWS_AS(SpectralModel::from_json(json::parse(R"({"type":"hermitian_beta","alpha":-1,"beta":2})")),
                    ConfigError);
    CHECK_THROWS_AS(SpectralModel::from_json(json::parse(R"({"type":"nope"})")), ConfigError);
    CHECK_THROWS_AS(SpectralModel::from_json(json::parse(R"({"type":"matrix","rows":[[1,2]]})")), ConfigError);
    CHECK_THROWS_AS(
        SpectralModel::from_json(json::parse(R"({"type":"hermitian_tabulated","points":[0,2,1],"values":[0,1,0]})")),
        ConfigError);
}

TEST_CASE("grid spec") {
    const GridSpec g({-1, -2}, {1, 2}, 3, 5);
    CHECK(g.at(2, 4) == cplx(1, 2));
    CHECK(g.dy() == Approx(1));
    CHECK_THROWS_AS(GridSpec({1, 0}, {-1, 1}, 3, 3), ConfigError);
    CHECK_THROWS_AS(GridSpec({0, 0}, {1, 1}, 1, 3), ConfigError);
}

TEST_CASE("spectrum indicator") {
    const auto m = four_atoms();
    CHECK(spec_indicator(m, cplx(1, 0), 1e-9));
    CHECK_FALSE(spec_indicator(m, cplx(0.5, 0), 1e-3));
    const SpectralModel b(HermitianBeta{3, 4});
    CHECK(spec_indicator(b, cplx(0.5, 0), 1e-9));
    CHECK_FALSE(spec_indicator(b, cplx(0.5, 0.1), 1e-3));
}

TEST_CASE("assumption check") {
    const auto a4 = assumption_check(four_atoms(), 0.5, 32);
    CHECK(a4.holds);
    CHECK_FALSE(a4.certificate.empty());

    const SpectralModel pp(ProductPower{1, 1.5});
    const auto bad = assumption_check(pp, 0.2, 48);
    CHECK_FALSE(bad.holds);
    REQUIRE_FALSE(bad.witnesses.empty());
    CHECK(bad.min_f == Approx(f_eval(pp, 0)).epsilon(1e-6));
    CHECK(std::abs(bad.witnesses.front().z) < 1e-9);
    CHECK(assumption_check(pp, 0.9, 48).holds);
}
