#include <brownedge/geometry.hpp>

#include <doctest.h>

#include <sstream>

using namespace brownedge;
using doctest::Approx;

namespace {

const SpectralModel point_mass(Atomic{{{0, 1}}});
const SpectralModel a4(Atomic{{{1, 0.25}, {cplx(0, 1), 0.25}, {-1, 0.25}, {cplx(0, -1), 0.25}}});

}  // namespace

TEST_CASE("boundary of the circular law is the circle of radius sqrt(t)") {
    const double t = 2;
    const auto trace = trace_boundary(point_mass, t, GridSpec::square(2, 101));
    REQUIRE(trace.curves.size() == 1);
    const auto& c = trace.curves.front();
    CHECK(c.closed);
    CHECK(c.vertices.size() > 100);
    for (std::size_t k = 0; k < c.vertices.size(); ++k) {
        CHECK(std::abs(c.vertices[k]) == Approx(std::sqrt(t)).epsilon(1e-10));
        // inward normal points to the centre
        const Vec2 r(c.vertices[k].real(), c.vertices[k].imag());
        CHECK(c.normal[k].dot(r) / r.norm() == Approx(-1).epsilon(1e-6));
    }
}

TEST_CASE("boundary vertices lie on the level set") {
    const double t = 0.5;
    const auto trace = trace_boundary(a4, t, default_grid(a4, t, 200));
    CHECK(trace.curves.size() == 4);
    for (const auto& c : trace.curves)
        for (cplx z : c.vertices) CHECK(f_eval(a4, z) == Approx(1 / t).epsilon(1e-10));
}

TEST_CASE("four-atom critical points") {
    const auto pts = find_critical_points(a4, default_critical_box(a4, 81));
    REQUIRE(pts.size() == 5);
    int saddles = 0, minima = 0;
    for (const auto& p : pts) {
        if (p.kind == CriticalKind::saddle) {
            ++saddles;
            CHECK(p.t_star == Approx(2 * (std::sqrt(2.0) - 1)).epsilon(1e-9));
            CHECK(std::abs(std::abs(p.z.real()) - std::abs(p.z.imag())) < 1e-9);
        } else if (p.kind == CriticalKind::local_min) {
            ++minima;
            CHECK(std::abs(p.z) < 1e-9);
            CHECK(p.t_star == Approx(1).epsilon(1e-12));
            CHECK(p.H.determinant() > 0);
        }
    }
    CHECK(saddles == 4);
    CHECK(minima == 1);
    CHECK(critical_boundary_points(pts, 1).size() == 1);
    CHECK(critical_boundary_points(pts, 2 * (std::sqrt(2.0) - 1)).size() == 4);
    CHECK(critical_boundary_points(pts, 0.7).empty());
}

TEST_CASE("point mass has no critical points") {
    CHECK(find_critical_points(point_mass, default_critical_box(point_mass, 41)).empty());
}

TEST_CASE("sector membership") {
    Mat2 H;
    H << 1, 0, 0, 0;  // kernel along y
    CHECK(sector_membership(H, Vec2(1, 0.1), 0.5));
    CHECK_FALSE(sector_membership(H, Vec2(0.1, 1), 0.5));
    CHECK(sector_membership(Mat2::Identity(), Vec2(0, 1), 0.5));
    CHECK_THROWS_AS(sector_membership(H, Vec2(0, 0), 0.5), DomainError);
}

TEST_CASE("component counts and holes") {
    const SpectralModel two(Atomic{{{-2, 0.5}, {2, 0.5}}});
    CHECK(count_components(two, 0.5, default_grid(two, 0.5, 200)) == 2);
    CHECK(count_components(two, 20, default_grid(two, 20, 200)) == 1);

    const auto scan = connectivity_scan(a4, {0.5, 0.83, 0.9, 1.0, 1.1}, default_grid(a4, 1.1, 300));
    CHECK(scan.counts.front() == 4);
    CHECK(scan.counts.back() == 1);
    CHECK(scan.nonincreasing);
    CHECK(euler_annulus_probe(a4, 0.9, default_grid(a4, 0.9, 300)).holes == 1);
    CHECK(euler_annulus_probe(a4, 1.1, default_grid(a4, 1.1, 300)).holes == 0);
    CHECK_THROWS_AS(connectivity_scan(a4, {1.0, 0.5}, default_grid(a4, 1, 50)), DomainError);
}

TEST_CASE("boundary CSV layout") {
    std::ostringstream os;
    write_boundary_csv(os, trace_boundary(point_mass, 1, GridSpec::square(2, 21)).curves);
    const std::string s = os.str();
    CHECK(s.rfind("component,vertex,re,im,grad_norm\n", 0) == 0);
    CHECK(s.find("0,0,") != std::string::npos);
}
