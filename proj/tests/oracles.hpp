#pragma once
// Reference computations that do not go through the library's field code.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

struct Atoms {
    std::vector<std::pair<cplx, double>> at;

    double m1(cplx z, double v) const {
        double s = 0;
        for (auto [a, w] : at) s += w / (std::norm(a - z) + v * v);
        return s;
    }
    double m2(cplx z, double v) const {
        double s = 0;
        for (auto [a, w] : at) s += w / std::pow(std::norm(a - z) + v * v, 2);
        return s;
    }
    double log_pot(cplx z, double v) const {
        double s = 0;
        for (auto [a, w] : at) s += w * std::log(std::norm(a - z) + v * v);
        return s;
    }
};

inline Atoms four_atoms() { return {{{1, 0.25}, {cplx(0, 1), 0.25}, {-1, 0.25}, {cplx(0, -1), 0.25}}}; }

// Plain bisection for v = eta + t v m1(v) on (0, eta + sqrt(t)]; 0 when no positive root at eta = 0.
inline double bisect_v(const std::function<double(double)>& m1, double eta, double t) {
    auto G = [&](double v) { return v - eta - t * v * m1(v); };
    double lo = eta > 0 ? eta : 1e-300, hi = eta + std::sqrt(t) + 1;
    if (eta == 0 && 1 - t * m1(lo) >= 0) return 0;
    if (eta == 0) {
        auto H = [&](double v) { return 1 - t * m1(v); };
        for (int k = 0; k < 2000 && hi - lo > 1e-15 * hi; ++k) {
            const double mid = std::sqrt(lo * hi) > 0 && hi / lo > 4 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            (H(mid) < 0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (G(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Hermitized potential whose z-Laplacian over 4 pi is the regularized density.
inline double envelope_potential(const Atoms& a, cplx z, double eta, double t) {
    const double v = bisect_v([&](double x) { return a.m1(z, x); }, eta, t);
    return a.log_pot(z, v) - (v - eta) * (v - eta) / t;
}

inline double laplacian(const std::function<double(cplx)>& F, cplx z, double h) {
    return (F(z + h) + F(z - h) + F(z + cplx(0, h)) + F(z - cplx(0, h)) - 4 * F(z)) / (h * h);
}

// <(|u - z|^2 + v^2)^{-1}> for u uniform on the unit circle.
inline double haar_m1(cplx z, double v) {
    const double r2 = std::norm(z), s = 1 + r2 + v * v;
    return 1 / std::sqrt(s * s - 4 * r2);
}

// f for density 2 * 2.5 x y^1.5 on the unit square, x-integral done in closed form.
inline double product_f(cplx z) {
    const double a = z.real(), c = z.imag();
    auto inner = [&](double y) {
        const double d = y - c;
        if (d == 0 && a <= 0) return 0.0;
        auto prim = [&](double x) {
            const double u = x - a;
            return 0.5 * std::log(u * u + d * d) + a / std::abs(d) * std::atan(u / std::abs(d));
        };
        return d == 0 ? 0.0 : prim(1) - prim(0);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return 5 * ts.integrate([&](double y) { return y < 1e-100 ? 0.0 : std::pow(y, 1.5) * inner(y); }, 0.0, 1.0);
}

// Beta(alpha, beta) moment <|x - z|^-2> by Gauss-Kronrod.
inline double beta_f(double al, double be, cplx z) {
    const double B = std::beta(al, be);
    auto dens = [&](double x) { return std::pow(x, al - 1) * std::pow(1 - x, be - 1) / B; };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return dens(x) / std::norm(cplx(x) - z); }, 0.0, 1.0, 15, 1e-13);
}

}  // namespace oracle
