#pragma once

#include <brownedge/dyson.hpp>

#include <string>
#include <vector>

namespace brownedge {

// |grad f| <= kCriticalTol * (1 + |H|) marks a critical point.
inline constexpr double kCriticalTol = 1e-8;

struct DensityValue {
    double rho = 0;
    VSolution sol;
    // v fell below the representable bracket; rho is the v -> 0 limit, the density of a.
    bool underflow = false;
};

DensityValue rho_detail(const SpectralModel& model, cplx z, double t);
double rho(const SpectralModel& model, cplx z, double t);
double rho_reg(const SpectralModel& model, cplx z, double eta, double t);
// Variants reusing a probe and f(z).
DensityValue rho_detail(const MomentProbe& probe, double f, double t, const SpectralModel& model);
double rho_reg(const MomentProbe& probe, double f, double eta, double t);

struct EdgeJump {
    double value = 0;
    double via_gradient = 0;  // (1/4pi) |grad f|^2 / m2
    double via_g = 0;         // (1/pi) |g|^2 / m2
    bool critical = false;
};

bool on_boundary(double f, double t);
EdgeJump edge_jump(const SpectralModel& model, cplx z0, double t);

struct QuadForm {
    Mat2 Q;
    Mat2 P;  // projector onto ker H
    Mat2 H;
    double m2 = 0;
    double mixed = 0;
    double operator()(const Vec2& u) const { return u.dot(Q * u); }
};

// Projector onto the null space of a symmetric 2x2 matrix, threshold |lambda| < 1e-6 |H|.
Mat2 null_projector(const Mat2& H);
QuadForm quad_form(const SpectralModel& model, cplx z0, double t);

enum class EdgeType { sharp, quadratic, power_law, unclassified };
std::string to_string(EdgeType e);

struct EdgeReport {
    cplx z0{};
    EdgeType type = EdgeType::unclassified;
    Vec2 direction{1, 0};
    int samples = 0;
    // log rho = intercept + slope * log s
    double slope = 0;
    double intercept = 0;
    double fit_residual = 0;
    // Sharp: intercept of the linear fit rho = J + c s, and edge_jump at z0.
    double fitted_jump = 0;
    double jump = 0;
    // Quadratic: limit of rho / s^2 and Q[direction].
    double fitted_prefactor = 0;
    double predicted_prefactor = 0;
    Mat2 Q = Mat2::Zero();
    // Power law: exponent and prefactor of rho ~ c s^exponent.
    double exponent = 0;
    double prefactor = 0;
    std::vector<double> s;
    std::vector<double> rho;
};

EdgeReport edge_profile(const SpectralModel& model, cplx z0, double t, Vec2 direction,
                        const std::vector<double>& s_list);

}  // namespace brownedge
