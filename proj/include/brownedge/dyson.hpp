#pragma once

#include <brownedge/kernels.hpp>

#include <optional>
#include <string>
#include <vector>

namespace brownedge {

enum class Regime { interior, exterior, boundary_band };

std::string to_string(Regime r);

struct VSolution {
    double v = 0;
    double eta = 0;
    double t = 0;
    cplx z{};
    double residual = 0;
    int iterations = 0;
    Regime regime = Regime::exterior;
    // The root lies below the smallest representable bracket end (v is reported as 0).
    bool underflow = false;
};

// |f - 1/t| below this (scaled by max(1, 1/t)) is treated as lying on the boundary.
inline constexpr double kBoundaryBand = 1e-10;

Regime classify(double f, double t);

VSolution solve_v(const SpectralModel& model, cplx z, double eta, double t);
// Same, reusing a probe and a precomputed f(z); `upper` optionally tightens the bracket.
VSolution solve_v(const MomentProbe& probe, double f, double eta, double t,
                  std::optional<double> upper = std::nullopt);

std::vector<VSolution> v_profile(const SpectralModel& model, cplx z, const std::vector<double>& etas,
                                 double t);

struct V0Check {
    double v = 0;
    double f = 0;
    double m2 = 0;
    double ratio = 0;      // v / sqrt(f - 1/t)
    double predicted = 0;  // m2^{-1/2}
    double deviation = 0;  // |ratio / predicted - 1|
};

V0Check v0_expansion_check(const SpectralModel& model, cplx z, double t);

}  // namespace brownedge
