#pragma once

#include <brownedge/kernels.hpp>

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace brownedge {

struct BoundaryCurve {
    std::vector<cplx> vertices;
    std::vector<double> grad_norm;
    std::vector<Vec2> normal;  // inward, grad f / |grad f|
    bool closed = false;
};

struct BoundaryTrace {
    std::vector<BoundaryCurve> curves;
    std::vector<std::string> diagnostics;
};

BoundaryTrace trace_boundary(const SpectralModel& model, double t, const GridSpec& grid);

enum class CriticalKind { local_min, saddle, degenerate };
std::string to_string(CriticalKind k);

struct CriticalPoint {
    cplx z{};
    double grad_norm = 0;
    Mat2 H = Mat2::Zero();
    double lambda1 = 0;  // lambda1 >= lambda2
    double lambda2 = 0;
    CriticalKind kind = CriticalKind::degenerate;
    double f = 0;
    double t_star = 0;  // 1 / f(z*)
};

// Newton on grad f = 0 from local minima of |grad f|^2 sampled on `box` (its nx, ny set the seed grid).
std::vector<CriticalPoint> find_critical_points(const SpectralModel& model, const GridSpec& box);

// Critical points that sit on the level set f = 1/t (isolated boundary points are among them).
std::vector<CriticalPoint> critical_boundary_points(const std::vector<CriticalPoint>& pts, double t);

// |P w|^2 / |w|^2 < 1 - kappa, P the null-space projector of H.
bool sector_membership(const Mat2& H, const Vec2& w, double kappa);

// Sampled set {f >= 1/t} on the grid, refined `grid.refine` times near sign changes.
struct Raster {
    GridSpec grid;  // the refined grid
    std::vector<std::uint8_t> inside;
    std::vector<double> excess;  // f - 1/t, NaN where copied from a coarser level
    bool at(int i, int j) const { return inside[static_cast<std::size_t>(j) * grid.nx + i] != 0; }
};

Raster rasterize(const SpectralModel& model, double t, const GridSpec& grid, bool with_spectrum);

int count_components(const SpectralModel& model, double t, const GridSpec& grid);

struct ConnectivityScan {
    std::vector<double> t;
    std::vector<int> counts;
    bool nonincreasing = true;
};

ConnectivityScan connectivity_scan(const SpectralModel& model, const std::vector<double>& t_list,
                                   const GridSpec& grid);

struct Topology {
    int components = 0;
    int holes = 0;  // bounded components of the complement
};

Topology euler_annulus_probe(const SpectralModel& model, double t, const GridSpec& grid);

// Square grid centred on the spectrum that contains the closure of D_t.
GridSpec default_grid(const SpectralModel& model, double t, int n, int refine = 0);
// Search box [-(|a|+1), |a|+1]^2 for critical points.
GridSpec default_critical_box(const SpectralModel& model, int n);

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryCurve>& curves);
nlohmann::json to_json(const CriticalPoint& c);

}  // namespace brownedge
