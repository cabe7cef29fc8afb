#pragma once

#include <brownedge/dyson.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace brownedge {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

// Streams used as the third counter word.
enum class RngRole : std::uint32_t { ginibre = 1, diagonal = 2 };

// Two uniforms in (0, 1) from the block at (seed, role, index).
std::array<double, 2> uniform_pair(std::uint64_t seed, RngRole role, std::uint64_t index);

struct MatrixRealization {
    int N = 0;
    Eigen::MatrixXcd A;
    std::string provenance;
    std::uint64_t seed = 0;
};

MatrixRealization realize_matrix(const SpectralModel& model, int N, std::uint64_t seed);

// Complex Ginibre matrix, entries with E|x|^2 = 1/N; entry (i, j) uses counter index i*N + j.
Eigen::MatrixXcd sample_ginibre(int N, std::uint64_t seed);

// (1/N) Tr[(W W* + eta^2)^{-1}].
double empirical_f(const Eigen::MatrixXcd& W, double eta);

struct EmpiricalV {
    std::vector<double> per_seed;
    double mean = 0;
    double spread = 0;  // sample standard deviation
    VSolution analytic;
};

EmpiricalV empirical_v(const SpectralModel& model, cplx z, double eta, double t, int N,
                       const std::vector<std::uint64_t>& seeds);

// 5-point Laplacian of (1/N) log det(W W* + eta^2) divided by 4 pi; h <= 0 picks max(eta/4, 1e-3).
double empirical_rho_reg(const SpectralModel& model, cplx z, double eta, double t, int N, double h,
                         std::uint64_t seed);

struct ValidationRow {
    cplx z{};
    bool interior = false;  // f(z) > 1/t
    double v_hat = 0, v = 0;
    double f_hat = 0, f = 0;  // regularized f at (z, eta)
    double rho_hat = 0, rho = 0;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    int N = 0;
    double eta = 0, t = 0;
    std::vector<std::uint64_t> seeds;
    double median_v_error = 0, max_v_error = 0;
    double median_rho_error = 0, max_rho_error = 0;  // interior rows only
};

ValidationReport validate(const SpectralModel& model, double t, const GridSpec& grid, int N, double eta,
                          const std::vector<std::uint64_t>& seeds);

nlohmann::json to_json(const ValidationReport& r);

}  // namespace brownedge
