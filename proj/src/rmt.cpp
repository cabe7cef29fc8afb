#include <brownedge/density.hpp>
#include <brownedge/parallel.hpp>
#include <brownedge/rmt.hpp>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace brownedge {

namespace {

constexpr double kPi = std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1) / 2;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Inverse of a continuous CDF on [a, b].
template <class F>
double invert_cdf(const F& cdf, double u, double a, double b) {
    auto g = [&](double x) { return cdf(x) - u; };
    double ga = g(a), gb = g(b);
    if (ga >= 0) return a;
    if (gb <= 0) return b;
    std::uintmax_t iters = 200;
    auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-15 * (1 + std::abs(x)); };
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
    return 0.5 * (lo + hi);
}

double two_line_cdf(double y) {
    const double y2 = y * y;
    const double p = y * (1 + y2 * (1 + y2 * (0.6 + y2 / 7)));
    return 35.0 / 192.0 * (p + 96.0 / 35.0);
}

// Sample positions: midpoint quantiles for seed 0, uniforms from the diagonal stream otherwise.
double level(std::uint64_t seed, int i, int N, int component) {
    if (seed == 0) return (i + 0.5) / N;
    return uniform_pair(seed, RngRole::diagonal, static_cast<std::uint64_t>(i))[component];
}

std::vector<int> largest_remainder(const std::vector<double>& w, int N) {
    std::vector<int> m(w.size());
    std::vector<std::pair<double, std::size_t>> rem;
    int used = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double x = w[k] * N;
        m[k] = static_cast<int>(std::floor(x));
        used += m[k];
        rem.emplace_back(x - m[k], k);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < N; ++k, ++used) ++m[rem[k % rem.size()].second];
    return m;
}

// Hermitian positive definite M; Cholesky factor or an error with a conditioning hint.
Eigen::LLT<Eigen::MatrixXcd> factor(const Eigen::MatrixXcd& M) {
    Eigen::LLT<Eigen::MatrixXcd> llt(M);
    if (llt.info() != Eigen::Success) {
        const double dmin = M.diagonal().real().minCoeff(), dmax = M.diagonal().real().maxCoeff();
        throw NumericalError("Cholesky failed: W W* + eta^2 is not numerically positive definite (diagonal range " +
                             std::to_string(dmin) + " .. " + std::to_string(dmax) + ")");
    }
    return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
    return 2 * llt.matrixLLT().diagonal().real().array().log().sum();
}

double trace_inverse(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
    const auto n = llt.matrixLLT().rows();
    Eigen::MatrixXcd linv = Eigen::MatrixXcd::Identity(n, n);
    llt.matrixL().solveInPlace(linv);
    return linv.squaredNorm();
}

// W W* + eta^2 for W = B - z, from precomputed P = B B*.
Eigen::MatrixXcd gram(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& B, cplx z, double eta) {
    Eigen::MatrixXcd M = P - std::conj(z) * B - z * B.adjoint();
    M.diagonal().array() += std::norm(z) + eta * eta;
    return M;
}

struct Deformed {
    Eigen::MatrixXcd B, P;
    int n = 0;
};

Deformed deform(const Eigen::MatrixXcd& A, double t, std::uint64_t seed) {
    Deformed d;
    d.n = static_cast<int>(A.rows());
    d.B = A;
    if (t > 0) d.B += std::sqrt(t) * sample_ginibre(d.n, seed);
    d.P = d.B * d.B.adjoint();
    return d;
}

double logdet_at(const Deformed& d, cplx z, double eta) { return log_det(factor(gram(d.P, d.B, z, eta))) / d.n; }

double laplacian_rho(const Deformed& d, cplx z, double eta, double h, double centre) {
    const double sum = logdet_at(d, z + h, eta) + logdet_at(d, z - h, eta) + logdet_at(d, z + cplx(0, h), eta) +
                       logdet_at(d, z - cplx(0, h), eta);
    return (sum - 4 * centre) / (h * h) / (4 * kPi);
}

double median(std::vector<double> x) {
    if (x.empty()) return 0;
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += w0;
            k[1] += w1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(m0, c[0], hi0, lo0);
        mulhilo(m1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

std::array<double, 2> uniform_pair(std::uint64_t seed, RngRole role, std::uint64_t index) {
    const auto r = philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                               static_cast<std::uint32_t>(role), 0u},
                              {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

Eigen::MatrixXcd sample_ginibre(int N, std::uint64_t seed) {
    if (N < 1) throw DomainError("sample_ginibre: N must be >= 1");
    Eigen::MatrixXcd X(N, N);
    const double sigma = std::sqrt(1.0 / (2.0 * N));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const auto u = uniform_pair(seed, RngRole::ginibre, static_cast<std::uint64_t>(i) * N + j);
            const double r = sigma * std::sqrt(-2 * std::log(u[0]));
            X(i, j) = cplx(r * std::cos(2 * kPi * u[1]), r * std::sin(2 * kPi * u[1]));
        }
    return X;
}

MatrixRealization realize_matrix(const SpectralModel& model, int N, std::uint64_t seed) {
    if (N < 2) throw DomainError("realize_matrix: N must be >= 2");
    MatrixRealization r;
    r.seed = seed;
    const std::string rule = seed == 0 ? "midpoint quantiles" : "i.i.d. samples";
    auto diagonal = [&](const std::vector<cplx>& d) {
        r.A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) r.A(i, i) = d[i];
    };
    std::visit(overloaded{
                   [&](const Atomic& m) {
                       if (N < static_cast<int>(m.atoms.size()))
                           throw DomainError("realize_matrix: N is smaller than the number of atoms");
                       std::vector<double> w;
                       for (const auto& a : m.atoms) w.push_back(a.weight);
                       const auto mult = largest_remainder(w, N);
                       std::vector<cplx> d;
                       for (std::size_t k = 0; k < mult.size(); ++k) d.insert(d.end(), mult[k], m.atoms[k].at);
                       diagonal(d);
                       r.provenance = "atomic: diagonal, largest-remainder multiplicities";
                   },
                   [&](const HaarUnitary&) {
                       r.A = Eigen::MatrixXcd::Zero(N, N);
                       for (int i = 0; i + 1 < N; ++i) r.A(i, i + 1) = 1;
                       r.provenance = "haar_unitary: nilpotent Jordan block";
                   },
                   [&](const ProductPower& m) {
                       std::vector<cplx> d(N);
                       for (int i = 0; i < N; ++i) {
                           const double ux = level(seed, i, N, 0);
                           const double uy = seed == 0 ? std::fmod(i * kGolden + 0.5, 1.0) : level(seed, i, N, 1);
                           d[i] = {std::pow(ux, 1 / (m.p + 1)), std::pow(uy, 1 / (m.q + 1))};
                       }
                       diagonal(d);
                       r.provenance = "product_power: diagonal, " + rule;
                   },
                   [&](const HermitianBeta& m) {
                       std::vector<cplx> d(N);
                       for (int i = 0; i < N; ++i) d[i] = boost::math::ibeta_inv(m.alpha, m.beta, level(seed, i, N, 0));
                       diagonal(d);
                       r.provenance = "hermitian_beta: diagonal, " + rule;
                   },
                   [&](const HermitianTabulated& m) {
                       // Piecewise linear density: the CDF is piecewise quadratic.
                       const auto& x = m.points;
                       const auto& y = m.values;
                       std::vector<double> cum(x.size(), 0.0);
                       for (std::size_t i = 1; i < x.size(); ++i)
                           cum[i] = cum[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
                       const double mass = cum.back();
                       auto cdf = [&](double s) {
                           auto it = std::upper_bound(x.begin(), x.end(), s);
                           if (it == x.begin()) return 0.0;
                           if (it == x.end()) return 1.0;
                           const auto i = static_cast<std::size_t>(it - x.begin()) - 1;
                           const double h = s - x[i], slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
                           return (cum[i] + y[i] * h + 0.5 * slope * h * h) / mass;
                       };
                       std::vector<cplx> d(N);
                       for (int i = 0; i < N; ++i) d[i] = invert_cdf(cdf, level(seed, i, N, 0), x.front(), x.back());
                       diagonal(d);
                       r.provenance = "hermitian_tabulated: diagonal, " + rule;
                   },
                   [&](const TwoLine&) {
                       if (N % 2) throw DomainError("realize_matrix: two_line needs an even N");
                       const int half = N / 2;
                       std::vector<cplx> d(N);
                       for (int k = 0; k < half; ++k) {
                           const double yl = invert_cdf(two_line_cdf, level(seed, k, half, 0), -1, 1);
                           const double yr = seed == 0 ? yl : invert_cdf(two_line_cdf, level(seed, k, half, 1), -1, 1);
                           d[k] = {-1, yl};
                           d[half + k] = {1, yr};
                       }
                       diagonal(d);
                       r.provenance = "two_line: diagonal, " + rule + " on each line";
                   },
                   [&](const MatrixState& m) {
                       const auto n = m.a.rows();
                       const auto reps = (N + n - 1) / n;
                       r.A = Eigen::MatrixXcd::Zero(reps * n, reps * n);
                       for (Eigen::Index b = 0; b < reps; ++b) r.A.block(b * n, b * n, n, n) = m.a;
                       r.provenance = "matrix: block-diagonal repetition";
                   },
               },
               model.payload());
    r.N = static_cast<int>(r.A.rows());
    return r;
}

double empirical_f(const Eigen::MatrixXcd& W, double eta) {
    if (!(eta > 0)) throw DomainError("empirical_f: eta must be positive");
    Eigen::MatrixXcd M = W * W.adjoint();
    M.diagonal().array() += eta * eta;
    return trace_inverse(factor(M)) / static_cast<double>(W.rows());
}

EmpiricalV empirical_v(const SpectralModel& model, cplx z, double eta, double t, int N,
                       const std::vector<std::uint64_t>& seeds) {
    if (!(eta > 0)) throw DomainError("empirical_v: eta must be positive");
    if (!(t >= 0)) throw DomainError("empirical_v: t must be >= 0");
    const auto A = realize_matrix(model, N, 0).A;
    EmpiricalV out;
    out.per_seed.resize(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t k) {
        if (t == 0) {
            out.per_seed[k] = eta;
            return;
        }
        Eigen::MatrixXcd W = A + std::sqrt(t) * sample_ginibre(static_cast<int>(A.rows()), seeds[k]);
        W.diagonal().array() -= z;
        out.per_seed[k] = eta + t * eta * empirical_f(W, eta);
    });
    const double n = static_cast<double>(seeds.size());
    out.mean = std::accumulate(out.per_seed.begin(), out.per_seed.end(), 0.0) / n;
    double ss = 0;
    for (double v : out.per_seed) ss += (v - out.mean) * (v - out.mean);
    out.spread = seeds.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    if (t > 0) out.analytic = solve_v(model, z, eta, t);
    return out;
}

double empirical_rho_reg(const SpectralModel& model, cplx z, double eta, double t, int N, double h,
                         std::uint64_t seed) {
    if (!(eta > 0)) throw DomainError("empirical_rho_reg: eta must be positive");
    if (h <= 0) h = std::max(eta / 4, 1e-3);
    const Deformed d = deform(realize_matrix(model, N, 0).A, t, seed);
    return laplacian_rho(d, z, eta, h, logdet_at(d, z, eta));
}

ValidationReport validate(const SpectralModel& model, double t, const GridSpec& grid, int N, double eta,
                          const std::vector<std::uint64_t>& seeds) {
    if (!(t > 0) || !(eta > 0) || seeds.empty()) throw DomainError("validate: need t > 0, eta > 0 and seeds");
    ValidationReport rep;
    rep.N = N;
    rep.eta = eta;
    rep.t = t;
    rep.seeds = seeds;
    const std::size_t nz = static_cast<std::size_t>(grid.nx) * grid.ny;
    rep.rows.resize(nz);
    parallel_for(nz, [&](std::size_t k) {
        auto& row = rep.rows[k];
        row.z = grid.at(static_cast<int>(k % grid.nx), static_cast<int>(k / grid.nx));
        const MomentProbe probe(model, row.z);
        const double f0 = probe(0).m1;
        row.interior = f0 > 1 / t;
        row.v = solve_v(probe, f0, eta, t).v;
        row.f = (row.v - eta) / (t * eta);
        row.rho = rho_reg(probe, f0, eta, t);
    });

    const auto A = realize_matrix(model, N, 0).A;
    const double h = std::max(eta / 4, 1e-3);
    std::vector<double> fsum(nz, 0.0), rsum(nz, 0.0);
    for (std::uint64_t seed : seeds) {
        const Deformed d = deform(A, t, seed);
        std::vector<double> fs(nz), rs(nz);
        parallel_for(nz, [&](std::size_t k) {
            const auto& row = rep.rows[k];
            const auto llt = factor(gram(d.P, d.B, row.z, eta));
            fs[k] = trace_inverse(llt) / d.n;
            if (row.interior) rs[k] = laplacian_rho(d, row.z, eta, h, log_det(llt) / d.n);
        });
        for (std::size_t k = 0; k < nz; ++k) {
            fsum[k] += fs[k];
            rsum[k] += rs[k];
        }
    }
    std::vector<double> ev, er;
    const double ns = static_cast<double>(seeds.size());
    for (std::size_t k = 0; k < nz; ++k) {
        auto& row = rep.rows[k];
        row.f_hat = fsum[k] / ns;
        row.v_hat = eta + t * eta * row.f_hat;
        ev.push_back(std::abs(row.v_hat - row.v) / row.v);
        if (row.interior) {
            row.rho_hat = rsum[k] / ns;
            er.push_back(std::abs(row.rho_hat - row.rho) / row.rho);
        }
    }
    rep.median_v_error = median(ev);
    rep.max_v_error = ev.empty() ? 0 : *std::max_element(ev.begin(), ev.end());
    rep.median_rho_error = median(er);
    rep.max_rho_error = er.empty() ? 0 : *std::max_element(er.begin(), er.end());
    return rep;
}

nlohmann::json to_json(const ValidationReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"re", row.z.real()},
                        {"im", row.z.imag()},
                        {"interior", row.interior},
                        {"v_hat", row.v_hat},
                        {"v", row.v},
                        {"f_hat", row.f_hat},
                        {"f", row.f},
                        {"rho_hat", row.interior ? nlohmann::json(row.rho_hat) : nlohmann::json(nullptr)},
                        {"rho", row.rho}});
    return {{"N", r.N},
            {"eta", r.eta},
            {"t", r.t},
            {"seeds", r.seeds},
            {"summary",
             {{"median_v_error", r.median_v_error},
              {"max_v_error", r.max_v_error},
              {"median_rho_error", r.median_rho_error},
              {"max_rho_error", r.max_rho_error}}},
            {"rows", rows}};
}

}  // namespace brownedge
