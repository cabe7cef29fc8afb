#include "quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace brownedge::detail {

namespace {
std::vector<Node> build_gl(int n) {
    std::vector<Node> r(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const double w = 2 / ((1 - x * x) * dp * dp);
        r[i] = {-x, w};
        r[n - 1 - i] = {x, w};
    }
    return r;
}
}  // namespace

const std::vector<Node>& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<Node>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gl(n)).first;
    return it->second;
}

void append_gauss(std::vector<Node>& out, double a, double b, int n) {
    const auto& gl = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (const auto& nd : gl) out.push_back({c + h * nd.x, h * nd.w});
}

std::vector<double> graded_breaks(double a, double b, double da, double db) {
    const double len = b - a;
    std::vector<double> left{a}, right{b};
    const bool ga = da > 0 && da < 0.5 * len;
    const bool gb = db > 0 && db < 0.5 * len;
    const double half_a = gb ? 0.5 * len : len;
    const double half_b = ga ? 0.5 * len : len;
    if (ga) {
        for (double w = da; w < half_a / 3; w *= 3) left.push_back(a + w);
    }
    if (gb) {
        for (double w = db; w < half_b / 3; w *= 3) right.push_back(b - w);
    }
    if (ga && gb) left.push_back(a + 0.5 * len);
    std::vector<double> out = left;
    for (auto it = right.rbegin(); it != right.rend(); ++it)
        if (*it > out.back()) out.push_back(*it);
    return out;
}

std::vector<Node> panel_rule(std::span<const double> breaks, int n) {
    std::vector<Node> out;
    out.reserve(n * breaks.size());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) append_gauss(out, breaks[i], breaks[i + 1], n);
    return out;
}

}  // namespace brownedge::detail
