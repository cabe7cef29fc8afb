#include "field.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <numbers>
#include <optional>

namespace brownedge::detail {

namespace {

constexpr double kFarDistance = 0.15;

// x^p with cheap paths for integer and half-integer exponents.
double power(double x, double p) {
    if (p == 0) return 1;
    const double twice = 2 * p;
    if (twice == std::floor(twice) && p <= 12) {
        const int n = static_cast<int>(std::floor(p));
        double r = 1;
        for (int i = 0; i < n; ++i) r *= x;
        if (twice - 2 * n > 0.5) r *= std::sqrt(x);
        return r;
    }
    return std::pow(x, p);
}

bool integral_exponent(double p) { return p == std::floor(p); }

struct WeightedPoint {
    double dx, dy, w;
};

// Analytic contribution of the quadratic Taylor polynomial of the density along one ray.
struct Ray {
    double w;
    double len;
    double cx, cy;
    double a0, a1, a2;
};

struct LocalRule {
    std::vector<WeightedPoint> pts;
    std::vector<Ray> rays;
};

// Radial integrals J_{k,j} = int_0^R r^j / (r^2+v^2)^k dr for v > 0.
struct RadialIntegrals {
    double j11, j12, j13, j21, j22, j23, j24;
    RadialIntegrals(double len, double v) {
        const double r2 = len * len, v2 = v * v;
        const double lg = std::log1p(r2 / v2);
        const double at = std::atan(len / v);
        const double s = r2 + v2;
        j11 = 0.5 * lg;
        j12 = len - v * at;
        j13 = 0.5 * (r2 - v2 * lg);
        j21 = r2 / (2 * v2 * s);
        j22 = 0.5 * (at / v - len / s);
        j23 = 0.5 * (lg - r2 / s);
        j24 = len - 1.5 * v * at + v2 * len / (2 * s);
    }
};

class ProductPowerField final : public Field {
public:
    explicit ProductPowerField(ProductPower m)
        : p_(m.p), q_(m.q), c_((m.p + 1) * (m.q + 1)),
          sing_x_(!integral_exponent(m.p)), sing_y_(!integral_exponent(m.q)) {
        const auto xs = axis_nodes(sing_x_);
        const auto ys = axis_nodes(sing_y_);
        far_.reserve(xs.size() * ys.size());
        for (const auto& nx : xs)
            for (const auto& ny : ys) far_.push_back({nx.x, ny.x, nx.w * ny.w * rho(nx.x, ny.x)});
    }

    double rho(double x, double y) const {
        if (x <= 0 || y <= 0 || x > 1 || y > 1) return 0;
        return c_ * power(x, p_) * power(y, q_);
    }

    Accum accum(cplx z, double v, bool hess) const override {
        if (v == 0 && diverges(z, 2)) {
            Accum div;
            div.divergent = true;
            div.m2 = kInf;
            div.m1 = divergent_f(z) ? kInf : local_sum(build(z), 0, false).m1;
            return div;
        }
        if (std::hypot(dist(z), v) >= kFarDistance) return far_sum(z, v, hess);
        return local_sum(build(z), v, hess);
    }

    std::function<MomentSet(double)> probe(cplx z) const override {
        const double d = dist(z);
        if (d >= kFarDistance) return [this, z](double v) { return far_sum(z, v, false).moments(); };
        // The local rule is built on first use; large v only needs the tensor rule.
        auto rule = std::make_shared<std::optional<LocalRule>>();
        return [this, z, d, rule](double v) {
            if (v == 0 && diverges(z, 2)) return accum(z, 0, false).moments();
            if (std::hypot(d, v) >= kFarDistance) return far_sum(z, v, false).moments();
            if (!*rule) *rule = build(z);
            return local_sum(**rule, v, false).moments();
        };
    }

    double dist_to_spectrum(cplx z) const override { return dist(z); }
    std::vector<cplx> spectrum_samples(int res) const override {
        std::vector<cplx> s;
        const int n = std::max(res, 2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s.emplace_back(double(i) / (n - 1), double(j) / (n - 1));
        return s;
    }
    double norm() const override { return std::sqrt(2.0); }
    double area_density(cplx z) const override {
        if (z.real() < 0 || z.imag() < 0 || z.real() > 1 || z.imag() > 1) return 0;
        return c_ * power(z.real(), p_) * power(z.imag(), q_);
    }

private:
    static std::vector<Node> axis_nodes(bool singular_at_zero) {
        std::vector<double> br{0, 0.25, 0.5, 0.75, 1};
        if (singular_at_zero) {
            br.erase(br.begin());
            for (double w = 1e-7; w < 0.25; w *= 4) br.insert(br.begin(), w);
            br.insert(br.begin(), 0.0);
            std::sort(br.begin(), br.end());
        }
        return panel_rule(br, 12);
    }

    static double dist(cplx z) {
        const double x = std::clamp(z.real(), 0.0, 1.0), y = std::clamp(z.imag(), 0.0, 1.0);
        return std::abs(z - cplx(x, y));
    }

    static bool interior(cplx z) {
        return z.real() > 0 && z.real() < 1 && z.imag() > 0 && z.imag() < 1;
    }

    // Vanishing order of the density at a point of the closed square.
    double local_order(cplx z) const {
        return (z.real() == 0 ? p_ : 0.0) + (z.imag() == 0 ? q_ : 0.0);
    }

    bool divergent_f(cplx z) const {
        if (dist(z) > 0) return false;
        if (interior(z)) return true;
        return local_order(z) <= 0;
    }

    // Kernel |w-z|^{-2k} is not integrable at z (v = 0).
    bool diverges(cplx z, int k) const {
        if (dist(z) > 0) return false;
        if (interior(z)) return true;
        return local_order(z) + 2 - 2 * k <= 0;
    }

    Accum far_sum(cplx z, double v, bool hess) const {
        Accum a;
        const double v2 = v * v;
        for (const auto& n : far_) a.add(n.dx - z.real(), n.dy - z.imag(), n.w, v2, hess);
        return a;
    }

    Accum local_sum(const LocalRule& rule, double v, bool hess) const {
        Accum a;
        const double v2 = v * v;
        for (const auto& n : rule.pts) a.add(n.dx, n.dy, n.w, v2, hess);
        for (const auto& ray : rule.rays) {
            const RadialIntegrals j(ray.len, v);
            a.m1 += ray.w * (ray.a0 * j.j11 + ray.a1 * j.j12 + ray.a2 * j.j13);
            a.m2 += ray.w * (ray.a0 * j.j21 + ray.a1 * j.j22 + ray.a2 * j.j23);
            const double gr = ray.w * (ray.a0 * j.j22 + ray.a1 * j.j23 + ray.a2 * j.j24);
            a.g += cplx(gr * ray.cx, gr * ray.cy);
        }
        return a;
    }

    LocalRule build(cplx z) const {
        LocalRule rule;
        const double cxp = std::clamp(z.real(), 0.0, 1.0), cyp = std::clamp(z.imag(), 0.0, 1.0);
        const double d = std::abs(z - cplx(cxp, cyp));
        const bool inside = d == 0 && interior(z);

        double reach = kInf;
        if (sing_x_) reach = std::min(reach, cxp);
        if (sing_y_) reach = std::min(reach, cyp);
        const int order = inside ? (reach > 1e-4 ? 2 : 0) : -1;

        double r0;
        if (inside) r0 = std::min(1e-3, reach / 3);
        else if (d > 0) r0 = std::max(d / 3, 1e-15);
        else r0 = 1e-16;

        double t0 = 0, tx = 0, ty = 0, txx = 0, txy = 0, tyy = 0;
        if (order >= 0) {
            t0 = rho(cxp, cyp);
            if (order == 2) {
                tx = p_ * t0 / cxp;
                ty = q_ * t0 / cyp;
                txx = p_ * (p_ - 1) * t0 / (cxp * cxp);
                txy = p_ * q_ * t0 / (cxp * cyp);
                tyy = q_ * (q_ - 1) * t0 / (cyp * cyp);
            }
        }

        constexpr double half_pi = std::numbers::pi / 2;
        constexpr double tiny = 1e-9;
        for (int sx : {1, -1}) {
            const double big_x = sx > 0 ? 1.0 : 0.0;
            const double a = std::abs(big_x - cxp);
            if (a == 0) continue;
            for (int sy : {1, -1}) {
                const double big_y = sy > 0 ? 1.0 : 0.0;
                const double b = std::abs(big_y - cyp);
                if (b == 0) continue;
                const double phc = std::atan2(b, a);
                const bool corner_sing = (big_x == 0 && sing_x_) || (big_y == 0 && sing_y_);

                for (int tri = 0; tri < 2; ++tri) {
                    const double lo = tri == 0 ? 0.0 : phc;
                    const double hi = tri == 0 ? phc : half_pi;
                    const double range = hi - lo;
                    if (range <= 0) continue;
                    // Angular grading toward the ends: the ray along the coordinate line through c,
                    // and the ray through the far corner.
                    double d_axis = 0;
                    if (tri == 0 && sing_y_) d_axis = cyp == 0 ? tiny * range : cyp / a;
                    if (tri == 1 && sing_x_) d_axis = cxp == 0 ? tiny * range : cxp / b;
                    double d_corner = tri == 0 ? half_pi - phc : phc;
                    if (corner_sing) d_corner = std::min(d_corner, 1e-4 * range);
                    if (d_axis > 0) d_axis = std::max(d_axis, 1e-12 * range);
                    const auto pbr = tri == 0 ? graded_breaks(lo, hi, d_axis, d_corner)
                                              : graded_breaks(lo, hi, d_corner, d_axis);
                    const auto phis = panel_rule(pbr, 10);
                    const bool far_sing = tri == 0 ? (big_x == 0 && sing_x_) : (big_y == 0 && sing_y_);

                    for (const auto& ph : phis) {
                        const double cs = std::cos(ph.x), sn = std::sin(ph.x);
                        const double len = tri == 0 ? a / cs : b / sn;
                        const double ux = sx * cs, uy = sy * sn;
                        const double umin = r0 / len;
                        const auto ubr = graded_breaks(0, 1, umin, far_sing ? 1e-4 : 0.0);
                        const auto us = panel_rule(ubr, 16);
                        const double a1 = tx * ux + ty * uy;
                        const double a2 = 0.5 * txx * ux * ux + txy * ux * uy + 0.5 * tyy * uy * uy;
                        for (const auto& u : us) {
                            const double r = u.x * len;
                            const double wx = cxp + r * ux, wy = cyp + r * uy;
                            double val = rho(std::clamp(wx, 0.0, 1.0), std::clamp(wy, 0.0, 1.0));
                            if (order >= 0) val -= t0 + r * (a1 + r * a2);
                            const double wt = ph.w * u.w * len * r * val;
                            if (wt != 0) rule.pts.push_back({wx - z.real(), wy - z.imag(), wt});
                        }
                        if (order >= 0) rule.rays.push_back({ph.w, len, ux, uy, t0, a1, a2});
                    }
                }
            }
        }
        return rule;
    }

    double p_, q_, c_;
    bool sing_x_, sing_y_;
    struct FarNode {
        double dx, dy, w;
    };
    std::vector<FarNode> far_;
};

}  // namespace

std::unique_ptr<Field> make_product_power(const ProductPower& m) {
    return std::make_unique<ProductPowerField>(m);
}

}  // namespace brownedge::detail
