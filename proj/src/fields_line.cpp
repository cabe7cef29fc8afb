#include "field.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <numeric>
#include <functional>

namespace brownedge::detail {

namespace {

// A measure carried by straight segments w = w0 + s*dir, s in [a, b].
struct Segment {
    cplx w0;
    cplx dir;
    double a, b;
    std::function<double(double)> density;
    // Local exponent gamma of the density at s (density ~ |s - s0|^gamma).
    std::function<double(double)> exponent;
    std::vector<double> kinks;
};

class LineField final : public Field {
public:
    LineField(std::vector<Segment> segs, double norm) : segs_(std::move(segs)), norm_(norm) {}

    Accum accum(cplx z, double v, bool hess) const override {
        Accum total;
        const double v2 = v * v;
        for (const auto& sg : segs_) {
            const cplx loc = (z - sg.w0) / sg.dir;
            const double s0 = loc.real(), h = loc.imag();
            if (v2 == 0 && h == 0 && s0 >= sg.a && s0 <= sg.b) {
                // Local power counting: integral of |s|^gamma |s|^-2k converges iff gamma+1 > 2k.
                const double gam = sg.exponent(s0);
                if (gam + 1 <= 2) {
                    total.m1 = total.m2 = kInf;
                    total.divergent = true;
                    return total;
                }
                if (gam + 1 <= 4) {
                    total.m1 += integrate(sg, s0, h, 0, false).m1;
                    total.m2 = kInf;
                    total.divergent = true;
                    continue;
                }
            }
            const Accum p = integrate(sg, s0, h, v2, hess);
            total.m1 += p.m1;
            total.m2 += p.m2;
            total.g += p.g;
            total.hxx += p.hxx;
            total.hxy += p.hxy;
            total.hyy += p.hyy;
        }
        return total;
    }

    double dist_to_spectrum(cplx z) const override {
        double d = kInf;
        for (const auto& sg : segs_) {
            const cplx loc = (z - sg.w0) / sg.dir;
            const double s = std::clamp(loc.real(), sg.a, sg.b);
            d = std::min(d, std::abs(z - (sg.w0 + s * sg.dir)));
        }
        return d;
    }
    std::vector<cplx> spectrum_samples(int res) const override {
        std::vector<cplx> out;
        const int n = std::max(res, 2);
        for (const auto& sg : segs_)
            for (int k = 0; k < n; ++k)
                out.push_back(sg.w0 + (sg.a + (sg.b - sg.a) * k / (n - 1)) * sg.dir);
        return out;
    }
    double norm() const override { return norm_; }

private:
    static Accum integrate(const Segment& sg, double s0, double h, double v2, bool hess) {
        const double c = std::sqrt(h * h + v2);
        std::vector<double> br{sg.a, sg.b};
        for (double k : {0.0, -1.0, 1.0, -10.0, 10.0, -100.0, 100.0}) {
            const double s = s0 + k * c;
            if (s > sg.a && s < sg.b) br.push_back(s);
        }
        for (double k : sg.kinks)
            if (k > sg.a && k < sg.b) br.push_back(k);
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end()), br.end());

        const cplx dir = sg.dir;
        auto fn = [&](double s) {
            std::array<double, 7> out{};
            const double w = sg.density(s);
            if (w == 0) return out;
            const cplx d = dir * cplx(s - s0, -h);
            const double dx = d.real(), dy = d.imag();
            const double e = 1.0 / (dx * dx + dy * dy + v2);
            const double we = w * e, we2 = we * e;
            out[0] = we;
            out[1] = we2;
            out[2] = dx * we2;
            out[3] = dy * we2;
            if (hess) {
                const double we3 = we2 * e;
                out[4] = dx * dx * we3;
                out[5] = dx * dy * we3;
                out[6] = dy * dy * we3;
            }
            return out;
        };
        auto scale = [](const std::array<double, 7>& t) {
            const double m1 = std::abs(t[0]), m2 = std::abs(t[1]);
            const double gs = std::sqrt(m1 * m2);
            return std::array<double, 7>{m1, m2, gs, gs, m2, m2, m2};
        };
        const auto r = integrate_gk<7>(fn, br, scale, 1e-12, 4000);
        Accum a;
        a.m1 = r[0];
        a.m2 = r[1];
        a.g = {r[2], r[3]};
        a.hxx = r[4];
        a.hxy = r[5];
        a.hyy = r[6];
        return a;
    }

    std::vector<Segment> segs_;
    double norm_;
};

}  // namespace

std::unique_ptr<Field> make_beta(const HermitianBeta& m) {
    const double al = m.alpha, be = m.beta;
    const double lb = std::lgamma(al) + std::lgamma(be) - std::lgamma(al + be);
    Segment s;
    s.w0 = 0;
    s.dir = 1;
    s.a = 0;
    s.b = 1;
    s.density = [=](double x) {
        if (x <= 0 || x >= 1) return 0.0;
        return std::exp((al - 1) * std::log(x) + (be - 1) * std::log1p(-x) - lb);
    };
    s.exponent = [=](double x) {
        if (x == 0) return al - 1;
        if (x == 1) return be - 1;
        return 0.0;
    };
    return std::make_unique<LineField>(std::vector<Segment>{s}, 1.0);
}

std::unique_ptr<Field> make_tabulated(const HermitianTabulated& m) {
    auto xs = m.points;
    auto ys = m.values;
    double mass = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) mass += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    for (auto& y : ys) y /= mass;
    auto interp = [xs, ys](double x) {
        if (x < xs.front() || x > xs.back()) return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.end()) return ys.back();
        const auto i = static_cast<std::size_t>(it - xs.begin());
        if (i == 0) return ys.front();
        const double u = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + u * (ys[i] - ys[i - 1]);
    };
    Segment s;
    s.w0 = 0;
    s.dir = 1;
    s.a = xs.front();
    s.b = xs.back();
    s.density = interp;
    s.exponent = [interp](double x) { return interp(x) > 0 ? 0.0 : 1.0; };
    if (xs.size() <= 512) s.kinks = xs;
    const double nrm = std::max(std::abs(xs.front()), std::abs(xs.back()));
    return std::make_unique<LineField>(std::vector<Segment>{s}, nrm);
}

std::unique_ptr<Field> make_two_line() {
    std::vector<Segment> segs;
    for (double side : {-1.0, 1.0}) {
        Segment s;
        s.w0 = side;
        s.dir = cplx(0, 1);
        s.a = -1;
        s.b = 1;
        s.density = [](double y) {
            const double u = 1 + y * y;
            return 35.0 / 384.0 * u * u * u;
        };
        s.exponent = [](double) { return 0.0; };
        segs.push_back(std::move(s));
    }
    return std::make_unique<LineField>(std::move(segs), std::sqrt(2.0));
}

}  // namespace brownedge::detail
