#pragma once

#include <algorithm>

namespace brownedge::detail {

namespace gk {
inline constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t K>
struct Piece {
    double a, b;
    std::array<double, K> val;
    std::array<double, K> err;
};

template <std::size_t K, class F>
Piece<K> rule(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, K> kr{}, ga{};
    auto fc = f(c);
    for (std::size_t k = 0; k < K; ++k) {
        kr[k] = wk[7] * fc[k];
        ga[k] = wg[3] * fc[k];
    }
    for (int i = 0; i < 7; ++i) {
        auto f1 = f(c - h * xk[i]);
        auto f2 = f(c + h * xk[i]);
        for (std::size_t k = 0; k < K; ++k) {
            const double s = f1[k] + f2[k];
            kr[k] += wk[i] * s;
            if (i % 2 == 1) ga[k] += wg[i / 2] * s;
        }
    }
    Piece<K> p{a, b, {}, {}};
    for (std::size_t k = 0; k < K; ++k) {
        p.val[k] = kr[k] * h;
        p.err[k] = std::abs((kr[k] - ga[k]) * h);
    }
    return p;
}
}  // namespace gk

template <std::size_t K, class F, class S>
std::array<double, K> integrate_gk(F&& f, std::span<const double> breaks, S&& scale, double tol,
                                   int max_intervals) {
    std::vector<gk::Piece<K>> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) pieces.push_back(gk::rule<K>(f, breaks[i], breaks[i + 1]));

    auto total = [&] {
        std::array<double, K> s{};
        for (const auto& p : pieces)
            for (std::size_t k = 0; k < K; ++k) s[k] += p.val[k];
        return s;
    };
    while (static_cast<int>(pieces.size()) < max_intervals) {
        const auto sc = scale(total());
        double sum = 0, worst = -1;
        std::size_t iw = 0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            double e = 0;
            for (std::size_t k = 0; k < K; ++k)
                if (sc[k] > 0) e = std::max(e, pieces[i].err[k] / sc[k]);
            sum += e;
            if (e > worst) {
                worst = e;
                iw = i;
            }
        }
        if (sum <= tol || pieces.empty()) break;
        const auto p = pieces[iw];
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) break;
        pieces[iw] = gk::rule<K>(f, p.a, m);
        pieces.push_back(gk::rule<K>(f, m, p.b));
    }
    return total();
}

}  // namespace brownedge::detail
