#include <brownedge/density.hpp>
#include <brownedge/geometry.hpp>
#include <brownedge/parallel.hpp>

#include <boost/math/tools/toms748_solve.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>

namespace brownedge {

namespace {

constexpr double kMergeRadius = 1e-6;

// f - 1/t with the divergent value replaced by a large finite one.
double excess(const SpectralModel& model, cplx z, double t) {
    const double f = f_eval(model, z);
    return std::isfinite(f) ? f - 1 / t : 1e300;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

// Labels the connected components of the cells where mask == want.
// Returns the number of components and flags those touching the raster border.
struct Labels {
    int count = 0;
    int bounded = 0;
};

Labels label(const std::vector<std::uint8_t>& mask, int nx, int ny, bool want, bool eight) {
    const auto idx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    UnionFind uf(mask.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if ((mask[idx(i, j)] != 0) != want) continue;
            auto link = [&](int a, int b) {
                if (a < 0 || b < 0 || a >= nx || b >= ny) return;
                if ((mask[idx(a, b)] != 0) == want) uf.unite(idx(i, j), idx(a, b));
            };
            link(i + 1, j);
            link(i, j + 1);
            if (eight) {
                link(i + 1, j + 1);
                link(i - 1, j + 1);
            }
        }
    std::map<std::size_t, bool> roots;  // root -> touches border
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if ((mask[idx(i, j)] != 0) != want) continue;
            const bool border = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            auto [it, fresh] = roots.emplace(uf.find(idx(i, j)), border);
            if (!fresh && border) it->second = true;
        }
    Labels l;
    l.count = static_cast<int>(roots.size());
    for (const auto& [r, b] : roots) l.bounded += b ? 0 : 1;
    return l;
}

}  // namespace

std::string to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::local_min: return "local-min";
        case CriticalKind::saddle: return "saddle";
        case CriticalKind::degenerate: return "degenerate";
    }
    return "?";
}

Raster rasterize(const SpectralModel& model, double t, const GridSpec& grid, bool with_spectrum) {
    if (!(t > 0)) throw DomainError("rasterize: t must be positive");
    Raster r;
    r.grid = GridSpec(grid.lo, grid.hi, grid.nx, grid.ny);
    const auto n0 = static_cast<std::size_t>(grid.nx) * grid.ny;
    r.excess.assign(n0, 0);
    parallel_for(static_cast<std::size_t>(grid.ny), [&](std::size_t j) {
        for (int i = 0; i < grid.nx; ++i) r.excess[j * grid.nx + i] = excess(model, grid.at(i, int(j)), t);
    });
    r.inside.resize(n0);
    for (std::size_t k = 0; k < n0; ++k) r.inside[k] = r.excess[k] >= 0;

    for (int level = 0; level < grid.refine; ++level) {
        const GridSpec& g = r.grid;
        const GridSpec fine(g.lo, g.hi, 2 * g.nx - 1, 2 * g.ny - 1);
        std::vector<std::uint8_t> in(static_cast<std::size_t>(fine.nx) * fine.ny);
        std::vector<double> ex(in.size(), std::nan(""));
        const auto cidx = [&](int i, int j) { return static_cast<std::size_t>(j) * g.nx + i; };
        const auto fidx = [&](int i, int j) { return static_cast<std::size_t>(j) * fine.nx + i; };
        // A fine point is evaluated when the coarse cells around it disagree, copied otherwise.
        std::vector<std::pair<int, int>> todo;
        for (int j = 0; j < fine.ny; ++j)
            for (int i = 0; i < fine.nx; ++i) {
                if (i % 2 == 0 && j % 2 == 0) {
                    in[fidx(i, j)] = r.inside[cidx(i / 2, j / 2)];
                    ex[fidx(i, j)] = r.excess[cidx(i / 2, j / 2)];
                    continue;
                }
                const int i0 = i / 2, j0 = j / 2, i1 = (i + 1) / 2, j1 = (j + 1) / 2;
                const bool s = r.inside[cidx(i0, j0)];
                const bool mixed = r.inside[cidx(i1, j0)] != s || r.inside[cidx(i0, j1)] != s ||
                                   r.inside[cidx(i1, j1)] != s;
                if (mixed) todo.emplace_back(i, j);
                else in[fidx(i, j)] = s;
            }
        parallel_for(todo.size(), [&](std::size_t k) {
            const auto [i, j] = todo[k];
            ex[fidx(i, j)] = excess(model, fine.at(i, j), t);
        });
        for (const auto& [i, j] : todo) in[fidx(i, j)] = ex[fidx(i, j)] >= 0;
        r.grid = fine;
        r.inside = std::move(in);
        r.excess = std::move(ex);
    }

    if (with_spectrum) {
        const double margin = std::hypot(r.grid.dx(), r.grid.dy());
        parallel_for(static_cast<std::size_t>(r.grid.ny), [&](std::size_t j) {
            for (int i = 0; i < r.grid.nx; ++i) {
                auto& cell = r.inside[j * r.grid.nx + i];
                if (!cell && spec_indicator(model, r.grid.at(i, int(j)), margin)) cell = 1;
            }
        });
    }
    return r;
}

BoundaryTrace trace_boundary(const SpectralModel& model, double t, const GridSpec& grid) {
    const Raster r = rasterize(model, t, grid, false);
    const GridSpec& g = r.grid;
    const int nx = g.nx, ny = g.ny;
    const auto pidx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    // Edge ids: horizontal (i,j)-(i+1,j) first, then vertical (i,j)-(i,j+1).
    const std::size_t nh = static_cast<std::size_t>(nx - 1) * ny;
    const auto hid = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx - 1) + i; };
    const auto vid = [&](int i, int j) { return nh + static_cast<std::size_t>(i) * (ny - 1) + j; };

    std::map<std::size_t, std::vector<std::size_t>> adj;
    auto connect = [&](std::size_t a, std::size_t b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const bool c0 = r.at(i, j), c1 = r.at(i + 1, j), c2 = r.at(i + 1, j + 1), c3 = r.at(i, j + 1);
            const std::size_t e0 = hid(i, j), e1 = vid(i + 1, j), e2 = hid(i, j + 1), e3 = vid(i, j);
            std::vector<std::size_t> cut;
            if (c0 != c1) cut.push_back(e0);
            if (c1 != c2) cut.push_back(e1);
            if (c2 != c3) cut.push_back(e2);
            if (c3 != c0) cut.push_back(e3);
            if (cut.size() == 2) {
                connect(cut[0], cut[1]);
            } else if (cut.size() == 4) {
                const cplx centre = g.at(i, j) + cplx(0.5 * g.dx(), 0.5 * g.dy());
                const bool mid = excess(model, centre, t) >= 0;
                if (mid == c0) {
                    connect(e0, e1);
                    connect(e2, e3);
                } else {
                    connect(e3, e0);
                    connect(e1, e2);
                }
            }
        }

    BoundaryTrace out;
    const auto endpoints = [&](std::size_t e) {
        if (e < nh) {
            const int j = static_cast<int>(e / (nx - 1)), i = static_cast<int>(e % (nx - 1));
            return std::pair{std::pair{i, j}, std::pair{i + 1, j}};
        }
        const std::size_t k = e - nh;
        const int i = static_cast<int>(k / (ny - 1)), j = static_cast<int>(k % (ny - 1));
        return std::pair{std::pair{i, j}, std::pair{i, j + 1}};
    };
    std::vector<std::size_t> ids;
    for (const auto& [e, nb] : adj) ids.push_back(e);
    std::map<std::size_t, cplx> point;
    std::vector<cplx> pts(ids.size());
    parallel_for(ids.size(), [&](std::size_t k) {
        const auto [pa, pb] = endpoints(ids[k]);
        const cplx za = g.at(pa.first, pa.second), zb = g.at(pb.first, pb.second);
        auto F = [&](double u) { return excess(model, za + u * (zb - za), t); };
        double fa = r.excess[pidx(pa.first, pa.second)], fb = r.excess[pidx(pb.first, pb.second)];
        if (!std::isfinite(fa) || fa >= 1e299) fa = F(0);
        if (!std::isfinite(fb) || fb >= 1e299) fb = F(1);
        fa = std::min(fa, 1e100);
        fb = std::min(fb, 1e100);
        if ((fa >= 0) == (fb >= 0)) {
            pts[k] = std::abs(fa) < std::abs(fb) ? za : zb;
            return;
        }
        const double len = std::abs(zb - za);
        auto tol = [len](double a, double b) { return std::abs(b - a) * len <= 1e-13; };
        std::uintmax_t iters = 200;
        const auto [a, b] = boost::math::tools::toms748_solve(
            [&](double u) { return std::min(F(u), 1e100); }, 0.0, 1.0, fa, fb, tol, iters);
        pts[k] = za + 0.5 * (a + b) * (zb - za);
    });
    for (std::size_t k = 0; k < ids.size(); ++k) point[ids[k]] = pts[k];

    std::map<std::size_t, bool> used;
    auto walk = [&](std::size_t start) {
        BoundaryCurve c;
        std::size_t prev = start, cur = start;
        used[start] = true;
        c.vertices.push_back(point[start]);
        for (;;) {
            std::size_t next = cur;
            for (std::size_t nb : adj[cur])
                if (nb != prev && !used[nb]) {
                    next = nb;
                    break;
                }
            if (next == cur) {
                // Closed when the walk returns to its start.
                const auto& nbs = adj[cur];
                c.closed = cur != start && std::find(nbs.begin(), nbs.end(), start) != nbs.end() &&
                           adj[start].size() == 2;
                break;
            }
            used[next] = true;
            c.vertices.push_back(point[next]);
            prev = cur;
            cur = next;
        }
        return c;
    };
    // Open chains first (they start at the grid border), then loops.
    for (const auto& [e, nb] : adj)
        if (nb.size() == 1 && !used[e]) {
            out.curves.push_back(walk(e));
            out.diagnostics.push_back("open boundary chain reaches the grid border; enlarge the box");
        }
    for (const auto& [e, nb] : adj)
        if (!used[e]) out.curves.push_back(walk(e));

    for (auto& c : out.curves) {
        c.grad_norm.resize(c.vertices.size());
        c.normal.resize(c.vertices.size());
        parallel_for(c.vertices.size(), [&](std::size_t k) {
            const Vec2 gr = grad_f(model, c.vertices[k]);
            c.grad_norm[k] = gr.norm();
            c.normal[k] = gr.norm() > 0 ? Vec2(gr / gr.norm()) : Vec2::Zero();
        });
        if (!c.closed && c.vertices.size() > 2 && out.diagnostics.empty())
            out.diagnostics.push_back("boundary chain did not close; grid may be too coarse");
    }
    return out;
}

std::vector<CriticalPoint> find_critical_points(const SpectralModel& model, const GridSpec& box) {
    const int nx = box.nx, ny = box.ny;
    const double margin = std::hypot(box.dx(), box.dy());
    std::vector<double> g2(static_cast<std::size_t>(nx) * ny, std::nan(""));
    parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
        for (int i = 0; i < nx; ++i) {
            const cplx z = box.at(i, int(j));
            if (spec_indicator(model, z, margin)) continue;
            try {
                g2[j * nx + i] = grad_f(model, z).squaredNorm();
            } catch (const DomainError&) {
            }
        }
    });
    std::vector<cplx> seeds;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double v = g2[static_cast<std::size_t>(j) * nx + i];
            if (!std::isfinite(v)) continue;
            bool minimum = true;
            for (int dj = -1; dj <= 1 && minimum; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int a = i + di, b = j + dj;
                    if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= nx || b >= ny) continue;
                    const double w = g2[static_cast<std::size_t>(b) * nx + a];
                    if (!std::isfinite(w) || w < v) {
                        minimum = false;
                        break;
                    }
                }
            if (minimum) seeds.push_back(box.at(i, j));
        }

    const double slack = 0.1 * std::max(box.hi.real() - box.lo.real(), box.hi.imag() - box.lo.imag());
    const auto in_box = [&](cplx z) {
        return z.real() >= box.lo.real() - slack && z.real() <= box.hi.real() + slack &&
               z.imag() >= box.lo.imag() - slack && z.imag() <= box.hi.imag() + slack;
    };
    std::vector<std::optional<CriticalPoint>> found(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t k) {
        cplx z = seeds[k];
        try {
            Vec2 gr = grad_f(model, z);
            for (int it = 0; it < 100; ++it) {
                const Mat2 H = hess_f(model, z);
                const Vec2 step = H.completeOrthogonalDecomposition().solve(gr);
                if (!step.allFinite()) break;
                double lam = 1;
                bool moved = false;
                for (int half = 0; half < 40; ++half, lam *= 0.5) {
                    const cplx trial = z - lam * cplx(step(0), step(1));
                    if (spec_indicator(model, trial, 0)) continue;
                    Vec2 gt;
                    try {
                        gt = grad_f(model, trial);
                    } catch (const DomainError&) {
                        continue;
                    }
                    if (gt.norm() < gr.norm() || (gt.norm() == 0)) {
                        z = trial;
                        gr = gt;
                        moved = true;
                        break;
                    }
                }
                if (!moved || gr.norm() == 0 || lam * step.norm() <= 1e-16 * (1 + std::abs(z))) break;
            }
            const Mat2 H = hess_f(model, z);
            if (gr.norm() > 1e-10 * (1 + H.norm())) return;  // seed discarded
            if (!in_box(z)) return;
            CriticalPoint c;
            c.z = z;
            c.grad_norm = gr.norm();
            c.H = H;
            Eigen::SelfAdjointEigenSolver<Mat2> es(H);
            c.lambda1 = es.eigenvalues()(1);
            c.lambda2 = es.eigenvalues()(0);
            const double det = H.determinant();
            if (std::abs(det) <= 1e-8 * H.squaredNorm()) c.kind = CriticalKind::degenerate;
            else c.kind = det > 0 ? CriticalKind::local_min : CriticalKind::saddle;
            c.f = f_eval(model, z);
            c.t_star = 1 / c.f;
            found[k] = c;
        } catch (const DomainError&) {
        }
    });

    std::vector<CriticalPoint> out;
    for (const auto& c : found) {
        if (!c) continue;
        const bool dup = std::any_of(out.begin(), out.end(),
                                     [&](const CriticalPoint& o) { return std::abs(o.z - c->z) <= kMergeRadius; });
        if (!dup) out.push_back(*c);
    }
    std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    return out;
}

std::vector<CriticalPoint> critical_boundary_points(const std::vector<CriticalPoint>& pts, double t) {
    std::vector<CriticalPoint> out;
    for (const auto& c : pts)
        if (std::abs(c.f - 1 / t) <= 1e-8 * std::max(1.0, 1 / t)) out.push_back(c);
    return out;
}

bool sector_membership(const Mat2& H, const Vec2& w, double kappa) {
    if (!(w.norm() > 0)) throw DomainError("sector_membership: w must be nonzero");
    if (!(kappa > 0 && kappa < 1)) throw DomainError("sector_membership: kappa must lie in (0, 1)");
    const Mat2 P = null_projector(H);
    return (P * w).squaredNorm() / w.squaredNorm() < 1 - kappa;
}

int count_components(const SpectralModel& model, double t, const GridSpec& grid) {
    const Raster r = rasterize(model, t, grid, true);
    return label(r.inside, r.grid.nx, r.grid.ny, true, true).count;
}

ConnectivityScan connectivity_scan(const SpectralModel& model, const std::vector<double>& t_list,
                                   const GridSpec& grid) {
    if (!std::is_sorted(t_list.begin(), t_list.end())) throw DomainError("connectivity_scan: t_list must ascend");
    ConnectivityScan s;
    s.t = t_list;
    for (double t : t_list) {
        s.counts.push_back(count_components(model, t, grid));
        if (s.counts.size() > 1 && s.counts.back() > s.counts[s.counts.size() - 2]) s.nonincreasing = false;
    }
    return s;
}

Topology euler_annulus_probe(const SpectralModel& model, double t, const GridSpec& grid) {
    const Raster r = rasterize(model, t, grid, true);
    Topology topo;
    topo.components = label(r.inside, r.grid.nx, r.grid.ny, true, true).count;
    topo.holes = label(r.inside, r.grid.nx, r.grid.ny, false, false).bounded;
    return topo;
}

GridSpec default_grid(const SpectralModel& model, double t, int n, int refine) {
    const double pad = std::sqrt(t) + 0.25;
    if (!model.is_normal()) {
        const double h = model.norm() + pad;
        return GridSpec({-h, -h}, {h, h}, n, n, refine);
    }
    const auto s = spectrum_samples(model, 64);
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (cplx z : s) {
        x0 = std::min(x0, z.real());
        x1 = std::max(x1, z.real());
        y0 = std::min(y0, z.imag());
        y1 = std::max(y1, z.imag());
    }
    const cplx c(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    const double h = 0.5 * std::max(x1 - x0, y1 - y0) + pad;
    return GridSpec(c - cplx(h, h), c + cplx(h, h), n, n, refine);
}

GridSpec default_critical_box(const SpectralModel& model, int n) {
    const double h = model.norm() + 1;
    return GridSpec({-h, -h}, {h, h}, n, n);
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryCurve>& curves) {
    os << "component,vertex,re,im,grad_norm\n" << std::setprecision(17);
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (std::size_t k = 0; k < curves[c].vertices.size(); ++k)
            os << c << ',' << k << ',' << curves[c].vertices[k].real() << ',' << curves[c].vertices[k].imag() << ','
               << curves[c].grad_norm[k] << '\n';
}

nlohmann::json to_json(const CriticalPoint& c) {
    return {{"re", c.z.real()},
            {"im", c.z.imag()},
            {"grad_norm", c.grad_norm},
            {"hessian", {{c.H(0, 0), c.H(0, 1)}, {c.H(1, 0), c.H(1, 1)}}},
            {"eigenvalues", {c.lambda1, c.lambda2}},
            {"kind", to_string(c.kind)},
            {"f", c.f},
            {"t_star", c.t_star}};
}

}  // namespace brownedge
