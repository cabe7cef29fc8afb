#include <brownedge/density.hpp>
#include <brownedge/fit.hpp>
#include <brownedge/parallel.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace brownedge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSlopeBand = 0.15;

}  // namespace

DensityValue rho_detail(const MomentProbe& probe, double f, double t, const SpectralModel& model) {
    DensityValue out;
    out.sol = solve_v(probe, f, 0, t);
    if (out.sol.regime == Regime::exterior) return out;
    if (out.sol.underflow) {
        out.underflow = true;
        const double a = model.area_density(probe.z());
        out.rho = std::isfinite(a) ? a : 0.0;
        return out;
    }
    const double v = out.sol.v;
    const MomentSet m = probe(v);
    if (m.divergent) throw DomainError("rho: z lies on spec(a) and on the boundary of D_t");
    out.rho = (v * v * m.mixed + std::norm(m.g) / m.m2) / kPi;
    return out;
}

DensityValue rho_detail(const SpectralModel& model, cplx z, double t) {
    const MomentProbe probe(model, z);
    return rho_detail(probe, probe(0).m1, t, model);
}

double rho(const SpectralModel& model, cplx z, double t) { return rho_detail(model, z, t).rho; }

double rho_reg(const MomentProbe& probe, double f, double eta, double t) {
    if (!(eta > 0)) throw DomainError("rho_reg: eta must be positive");
    const VSolution sol = solve_v(probe, f, eta, t);
    const double v = sol.v;
    const MomentSet m = probe(v);
    return (v * v * m.mixed + std::norm(m.g) / (eta / (2 * t * v * v * v) + m.m2)) / kPi;
}

double rho_reg(const SpectralModel& model, cplx z, double eta, double t) {
    const MomentProbe probe(model, z);
    return rho_reg(probe, probe(0).m1, eta, t);
}

bool on_boundary(double f, double t) { return classify(f, t) == Regime::boundary_band; }

EdgeJump edge_jump(const SpectralModel& model, cplx z0, double t) {
    const MomentSet m = moments(model, z0, 0);
    if (m.divergent || !std::isfinite(m.m2)) throw DomainError("edge_jump: z0 lies on spec(a)");
    if (!on_boundary(m.m1, t)) throw DomainError("edge_jump: z0 is not on the boundary of D_t");
    const Vec2 grad = grad_f(model, z0);
    const Mat2 H = hess_f(model, z0);
    EdgeJump e;
    if (grad.norm() <= kCriticalTol * (1 + H.norm())) {
        e.critical = true;
        return e;
    }
    e.via_gradient = grad.squaredNorm() / (4 * kPi * m.m2);
    e.via_g = std::norm(m.g) / (kPi * m.m2);
    if (std::abs(e.via_gradient - e.via_g) > 1e-8 * std::max(e.via_gradient, e.via_g))
        throw NumericalError("edge_jump: |grad f|^2 and 4|g|^2 disagree");
    e.value = e.via_g;
    return e;
}

Mat2 null_projector(const Mat2& H) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(H);
    const auto& lam = es.eigenvalues();
    const double scale = lam.cwiseAbs().maxCoeff();
    if (scale == 0) return Mat2::Identity();
    Mat2 P = Mat2::Zero();
    for (int i = 0; i < 2; ++i)
        if (std::abs(lam(i)) < 1e-6 * scale) P += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
    return P;
}

QuadForm quad_form(const SpectralModel& model, cplx z0, double t) {
    const MomentSet m = moments(model, z0, 0);
    if (m.divergent || !std::isfinite(m.m2)) throw DomainError("quad_form: z0 lies on spec(a)");
    if (!on_boundary(m.m1, t)) throw DomainError("quad_form: z0 is not on the boundary of D_t");
    QuadForm q;
    q.H = hess_f(model, z0);
    if (grad_f(model, z0).norm() > kCriticalTol * (1 + q.H.norm()))
        throw DomainError("quad_form: z0 is not a critical point of f");
    if (!(q.H.trace() > 0)) throw NumericalError("quad_form: Hessian trace is not positive");
    q.m2 = m.m2;
    q.mixed = m.mixed;
    q.Q = (m.mixed / m.m2) / (2 * kPi) * q.H + 1 / (4 * kPi * m.m2) * (q.H * q.H);
    q.P = null_projector(q.H);
    return q;
}

std::string to_string(EdgeType e) {
    switch (e) {
        case EdgeType::sharp: return "sharp";
        case EdgeType::quadratic: return "quadratic";
        case EdgeType::power_law: return "power-law";
        case EdgeType::unclassified: return "unclassified";
    }
    return "?";
}

EdgeReport edge_profile(const SpectralModel& model, cplx z0, double t, Vec2 direction,
                        const std::vector<double>& s_list) {
    if (!(direction.norm() > 0)) throw DomainError("edge_profile: direction must be nonzero");
    direction.normalize();
    EdgeReport rep;
    rep.z0 = z0;
    rep.direction = direction;
    const cplx u(direction(0), direction(1));

    std::vector<double> vals(s_list.size());
    parallel_for(s_list.size(), [&](std::size_t i) { vals[i] = rho(model, z0 + s_list[i] * u, t); });
    for (std::size_t i = 0; i < s_list.size(); ++i) {
        if (s_list[i] > 0 && vals[i] > 0) {
            rep.s.push_back(s_list[i]);
            rep.rho.push_back(vals[i]);
        }
    }
    rep.samples = static_cast<int>(rep.s.size());
    if (rep.samples < 4) return rep;

    const LineFit lf = fit_loglog(rep.s, rep.rho);
    rep.slope = lf.slope;
    rep.intercept = lf.intercept;
    rep.fit_residual = lf.residual;
    rep.exponent = lf.slope;
    rep.prefactor = std::exp(lf.intercept);

    if (std::abs(lf.slope) <= kSlopeBand) {
        rep.type = EdgeType::sharp;
        rep.fitted_jump = fit_line(rep.s, rep.rho).intercept;
        try {
            rep.jump = edge_jump(model, z0, t).value;
        } catch (const DomainError&) {
            rep.jump = std::nan("");
        }
    } else if (std::abs(lf.slope - 2) <= kSlopeBand) {
        rep.type = EdgeType::quadratic;
        std::vector<double> ratio(rep.s.size());
        for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = rep.rho[i] / (rep.s[i] * rep.s[i]);
        rep.fitted_prefactor = fit_line(rep.s, ratio).intercept;
        try {
            const QuadForm q = quad_form(model, z0, t);
            rep.Q = q.Q;
            rep.predicted_prefactor = q(direction);
        } catch (const DomainError&) {
            rep.predicted_prefactor = std::nan("");
        }
    } else {
        rep.type = EdgeType::power_law;
    }
    return rep;
}

}  // namespace brownedge
