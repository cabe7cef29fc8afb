#include <brownedge/dyson.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace brownedge {

namespace {

constexpr double kTinyV = 1e-150;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_t(double t) {
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("t must be positive and finite");
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::interior: return "interior";
        case Regime::exterior: return "exterior";
        case Regime::boundary_band: return "boundary-band";
    }
    return "?";
}

Regime classify(double f, double t) {
    const double level = 1 / t;
    if (std::isfinite(f) && std::abs(f - level) <= kBoundaryBand * std::max(1.0, level))
        return Regime::boundary_band;
    return f > level ? Regime::interior : Regime::exterior;
}

VSolution solve_v(const MomentProbe& probe, double f, double eta, double t, std::optional<double> upper) {
    check_t(t);
    if (!(eta >= 0) || !std::isfinite(eta)) throw DomainError("eta must be finite and >= 0");
    VSolution sol;
    sol.eta = eta;
    sol.t = t;
    sol.z = probe.z();
    sol.regime = classify(f, t);

    double lo, hi;
    if (eta == 0) {
        if (!(f > 1 / t)) return sol;
        lo = kTinyV;
        hi = std::sqrt(t);
    } else {
        lo = eta;
        hi = eta + std::sqrt(t);
    }
    if (upper && *upper > lo && *upper < hi) hi = *upper;

    // G is increasing in v; dG is its derivative in s = log v.
    auto eval = [&](double v, double& G, double& dG) {
        const MomentSet m = probe(v);
        G = 1 - eta / v - t * m.m1;
        dG = eta / v + 2 * t * v * v * m.m2;
        ++sol.iterations;
    };
    // Stop once the Newton correction to log v is negligible or G is at its rounding floor
    // (G = 1 - eta/v - t m1 cancels to far below 1 near the boundary).
    auto done = [&](double v, double G, double dG) {
        return std::abs(G) <= 1e-13 * dG || std::abs(G) <= 8 * kEps * (2 + eta / v);
    };

    double G, dG;
    if (eta == 0) {
        eval(lo, G, dG);
        if (G >= 0) {
            sol.underflow = true;
            return sol;
        }
    }

    double s_lo = std::log(lo), s_hi = std::log(hi);
    double s = std::log(0.5 * (lo + hi));
    if (eta == 0) s = std::log(0.5 * hi);
    double v = std::exp(s);
    bool converged = false;
    for (int it = 0; it < 300; ++it) {
        v = std::exp(s);
        eval(v, G, dG);
        if (!std::isfinite(G)) {
            // m1 can only blow up as v -> 0; the root is above.
            s_lo = s;
            s = 0.5 * (s_lo + s_hi);
            continue;
        }
        if (done(v, G, dG)) {
            converged = true;
            break;
        }
        (G < 0 ? s_lo : s_hi) = s;
        double next = s - G / dG;
        if (!(dG > 0) || !(next > s_lo && next < s_hi)) next = 0.5 * (s_lo + s_hi);
        if (s_hi - s_lo <= 4e-16 * std::max(1.0, std::abs(s))) break;
        s = next;
    }
    sol.v = v;
    sol.residual = eta > 0 ? std::abs(v * G) : std::abs(G) / t;
    if (!converged && !(sol.residual <= 1e-9 * (1 + v)))
        throw NumericalError("solve_v: no convergence (residual " + std::to_string(sol.residual) + ")");
    return sol;
}

VSolution solve_v(const SpectralModel& model, cplx z, double eta, double t) {
    const MomentProbe probe(model, z);
    return solve_v(probe, probe(0).m1, eta, t);
}

std::vector<VSolution> v_profile(const SpectralModel& model, cplx z, const std::vector<double>& etas, double t) {
    const MomentProbe probe(model, z);
    const double f = probe(0).m1;
    std::vector<VSolution> out;
    out.reserve(etas.size());
    for (double eta : etas) {
        if (!(eta > 0)) throw DomainError("v_profile: eta values must be positive");
        std::optional<double> upper;
        // v is increasing in eta, so a larger eta solved earlier bounds the root.
        if (!out.empty() && out.back().eta > eta) upper = out.back().v;
        out.push_back(solve_v(probe, f, eta, t, upper));
    }
    return out;
}

V0Check v0_expansion_check(const SpectralModel& model, cplx z, double t) {
    check_t(t);
    const MomentProbe probe(model, z);
    const MomentSet m0 = probe(0);
    if (m0.divergent || !std::isfinite(m0.m2)) throw DomainError("v0_expansion_check: z lies on spec(a)");
    if (!(m0.m1 > 1 / t)) throw DomainError("v0_expansion_check: z is not inside D_t, ratio undefined");
    V0Check r;
    r.f = m0.m1;
    r.m2 = m0.m2;
    r.v = solve_v(probe, r.f, 0, t).v;
    r.ratio = r.v / std::sqrt(r.f - 1 / t);
    r.predicted = 1 / std::sqrt(r.m2);
    r.deviation = std::abs(r.ratio / r.predicted - 1);
    return r;
}

}  // namespace brownedge
