#include "field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace brownedge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0; }

void validate(const SpectralModel::Payload& p) {
    std::visit(overloaded{
                   [](const Atomic& m) {
                       require(!m.atoms.empty(), "atomic model needs at least one atom");
                       double s = 0;
                       for (const auto& a : m.atoms) {
                           require(std::isfinite(a.at.real()) && std::isfinite(a.at.imag()),
                                   "atom location must be finite");
                           require(std::isfinite(a.weight) && a.weight >= 0, "atom weight must be >= 0");
                           s += a.weight;
                       }
                       require(std::abs(s - 1) <= 1e-12, "atom weights must sum to 1");
                   },
                   [](const HaarUnitary&) {},
                   [](const ProductPower& m) {
                       require(positive_finite(m.p) && positive_finite(m.q), "p and q must be positive");
                   },
                   [](const HermitianBeta& m) {
                       require(positive_finite(m.alpha) && positive_finite(m.beta),
                               "alpha and beta must be positive");
                   },
                   [](const HermitianTabulated& m) {
                       require(m.points.size() >= 2 && m.points.size() == m.values.size(),
                               "tabulated density needs matching points/values, at least two");
                       double mass = 0;
                       for (std::size_t i = 0; i < m.points.size(); ++i) {
                           require(std::isfinite(m.points[i]), "tabulated point must be finite");
                           require(std::isfinite(m.values[i]) && m.values[i] >= 0,
                                   "tabulated values must be nonnegative");
                           if (i > 0) {
                               require(m.points[i] > m.points[i - 1], "tabulated points must increase");
                               mass += 0.5 * (m.values[i] + m.values[i - 1]) * (m.points[i] - m.points[i - 1]);
                           }
                       }
                       require(mass > 0, "tabulated density has zero mass");
                   },
                   [](const TwoLine&) {},
                   [](const MatrixState& m) {
                       require(m.a.rows() >= 1 && m.a.rows() == m.a.cols(), "matrix must be square and nonempty");
                       require(m.a.allFinite(), "matrix entries must be finite");
                   },
               },
               p);
}

std::unique_ptr<detail::Field> make_field(const SpectralModel::Payload& p) {
    return std::visit(overloaded{
                          [](const Atomic& m) { return detail::make_atomic(m); },
                          [](const HaarUnitary&) { return detail::make_haar(); },
                          [](const ProductPower& m) { return detail::make_product_power(m); },
                          [](const HermitianBeta& m) { return detail::make_beta(m); },
                          [](const HermitianTabulated& m) { return detail::make_tabulated(m); },
                          [](const TwoLine&) { return detail::make_two_line(); },
                          [](const MatrixState& m) { return detail::make_matrix(m); },
                      },
                      p);
}

double num(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(std::string("missing number '") + key + "'");
    return j.at(key).get<double>();
}

cplx parse_cplx(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("complex entry must be a number, {re,im} or [re,im]");
}

std::vector<double> num_array(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(std::string("missing array '") + key + "'");
    std::vector<double> out;
    for (const auto& x : j.at(key)) {
        if (!x.is_number()) throw ConfigError(std::string("non-numeric entry in '") + key + "'");
        out.push_back(x.get<double>());
    }
    return out;
}

// Central difference of `fn` along unit direction e, one Richardson step.
template <class F>
auto richardson(const F& fn, cplx z, cplx e, double h) {
    using R = decltype(fn(z));
    auto d = [&](double s) -> R { return (fn(z + s * e) - fn(z - s * e)) / (2 * s); };
    const R coarse = d(h), fine = d(h / 2);
    return R((4.0 * fine - coarse) / 3.0);
}

}  // namespace

SpectralModel::SpectralModel(Payload payload) : payload_(std::move(payload)) {
    validate(payload_);
    auto data = std::make_shared<detail::ModelData>();
    data->field = make_field(payload_);
    data_ = std::move(data);
}

SpectralModel SpectralModel::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ConfigError("model JSON needs a string 'type'");
    const auto type = j["type"].get<std::string>();
    try {
        if (type == "atomic") {
            Atomic m;
            if (!j.contains("atoms") || !j["atoms"].is_array()) throw ConfigError("atomic model needs 'atoms'");
            for (const auto& a : j["atoms"]) m.atoms.push_back({{a.value("re", 0.0), a.value("im", 0.0)}, num(a, "w")});
            return SpectralModel(m);
        }
        if (type == "haar_unitary") return SpectralModel(HaarUnitary{});
        if (type == "product_power") return SpectralModel(ProductPower{num(j, "p"), num(j, "q")});
        if (type == "hermitian_beta") return SpectralModel(HermitianBeta{num(j, "alpha"), num(j, "beta")});
        if (type == "hermitian_tabulated")
            return SpectralModel(HermitianTabulated{num_array(j, "points"), num_array(j, "values")});
        if (type == "two_line") return SpectralModel(TwoLine{});
        if (type == "matrix") {
            if (!j.contains("rows") || !j["rows"].is_array()) throw ConfigError("matrix model needs 'rows'");
            const auto& rows = j["rows"];
            const auto n = static_cast<Eigen::Index>(rows.size());
            Eigen::MatrixXcd a(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                if (!rows[r].is_array() || static_cast<Eigen::Index>(rows[r].size()) != n)
                    throw ConfigError("matrix rows must form a square array");
                for (Eigen::Index c = 0; c < n; ++c) a(r, c) = parse_cplx(rows[r][c]);
            }
            return SpectralModel(MatrixState{a});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed model JSON: ") + e.what());
    }
    throw ConfigError("unknown model type '" + type + "'");
}

nlohmann::json SpectralModel::to_json() const {
    using nlohmann::json;
    return std::visit(overloaded{
                          [](const Atomic& m) {
                              json atoms = json::array();
                              for (const auto& a : m.atoms)
                                  atoms.push_back({{"re", a.at.real()}, {"im", a.at.imag()}, {"w", a.weight}});
                              return json{{"type", "atomic"}, {"atoms", atoms}};
                          },
                          [](const HaarUnitary&) { return json{{"type", "haar_unitary"}}; },
                          [](const ProductPower& m) { return json{{"type", "product_power"}, {"p", m.p}, {"q", m.q}}; },
                          [](const HermitianBeta& m) {
                              return json{{"type", "hermitian_beta"}, {"alpha", m.alpha}, {"beta", m.beta}};
                          },
                          [](const HermitianTabulated& m) {
                              return json{{"type", "hermitian_tabulated"}, {"points", m.points}, {"values", m.values}};
                          },
                          [](const TwoLine&) { return json{{"type", "two_line"}}; },
                          [](const MatrixState& m) {
                              json rows = json::array();
                              for (Eigen::Index r = 0; r < m.a.rows(); ++r) {
                                  json row = json::array();
                                  for (Eigen::Index c = 0; c < m.a.cols(); ++c)
                                      row.push_back({{"re", m.a(r, c).real()}, {"im", m.a(r, c).imag()}});
                                  rows.push_back(row);
                              }
                              return json{{"type", "matrix"}, {"rows", rows}};
                          },
                      },
                      payload_);
}

std::string SpectralModel::tag() const { return to_json()["type"].get<std::string>(); }
bool SpectralModel::is_normal() const { return data_->field->normal(); }
double SpectralModel::norm() const { return data_->field->norm(); }
double SpectralModel::area_density(cplx z) const { return data_->field->area_density(z); }

MomentProbe::MomentProbe(const SpectralModel& model, cplx z) : z_(z) {
    auto inner = model.data().field->probe(z);
    eval_ = [keep = model.shared_data(), inner = std::move(inner)](double v) { return inner(v); };
}

GridSpec::GridSpec(cplx lo_, cplx hi_, int nx_, int ny_, int refine_)
    : lo(lo_), hi(hi_), nx(nx_), ny(ny_), refine(refine_) {
    if (!(hi.real() > lo.real() && hi.imag() > lo.imag())) throw ConfigError("grid box is degenerate");
    if (nx < 2 || ny < 2) throw ConfigError("grid resolution must be at least 2");
    if (refine < 0) throw ConfigError("grid refinement depth must be >= 0");
}

GridSpec GridSpec::square(double half_width, int n) {
    return GridSpec({-half_width, -half_width}, {half_width, half_width}, n, n);
}

double f_eval(const SpectralModel& model, cplx z) {
    const auto a = model.data().field->accum(z, 0, false);
    return a.m1;
}

MomentSet moments(const SpectralModel& model, cplx z, double v) {
    if (!(v >= 0) || !std::isfinite(v)) throw DomainError("moments: v must be finite and >= 0");
    return model.data().field->probe(z)(v);
}

Vec2 grad_f(const SpectralModel& model, cplx z) {
    const auto& fld = *model.data().field;
    if (fld.normal()) {
        const auto a = fld.accum(z, 0, false);
        if (a.divergent || !std::isfinite(a.m2)) throw DomainError("grad_f: z lies on the singular set");
        return {2 * a.g.real(), 2 * a.g.imag()};
    }
    const double h = 1e-5 * (1 + std::abs(z));
    auto f = [&](cplx w) {
        const double v = fld.accum(w, 0, false).m1;
        if (!std::isfinite(v)) throw DomainError("grad_f: stencil touches the spectrum");
        return v;
    };
    if (!std::isfinite(f(z))) throw DomainError("grad_f: z lies on the spectrum");
    return {richardson(f, z, 1.0, h), richardson(f, z, cplx(0, 1), h)};
}

Mat2 hess_f(const SpectralModel& model, cplx z) {
    const auto& fld = *model.data().field;
    Mat2 H;
    if (fld.normal()) {
        const auto a = fld.accum(z, 0, true);
        if (a.divergent || !std::isfinite(a.m2)) throw DomainError("hess_f: z lies on the singular set");
        H << a.hxx, a.hxy, a.hxy, a.hyy;
        H *= 8;
        H.diagonal().array() -= 2 * a.m2;
        return H;
    }
    // Differences of the gradient identity 2(Re g, Im g), which holds for any a.
    const double h = 1e-5 * (1 + std::abs(z));
    auto grad = [&](cplx w) {
        const auto s = fld.probe(w)(0);
        if (s.divergent) throw DomainError("hess_f: stencil touches the spectrum");
        return Vec2(2 * s.g.real(), 2 * s.g.imag());
    };
    if (fld.probe(z)(0).divergent) throw DomainError("hess_f: z lies on the spectrum");
    const Vec2 cx = richardson(grad, z, 1.0, h);
    const Vec2 cy = richardson(grad, z, cplx(0, 1), h);
    const double off = 0.5 * (cx(1) + cy(0));
    H << cx(0), off, off, cy(1);
    return H;
}

bool spec_indicator(const SpectralModel& model, cplx z, double margin) {
    const auto& fld = *model.data().field;
    const double d = fld.dist_to_spectrum(z);
    if (fld.normal()) return d <= margin;
    // For non-normal a the smallest singular value of a - z plays the role of the distance.
    return d <= std::max(margin, 1e-6);
}

std::vector<cplx> spectrum_samples(const SpectralModel& model, int resolution) {
    return model.data().field->spectrum_samples(resolution);
}

AssumptionReport assumption_check(const SpectralModel& model, double t, int resolution) {
    if (!(t > 0)) throw DomainError("assumption_check: t must be positive");
    AssumptionReport rep;
    const auto& p = model.payload();
    if (std::holds_alternative<Atomic>(p)) rep.certificate = "atomic: f is infinite at every atom";
    else if (std::holds_alternative<HaarUnitary>(p)) rep.certificate = "haar: f is infinite on the unit circle";
    else if (std::holds_alternative<TwoLine>(p))
        rep.certificate = "two_line: density is positive up to the segment ends, f is infinite on the support";
    else if (const auto* b = std::get_if<HermitianBeta>(&p); b && b->alpha <= 2 && b->beta <= 2)
        rep.certificate = "beta: x^-2 is not integrable against either endpoint exponent";
    else if (std::holds_alternative<MatrixState>(p))
        rep.certificate = "matrix: a - z is singular at every eigenvalue";
    if (!rep.certificate.empty()) {
        rep.holds = true;
        rep.min_f = kInf;
        return rep;
    }

    std::vector<Witness> all;
    for (cplx z : spectrum_samples(model, resolution)) all.push_back({z, f_eval(model, z)});
    std::sort(all.begin(), all.end(), [](const Witness& a, const Witness& b) { return a.f < b.f; });
    rep.min_f = all.empty() ? kInf : all.front().f;
    rep.holds = rep.min_f > 1 / t;
    for (const auto& w : all) {
        if (rep.witnesses.size() >= 10) break;
        if (w.f > 1 / t && !rep.witnesses.empty()) break;
        rep.witnesses.push_back(w);
    }
    return rep;
}

}  // namespace brownedge
