#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace brownedge {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised when a model configuration is malformed.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when an operation is evaluated outside its domain (on the spectrum, exterior point, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Raised when an iteration fails or an internal identity is violated.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Atom {
    cplx at;
    double weight;
};

struct Atomic {
    std::vector<Atom> atoms;
};

// Uniform measure on the unit circle.
struct HaarUnitary {};

// Density (p+1)(q+1) x^p y^q on the unit square.
struct ProductPower {
    double p;
    double q;
};

// Beta(alpha, beta) law on [0,1] of the real axis.
struct HermitianBeta {
    double alpha;
    double beta;
};

// Piecewise linear density on the real axis; renormalized on construction.
struct HermitianTabulated {
    std::vector<double> points;
    std::vector<double> values;
};

// Mass 1/2 on each of the lines Re z = -1, +1, each half spread as (35/192)(1+y^2)^3 dy, |y| <= 1.
struct TwoLine {};

// Explicit n x n matrix with the normalized trace as state.
struct MatrixState {
    Eigen::MatrixXcd a;
};

namespace detail {
struct ModelData;
}

// The initial condition a. Immutable after construction; copies share precomputed data.
class SpectralModel {
public:
    using Payload = std::variant<Atomic, HaarUnitary, ProductPower, HermitianBeta,
                                 HermitianTabulated, TwoLine, MatrixState>;

    explicit SpectralModel(Payload payload);

    static SpectralModel from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    const Payload& payload() const { return payload_; }
    std::string tag() const;
    bool is_normal() const;
    // Operator norm of a (support radius for the normal variants).
    double norm() const;
    // Density of the spectral measure with respect to area, when it has one (NaN otherwise).
    double area_density(cplx z) const;

    const detail::ModelData& data() const { return *data_; }
    const std::shared_ptr<const detail::ModelData>& shared_data() const { return data_; }

private:
    Payload payload_;
    std::shared_ptr<const detail::ModelData> data_;
};

// Resolvent functionals at (z, v).
struct MomentSet {
    double m1 = 0;
    double m2 = 0;
    double mixed = 0;
    cplx g{};
    // Set when one of the functionals diverges (only possible at v = 0).
    bool divergent = false;
};

// Evaluates MomentSet at a fixed z for many values of v; node sets and factorizations are
// built once in the constructor.
class MomentProbe {
public:
    MomentProbe(const SpectralModel& model, cplx z);
    MomentSet operator()(double v) const { return eval_(v); }
    cplx z() const { return z_; }

private:
    cplx z_;
    std::function<MomentSet(double)> eval_;
};

struct GridSpec {
    cplx lo;
    cplx hi;
    int nx = 2;
    int ny = 2;
    int refine = 0;

    GridSpec() = default;
    GridSpec(cplx lo_, cplx hi_, int nx_, int ny_, int refine_ = 0);

    double dx() const { return (hi.real() - lo.real()) / (nx - 1); }
    double dy() const { return (hi.imag() - lo.imag()) / (ny - 1); }
    cplx at(int i, int j) const { return {lo.real() + i * dx(), lo.imag() + j * dy()}; }
    static GridSpec square(double half_width, int n);
};

double f_eval(const SpectralModel& model, cplx z);
MomentSet moments(const SpectralModel& model, cplx z, double v);
Vec2 grad_f(const SpectralModel& model, cplx z);
Mat2 hess_f(const SpectralModel& model, cplx z);
bool spec_indicator(const SpectralModel& model, cplx z, double margin);

struct Witness {
    cplx z;
    double f;
};

struct AssumptionReport {
    bool holds = false;
    double min_f = kInf;
    std::vector<Witness> witnesses;
    // Non-empty when the verdict follows from divergence of f on all of spec(a).
    std::string certificate;
};

AssumptionReport assumption_check(const SpectralModel& model, double t, int resolution);

// Points sampled from spec(a) (used by assumption_check and by the spectrum mask).
std::vector<cplx> spectrum_samples(const SpectralModel& model, int resolution);

}  // namespace brownedge
