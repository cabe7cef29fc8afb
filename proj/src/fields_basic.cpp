#include "field.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <numbers>

namespace brownedge::detail {

namespace {

class AtomicField final : public Field {
public:
    explicit AtomicField(Atomic m) : m_(std::move(m)) {}

    Accum accum(cplx z, double v, bool hess) const override {
        Accum a;
        const double v2 = v * v;
        for (const auto& at : m_.atoms) {
            const cplx d = at.at - z;
            if (v2 == 0 && d == cplx{}) {
                a.m1 = a.m2 = kInf;
                a.divergent = true;
                return a;
            }
            a.add(d.real(), d.imag(), at.weight, v2, hess);
        }
        return a;
    }
    double dist_to_spectrum(cplx z) const override {
        double d = kInf;
        for (const auto& at : m_.atoms) d = std::min(d, std::abs(at.at - z));
        return d;
    }
    std::vector<cplx> spectrum_samples(int) const override {
        std::vector<cplx> s;
        for (const auto& at : m_.atoms) s.push_back(at.at);
        return s;
    }
    double norm() const override {
        double r = 0;
        for (const auto& at : m_.atoms) r = std::max(r, std::abs(at.at));
        return r;
    }

private:
    Atomic m_;
};

class HaarField final : public Field {
public:
    Accum accum(cplx z, double v, bool hess) const override {
        Accum a;
        const double r = std::abs(z);
        const double d = (1 - r) * (1 + r);
        const double v2 = v * v;
        if (v2 == 0 && d == 0) {
            a.m1 = a.m2 = kInf;
            a.divergent = true;
            return a;
        }
        const double big_a = 1 + r * r + v2;
        const double disc = d * d + v2 * (2 * (1 + r * r) + v2);
        const double sq = std::sqrt(disc);
        a.m1 = 1 / sq;
        a.m2 = big_a / (disc * sq);
        a.g = z * ((d - v2) / (disc * sq));
        if (hess && v2 == 0) {
            const double s = d > 0 ? 1.0 : -1.0;
            const double lin = 2 * s / (d * d);
            const double rad = s * 8 / (d * d * d);
            const double x = z.real(), y = z.imag();
            const double h11 = lin + rad * x * x, h12 = rad * x * y, h22 = lin + rad * y * y;
            a.hxx = (h11 + 2 * a.m2) / 8;
            a.hxy = h12 / 8;
            a.hyy = (h22 + 2 * a.m2) / 8;
        }
        return a;
    }
    double dist_to_spectrum(cplx z) const override { return std::abs(std::abs(z) - 1); }
    std::vector<cplx> spectrum_samples(int res) const override {
        std::vector<cplx> s;
        const int n = std::max(res, 8);
        for (int k = 0; k < n; ++k) s.push_back(std::polar(1.0, 2 * std::numbers::pi * k / n));
        return s;
    }
    double norm() const override { return 1; }
};

class MatrixField final : public Field {
public:
    explicit MatrixField(MatrixState m) : m_(std::move(m)) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m_.a);
        norm_ = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    }

    std::function<MomentSet(double)> probe(cplx z) const override {
        const auto n = m_.a.rows();
        Eigen::MatrixXcd w = m_.a;
        w.diagonal().array() -= z;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::VectorXd sig = svd.singularValues();
        Eigen::MatrixXd c2 = (svd.matrixU().adjoint() * svd.matrixV()).cwiseAbs2();
        Eigen::VectorXcd diag = (svd.matrixV().adjoint() * svd.matrixU()).diagonal();
        const double floor = 1e-13 * (1 + norm_ + std::abs(z));
        const bool singular = sig.size() == 0 || sig(sig.size() - 1) <= floor;
        return [=](double v) {
            MomentSet s;
            if (v == 0 && singular) {
                s.m1 = s.m2 = s.mixed = kInf;
                s.divergent = true;
                return s;
            }
            Eigen::VectorXd a = (sig.array().square() + v * v).inverse().matrix();
            s.m1 = a.sum() / n;
            s.m2 = a.squaredNorm() / n;
            s.mixed = a.dot(c2 * a) / n;
            cplx g{};
            for (Eigen::Index i = 0; i < sig.size(); ++i) g += a(i) * a(i) * sig(i) * diag(i);
            s.g = g / double(n);
            return s;
        };
    }
    Accum accum(cplx z, double v, bool) const override {
        const auto s = probe(z)(v);
        Accum a;
        a.m1 = s.m1;
        a.m2 = s.m2;
        a.g = s.g;
        a.divergent = s.divergent;
        return a;
    }
    double dist_to_spectrum(cplx z) const override {
        Eigen::MatrixXcd w = m_.a;
        w.diagonal().array() -= z;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(w);
        const auto& s = svd.singularValues();
        return s.size() ? s(s.size() - 1) : kInf;
    }
    std::vector<cplx> spectrum_samples(int) const override {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m_.a, false);
        std::vector<cplx> s(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
        return s;
    }
    double norm() const override { return norm_; }
    bool normal() const override { return false; }

private:
    MatrixState m_;
    double norm_ = 0;
};

}  // namespace

std::unique_ptr<Field> make_atomic(const Atomic& m) { return std::make_unique<AtomicField>(m); }
std::unique_ptr<Field> make_haar() { return std::make_unique<HaarField>(); }
std::unique_ptr<Field> make_matrix(const MatrixState& m) {
    return std::make_unique<MatrixField>(m);
}

}  // namespace brownedge::detail
