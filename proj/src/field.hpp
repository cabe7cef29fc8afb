#pragma once

#include <brownedge/kernels.hpp>

#include <cmath>
#include <memory>

namespace brownedge::detail {

// Raw sums behind MomentSet; h** hold <(w-z)_i (w-z)_j |w-z|^-6> and are only filled at v = 0.
struct Accum {
    double m1 = 0;
    double m2 = 0;
    cplx g{};
    double hxx = 0, hxy = 0, hyy = 0;
    bool divergent = false;

    void add(double dx, double dy, double w, double v2, bool hess) {
        const double r2 = dx * dx + dy * dy + v2;
        const double e = 1.0 / r2;
        const double we = w * e, we2 = we * e;
        m1 += we;
        m2 += we2;
        g += cplx(dx * we2, dy * we2);
        if (hess) {
            const double we3 = we2 * e;
            hxx += dx * dx * we3;
            hxy += dx * dy * we3;
            hyy += dy * dy * we3;
        }
    }
    MomentSet moments() const {
        MomentSet s;
        s.m1 = m1;
        s.m2 = m2;
        s.mixed = m2;
        s.g = g;
        s.divergent = divergent;
        return s;
    }
};

// Evaluation backend for one model variant.
class Field {
public:
    virtual ~Field() = default;
    virtual Accum accum(cplx z, double v, bool hess) const = 0;
    virtual std::function<MomentSet(double)> probe(cplx z) const {
        return [this, z](double v) { return accum(z, v, false).moments(); };
    }
    virtual double dist_to_spectrum(cplx z) const = 0;
    virtual std::vector<cplx> spectrum_samples(int resolution) const = 0;
    virtual double norm() const = 0;
    virtual double area_density(cplx) const { return std::nan(""); }
    virtual bool normal() const { return true; }
};

struct ModelData {
    std::unique_ptr<Field> field;
};

std::unique_ptr<Field> make_atomic(const Atomic& m);
std::unique_ptr<Field> make_haar();
std::unique_ptr<Field> make_product_power(const ProductPower& m);
std::unique_ptr<Field> make_beta(const HermitianBeta& m);
std::unique_ptr<Field> make_tabulated(const HermitianTabulated& m);
std::unique_ptr<Field> make_two_line();
std::unique_ptr<Field> make_matrix(const MatrixState& m);

}  // namespace brownedge::detail
