#include <brownedge/catalog.hpp>

#include <cmath>

namespace brownedge {

std::vector<std::string> catalog_names() { return {"a4", "haar", "tangent", "powerlaw", "jacobi"}; }

CatalogEntry catalog(const std::string& name) {
    if (name == "a4") {
        const SpectralModel m(Atomic{{{1, 0.25}, {-1, 0.25}, {{0, 1}, 0.25}, {{0, -1}, 0.25}}});
        return {name, "four equal atoms at 1, i, -1, -i", m, {0.5, 2 * (std::sqrt(2.0) - 1), 0.9, 1.0, 1.1}};
    }
    if (name == "haar") return {name, "Haar unitary (uniform on the unit circle)", SpectralModel(HaarUnitary{}), {1.0}};
    if (name == "tangent") {
        const SpectralModel m(TwoLine{});
        return {name, "two vertical lines Re z = -1, 1; t0 = 1/f(0)", m, {1 / f_eval(m, 0)}};
    }
    if (name == "powerlaw")
        return {name, "density 5 x y^1.5 on the unit square", SpectralModel(ProductPower{1, 1.5}), {0.2, 0.9}};
    if (name == "jacobi")
        return {name, "Beta(3, 4) on [0, 1]", SpectralModel(HermitianBeta{3, 4}), {1.0 / 30, 1.0 / 10, 2.0 / 5}};
    throw ConfigError("unknown example '" + name + "' (expected a4, haar, tangent, powerlaw or jacobi)");
}

}  // namespace brownedge
