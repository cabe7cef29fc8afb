#pragma once

#include <brownedge/kernels.hpp>

#include <string>
#include <vector>

namespace brownedge {

// Canned initial conditions with the times at which they are usually examined.
struct CatalogEntry {
    std::string name;
    std::string description;
    SpectralModel model;
    std::vector<double> times;
};

std::vector<std::string> catalog_names();
CatalogEntry catalog(const std::string& name);

}  // namespace brownedge
