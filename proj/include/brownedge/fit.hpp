#pragma once

#include <span>

namespace brownedge {

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // root mean square of the residuals
};

// Least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);
// Fit of log y against log x; entries must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace brownedge
