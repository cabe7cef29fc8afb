#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace brownedge::detail {

struct Node {
    double x;
    double w;
};

// Gauss-Legendre rule on [-1, 1]; cached per order.
const std::vector<Node>& gauss_legendre(int n);

// Appends the n-point rule mapped to [a, b].
void append_gauss(std::vector<Node>& out, double a, double b, int n);

// Breakpoints of a mesh on [a, b] graded geometrically (ratio 3) toward the ends.
// da/db: width of the smallest panel at that end (0 or >= b-a disables grading there).
std::vector<double> graded_breaks(double a, double b, double da, double db);

// Panel rule over a set of breakpoints.
std::vector<Node> panel_rule(std::span<const double> breaks, int n);

// Adaptive Gauss-Kronrod (7/15) for a K-vector integrand. `scale` maps the running totals to
// per-component magnitudes; the loop stops when the summed scaled error drops below tol.
template <std::size_t K, class F, class S>
std::array<double, K> integrate_gk(F&& f, std::span<const double> breaks, S&& scale, double tol,
                                   int max_intervals = 3000);

}  // namespace brownedge::detail

#include "quadrature_impl.hpp"
