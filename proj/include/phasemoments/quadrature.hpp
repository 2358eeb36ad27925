#pragma once

#include <functional>
#include <span>
#include <vector>

namespace phasemoments::quad {

// Nodes and weights of a fixed quadrature rule.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre of the given order (4, 8 or 20) on every panel. Panels split
// the intervals between consecutive breakpoints (which must be increasing)
// into pieces no wider than max_panel.
Rule composite_gauss_legendre(std::span<const double> breakpoints, double max_panel,
                              int order = 20);

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity. Throws
// ErrorCode::convergence with the achieved error estimate when the relative
// error stays above tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 const char* what);

}  // namespace phasemoments::quad
