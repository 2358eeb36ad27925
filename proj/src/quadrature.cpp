#include "phasemoments/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phasemoments/error.hpp"

namespace phasemoments::quad {

namespace {

template <unsigned Order>
Rule composite(std::span<const double> breakpoints, double max_panel) {
  using GL = boost::math::quadrature::gauss<double, Order>;
  const auto& absc = GL::abscissa();
  const auto& wts = GL::weights();
  Rule rule;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    require(hi >= lo, ErrorCode::invalid_argument, "breakpoints must be increasing");
    if (hi == lo) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel)));
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * width;
      const double half = 0.5 * width;
      // Boost stores the nonnegative half of the symmetric rule.
      for (std::size_t j = 0; j < absc.size(); ++j) {
        if (absc[j] == 0.0) {
          rule.x.push_back(mid);
          rule.w.push_back(half * wts[j]);
          continue;
        }
        rule.x.push_back(mid - half * absc[j]);
        rule.w.push_back(half * wts[j]);
        rule.x.push_back(mid + half * absc[j]);
        rule.w.push_back(half * wts[j]);
      }
    }
  }
  return rule;
}

}  // namespace

Rule composite_gauss_legendre(std::span<const double> breakpoints, double max_panel, int order) {
  require(max_panel > 0, ErrorCode::invalid_argument, "panel width must be positive");
  switch (order) {
    case 4: return composite<4>(breakpoints, max_panel);
    case 8: return composite<8>(breakpoints, max_panel);
    case 20: return composite<20>(breakpoints, max_panel);
    default: fail(ErrorCode::invalid_argument, "Gauss-Legendre order must be 4, 8 or 20");
  }
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 const char* what) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, tol, &error, &l1);
  // Judged against the L1 norm so that pieces with cancelling integrands pass.
  const double scale = std::max(std::abs(value), l1);
  if (!(error <= tol * scale) && error > 1e-300) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s: quadrature did not converge (estimated error %.3g)",
                  what, error);
    fail(ErrorCode::convergence, buf);
  }
  return value;
}

}  // namespace phasemoments::quad
