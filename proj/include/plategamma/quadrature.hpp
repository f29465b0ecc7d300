#pragma once

#include <vector>

#include "plategamma/common.hpp"

namespace pg {

// One-dimensional quadrature rule: nodes with matching weights.
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;

  int size() const { return static_cast<int>(x.size()); }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0;
    for (int i = 0; i < size(); ++i) s += w[i] * f(x[i]);
    return s;
  }
};

// Gauss-Legendre rule with n nodes on (-1, 1).  Exact for polynomials of
// degree 2n-1.
Rule1D gauss_legendre(int n);

// Gauss-Legendre rule mapped to (a, b).
Rule1D gauss_on_interval(int n, double a, double b);

// Composite Gauss rule on the thickness interval: n nodes per subinterval
// of the partition given by `breaks` (ascending, first/last are the
// interval ends).  Piecewise-smooth integrands are handled by aligning the
// breaks with material interfaces.
Rule1D composite_gauss(int n, const std::vector<double>& breaks);

// Default thickness rule on (-1/2, 1/2).
inline Rule1D thickness_rule(int n,
                             const std::vector<double>& breaks = {-0.5, 0.5}) {
  return composite_gauss(n, breaks);
}

}  // namespace pg
