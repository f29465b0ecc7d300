#include "plategamma/quadrature.hpp"

#include <cmath>

namespace pg {

Rule1D gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one node");
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton iteration on P_n from the Chebyshev initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      double dp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Recompute derivative at the converged node for the weight.
    p0 = 1.0;
    p1 = 0.0;
    for (int k = 0; k < n; ++k) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
    }
    double dp = n * (x * p0 - p1) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.w[i] = w;
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    r.x[n / 2] = 0.0;  // keep the midpoint exact
  }
  return r;
}

Rule1D gauss_on_interval(int n, double a, double b) {
  Rule1D base = gauss_legendre(n);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = mid + half * base.x[i];
    r.w[i] = half * base.w[i];
  }
  return r;
}

Rule1D composite_gauss(int n, const std::vector<double>& breaks) {
  if (breaks.size() < 2) throw Error("composite_gauss: need an interval");
  Rule1D r;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    if (!(breaks[s] < breaks[s + 1]))
      throw Error("composite_gauss: breaks must be strictly ascending");
    Rule1D piece = gauss_on_interval(n, breaks[s], breaks[s + 1]);
    r.x.insert(r.x.end(), piece.x.begin(), piece.x.end());
    r.w.insert(r.w.end(), piece.w.begin(), piece.w.end());
  }
  return r;
}

}  // namespace pg
