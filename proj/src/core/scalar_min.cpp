#include "core/scalar_min.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace sphereprox {

double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  if (!(a <= b)) throw InvalidInputError("golden section needs a <= b");
  const double inv_phi = 0.6180339887498948482;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  double best_x = f1 <= f2 ? x1 : x2;
  double best_f = std::min(f1, f2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    if (f1 < best_f) {
      best_f = f1;
      best_x = x1;
    }
    if (f2 < best_f) {
      best_f = f2;
      best_x = x2;
    }
  }
  return best_x;
}

double scan_then_golden(const std::function<double(double)>& f, double a,
                        double b, int n_nodes, double tol) {
  if (n_nodes < 3) throw InvalidInputError("scan needs at least 3 nodes");
  if (b - a <= tol) return 0.5 * (a + b);
  int best = 0;
  double best_f = f(a);
  const double h = (b - a) / (n_nodes - 1);
  for (int i = 1; i < n_nodes; ++i) {
    const double v = f(a + i * h);
    if (v < best_f) {
      best_f = v;
      best = i;
    }
  }
  const double lo = a + std::max(0, best - 1) * h;
  const double hi = a + std::min(n_nodes - 1, best + 1) * h;
  return golden_section_min(f, lo, hi, tol);
}

}  // namespace sphereprox
