#ifndef SPHEREPROX_SCALAR_MIN_HPP
#define SPHEREPROX_SCALAR_MIN_HPP

#include <functional>

namespace sphereprox {

// Golden-section search on [a, b] down to interval width tol. Requires f
// unimodal on [a, b]; convex functions (extended ones included) qualify as
// long as the finite region inside [a, b] is nonempty. Returns the best
// abscissa evaluated, which is within ~tol of the minimizer.
double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol);

// Coarse scan over n_nodes equally spaced points (endpoints included) to
// bracket the minimum, then golden section inside the bracket. The scan
// protects against +inf plateaus at the ends of the interval, which pure
// golden section can mistake for a direction of increase.
double scan_then_golden(const std::function<double(double)>& f, double a,
                        double b, int n_nodes, double tol);

}  // namespace sphereprox

#endif
