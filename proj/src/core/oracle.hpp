#ifndef SPHEREPROX_ORACLE_HPP
#define SPHEREPROX_ORACLE_HPP

#include <functional>
#include <vector>

#include "core/convex_function.hpp"
#include "core/geometry.hpp"

namespace sphereprox {

// Grid oracles for 3d ambient space: quasi-uniform golden-angle spiral over
// the cap, with an exact-line-search polish. These are the independent
// reference implementations everything cleverer is tested against; they are
// also the fallback when no closed form is certified.

inline constexpr double kMinOracleResolution = 1e-4;
inline constexpr double kMaxOracleResolution = 1e-1;

// Number of spiral nodes covering the cap at (approximate) node spacing
// `resolution` radians.
long cap_node_count(const AdmissibleSpace& space, double resolution);

// Streams the spiral nodes to visit() without materializing them.
void for_each_cap_node(const AdmissibleSpace& space, double resolution,
                       const std::function<void(const Point&)>& visit);

// Materialized grid; refuses resolutions that would need more than ~3e6
// nodes (use the streaming form there).
std::vector<Point> cap_grid(const AdmissibleSpace& space, double resolution);

// Local minimization of an extended-real objective over the space, started
// at `start`: repeated exact line searches (coarse scan + golden section)
// along a slowly rotating orthonormal tangent frame, plus a pattern move
// along the direction the last sweep actually travelled. Search windows grow
// while the minimizer keeps landing at the window edge and the step is
// halved after two consecutive stalled sweeps, until it drops below
// step_min. The pattern move is what keeps this effective in the narrow
// valleys of max-type objectives, where axis sweeps alone zigzag. Works in
// any ambient dimension.
//
// When `retract` is given, every trial point is passed through it before
// evaluation and the iterate stays in its image. Used to slide along
// indicator-ball boundaries by retracting onto the feasible set; without it
// a constrained minimum on a ball boundary only admits descent directions in
// a cone that narrows linearly as the iterate approaches, and progress
// stalls.
Point line_search_refine(const std::function<double(const Point&)>& objective,
                         const AdmissibleSpace& space, Point start,
                         double step0, double step_min,
                         const std::function<Point(const Point&)>& retract = {});

// Grid scan plus polish. Resolution must lie in [1e-4, 1e-1]; ambient
// dimension must be 3.
Point brute_force_minimizer(const ConvexFunction& f,
                            const AdmissibleSpace& space, double resolution);

// All grid nodes within value_tol of the grid minimum, clustered, polished,
// and deduplicated. Singleton minimizers come back as one point; set-valued
// minimizers (indicator balls) come back as a spread of representatives at
// roughly grid spacing.
std::vector<Point> brute_force_argmin_set(const ConvexFunction& f,
                                          const AdmissibleSpace& space,
                                          double resolution,
                                          double value_tol = 1e-8);

}  // namespace sphereprox

#endif
