#include "core/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core/errors.hpp"
#include "core/scalar_min.hpp"

namespace sphereprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = kPi / 2.0;

void require_valid_query(const ConvexFunction& f, const AdmissibleSpace& space,
                         const Point& x, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInputError("resolvent weight lambda must be positive and finite");
  }
  if (!f.space().pole().same_coords(space.pole()) ||
      f.space().radius() != space.radius()) {
    throw InvalidInputError("query space differs from the function's space");
  }
  if (!space.contains(x)) {
    throw InvalidInputError("resolvent query point lies outside the space");
  }
}

// The catalog flattened to what the solver dispatches on: weighted smooth
// anchors, at most one multi-anchor max group, constraint balls.
struct Flattened {
  std::vector<Point> anchors;
  std::vector<double> weights;
  std::vector<Point> max_group;
  std::vector<Ball> balls;
};

void flatten_into(const ConvexFunction& f, Flattened& out, int& max_groups) {
  switch (f.kind()) {
    case FunctionKind::neg_cos_distance:
    case FunctionKind::weighted_neg_cos:
      for (size_t i = 0; i < f.anchors().size(); ++i) {
        out.anchors.push_back(f.anchors()[i]);
        out.weights.push_back(f.weights()[i]);
      }
      break;
    case FunctionKind::max_neg_cos:
      if (f.anchors().size() == 1) {
        // A one-term max is smooth.
        out.anchors.push_back(f.anchors().front());
        out.weights.push_back(1.0);
      } else {
        ++max_groups;
        out.max_group = f.anchors();
      }
      break;
    case FunctionKind::indicator_ball:
      out.balls.push_back(f.constraint_balls().front());
      break;
    case FunctionKind::sum:
      for (const ConvexFunction& a : f.addends()) {
        flatten_into(a, out, max_groups);
      }
      break;
  }
}

Flattened flatten(const ConvexFunction& f) {
  Flattened out;
  int max_groups = 0;
  flatten_into(f, out, max_groups);
  if (max_groups > 1) {
    throw NotImplementedError(
        "sums with more than one multi-anchor max addend are not supported");
  }
  return out;
}

// Negative gradient of w (1 - cos d(y, a)), a tangent vector at y of norm
// w sin d pointing toward the anchor.
Vec anchor_pull(const Point& y, const Point& a, double w) {
  const Vec u = log_map(y, a);
  const double d = u.norm();
  const double ratio = d > 1e-8 ? std::sin(d) / d : 1.0;
  return (w * ratio) * u;
}

// Smooth model: sum_i w_i (1 - cos d(y, a_i)) + inv_lambda tan sin d(y, x).
struct SmoothObjective {
  std::vector<Point> anchors;
  std::vector<double> weights;
  Point x;
  double inv_lambda;

  double value(const Point& y) const {
    double v = inv_lambda * tan_sin_penalty(distance(y, x));
    for (size_t i = 0; i < anchors.size(); ++i) {
      v += weights[i] * (1.0 - cos_distance(y, anchors[i]));
    }
    return v;
  }

  Vec neg_gradient(const Point& y) const {
    Vec g = Vec::Zero(y.dim());
    for (size_t i = 0; i < anchors.size(); ++i) {
      g += anchor_pull(y, anchors[i], weights[i]);
    }
    const Vec u = log_map(y, x);
    const double d = u.norm();
    // tan sin derivative over distance tends to 2 at zero separation.
    const double slope = d > 1e-8 ? tan_sin_penalty_derivative(d) / d : 2.0;
    g += (inv_lambda * slope) * u;
    return g;
  }
};

// Outward unit normal of a ball boundary at y (pointing away from the
// center). Only meaningful when y is near the boundary, so d > 0.
Vec outward_normal(const Point& y, const Ball& b) {
  const Vec u = log_map(y, b.center);
  return -u / u.norm();
}

// Orthonormal basis of the orthogonal complement of the given vectors.
Eigen::MatrixXd complement_frame(const std::vector<Vec>& spanned, int dim) {
  Eigen::MatrixXd m(dim, static_cast<int>(spanned.size()));
  for (size_t c = 0; c < spanned.size(); ++c) m.col(static_cast<int>(c)) = spanned[c];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  const int rank = static_cast<int>(qr.rank());
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(dim - rank);
}

// Pins q onto every boundary in `active` (and back into the space) by
// cyclic exact projections.
Point retract_onto_boundaries(const AdmissibleSpace& space, Point q,
                              const std::vector<Ball>& active) {
  q = space.project(q);
  for (int round = 0; round < 60; ++round) {
    bool moved = false;
    for (const Ball& b : active) {
      if (std::abs(distance(b.center, q) - b.radius) > 1e-15) {
        q = point_toward(b.center, q, b.radius);
        moved = true;
      }
    }
    if (!moved) break;
  }
  return q;
}

// min over convex weights theta on gs and nonnegative mu on normals of
// |sum theta_j gs_j - sum mu_i normals_i|. Exact via enumeration of the
// support sets; the optimal support always shows up as one of them.
double stationarity_residual(const std::vector<Vec>& gs,
                             const std::vector<Vec>& normals) {
  const int m = static_cast<int>(gs.size());
  const int k = static_cast<int>(normals.size());
  if (m < 1) throw InvalidInputError("need at least one subgradient");
  if (m > 8 || k > 8) {
    throw NotImplementedError(
        "stationarity residual supports at most 8 subgradients and 8 normals");
  }
  const int n = static_cast<int>(gs.front().size());
  double best = kInf;
  for (unsigned sg = 1; sg < (1u << m); ++sg) {
    std::vector<int> ti;
    for (int j = 0; j < m; ++j) {
      if (sg & (1u << j)) ti.push_back(j);
    }
    for (unsigned sn = 0; sn < (1u << k); ++sn) {
      std::vector<int> mi;
      for (int i = 0; i < k; ++i) {
        if (sn & (1u << i)) mi.push_back(i);
      }
      const int p = static_cast<int>(ti.size() + mi.size());
      Eigen::MatrixXd cols(n, p);
      for (size_t j = 0; j < ti.size(); ++j) cols.col(static_cast<int>(j)) = gs[ti[j]];
      for (size_t i = 0; i < mi.size(); ++i) {
        cols.col(static_cast<int>(ti.size() + i)) = -normals[mi[i]];
      }
      // Minimize |cols z|^2 subject to the theta block summing to one.
      Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
      c.head(static_cast<int>(ti.size())).setOnes();
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(p + 1, p + 1);
      kkt.topLeftCorner(p, p) = 2.0 * cols.transpose() * cols;
      kkt.topRightCorner(p, 1) = c;
      kkt.bottomLeftCorner(1, p) = c.transpose();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
      rhs(p) = 1.0;
      const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
      if ((kkt * sol - rhs).norm() > 1e-8) continue;
      const Eigen::VectorXd z = sol.head(p);
      if ((z.array() < -1e-12).any()) continue;
      best = std::min(best, (cols * z).norm());
    }
  }
  return best;
}

struct SolveOutcome {
  Point y;
  int iterations;
};

// Projected gradient descent with Armijo backtracking, then an active-set
// Newton polish on the analytic gradient. The descent phase alone stalls
// around 1e-8 stationarity (value comparisons saturate in doubles), so the
// Newton phase on the gradient carries the last decades.
SolveOutcome smooth_solve(const SmoothObjective& obj,
                          const AdmissibleSpace& space,
                          const std::vector<Ball>& balls, const Point& start) {
  auto feasible = project_to_balls(space, start, balls);
  if (!feasible) {
    throw DomainError("constrained solve found no feasible start");
  }
  Point y = *feasible;
  double v = obj.value(y);
  int iters = 0;

  std::vector<Ball> bounds = balls;
  bounds.push_back(Ball{space.pole(), space.radius()});

  const auto cone_project = [&](Vec g, const Point& at) {
    for (const Ball& b : bounds) {
      if (distance(b.center, at) >= b.radius - 1e-9) {
        const Vec nu = outward_normal(at, b);
        const double c = g.dot(nu);
        if (c > 0.0) g -= c * nu;
      }
    }
    return g;
  };

  // Phase one: Armijo descent along the cone-projected gradient. Stops at a
  // small projected gradient, or once value comparisons stop resolving:
  // near an active ball boundary the reprojection tolerance (~1e-13) puts
  // noise of that size into every candidate value, so demanding further
  // value decrease just dithers. The Newton phase below works on the
  // gradient and is immune to that noise.
  double alpha = 1.0;
  int stagnant = 0;
  while (true) {
    if (iters >= 10000) {
      const Vec& c = y.coords();
      throw ConvergenceFailureError(
          "projected descent exhausted its iteration budget",
          std::vector<double>(c.data(), c.data() + c.size()));
    }
    const Vec gp = cone_project(obj.neg_gradient(y), y);
    const double gn = gp.norm();
    if (gn <= 1e-7) break;
    ++iters;
    const Vec dir = gp / gn;
    const double v_before = v;
    bool stepped = false;
    while (alpha * gn > 1e-18) {
      const double len = std::min(alpha * gn, 0.5);
      auto cand = project_to_balls(space, exp_map(y, len * dir), balls);
      if (cand) {
        const double vc = obj.value(*cand);
        if (vc <= v - 1e-4 * len * gn) {
          y = *cand;
          v = vc;
          alpha = std::min(alpha * 2.0, 1e6);
          stepped = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!stepped) break;
    if (v_before - v <= 1e-15 * (1.0 + std::abs(v))) {
      if (++stagnant >= 8) break;
    } else {
      stagnant = 0;
    }
  }

  // Phase two: Newton on the gradient, restricted to the intersection of
  // the boundaries currently active, with multiplier-sign validation.
  std::vector<char> excluded(bounds.size(), 0);
  for (int round = 0; round < 6; ++round) {
    std::vector<Ball> active;
    std::vector<size_t> active_idx;
    for (size_t i = 0; i < bounds.size(); ++i) {
      if (!excluded[i] &&
          distance(bounds[i].center, y) >= bounds[i].radius - 1e-6) {
        active.push_back(bounds[i]);
        active_idx.push_back(i);
      }
    }

    // Gradient with the blocked directions of the evaluation point itself
    // removed. The finite differences below must express this in one fixed
    // frame; projecting at the evaluation point first keeps the large
    // blocked component from leaking into the differences as the normals
    // rotate (otherwise it swamps the Jacobian and Newton crawls).
    const auto tangential_grad = [&](const Point& at) {
      std::vector<Vec> span;
      span.push_back(at.coords());
      for (const Ball& b : active) span.push_back(outward_normal(at, b));
      const Eigen::MatrixXd fr = complement_frame(span, space.ambient_dim());
      return Vec(fr * (fr.transpose() * obj.neg_gradient(at)));
    };
    const auto tangential_residual = [&](const Point& at) {
      return tangential_grad(at).norm();
    };

    double res = tangential_residual(y);
    int bad = 0;
    for (int it = 0; it < 40 && res > 5e-13; ++it) {
      ++iters;
      std::vector<Vec> span;
      span.push_back(y.coords());
      for (const Ball& b : active) span.push_back(outward_normal(y, b));
      const Eigen::MatrixXd frame =
          complement_frame(span, space.ambient_dim());
      const int kdim = static_cast<int>(frame.cols());
      if (kdim == 0) break;
      const auto coords_at = [&](const Eigen::VectorXd& xi) {
        const Point q = retract_onto_boundaries(
            space, exp_map(y, frame * xi), active);
        return Eigen::VectorXd(frame.transpose() * tangential_grad(q));
      };
      const Eigen::VectorXd g0 = frame.transpose() * obj.neg_gradient(y);
      Eigen::MatrixXd jac(kdim, kdim);
      const double h = 1e-6;
      for (int j = 0; j < kdim; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(kdim);
        e(j) = h;
        jac.col(j) = (coords_at(e) - coords_at(-e)) / (2.0 * h);
      }
      Eigen::VectorXd step = -jac.fullPivLu().solve(g0);
      if (!step.allFinite()) break;
      const double cap = 0.05;
      if (step.norm() > cap) step *= cap / step.norm();
      bool accepted = false;
      for (int halving = 0; halving < 12; ++halving) {
        const Point trial =
            retract_onto_boundaries(space, exp_map(y, frame * step), active);
        const double tres = tangential_residual(trial);
        if (tres < res) {
          y = trial;
          res = tres;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted && ++bad >= 2) break;
    }

    if (active.empty()) break;
    // Multiplier signs: a boundary whose multiplier is negative is not
    // actually blocking; release it and re-polish.
    const Vec g = obj.neg_gradient(y);
    Eigen::MatrixXd nmat(space.ambient_dim(), static_cast<int>(active.size()));
    for (size_t i = 0; i < active.size(); ++i) {
      nmat.col(static_cast<int>(i)) = outward_normal(y, active[i]);
    }
    const Eigen::VectorXd mu =
        (nmat.transpose() * nmat).fullPivLu().solve(nmat.transpose() * g);
    int dropped = -1;
    double worst = -1e-10;
    for (size_t i = 0; i < active.size(); ++i) {
      if (mu(static_cast<int>(i)) < worst) {
        worst = mu(static_cast<int>(i));
        dropped = static_cast<int>(active_idx[i]);
      }
    }
    if (dropped < 0) break;
    excluded[static_cast<size_t>(dropped)] = 1;
  }

  return SolveOutcome{y, iters};
}

// Full objective including the max group and ball feasibility.
double total_value(const Flattened& flat, const SmoothObjective& base,
                   const Point& y) {
  for (const Ball& b : flat.balls) {
    if (distance(b.center, y) > b.radius + 1e-12) return kInf;
  }
  double v = base.value(y);
  if (!flat.max_group.empty()) {
    double mx = -kInf;
    for (const Point& a : flat.max_group) {
      mx = std::max(mx, 1.0 - cos_distance(y, a));
    }
    v += mx;
  }
  return v;
}

// Minimization with a multi-anchor max term, ambient dimension 3: the
// minimizer either sees a unique active term (so it solves one of the
// smoothed models), or sits where two terms tie (a great circle), or where
// three tie (isolated points). Enumerate them all, keep the best.
SolveOutcome max_solve(const Flattened& flat, const AdmissibleSpace& space,
                       const Point& x, double inv_lambda) {
  if (space.ambient_dim() != 3) {
    throw NotImplementedError(
        "max-type objectives are solved in ambient dimension 3 only");
  }
  const auto& group = flat.max_group;
  const SmoothObjective base{flat.anchors, flat.weights, x, inv_lambda};
  int iters = 0;
  std::vector<Point> cands;

  auto start = project_to_balls(space, x, flat.balls);
  if (!start) throw DomainError("constrained solve found no feasible start");
  cands.push_back(*start);

  // Smoothed models: the max replaced by each single term. A term whose
  // solve runs out of budget still contributes its best iterate; another
  // candidate family usually wins anyway.
  for (const Point& a : group) {
    SmoothObjective m = base;
    m.anchors.push_back(a);
    m.weights.push_back(1.0);
    try {
      const SolveOutcome out = smooth_solve(m, space, flat.balls, *start);
      iters += out.iterations;
      cands.push_back(out.y);
    } catch (const ConvergenceFailureError& err) {
      Vec c = Eigen::Map<const Vec>(err.best_iterate.data(),
                                    static_cast<long>(err.best_iterate.size()));
      cands.push_back(Point::from_unnormalized(std::move(c)));
    }
  }

  // Constraints seen by the tie circles: the space ball plus every
  // constraint ball, each an arc of the circle.
  std::vector<Ball> bounds = flat.balls;
  bounds.push_back(Ball{space.pole(), space.radius()});

  for (size_t i = 0; i < group.size(); ++i) {
    for (size_t j = i + 1; j < group.size(); ++j) {
      Vec nv = group[i].coords() - group[j].coords();
      if (nv.norm() < 1e-12) continue;
      const Eigen::MatrixXd uw = complement_frame({Vec(nv.normalized())}, 3);
      const Vec u = uw.col(0);
      const Vec w = uw.col(1);
      const auto at = [&](double th) {
        return Point::from_unnormalized(std::cos(th) * u + std::sin(th) * w);
      };

      // Feasible angles: cos of the angle to each ball center stays above
      // cos(radius); each constraint is an arc.
      struct ArcBound {
        double psi;
        double delta;
      };
      std::vector<ArcBound> arcs;
      bool impossible = false;
      for (const Ball& b : bounds) {
        const double a_dot = u.dot(b.center.coords());
        const double b_dot = w.dot(b.center.coords());
        const double mh = std::hypot(a_dot, b_dot);
        const double need = std::cos(b.radius);
        if (mh < need) {
          impossible = true;
          break;
        }
        arcs.push_back(ArcBound{std::atan2(b_dot, a_dot),
                                std::acos(std::clamp(need / mh, -1.0, 1.0))});
      }
      if (impossible) continue;
      const auto in_all_arcs = [&](double th) {
        for (const ArcBound& a : arcs) {
          if (std::abs(std::remainder(th - a.psi, 2.0 * kPi)) >
              a.delta + 1e-12) {
            return false;
          }
        }
        return true;
      };
      std::vector<double> ends;
      for (const ArcBound& a : arcs) {
        ends.push_back(std::remainder(a.psi - a.delta, 2.0 * kPi));
        ends.push_back(std::remainder(a.psi + a.delta, 2.0 * kPi));
      }
      std::sort(ends.begin(), ends.end());

      const auto section = [&](double th) {
        return total_value(flat, base, at(th));
      };
      // Restriction derivative, using the gradient of whichever term is
      // active; at a tie of the parametrized pair both give the same
      // tangential derivative along the circle.
      const auto section_slope = [&](double th) {
        const Point q = at(th);
        size_t act = 0;
        double mx = -kInf;
        for (size_t t = 0; t < group.size(); ++t) {
          const double val = 1.0 - cos_distance(q, group[t]);
          if (val > mx) {
            mx = val;
            act = t;
          }
        }
        const Vec g = base.neg_gradient(q) + anchor_pull(q, group[act], 1.0);
        const Vec tang = -std::sin(th) * u + std::cos(th) * w;
        return -g.dot(tang);
      };
      const auto polish = [&](double th, double lo, double hi) {
        double a = std::max(lo, th - 1e-7);
        double b = std::min(hi, th + 1e-7);
        for (int grow = 0; grow < 40 && !(section_slope(a) < 0.0 &&
                                          section_slope(b) > 0.0);
             ++grow) {
          const double half = (b - a) * 2.0;
          a = std::max(lo, th - half);
          b = std::min(hi, th + half);
          if (a == lo && b == hi) break;
        }
        if (!(section_slope(a) < 0.0 && section_slope(b) > 0.0)) return th;
        while (b - a > 1e-15) {
          const double mid = 0.5 * (a + b);
          (section_slope(mid) < 0.0 ? a : b) = mid;
        }
        return 0.5 * (a + b);
      };

      for (size_t e = 0; e < ends.size(); ++e) {
        const double lo = ends[e];
        const double hi =
            e + 1 < ends.size() ? ends[e + 1] : ends.front() + 2.0 * kPi;
        if (hi - lo < 1e-14) continue;
        if (!in_all_arcs(0.5 * (lo + hi))) continue;
        cands.push_back(at(lo));
        cands.push_back(at(hi));
        const int nodes = std::max(17, static_cast<int>((hi - lo) / 0.05) + 2);
        std::vector<double> sv(static_cast<size_t>(nodes));
        const double hstep = (hi - lo) / (nodes - 1);
        for (int t = 0; t < nodes; ++t) {
          sv[static_cast<size_t>(t)] = section(lo + t * hstep);
        }
        for (int t = 1; t + 1 < nodes; ++t) {
          if (sv[static_cast<size_t>(t)] > sv[static_cast<size_t>(t - 1)] ||
              sv[static_cast<size_t>(t)] > sv[static_cast<size_t>(t + 1)]) {
            continue;
          }
          const double bl = lo + (t - 1) * hstep;
          const double bh = lo + (t + 1) * hstep;
          const double th =
              polish(golden_section_min(section, bl, bh, 1e-10), bl, bh);
          cands.push_back(at(th));
        }
      }
    }
  }

  // Triple ties pin isolated points: the common null direction of two
  // difference vectors.
  for (size_t i = 0; i < group.size(); ++i) {
    for (size_t j = i + 1; j < group.size(); ++j) {
      for (size_t k = j + 1; k < group.size(); ++k) {
        Eigen::MatrixXd m(2, 3);
        m.row(0) = (group[i].coords() - group[j].coords()).transpose();
        m.row(1) = (group[j].coords() - group[k].coords()).transpose();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        if (lu.dimensionOfKernel() != 1) continue;
        const Vec kern = lu.kernel().col(0);
        for (const double sgn : {1.0, -1.0}) {
          const Point p = Point::from_unnormalized(sgn * kern);
          if (space.contains(p)) cands.push_back(p);
        }
      }
    }
  }

  const Point* best = nullptr;
  double best_v = kInf;
  for (const Point& c : cands) {
    const double v = total_value(flat, base, c);
    if (v < best_v) {
      best_v = v;
      best = &c;
    }
  }
  if (!best || !std::isfinite(best_v)) {
    throw DomainError("max-type solve found no finite candidate");
  }
  return SolveOutcome{*best, iters};
}

// Stationarity at the reported minimizer: hull of active-term negative
// subgradients against the cone of active boundary normals.
double final_residual(const Flattened& flat, const AdmissibleSpace& space,
                      const Point& x, double inv_lambda, const Point& y) {
  const SmoothObjective base{flat.anchors, flat.weights, x, inv_lambda};
  std::vector<Vec> gs;
  if (flat.max_group.empty()) {
    gs.push_back(base.neg_gradient(y));
  } else {
    double mx = -kInf;
    std::vector<double> vals;
    for (const Point& a : flat.max_group) {
      vals.push_back(1.0 - cos_distance(y, a));
      mx = std::max(mx, vals.back());
    }
    const Vec gb = base.neg_gradient(y);
    for (size_t t = 0; t < flat.max_group.size(); ++t) {
      if (mx - vals[t] <= 1e-9 * (1.0 + mx)) {
        gs.push_back(gb + anchor_pull(y, flat.max_group[t], 1.0));
      }
    }
  }
  std::vector<Vec> normals;
  std::vector<Ball> bounds = flat.balls;
  bounds.push_back(Ball{space.pole(), space.radius()});
  for (const Ball& b : bounds) {
    if (distance(b.center, y) >= b.radius - 1e-9) {
      normals.push_back(outward_normal(y, b));
    }
  }
  return stationarity_residual(gs, normals);
}

ResolventResult assemble(const ConvexFunction& f, const Point& x,
                         double inv_lambda, Point y, double residual,
                         int iters) {
  const double pd = distance(y, x);
  const double obj = f.evaluate(y) + inv_lambda * tan_sin_penalty(pd);
  return ResolventResult{std::move(y), obj, pd, std::cos(pd), residual, iters};
}

}  // namespace

double tan_sin_penalty(double t) {
  if (!(t >= 0.0)) throw InvalidInputError("penalty argument must be nonnegative");
  if (t >= kHalfPi) return kInf;
  return std::tan(t) * std::sin(t);
}

double tan_sin_penalty_derivative(double t) {
  if (!(t >= 0.0)) throw InvalidInputError("penalty argument must be nonnegative");
  if (t >= kHalfPi) return kInf;
  const double sec = 1.0 / std::cos(t);
  return std::sin(t) * (1.0 + sec * sec);
}

ResolventResult resolvent(const ResolventQuery& q) {
  require_valid_query(q.f, q.space, q.x, q.lambda);
  const double inv_lambda = 1.0 / q.lambda;
  const Flattened flat = flatten(q.f);

  SolveOutcome out{q.x, 0};
  if (!flat.max_group.empty()) {
    out = max_solve(flat, q.space, q.x, inv_lambda);
  } else if (flat.anchors.empty() && flat.balls.size() == 1) {
    // A lone indicator: the resolvent is the metric projection, exactly.
    const Ball& b = flat.balls.front();
    out.y = distance(b.center, q.x) <= b.radius
                ? q.x
                : point_toward(b.center, q.x, b.radius);
  } else {
    const SmoothObjective obj{flat.anchors, flat.weights, q.x, inv_lambda};
    out = smooth_solve(obj, q.space, flat.balls, q.x);
  }

  const double residual =
      final_residual(flat, q.space, q.x, inv_lambda, out.y);
  return assemble(q.f, q.x, inv_lambda, std::move(out.y), residual,
                  out.iterations);
}

ResolventResult resolvent_on_geodesic(const ConvexFunction& f, double lambda,
                                      const Point& x, const Point& attractor) {
  if (f.kind() != FunctionKind::neg_cos_distance) {
    throw InvalidInputError("geodesic resolvent needs a single-anchor function");
  }
  if (!f.anchors().front().same_coords(attractor)) {
    throw InvalidInputError("attractor must be the function's anchor");
  }
  require_valid_query(f, f.space(), x, lambda);
  const double inv_lambda = 1.0 / lambda;
  const double big = distance(x, attractor);
  if (big < 1e-15) {
    return assemble(f, x, inv_lambda, x, 0.0, 0);
  }
  const auto g = [&](double t) {
    return 1.0 - std::cos(big - t) + inv_lambda * tan_sin_penalty(t);
  };
  const auto slope = [&](double t) {
    return -std::sin(big - t) + inv_lambda * tan_sin_penalty_derivative(t);
  };
  int iters = 0;
  // Golden section localizes the minimizer to where value comparisons
  // saturate (~1e-8); the derivative bisection carries it to full
  // precision. The slope is negative at 0 and positive at big, and the
  // section is strictly convex, so the root is unique.
  golden_section_min(g, 0.0, big, 1e-12);
  double lo = 0.0;
  double hi = big;
  while (hi - lo > 1e-17 && iters < 300) {
    ++iters;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  Point y = point_toward(x, attractor, t);
  return assemble(f, x, inv_lambda, std::move(y), std::abs(slope(t)), iters);
}

double check_quasi_firm(const ResolventQuery& q, const Point& u) {
  const ResolventResult r = resolvent(q);
  return r.cosine_c * cos_distance(u, r.minimizer) - cos_distance(u, q.x);
}

double check_firm_pair(const ResolventQuery& q1, const ResolventQuery& q2) {
  const bool same_f =
      &q1.f == &q2.f || q1.f.to_json() == q2.f.to_json();
  if (!same_f || !q1.space.pole().same_coords(q2.space.pole()) ||
      q1.space.radius() != q2.space.radius()) {
    throw InvalidInputError("paired queries must share the function and space");
  }
  const ResolventResult r1 = resolvent(q1);
  const ResolventResult r2 = resolvent(q2);
  const double c1 = r1.cosine_c;
  const double c2 = r2.cosine_c;
  const double w1 = q1.lambda * c1 * c1 * (1.0 + c2 * c2);
  const double w2 = q2.lambda * c2 * c2 * (1.0 + c1 * c1);
  const double lhs =
      (w1 * c2 + w2 * c1) * cos_distance(r1.minimizer, r2.minimizer);
  const double rhs = w1 * cos_distance(r1.minimizer, q2.x) +
                     w2 * cos_distance(r2.minimizer, q1.x);
  return lhs - rhs;
}

double check_sq_firm(const ResolventQuery& q, const Point& u) {
  const ResolventResult r = resolvent(q);
  const double c = r.cosine_c;
  const double lhs = kHalfPi * (1.0 / (c * c) + 1.0) *
                     (c * cos_distance(u, r.minimizer) - cos_distance(u, q.x));
  const double rhs = q.lambda * (q.f.evaluate(r.minimizer) - q.f.evaluate(u));
  return lhs - rhs;
}

double verify_local_optimality(const ResolventQuery& q,
                               const ResolventResult& r, Rng& rng,
                               int n_probes) {
  const double inv_lambda = 1.0 / q.lambda;
  const auto total = [&](const Point& p) {
    return q.f.evaluate(p) + inv_lambda * tan_sin_penalty(distance(p, q.x));
  };
  const double at_min = total(r.minimizer);
  double best = at_min;
  for (int i = 0; i < n_probes; ++i) {
    const Vec t = sample_unit_tangent(r.minimizer, rng);
    const Point probe = exp_map(r.minimizer, 1e-4 * t);
    const auto feasible =
        project_to_balls(q.space, probe, q.f.constraint_balls());
    if (feasible) best = std::min(best, total(*feasible));
  }
  if (q.f.known_minimizer()) {
    best = std::min(best, total(*q.f.known_minimizer()));
  }
  return at_min - best;
}

}  // namespace sphereprox
