#include "pintw/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "pintw/errors.hpp"

namespace pintw {
namespace {

constexpr double kActiveEps = 1e-11;   // a bound counts as active below this
constexpr double kFeasTol = 1e-9;

// Multiplier estimate for the equality constraints: least squares of the
// gradient against C' over the columns in `free_idx`, then the reduced
// gradient g - C' lambda.
Eigen::VectorXd reduced_gradient_over(const GeneralQP& qp,
                                      std::vector<Eigen::Index> free_idx,
                                      const Eigen::VectorXd& g) {
  const Eigen::Index n = qp.size();
  const Eigen::Index r = qp.C.rows();
  if (r == 0) return g;
  if (free_idx.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) free_idx.push_back(i);
  }

  Eigen::MatrixXd CCt = Eigen::MatrixXd::Zero(r, r);
  Eigen::VectorXd Cg = Eigen::VectorXd::Zero(r);
  for (Eigen::Index i : free_idx) {
    CCt.noalias() += qp.C.col(i) * qp.C.col(i).transpose();
    Cg.noalias() += qp.C.col(i) * g[i];
  }
  CCt.diagonal().array() += 1e-12 * (1.0 + CCt.trace() / static_cast<double>(r));
  Eigen::VectorXd lambda = Eigen::LDLT<Eigen::MatrixXd>(CCt).solve(Cg);
  return g - qp.C.transpose() * lambda;
}

// Multiplier estimate with the free set inferred from x: unbound variables
// plus bounded ones strictly inside their bound.
Eigen::VectorXd reduced_gradient(const GeneralQP& qp, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& g) {
  std::vector<Eigen::Index> free_idx;
  free_idx.reserve(qp.size());
  for (Eigen::Index i = 0; i < qp.size(); ++i) {
    if (!qp.nonneg[i] || x[i] > kActiveEps) free_idx.push_back(i);
  }
  return reduced_gradient_over(qp, std::move(free_idx), g);
}

// Per-variable KKT violation given the reduced gradient.
Eigen::VectorXd kkt_violation(const GeneralQP& qp, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& ghat) {
  Eigen::VectorXd v(qp.size());
  for (Eigen::Index i = 0; i < qp.size(); ++i) {
    if (!qp.nonneg[i] || x[i] > kActiveEps) {
      v[i] = std::abs(ghat[i]);
    } else {
      v[i] = std::max(0.0, -ghat[i]);
    }
  }
  return v;
}

// Equality-constrained QP on the unbound variables: minimize over x_F with
// x_W = 0 and C x = D. Rank-revealing solve so singular reduced Hessians
// (common with Gram blocks) still give a minimizer.
struct EqpResult {
  Eigen::VectorXd x;       // full-length candidate
  Eigen::VectorXd lambda;  // equality multipliers
};

EqpResult solve_eqp(const GeneralQP& qp, const std::vector<Eigen::Index>& free_idx) {
  const auto nf = static_cast<Eigen::Index>(free_idx.size());
  const Eigen::Index r = qp.C.rows();
  if (nf + r == 0) {
    return {Eigen::VectorXd::Zero(qp.size()), Eigen::VectorXd::Zero(0)};
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf + r, nf + r);
  Eigen::VectorXd rhs(nf + r);
  for (Eigen::Index a = 0; a < nf; ++a) {
    for (Eigen::Index b = 0; b < nf; ++b) K(a, b) = qp.Q(free_idx[a], free_idx[b]);
    rhs[a] = -qp.f[free_idx[a]];
    for (Eigen::Index c = 0; c < r; ++c) {
      K(a, nf + c) = qp.C(c, free_idx[a]);
      K(nf + c, a) = qp.C(c, free_idx[a]);
    }
  }
  rhs.tail(r) = qp.D;

  Eigen::VectorXd sol;
  if (nf + r > 300) {
    // Large path: ridge-regularized LDLT, much faster than a dense COD.
    Eigen::MatrixXd Kr = K;
    const double delta = 1e-10 * (1.0 + Kr.topLeftCorner(nf, nf).trace() /
                                            std::max<Eigen::Index>(nf, 1));
    Kr.topLeftCorner(nf, nf).diagonal().array() += delta;
    Kr.bottomRightCorner(r, r).diagonal().array() -= delta;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Kr);
    sol = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !sol.allFinite()) {
      sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(K).solve(rhs);
    }
  } else {
    sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(K).solve(rhs);
  }

  EqpResult out;
  out.x = Eigen::VectorXd::Zero(qp.size());
  for (Eigen::Index a = 0; a < nf; ++a) out.x[free_idx[a]] = sol[a];
  out.lambda = sol.tail(r);
  return out;
}

// Active-set loop. `x0` must satisfy Cx = D and the bounds. The EQP solves
// and multiplier tests run on a ridge-regularized copy of Q: the twin-machine
// duals have flat directions (rank-deficient Gram blocks), and without strict
// convexity the release step can cycle at a degenerate optimum.
DualSolution active_set(const GeneralQP& qp, double tol, Eigen::VectorXd x0,
                        int max_iter) {
  const Eigen::Index n = qp.size();
  GeneralQP qpr = qp;
  const double ridge = 1e-10 * (1.0 + qp.Q.trace() / static_cast<double>(n));
  qpr.Q.diagonal().array() += ridge;
  Eigen::VectorXd x = std::move(x0);
  std::vector<bool> active(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    active[i] = qp.nonneg[i] && x[i] <= kActiveEps;
  }

  DualSolution sol;
  std::vector<bool> banned(n, false);  // anti-cycling at degenerate vertices
  Eigen::Index last_released = -1;
  int resets = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    sol.iterations = iter + 1;
    std::vector<Eigen::Index> free_idx;
    free_idx.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) free_idx.push_back(i);
    }

    EqpResult eqp = solve_eqp(qpr, free_idx);

    // Feasibility of the EQP candidate w.r.t. the bounds of the free set.
    double t = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i : free_idx) {
      if (!qp.nonneg[i]) continue;
      const double step = eqp.x[i] - x[i];
      if (eqp.x[i] < -kActiveEps && step < 0.0) {
        const double ti = x[i] / (x[i] - eqp.x[i]);
        if (ti < t) { t = ti; blocking = i; }
      }
    }

    if (blocking >= 0) {
      if (t < 1e-12 && blocking == last_released) {
        // Degenerate release that immediately re-blocks: fix it again and
        // exclude it from release until genuine progress resets the bans.
        banned[blocking] = true;
      }
      if (t > 1e-10) std::fill(banned.begin(), banned.end(), false);
      x += t * (eqp.x - x);
      x[blocking] = 0.0;
      active[blocking] = true;
      continue;
    }

    if ((eqp.x - x).lpNorm<Eigen::Infinity>() > 1e-10) {
      std::fill(banned.begin(), banned.end(), false);
    }
    x = eqp.x;
    for (Eigen::Index i : free_idx) {
      if (qp.nonneg[i] && x[i] < 0.0) x[i] = 0.0;  // round-off guard
    }

    // Bound multipliers on the working set; release the most negative. The
    // multiplier comes from the least-squares estimate over the working-set
    // free columns: using the working set (not |x|) keeps variables that sit
    // at zero after a release inside the fit, so their rows still pin the
    // multipliers and remaining violations stay visible at degenerate
    // vertices.
    Eigen::VectorXd g = qpr.Q * x + qpr.f;
    Eigen::VectorXd resid = reduced_gradient_over(qpr, free_idx, g);
    // The ridge perturbs stationarity by about ridge*|x|; demanding more
    // than that just cycles at the noise floor.
    const double thr =
        std::max(tol, 10.0 * ridge * (1.0 + x.lpNorm<Eigen::Infinity>()));
    double worst = -thr;
    Eigen::Index release = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i] && !banned[i] && resid[i] < worst) {
        worst = resid[i];
        release = i;
      }
    }
    if (release < 0) {
      // Nothing releasable. If a banned variable still violates strongly,
      // the degeneracy that caused the ban may have moved elsewhere; retry
      // a few times with a clean slate before accepting the point.
      Eigen::Index banned_viol = -1;
      double wb = -10.0 * thr;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active[i] && banned[i] && resid[i] < wb) {
          wb = resid[i];
          banned_viol = i;
        }
      }
      if (banned_viol >= 0 && resets < 5) {
        ++resets;
        std::fill(banned.begin(), banned.end(), false);
        active[banned_viol] = false;
        last_released = banned_viol;
        continue;
      }
      sol.converged = banned_viol < 0;
      break;
    }
    active[release] = false;
    last_released = release;
  }

  sol.x = x;
  sol.objective = qp.objective(x);
  KktReport rep = kkt_report(qp, x);
  sol.kkt_residual = std::max({rep.equality_residual, rep.stationarity,
                               std::max(0.0, -rep.min_x)});
  return sol;
}

// Phase 1: minimize ||Cx - D||^2 under the bounds; x = 0 is always feasible.
Eigen::VectorXd phase1(const GeneralQP& qp) {
  GeneralQP ls;
  ls.Q = 2.0 * qp.C.transpose() * qp.C;
  ls.f = -2.0 * qp.C.transpose() * qp.D;
  ls.C = Eigen::MatrixXd::Zero(0, qp.size());
  ls.D = Eigen::VectorXd::Zero(0);
  ls.nonneg = qp.nonneg;
  DualSolution s = active_set(ls, 1e-10, Eigen::VectorXd::Zero(qp.size()),
                              static_cast<int>(20 * qp.size() + 100));
  if ((qp.C * s.x - qp.D).lpNorm<Eigen::Infinity>() > 1e-7) {
    throw SolverError("QP infeasible: phase-1 residual " +
                      std::to_string((qp.C * s.x - qp.D).lpNorm<Eigen::Infinity>()));
  }
  return s.x;
}

}  // namespace

KktReport kkt_report(const GeneralQP& qp, const Eigen::VectorXd& x) {
  KktReport rep;
  rep.equality_residual =
      qp.C.rows() == 0 ? 0.0 : (qp.C * x - qp.D).lpNorm<Eigen::Infinity>();
  rep.min_x = 0.0;
  bool any_bounded = false;
  for (Eigen::Index i = 0; i < qp.size(); ++i) {
    if (qp.nonneg[i]) {
      rep.min_x = any_bounded ? std::min(rep.min_x, x[i]) : x[i];
      any_bounded = true;
    }
  }
  Eigen::VectorXd g = qp.Q * x + qp.f;
  Eigen::VectorXd ghat = reduced_gradient(qp, x, g);
  rep.stationarity = kkt_violation(qp, x, ghat).lpNorm<Eigen::Infinity>();
  double cs = 0.0;
  for (Eigen::Index i = 0; i < qp.size(); ++i) {
    if (qp.nonneg[i]) cs = std::max(cs, x[i] * std::max(0.0, ghat[i]));
  }
  rep.complementary_slackness = cs;
  return rep;
}

Eigen::VectorXd initial_feasible_point(const GeneralQP& qp) {
  if (!qp.layout) return phase1(qp);
  const PinBlockLayout& lay = *qp.layout;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(qp.size());
  const double a4 = lay.c * lay.tau;
  x.segment(lay.offset(3), lay.m2).setConstant(a4);
  x.segment(lay.offset(0), lay.m1)
      .setConstant(static_cast<double>(lay.m2) * a4 / static_cast<double>(lay.m1));
  return x;
}

DualSolution solve_dense_oracle(const GeneralQP& qp, double tol,
                                std::optional<Eigen::VectorXd> x0) {
  Eigen::VectorXd start;
  if (x0) {
    start = std::move(*x0);
  } else if (qp.layout) {
    start = initial_feasible_point(qp);
  } else if (qp.C.rows() == 0) {
    start = Eigen::VectorXd::Zero(qp.size());
  } else {
    start = phase1(qp);
  }
  return active_set(qp, tol, std::move(start),
                    static_cast<int>(30 * qp.size() + 200));
}

DualSolution solve_decomposition(const GeneralQP& qp, const SolverConfig& cfg) {
  const Eigen::Index n = qp.size();
  if (n < cfg.oracle_threshold) return solve_dense_oracle(qp, cfg.tol);

  Eigen::VectorXd x = initial_feasible_point(qp);
  Eigen::VectorXd g = qp.Q * x + qp.f;
  double obj = qp.objective(x);

  DualSolution sol;
  const int ws = std::max(3, cfg.working_set_size);
  int stall = 0;
  int nblocks = qp.layout ? 4 : 1;

  auto polish_with_oracle = [&](double kappa) {
    if (cfg.verbose) {
      std::fprintf(stderr, "decomp stall at kkt=%.3e; oracle polish\n", kappa);
    }
    DualSolution polish =
        active_set(qp, cfg.tol, x, static_cast<int>(30 * n + 200));
    polish.iterations += sol.iterations;
    return polish;
  };

  // Tiny working sets can keep finding descent directions yet shrink the
  // violation only arithmetically (chains of coupled variables move one
  // link per sweep). Demand geometric progress between checkpoints and
  // otherwise fall back to the warm-started oracle.
  const int check_every = std::max(200, static_cast<int>(n));
  double checkpoint_kappa = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    sol.iterations = iter + 1;
    Eigen::VectorXd ghat = reduced_gradient(qp, x, g);
    Eigen::VectorXd viol = kkt_violation(qp, x, ghat);
    const double kappa = viol.lpNorm<Eigen::Infinity>();
    if (kappa <= cfg.tol) {
      sol.converged = true;
      break;
    }
    if (iter > 0 && iter % check_every == 0) {
      if (kappa > 0.25 * checkpoint_kappa) return polish_with_oracle(kappa);
      checkpoint_kappa = kappa;
    }

    // Violation order, ties to the lowest index.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return viol[a] > viol[b]; });

    std::vector<Eigen::Index> S;
    S.reserve(ws + 8);
    auto add = [&S](Eigen::Index i) {
      if (std::find(S.begin(), S.end(), i) == S.end()) S.push_back(i);
    };
    // Block coverage: a bound variable can only move when every equality row
    // it touches has a movable partner, so seed with each block's top
    // violator plus each block's most movable variable (free sign or largest
    // magnitude). Then fill with the global top violators.
    if (qp.layout && nblocks > 1) {
      for (int blk = 0; blk < nblocks; ++blk) {
        const Eigen::Index off = qp.layout->offset(blk);
        const Eigen::Index sz = qp.layout->size(blk);
        // Within a block all constraint columns are identical, so the
        // (max ghat, min ghat) pair is always a feasible direction provided
        // the decreasing end can move down. Track both, plus the block's top
        // violator and its most movable variable for cross-block directions.
        Eigen::Index top = off, movable = off, up = -1, down = -1;
        for (Eigen::Index i = off; i < off + sz; ++i) {
          if (viol[i] > viol[top]) top = i;
          if (std::abs(x[i]) > std::abs(x[movable])) movable = i;
          if (up < 0 || ghat[i] < ghat[up]) up = i;  // wants to grow
          const bool can_shrink = !qp.nonneg[i] || x[i] > kActiveEps;
          if (can_shrink && (down < 0 || ghat[i] > ghat[down])) down = i;
        }
        add(top);
        add(movable);
        add(up);
        if (down >= 0) add(down);
      }
    }
    for (Eigen::Index i : order) {
      if (static_cast<int>(S.size()) >= std::max<int>(ws, static_cast<int>(S.size()))
          && static_cast<int>(S.size()) >= ws) {
        break;
      }
      add(i);
    }

    // Exact subproblem on S; grow the set when it cannot move (the working
    // columns of C may span no feasible direction).
    double improvement = 0.0;
    std::size_t grow_cursor = 0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      const auto k = static_cast<Eigen::Index>(S.size());
      GeneralQP sub;
      sub.Q.resize(k, k);
      sub.f.resize(k);
      sub.nonneg.resize(k);
      Eigen::VectorXd xs(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        xs[a] = x[S[a]];
        sub.nonneg[a] = qp.nonneg[S[a]];
        for (Eigen::Index b = 0; b < k; ++b) sub.Q(a, b) = qp.Q(S[a], S[b]);
      }
      // f_sub = f_S + Q_{S,~S} x_~S = g_S - Q_SS x_S.
      for (Eigen::Index a = 0; a < k; ++a) sub.f[a] = g[S[a]];
      sub.f -= sub.Q * xs;
      sub.C.resize(qp.C.rows(), k);
      for (Eigen::Index a = 0; a < k; ++a) sub.C.col(a) = qp.C.col(S[a]);
      sub.D = sub.C * xs;

      DualSolution subsol = active_set(sub, 0.1 * cfg.tol, xs,
                                       static_cast<int>(10 * k + 50));
      Eigen::VectorXd delta = subsol.x - xs;
      improvement = -(delta.dot(sub.f + sub.Q * xs) + 0.5 * delta.dot(sub.Q * delta));
      if (improvement > 1e-14 * (1.0 + std::abs(obj))) {
        for (Eigen::Index a = 0; a < k; ++a) {
          g += qp.Q.col(S[a]) * delta[a];
          x[S[a]] = subsol.x[a];
        }
        obj -= improvement;
        break;
      }
      // No progress: extend with the next violators and interior points.
      bool grew = false;
      const Eigen::Index cap = std::min<Eigen::Index>(n, k + 4);
      while (grow_cursor < order.size() &&
             static_cast<Eigen::Index>(S.size()) < cap) {
        Eigen::Index cand = order[grow_cursor++];
        if (std::find(S.begin(), S.end(), cand) == S.end()) {
          S.push_back(cand);
          grew = true;
        }
      }
      if (!grew) break;
    }

    if (improvement <= 1e-14 * (1.0 + std::abs(obj))) {
      // The greedy working sets have stopped finding descent directions
      // (the remaining violation is spread across variables the selection
      // keeps missing). Polish from the current near-optimal point with
      // the active-set oracle; warm-started it needs only a few steps.
      if (++stall > 32) return polish_with_oracle(kappa);
    } else {
      stall = 0;
    }

    if (cfg.verbose && iter % 100 == 0) {
      std::fprintf(stderr, "decomp iter=%d obj=%.10g kkt=%.3e\n", iter, obj, kappa);
    }
  }

  sol.x = x;
  sol.objective = qp.objective(x);
  KktReport rep = kkt_report(qp, x);
  sol.kkt_residual = std::max({rep.equality_residual, rep.stationarity,
                               std::max(0.0, -rep.min_x)});
  if (rep.equality_residual > kFeasTol) sol.converged = false;
  return sol;
}

}  // namespace pintw
