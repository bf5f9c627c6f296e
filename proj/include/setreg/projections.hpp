#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "setreg/set_rep.hpp"

namespace setreg {

struct ProjectionResult {
  std::vector<Vec> nearest;  // all global minimizers within the tie tolerance
  double dist = 0.0;
};

inline constexpr double kTieTol = 1e-9;
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kDualTol = 1e-10;

inline Eigen::VectorXd to_eigen(const Vec& v) {
  Eigen::VectorXd e(v.n);
  for (int i = 0; i < v.n; ++i) e(i) = v[i];
  return e;
}

inline Vec from_eigen(const Eigen::VectorXd& e) {
  Vec v(static_cast<int>(e.size()));
  for (int i = 0; i < v.n; ++i) v[i] = e(i);
  return v;
}

// Enumerate all index subsets of {0..m-1} with size <= kmax.
inline void for_each_subset(int m, int kmax,
                            const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx;
  fn(idx);  // empty subset
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(idx.size()) == kmax) return;
    for (int i = start; i < m; ++i) {
      idx.push_back(i);
      fn(idx);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
  }

inline Vec project_affine(const Affine& A, const Vec& x) {
  Vec y = A.base;
  for (const Vec& b : A.basis) y += dot(x - A.base, b) * b;
  return y;
}

inline Vec project_ball(const Ball& B, const Vec& x) {
  Vec d = x - B.center;
  double m = norm(d);
  if (m <= B.radius) return x;
  return B.center + (B.radius / m) * d;
}

// Exact projection onto a polyhedron by enumerating candidate active row
// subsets (size <= ambient dimension suffices: any optimal multiplier vector
// can be supported on linearly independent rows). A candidate is kept when
// its equality-constrained minimizer is primal feasible for every row and its
// multipliers are dual feasible (>= -1e-10). `skipped` counts numerically
// singular subsets, which are dropped.
inline Vec project_polyhedron_exact(const Polyhedron& P, const Vec& x,
                                    int* skipped = nullptr) {
  const int n = x.n;
  const int m = static_cast<int>(P.rows.size());
  double best = std::numeric_limits<double>::infinity();
  std::optional<Vec> best_y;
  if (skipped) *skipped = 0;

  Eigen::VectorXd ex = to_eigen(x);
  for_each_subset(m, std::min(n, m), [&](const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    Eigen::VectorXd y;
    Eigen::VectorXd lam;
    if (k == 0) {
      y = ex;
    } else {
      Eigen::MatrixXd N(k, n);
      Eigen::VectorXd o(k);
      for (int r = 0; r < k; ++r) {
        N.row(r) = to_eigen(P.rows[idx[r]].normal).transpose();
        o(r) = P.rows[idx[r]].offset;
      }
      Eigen::MatrixXd G = N * N.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
      lu.setThreshold(1e-12);
      if (lu.rank() < k) {
        if (skipped) ++*skipped;
        return;
      }
      lam = lu.solve(N * ex - o);
      for (int r = 0; r < k; ++r)
        if (lam(r) < -kDualTol) return;  // inactive in the optimum
      y = ex - N.transpose() * lam;
    }
    Vec yv = from_eigen(y);
    if (!polyhedron_feasible(P.rows, yv, kFeasTol)) return;
    double d = dist(yv, x);
    if (d < best) {
      best = d;
      best_y = yv;
    }
  });

  if (!best_y)
    throw EmptyIntersection("project_polyhedron_exact: no feasible candidate");
  return *best_y;
}

// Projection onto conv(vertices): enumerate faces as vertex subsets, project
// onto each affine hull, keep candidates whose barycentric coordinates are
// nonnegative (they lie inside the polytope), take the closest.
inline Vec project_polytope(const Polytope& T, const Vec& x) {
  const int n = x.n;
  const int m = static_cast<int>(T.vertices.size());
  double best = std::numeric_limits<double>::infinity();
  Vec best_y = T.vertices.front();

  for (int v0 = 0; v0 < m; ++v0) {
    double d0 = dist(T.vertices[v0], x);
    if (d0 < best) {
      best = d0;
      best_y = T.vertices[v0];
    }
  }

  std::vector<int> others;
  for (int v0 = 0; v0 < m; ++v0) {
    others.clear();
    for (int i = v0 + 1; i < m; ++i) others.push_back(i);
    const Vec& base = T.vertices[v0];
    Eigen::VectorXd rhs = to_eigen(x - base);
    for_each_subset(static_cast<int>(others.size()), std::min(n, m - 1),
                    [&](const std::vector<int>& idx) {
                      const int k = static_cast<int>(idx.size());
                      if (k == 0) return;
                      Eigen::MatrixXd M(n, k);
                      for (int c = 0; c < k; ++c)
                        M.col(c) = to_eigen(T.vertices[others[idx[c]]] - base);
                      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
                      qr.setThreshold(1e-12);
                      if (qr.rank() < k) return;  // affinely dependent subset
                      Eigen::VectorXd c = qr.solve(rhs);
                      double csum = c.sum();
                      if (1.0 - csum < -kDualTol) return;
                      for (int i = 0; i < k; ++i)
                        if (c(i) < -kDualTol) return;
                      Eigen::VectorXd y = to_eigen(base) + M * c;
                      Vec yv = from_eigen(y);
                      double d = dist(yv, x);
                      if (d < best) {
                        best = d;
                        best_y = yv;
                      }
                    });
  }
  return best_y;
}

inline Vec project_piece(const ConvexPiece& p, const Vec& x) {
  return std::visit(
      [&](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Affine>) return project_affine(s, x);
        if constexpr (std::is_same_v<T, Polyhedron>)
          return project_polyhedron_exact(s, x);
        if constexpr (std::is_same_v<T, Ball>) return project_ball(s, x);
        if constexpr (std::is_same_v<T, Polytope>) return project_polytope(s, x);
      },
      p);
}

inline ProjectionResult project(const SetRep& S, const Vec& x) {
  if (S.dim() != x.n)
    throw DimensionMismatch("project: set dim " + std::to_string(S.dim()) +
                            " vs point dim " + std::to_string(x.n));
  if (const auto* u = std::get_if<FiniteUnion>(&S.v)) {
    std::vector<Vec> cands;
    double best = std::numeric_limits<double>::infinity();
    for (const ConvexPiece& p : u->pieces) {
      Vec y = project_piece(p, x);
      cands.push_back(y);
      best = std::min(best, dist(y, x));
    }
    ProjectionResult res;
    res.dist = best;
    for (const Vec& y : cands) {
      if (dist(y, x) > best + kTieTol) continue;
      bool dup = false;
      for (const Vec& z : res.nearest)
        if (approx_eq(y, z, 1e-12)) dup = true;
      if (!dup) res.nearest.push_back(y);
    }
    return res;
  }
  Vec y = project_piece(SetRep{S.v}.as_convex_unsafe(), x);
  return ProjectionResult{{y}, dist(y, x)};
}

inline double distance(const SetRep& S, const Vec& x) {
  return project(S, x).dist;
}

inline bool member(const SetRep& S, const Vec& x, double tol = 1e-9) {
  return distance(S, x) <= tol;
}

}  // namespace setreg
