#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "setreg/projections.hpp"

namespace setreg {

struct IntersectOptions {
  int dykstra_cap = 10000;
  double dykstra_residual = 1e-10;
  double empty_tol = 1e-7;  // declared disjoint beyond this gap
  int probe_iters = 4000;
};

namespace detail {

// Polyhedron constructor for internally built row systems: row budget waived,
// nonemptiness still certified by projecting `hint` onto the rows.
inline Polyhedron make_polyhedron_internal(std::vector<Halfspace> rows,
                                           const Vec& hint) {
  Polyhedron P{std::move(rows), hint};
  P.witness = project_polyhedron_exact(P, hint);  // throws when infeasible
  return P;
}

inline std::vector<Halfspace> affine_as_rows(const Affine& A) {
  std::vector<Halfspace> rows;
  for (const Vec& w : orthonormal_complement(A.basis, A.base.n)) {
    double o = dot(w, A.base);
    rows.push_back({w, o});
    rows.push_back({-w, -o});
  }
  return rows;
}

inline std::optional<Affine> intersect_affine_affine(const Affine& A,
                                                     const Affine& B) {
  const int n = A.base.n;
  Eigen::MatrixXd PA = Eigen::MatrixXd::Identity(n, n);
  for (const Vec& u : A.basis) {
    Eigen::VectorXd eu = to_eigen(u);
    PA -= eu * eu.transpose();
  }
  Eigen::MatrixXd PB = Eigen::MatrixXd::Identity(n, n);
  for (const Vec& u : B.basis) {
    Eigen::VectorXd eu = to_eigen(u);
    PB -= eu * eu.transpose();
  }
  Eigen::MatrixXd M(2 * n, n);
  M.topRows(n) = PA;
  M.bottomRows(n) = PB;
  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = PA * to_eigen(A.base);
  rhs.tail(n) = PB * to_eigen(B.base);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU |
                                               Eigen::ComputeFullV);
  svd.setThreshold(1e-10);
  Eigen::VectorXd xp = svd.solve(rhs);
  double scale = 1.0 + norm(A.base) + norm(B.base);
  if ((M * xp - rhs).norm() > 1e-8 * scale) return std::nullopt;

  std::vector<Vec> kernel;
  for (int i = 0; i < svd.matrixV().cols(); ++i)
    if (i >= svd.rank()) kernel.push_back(from_eigen(svd.matrixV().col(i)));
  return Affine{from_eigen(xp), orthonormalize(kernel)};
}

// conv(V) clipped by one halfspace: vertices inside, plus every pairwise
// segment crossing of the boundary plane (a superset of the edge crossings;
// extra points lie inside the hull, so the hull is unchanged).
inline std::optional<std::vector<Vec>> clip_vertices(std::vector<Vec> V,
                                                     const Halfspace& h) {
  std::vector<Vec> out;
  std::vector<double> g(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) g[i] = dot(h.normal, V[i]) - h.offset;
  for (std::size_t i = 0; i < V.size(); ++i)
    if (g[i] <= kFeasTol) out.push_back(V[i]);
  for (std::size_t i = 0; i < V.size(); ++i)
    for (std::size_t j = i + 1; j < V.size(); ++j) {
      if ((g[i] > 0) == (g[j] > 0)) continue;
      double t = g[i] / (g[i] - g[j]);
      out.push_back(V[i] + t * (V[j] - V[i]));
    }
  if (out.empty()) return std::nullopt;
  // dedupe
  std::vector<Vec> ded;
  for (const Vec& v : out) {
    bool dup = false;
    for (const Vec& w : ded)
      if (approx_eq(v, w, 1e-12)) dup = true;
    if (!dup) ded.push_back(v);
  }
  // prune points that are hull-redundant once the list grows
  if (ded.size() > 16) {
    std::vector<Vec> kept;
    for (std::size_t i = 0; i < ded.size(); ++i) {
      std::vector<Vec> rest;
      for (std::size_t j = 0; j < ded.size(); ++j)
        if (j != i) rest.push_back(ded[j]);
      for (const Vec& k : kept) rest.push_back(k);
      if (rest.empty() || dist(project_polytope(Polytope{rest}, ded[i]), ded[i]) > 1e-10)
        kept.push_back(ded[i]);
    }
    ded = kept;
  }
  return ded;
}

struct DykstraOutcome {
  Vec point;
  double residual = 0.0;
  int iters = 0;
};

inline DykstraOutcome dykstra_project(const ConvexPiece& A,
                                      const ConvexPiece& B, const Vec& x,
                                      const IntersectOptions& opt) {
  Vec z = x;
  Vec p = Vec::zero(x.n), q = Vec::zero(x.n);
  Vec y = z;
  double res = std::numeric_limits<double>::infinity();
  int k = 0;
  for (; k < opt.dykstra_cap; ++k) {
    y = project_piece(A, z + p);
    p = (z + p) - y;
    Vec z_next = project_piece(B, y + q);
    q = (y + q) - z_next;
    res = std::max(dist(y, z_next), dist(z_next, z));
    z = z_next;
    if (res < opt.dykstra_residual) break;
  }
  return {z, res, k};
}

// Gap between two convex pieces via plain alternating projections; used to
// certify disjointness for pairs with no closed-form test. Polyhedral pairs
// enjoy linear convergence, so the stall check is reliable there.
inline double convex_pair_gap(const ConvexPiece& A, const ConvexPiece& B,
                              const Vec& start, const IntersectOptions& opt) {
  Vec pnt = project_piece(A, start);
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opt.probe_iters; ++k) {
    Vec qb = project_piece(B, pnt);
    Vec pa = project_piece(A, qb);
    double g = dist(pa, qb);
    if (std::abs(gap - g) < 1e-13) {
      gap = g;
      break;
    }
    gap = g;
    pnt = pa;
  }
  return gap;
}

inline Vec piece_anchor(const ConvexPiece& p) {
  return std::visit(
      [](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Affine>) return s.base;
        if constexpr (std::is_same_v<T, Polyhedron>) return s.witness;
        if constexpr (std::is_same_v<T, Ball>) return s.center;
        if constexpr (std::is_same_v<T, Polytope>) return s.vertices.front();
      },
      p);
}

struct ResolvedCell {
  std::optional<ConvexPiece> exact;                       // closed form
  std::optional<std::pair<ConvexPiece, ConvexPiece>> oracle;  // Dykstra pair
};

// Resolve one convex pair to an exact piece, an oracle pair, or (nullopt,
// nullopt) when provably empty.
inline std::optional<ResolvedCell> resolve_pair(const ConvexPiece& a,
                                                const ConvexPiece& b,
                                                const IntersectOptions& opt) {
  const bool a_ball = std::holds_alternative<Ball>(a);
  const bool b_ball = std::holds_alternative<Ball>(b);

  if (a_ball && b_ball) {
    const Ball& A = std::get<Ball>(a);
    const Ball& B = std::get<Ball>(b);
    double c = dist(A.center, B.center);
    if (c > A.radius + B.radius + 1e-12) return std::nullopt;
    if (std::abs(c - (A.radius + B.radius)) <= 1e-12) {
      Vec p = A.center + (A.radius / c) * (B.center - A.center);
      return ResolvedCell{make_singleton(p), std::nullopt};
    }
    if (c + B.radius <= A.radius + 1e-12) return ResolvedCell{b, std::nullopt};
    if (c + A.radius <= B.radius + 1e-12) return ResolvedCell{a, std::nullopt};
    return ResolvedCell{std::nullopt, std::make_pair(a, b)};
  }

  if (a_ball || b_ball) {
    const Ball& B = std::get<Ball>(a_ball ? a : b);
    const ConvexPiece& other = a_ball ? b : a;
    Vec foot = project_piece(other, B.center);
    double d = dist(foot, B.center);
    if (d > B.radius + 1e-12) return std::nullopt;
    if (std::abs(d - B.radius) <= 1e-12)
      return ResolvedCell{make_singleton(foot), std::nullopt};
    if (const auto* A = std::get_if<Affine>(&other);
        A && A->basis.empty())
      return ResolvedCell{other, std::nullopt};  // singleton inside the ball
    if (const auto* T = std::get_if<Polytope>(&other)) {
      bool inside = true;
      for (const Vec& v : T->vertices)
        if (dist(v, B.center) > B.radius + 1e-12) inside = false;
      if (inside) return ResolvedCell{other, std::nullopt};
    }
    return ResolvedCell{std::nullopt, std::make_pair(a, b)};
  }

  const bool a_tope = std::holds_alternative<Polytope>(a);
  const bool b_tope = std::holds_alternative<Polytope>(b);

  if (a_tope && b_tope) {
    double gap = convex_pair_gap(a, b, piece_anchor(a), opt);
    if (gap > opt.empty_tol) return std::nullopt;
    return ResolvedCell{std::nullopt, std::make_pair(a, b)};
  }

  if (a_tope || b_tope) {
    // polytope clipped by the rows of an affine or polyhedral partner
    const Polytope& T = std::get<Polytope>(a_tope ? a : b);
    const ConvexPiece& other = a_tope ? b : a;
    std::vector<Halfspace> rows;
    if (const auto* A = std::get_if<Affine>(&other))
      rows = affine_as_rows(*A);
    else
      rows = std::get<Polyhedron>(other).rows;
    std::vector<Vec> V = T.vertices;
    for (const Halfspace& h : rows) {
      auto next = clip_vertices(std::move(V), h);
      if (!next) return std::nullopt;
      V = std::move(*next);
    }
    return ResolvedCell{Polytope{V}, std::nullopt};
  }

  const auto* Aa = std::get_if<Affine>(&a);
  const auto* Ba = std::get_if<Affine>(&b);
  if (Aa && Ba) {
    auto I = intersect_affine_affine(*Aa, *Ba);
    if (!I) return std::nullopt;
    return ResolvedCell{*I, std::nullopt};
  }

  // affine/polyhedron mix: concatenate rows
  std::vector<Halfspace> rows;
  auto add_rows = [&rows](const ConvexPiece& p) {
    if (const auto* A = std::get_if<Affine>(&p)) {
      auto r = affine_as_rows(*A);
      rows.insert(rows.end(), r.begin(), r.end());
    } else {
      const auto& r = std::get<Polyhedron>(p).rows;
      rows.insert(rows.end(), r.begin(), r.end());
    }
  };
  add_rows(a);
  add_rows(b);
  try {
    Polyhedron P = make_polyhedron_internal(std::move(rows), piece_anchor(a));
    return ResolvedCell{P, std::nullopt};
  } catch (const EmptyIntersection&) {
    return std::nullopt;
  }
}

}  // namespace detail

// A ∩ B: exact SetRep when every convex cell closes in a representable form,
// otherwise a Dykstra-backed oracle over the surviving cells. Construction
// throws EmptyIntersection when every cell is provably empty.
class Intersection {
 public:
  Intersection(const SetRep& A, const SetRep& B, IntersectOptions opt = {})
      : opt_(opt) {
    if (A.dim() != B.dim())
      throw DimensionMismatch("intersect: mismatched ambient dimensions");
    std::vector<ConvexPiece> as = pieces_of(A);
    std::vector<ConvexPiece> bs = pieces_of(B);
    for (const ConvexPiece& pa : as)
      for (const ConvexPiece& pb : bs) {
        auto cell = detail::resolve_pair(pa, pb, opt_);
        if (cell) cells_.push_back(*cell);
      }
    if (cells_.empty())
      throw EmptyIntersection("intersect: all cells provably empty");
  }

  bool exact() const {
    for (const auto& c : cells_)
      if (!c.exact) return false;
    return true;
  }

  // Representable closed form; only valid when exact().
  SetRep exact_rep() const {
    if (!exact()) throw Error("Intersection: no exact representation");
    if (cells_.size() == 1) return as_set(*cells_[0].exact);
    std::vector<ConvexPiece> pieces;
    for (const auto& c : cells_) pieces.push_back(*c.exact);
    return SetRep{make_union(std::move(pieces))};
  }

  ProjectionResult project(const Vec& x) const {
    ProjectionResult best;
    best.dist = std::numeric_limits<double>::infinity();
    std::vector<Vec> cands;
    for (const auto& c : cells_) {
      Vec y(x.n);
      if (c.exact) {
        auto pr = setreg::project(as_set(*c.exact), x);
        y = pr.nearest.front();
      } else {
        auto out = detail::dykstra_project(c.oracle->first, c.oracle->second, x,
                                           opt_);
        max_residual_ = std::max(max_residual_, out.residual);
        ++oracle_calls_;
        y = out.point;
      }
      cands.push_back(y);
      best.dist = std::min(best.dist, dist(y, x));
    }
    for (const Vec& y : cands) {
      if (dist(y, x) > best.dist + kTieTol) continue;
      bool dup = false;
      for (const Vec& z : best.nearest)
        if (approx_eq(y, z, 1e-12)) dup = true;
      if (!dup) best.nearest.push_back(y);
    }
    return best;
  }

  double distance(const Vec& x) const { return project(x).dist; }

  double max_residual() const { return max_residual_; }
  long oracle_calls() const { return oracle_calls_; }

 private:
  static std::vector<ConvexPiece> pieces_of(const SetRep& S) {
    if (const auto* u = std::get_if<FiniteUnion>(&S.v)) return u->pieces;
    return {S.as_convex_unsafe()};
  }

  std::vector<detail::ResolvedCell> cells_;
  IntersectOptions opt_;
  mutable double max_residual_ = 0.0;
  mutable long oracle_calls_ = 0;
};

inline Intersection intersect(const SetRep& A, const SetRep& B,
                              IntersectOptions opt = {}) {
  return Intersection(A, B, opt);
}

}  // namespace setreg
