#pragma once

#include <string>
#include <variant>
#include <vector>

#include "setreg/geometry.hpp"

namespace setreg {

// Affine subspace {base + sum_i s_i basis_i}; basis orthonormal, may be empty
// (a singleton). Dimension of the subspace = basis.size().
struct Affine {
  Vec base;
  std::vector<Vec> basis;
};

// One row <normal, x> <= offset of a polyhedron; normal need not be unit.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

// Finite intersection of halfspaces, certified nonempty by a stored witness.
struct Polyhedron {
  std::vector<Halfspace> rows;
  Vec witness;
};

// Closed Euclidean ball.
struct Ball {
  Vec center;
  double radius = 0.0;
};

// Convex hull of finitely many points.
struct Polytope {
  std::vector<Vec> vertices;
};

using ConvexPiece = std::variant<Affine, Polyhedron, Ball, Polytope>;

// Finite union of convex pieces; the one non-convex representation.
struct FiniteUnion {
  std::vector<ConvexPiece> pieces;
};

using SetVariant = std::variant<Affine, Polyhedron, Ball, Polytope, FiniteUnion>;

inline int piece_dim(const ConvexPiece& p) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Affine>) return s.base.n;
        if constexpr (std::is_same_v<T, Polyhedron>) return s.witness.n;
        if constexpr (std::is_same_v<T, Ball>) return s.center.n;
        if constexpr (std::is_same_v<T, Polytope>) return s.vertices.front().n;
      },
      p);
}

struct SetRep {
  SetVariant v;

  int dim() const {
    if (const auto* u = std::get_if<FiniteUnion>(&v))
      return piece_dim(u->pieces.front());
    return piece_dim(as_convex_unsafe());
  }

  bool convex() const { return !std::holds_alternative<FiniteUnion>(v); }

  ConvexPiece as_convex_unsafe() const {
    if (const auto* a = std::get_if<Affine>(&v)) return *a;
    if (const auto* p = std::get_if<Polyhedron>(&v)) return *p;
    if (const auto* b = std::get_if<Ball>(&v)) return *b;
    if (const auto* t = std::get_if<Polytope>(&v)) return *t;
    throw NonConvexError("as_convex: set is a finite union");
  }
};

// ---- validated constructors ----

inline void check_orthonormal(const std::vector<Vec>& basis, double tol,
                              const char* who) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      double g = dot(basis[i], basis[j]);
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - want) > tol)
        throw ValidationError(who, "basis not orthonormal (Gram deviation " +
                                       std::to_string(std::abs(g - want)) + ")");
    }
}

inline Affine make_affine(Vec base, std::vector<Vec> basis) {
  for (const Vec& b : basis) require_same_dim(base, b, "make_affine");
  if (static_cast<int>(basis.size()) > base.n)
    throw ValidationError("basis", "more basis vectors than ambient dimension");
  check_orthonormal(basis, 1e-10, "basis");
  return Affine{base, std::move(basis)};
}

inline Affine make_singleton(Vec point) { return Affine{point, {}}; }

inline constexpr int kMaxPolyhedronRows = 12;

inline bool polyhedron_feasible(const std::vector<Halfspace>& rows,
                                const Vec& x, double tol) {
  for (const Halfspace& h : rows)
    if (dot(h.normal, x) > h.offset + tol) return false;
  return true;
}

inline Polyhedron make_polyhedron(std::vector<Halfspace> rows, Vec witness) {
  if (rows.empty()) throw ValidationError("rows", "polyhedron needs >= 1 row");
  if (static_cast<int>(rows.size()) > kMaxPolyhedronRows)
    throw ValidationError("rows", "polyhedron limited to " +
                                      std::to_string(kMaxPolyhedronRows) +
                                      " rows");
  for (const Halfspace& h : rows) {
    require_same_dim(h.normal, witness, "make_polyhedron");
    if (norm(h.normal) < 1e-12)
      throw ValidationError("rows", "zero row normal");
  }
  if (!polyhedron_feasible(rows, witness, 1e-9))
    throw ValidationError("witness", "witness violates a polyhedron row");
  return Polyhedron{std::move(rows), witness};
}

inline Ball make_ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("radius", "must be positive");
  return Ball{center, radius};
}

inline Polytope make_polytope(std::vector<Vec> vertices) {
  if (vertices.empty())
    throw ValidationError("vertices", "polytope needs >= 1 vertex");
  for (const Vec& v : vertices)
    require_same_dim(v, vertices.front(), "make_polytope");
  return Polytope{std::move(vertices)};
}

inline FiniteUnion make_union(std::vector<ConvexPiece> pieces) {
  if (pieces.empty()) throw ValidationError("pieces", "union needs >= 1 piece");
  for (const ConvexPiece& p : pieces)
    if (piece_dim(p) != piece_dim(pieces.front()))
      throw ValidationError("pieces", "mixed ambient dimensions in union");
  return FiniteUnion{std::move(pieces)};
}

// ---- translation: {s + delta : s in S} ----

inline ConvexPiece translate(const ConvexPiece& p, const Vec& delta) {
  return std::visit(
      [&](const auto& s) -> ConvexPiece {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Affine>) {
          return Affine{s.base + delta, s.basis};
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          Polyhedron q = s;
          for (Halfspace& h : q.rows) h.offset += dot(h.normal, delta);
          q.witness += delta;
          return q;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Ball{s.center + delta, s.radius};
        } else {
          Polytope q = s;
          for (Vec& v : q.vertices) v += delta;
          return q;
        }
      },
      p);
}

inline SetRep translate(const SetRep& S, const Vec& delta) {
  if (const auto* u = std::get_if<FiniteUnion>(&S.v)) {
    FiniteUnion out;
    out.pieces.reserve(u->pieces.size());
    for (const ConvexPiece& p : u->pieces)
      out.pieces.push_back(translate(p, delta));
    return SetRep{out};
  }
  ConvexPiece moved = translate(SetRep{S.v}.as_convex_unsafe(), delta);
  return std::visit([](auto s) { return SetRep{SetVariant{std::move(s)}}; },
                    moved);
}

inline SetRep as_set(ConvexPiece p) {
  return std::visit([](auto s) { return SetRep{SetVariant{std::move(s)}}; },
                    std::move(p));
}

inline std::string variant_name(const SetRep& S) {
  if (std::holds_alternative<Affine>(S.v)) return "affine";
  if (std::holds_alternative<Polyhedron>(S.v)) return "polyhedron";
  if (std::holds_alternative<Ball>(S.v)) return "ball";
  if (std::holds_alternative<Polytope>(S.v)) return "polytope";
  return "union";
}

}  // namespace setreg
