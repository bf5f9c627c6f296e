#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "setreg/intersect.hpp"
#include "setreg/projections.hpp"
#include "setreg/rng.hpp"
#include "setreg/set_rep.hpp"

namespace setreg {

// conv(cone(generators)) + span(lineality); `exact` marks closed-form cones
// (convex variants) as opposed to sampled collections.
struct ConeRep {
  std::vector<Vec> generators;  // unit
  std::vector<Vec> lineality;   // orthonormal
  bool exact = true;

  bool trivial() const { return generators.empty() && lineality.empty(); }
};

struct NormalSample {
  enum class Kind { ConvexExact, Proximal, Limiting };
  Vec base;
  Vec direction;  // unit
  Kind kind = Kind::Proximal;
  double scale = 0.0;  // sampling radius that produced it (0 for exact)
};

namespace detail {

// Extreme rays of {y in span(dirs): <d, y> <= 0 for all d}: kernel of every
// (k-1)-subset of dirs, expressed in an orthonormal basis of span(dirs),
// filtered by the defining inequalities.
inline std::vector<Vec> polar_cone_generators(const std::vector<Vec>& dirs,
                                              const std::vector<Vec>& span_basis) {
  const int k = static_cast<int>(span_basis.size());
  std::vector<Vec> gens;
  if (k == 0) return gens;
  const int m = static_cast<int>(dirs.size());
  Eigen::MatrixXd D(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) D(i, j) = dot(dirs[i], span_basis[j]);

  auto try_ray = [&](const Eigen::VectorXd& r) {
    if (r.norm() < 1e-12) return;
    Eigen::VectorXd u = r / r.norm();
    for (int i = 0; i < m; ++i)
      if (D.row(i).dot(u) > 1e-10) return;
    Vec g = Vec::zero(span_basis.front().n);
    for (int j = 0; j < k; ++j) g += u(j) * span_basis[j];
    for (const Vec& h : gens)
      if (dist(g, h) < 1e-9) return;
    gens.push_back(g);
  };

  for_each_subset(m, k - 1, [&](const std::vector<int>& idx) {
    if (static_cast<int>(idx.size()) != k - 1) return;
    Eigen::MatrixXd S(std::max<int>(1, k - 1), k);
    S.setZero();
    for (std::size_t r = 0; r < idx.size(); ++r) S.row(static_cast<int>(r)) = D.row(idx[r]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd ker = lu.kernel();
    if (ker.cols() != 1) return;
    try_ray(ker.col(0));
    try_ray(-ker.col(0));
  });
  return gens;
}

}  // namespace detail

// Normal cone of a convex set at a member point a. Exact for every convex
// variant: affine complements, active polyhedron rows, ball boundary ray, and
// the polar of the feasible-direction cone for polytopes.
inline ConeRep convex_normal_cone(const SetRep& S, const Vec& a,
                                  double tol = 1e-9) {
  if (!S.convex()) throw NonConvexError("convex_normal_cone: set not convex");
  if (!member(S, a, tol))
    throw MembershipError("convex_normal_cone: point not in the set");

  ConeRep cone;
  if (const auto* A = std::get_if<Affine>(&S.v)) {
    cone.lineality = orthonormal_complement(A->basis, A->base.n);
  } else if (const auto* P = std::get_if<Polyhedron>(&S.v)) {
    for (const Halfspace& h : P->rows) {
      double scale = 1.0 + std::abs(h.offset) + norm(a);
      if (std::abs(dot(h.normal, a) - h.offset) <= tol * scale)
        cone.generators.push_back(normalized(h.normal));
    }
  } else if (const auto* B = std::get_if<Ball>(&S.v)) {
    Vec d = a - B->center;
    if (norm(d) >= B->radius - tol && norm(d) > 1e-12)
      cone.generators.push_back(normalized(d));
  } else if (const auto* T = std::get_if<Polytope>(&S.v)) {
    std::vector<Vec> dirs;
    for (const Vec& v : T->vertices) {
      Vec d = v - a;
      if (norm(d) > tol) dirs.push_back(d);
    }
    std::vector<Vec> span_basis = orthonormalize(dirs);
    cone.lineality = orthonormal_complement(span_basis, a.n);
    cone.generators = detail::polar_cone_generators(dirs, span_basis);
  }
  cone.exact = true;
  return cone;
}

// Exact distance from v to conv(cone(generators)) + span(lineality): project
// out the lineality, then solve the nonnegative least-squares over generator
// subsets (an optimal support uses at most n of them).
inline double cone_distance(const ConeRep& cone, const Vec& v) {
  Vec r = v;
  for (const Vec& l : cone.lineality) r -= dot(r, l) * l;
  std::vector<Vec> gens;
  for (const Vec& g : cone.generators) {
    Vec gp = g;
    for (const Vec& l : cone.lineality) gp -= dot(gp, l) * l;
    if (norm(gp) > 1e-12) gens.push_back(gp);
  }
  const int m = static_cast<int>(gens.size());
  double best = norm(r);  // empty support
  if (m == 0 || best < 1e-15) return best;
  Eigen::VectorXd er = to_eigen(r);
  for_each_subset(m, std::min(r.n, m), [&](const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    if (k == 0) return;
    Eigen::MatrixXd G(r.n, k);
    for (int c = 0; c < k; ++c) G.col(c) = to_eigen(gens[idx[c]]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
    qr.setThreshold(1e-12);
    if (qr.rank() < k) return;
    Eigen::VectorXd lam = qr.solve(er);
    for (int i = 0; i < k; ++i)
      if (lam(i) < -1e-12) return;
    double res = (G * lam - er).norm();
    best = std::min(best, res);
  });
  return best;
}

// Random unit direction in the cone; zero vector when the cone is trivial.
inline Vec sample_cone_direction(const ConeRep& cone, int dim, RngStream& rng) {
  if (cone.trivial()) return Vec::zero(dim);
  Vec w = Vec::zero(dim);
  for (const Vec& g : cone.generators) w += std::abs(rng.next_normal()) * g;
  for (const Vec& l : cone.lineality) w += rng.next_normal() * l;
  double m = norm(w);
  if (m < 1e-12) {
    if (!cone.generators.empty()) return cone.generators.front();
    return cone.lineality.front();
  }
  return (1.0 / m) * w;
}

// Deterministic representatives: generators plus both signs of the lineality
// basis. Estimators mix these with random draws.
inline std::vector<Vec> cone_anchor_directions(const ConeRep& cone) {
  std::vector<Vec> out = cone.generators;
  for (const Vec& l : cone.lineality) {
    out.push_back(l);
    out.push_back(-l);
  }
  return out;
}

// Proximal normal directions at a: ambient samples x in B_radius(a) are kept
// when their nearest foot p lies within 10% of ||x - a|| from a; x - p is then
// an exact proximal direction at p, recorded with base a. The relative guard
// makes thin inverse-projection sets (e.g. a union arm crossing) come out
// empty rather than polluted.
inline std::vector<NormalSample> proximal_normals(const SetRep& S, const Vec& a,
                                                  int n_samples, double radius,
                                                  std::uint64_t seed,
                                                  double membership_tol = 1e-9) {
  if (!member(S, a, membership_tol))
    throw MembershipError("proximal_normals: base point not in the set");
  if (radius <= 0.0) throw ArgumentError("proximal_normals: radius <= 0");
  std::vector<NormalSample> out;
  for (int i = 0; i < n_samples; ++i) {
    RngStream rng(seed, 0x70f0, static_cast<std::uint64_t>(i));
    Vec x = sample_ball(a, radius, rng);
    auto pr = project(S, x);
    if (pr.dist < 1e-12) continue;  // interior / on-set sample
    const Vec* foot = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& p : pr.nearest) {
      double d = dist(p, a);
      if (d < best) {
        best = d;
        foot = &p;
      }
    }
    double r = dist(x, a);
    if (!foot || best > 0.1 * r) continue;
    Vec dir = x - *foot;
    if (norm(dir) < 1e-12) continue;
    out.push_back({a, normalized(dir), NormalSample::Kind::Proximal, radius});
  }
  return out;
}

// Limiting normal harvest: per radius r, ambient samples near xbar are
// projected onto S; every foot inside B_r(xbar) yields an exact proximal
// direction at that foot, tagged with r. The union over the schedule
// approximates the limits of nearby proximal normals.
inline std::vector<NormalSample> limiting_normals(
    const SetRep& S, const Vec& xbar, const std::vector<double>& radii,
    int samples_per_radius, std::uint64_t seed, double membership_tol = 1e-9) {
  if (!member(S, xbar, membership_tol))
    throw MembershipError("limiting_normals: point not in the set");
  std::vector<NormalSample> out;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    double r = radii[ri];
    for (int i = 0; i < samples_per_radius; ++i) {
      RngStream rng(seed, 0x11a1 + ri, static_cast<std::uint64_t>(i));
      Vec z = sample_ball(xbar, r, rng);
      auto pr = project(S, z);
      if (pr.dist < 1e-12) continue;
      for (const Vec& foot : pr.nearest) {
        if (dist(foot, xbar) > r) continue;
        Vec dir = z - foot;
        if (norm(dir) < 1e-12) continue;
        out.push_back(
            {foot, normalized(dir), NormalSample::Kind::Limiting, r});
      }
    }
  }
  return out;
}

struct FrechetCheck {
  bool refuted = false;
  Vec witness;          // set when refuted
  double worst_ratio = -1.0;  // max alignment ratio seen at the finest radius
};

// One-sided falsification test for v being a regular (Frechet) normal at a:
// the candidate is refuted when set points s near a keep the alignment ratio
// <v, s-a>/(||v|| ||s-a||) above tol at every radius in the schedule.
inline FrechetCheck frechet_normal_check(const SetRep& S, const Vec& a,
                                         const Vec& v,
                                         const std::vector<double>& radii,
                                         double tol, int samples_per_radius,
                                         std::uint64_t seed) {
  if (norm(v) < 1e-12)
    throw ArgumentError("frechet_normal_check: zero direction");
  if (!member(S, a, 1e-9))
    throw MembershipError("frechet_normal_check: point not in the set");
  if (radii.empty()) throw ArgumentError("frechet_normal_check: empty schedule");

  Vec vn = normalized(v);
  FrechetCheck out;
  out.witness = a;
  bool all_radii_violated = true;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    double r = radii[ri];
    double worst = -1.0;
    Vec worst_s = a;
    for (int i = 0; i < samples_per_radius; ++i) {
      RngStream rng(seed, 0xf5ec + ri, static_cast<std::uint64_t>(i));
      Vec z = sample_ball(a, r, rng);
      for (const Vec& s : project(S, z).nearest) {
        double d = dist(s, a);
        if (d < 1e-12 || d > r) continue;
        double ratio = dot(vn, s - a) / d;
        if (ratio > worst) {
          worst = ratio;
          worst_s = s;
        }
      }
    }
    if (worst <= tol) all_radii_violated = false;
    if (ri + 1 == radii.size()) {
      out.worst_ratio = worst;
      if (all_radii_violated) out.witness = worst_s;
    }
  }
  out.refuted = all_radii_violated;
  return out;
}

}  // namespace setreg
