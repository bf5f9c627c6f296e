#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "setreg/intersect.hpp"
#include "setreg/normal_cones.hpp"
#include "setreg/projections.hpp"
#include "setreg/rng.hpp"

namespace setreg {

enum class ConstantKind { Str, StrPrime, Tr, TrDual, Str1, Itr, ItrW, ItrC };

inline const char* constant_name(ConstantKind k) {
  switch (k) {
    case ConstantKind::Str: return "str";
    case ConstantKind::StrPrime: return "str_prime";
    case ConstantKind::Tr: return "tr";
    case ConstantKind::TrDual: return "tr_dual";
    case ConstantKind::Str1: return "str1";
    case ConstantKind::Itr: return "itr";
    case ConstantKind::ItrW: return "itr_w";
    case ConstantKind::ItrC: return "itr_c";
  }
  return "?";
}

struct PerRadius {
  double radius = 0.0;
  double inf_value = 1.0;  // convention value when nothing was admissible
  long n_admissible = 0;
  long n_empty_translations = 0;  // tr/rg only: provably empty translates
};

struct WitnessPoint {
  std::string label;
  Vec value;
};

struct ConstantEstimate {
  ConstantKind kind = ConstantKind::Str;
  double value = 1.0;
  enum class Bias { UpperBound, Heuristic } bias = Bias::UpperBound;
  std::vector<PerRadius> per_radius;
  std::vector<WitnessPoint> argmin_witness;
  double oracle_max_residual = 0.0;
  // dual-pair consistency bookkeeping (filled by estimate_itr_c)
  long dual_checked = 0;
  long dual_valid = 0;

  std::string name() const { return constant_name(kind); }
};

struct EstimatorConfig {
  std::vector<double> radii = default_radii();
  int samples_per_radius = 512;
  std::uint64_t seed = 20260816ull;
  double membership_tol = 1e-9;
  double exclusion_tol = 1e-7;
  double slack = 0.05;
  // admissibility relaxations for the intrinsic family never shrink below
  // this angle, keeping the admissible set reachable by sampling
  double angular_floor = 0.01;
  bool strengthened_filter = false;
  IntersectOptions intersect;

  static std::vector<double> default_radii() {
    std::vector<double> r;
    for (int k = 0; k < 8; ++k) r.push_back(0.5 * std::pow(2.0, -k));
    return r;
  }

  void validate() const {
    if (radii.empty()) throw ValidationError("radii", "empty schedule");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
      if (!(radii[i] > radii[i + 1]))
        throw ValidationError("radii", "must be strictly decreasing");
    if (radii.back() < 1e-6)
      throw ValidationError("radii", "final radius below 1e-6");
    if (samples_per_radius < 100)
      throw ValidationError("samples_per_radius", "must be >= 100");
    if (exclusion_tol <= 0 || membership_tol <= 0)
      throw ValidationError("tolerances", "must be positive");
  }
};

namespace detail {

inline void require_base_point(const SetRep& A, const SetRep& B,
                               const Vec& xbar, double tol) {
  if (!member(A, xbar, tol))
    throw MembershipError("base point not in the first set");
  if (!member(B, xbar, tol))
    throw MembershipError("base point not in the second set");
}

// Per-radius infimum accumulator; the witness sticks with the first sample
// that reached the final infimum within 1e-12.
struct InfAccum {
  double inf = std::numeric_limits<double>::infinity();
  long adm = 0;
  long empty_tr = 0;
  std::vector<WitnessPoint> witness;

  void admit(double v, std::vector<WitnessPoint> w) {
    ++adm;
    if (v < inf - 1e-12) {
      inf = v;
      witness = std::move(w);
    } else if (v < inf) {
      inf = v;
    }
  }
};

inline void finish_radius(ConstantEstimate& est, double radius,
                          const InfAccum& acc) {
  PerRadius pr;
  pr.radius = radius;
  pr.n_admissible = acc.adm;
  pr.n_empty_translations = acc.empty_tr;
  pr.inf_value = acc.adm > 0 ? std::min(acc.inf, 1.0) : 1.0;
  est.per_radius.push_back(pr);
  est.argmin_witness = acc.witness;
}

inline void finish_estimate(ConstantEstimate& est) {
  const PerRadius& last = est.per_radius.back();
  est.value = last.inf_value;
  if (last.n_admissible == 0) est.argmin_witness.clear();
}

// min over the split weight w of ||w u1 + (1-w) u2|| for unit u1, u2; the
// minimum sits at w = 1/2 and equals sqrt((1 + <u1,u2>)/2).
inline double min_split_norm(const Vec& u1, const Vec& u2) {
  double c = std::clamp(dot(u1, u2), -1.0, 1.0);
  return std::sqrt(std::max(0.0, 0.5 * (1.0 + c)));
}

// Sample a point of S within B_r(xbar) by projecting an ambient draw; nullopt
// when the projection leaves the ball.
inline std::optional<Vec> sample_in_set(const SetRep& S, const Vec& xbar,
                                        double r, RngStream& rng) {
  Vec z = sample_ball(xbar, r, rng);
  Vec y = project(S, z).nearest.front();
  if (dist(y, xbar) > r) return std::nullopt;
  return y;
}

// Unified admissibility probe for exact convex cones and sampled ray sets.
struct ConeProbe {
  std::optional<ConeRep> cone;
  std::vector<Vec> rays;

  bool usable() const {
    return (cone && !cone->trivial()) || !rays.empty();
  }

  double distance(const Vec& u) const {
    if (cone) return cone_distance(*cone, u);
    double best = norm(u);
    for (const Vec& g : rays) {
      double t = std::max(0.0, dot(u, g));
      best = std::min(best, dist(u, t * g));
    }
    return best;
  }

  std::vector<Vec> anchors() const {
    if (cone) return cone_anchor_directions(*cone);
    return rays;
  }

  Vec sample_direction(int dim, RngStream& rng) const {
    if (cone) return sample_cone_direction(*cone, dim, rng);
    if (rays.empty()) return Vec::zero(dim);
    return rays[rng.next_u64() % rays.size()];
  }
};

inline ConeProbe make_cone_probe(const SetRep& S, const Vec& at, double radius,
                                 int samples, std::uint64_t seed) {
  ConeProbe probe;
  if (S.convex()) {
    probe.cone = convex_normal_cone(S, at, 1e-7);
    return probe;
  }
  for (const NormalSample& ns :
       proximal_normals(S, at, samples, radius, seed)) {
    bool dup = false;
    for (const Vec& g : probe.rays)
      if (dot(g, ns.direction) > 0.99875) {  // within ~0.05 rad
        dup = true;
        break;
      }
    if (!dup) probe.rays.push_back(ns.direction);
    if (probe.rays.size() >= 8) break;
  }
  return probe;
}

inline Vec project_to_bisector(const Vec& z, const Vec& a, const Vec& b) {
  Vec nh = normalized(b - a);
  Vec mid = 0.5 * (a + b);
  return z - dot(z - mid, nh) * nh;
}

// Equalize the two set distances by bisecting along the segment toward the
// farther foot, then return (P_A(x), P_B(x), x). The infima of the dual and
// slope estimators bind exactly at such tied configurations, which random
// tuples almost never hit. The tie must be tight enough that downstream
// subgradient checks at tolerance 1e-8 see the distances as equal.
inline std::optional<std::array<Vec, 3>> tied_feet_tuple(const SetRep& A,
                                                         const SetRep& B,
                                                         Vec x) {
  for (int it = 0; it < 8; ++it) {
    double dA = distance(A, x), dB = distance(B, x);
    if (std::abs(dA - dB) <= 1e-12 * std::max({1.0, dA, dB})) break;
    const SetRep& far = dA > dB ? A : B;
    Vec foot = project(far, x).nearest.front();
    double lo = 0.0, hi = 1.0;
    double sign0 = dA - dB;
    for (int bs = 0; bs < 52; ++bs) {
      double mid = 0.5 * (lo + hi);
      Vec xm = x + mid * (foot - x);
      double h = distance(A, xm) - distance(B, xm);
      if ((h > 0) == (sign0 > 0)) lo = mid;
      else hi = mid;
    }
    x = x + 0.5 * (lo + hi) * (foot - x);
  }
  double dA = distance(A, x), dB = distance(B, x);
  if (std::abs(dA - dB) > 1e-9 * std::max({1.0, dA, dB})) return std::nullopt;
  Vec a = project(A, x).nearest.front();
  Vec b = project(B, x).nearest.front();
  return std::array<Vec, 3>{a, b, x};
}

}  // namespace detail

struct SubgradientTriple {
  Vec x1s, x2s, xs;
};

// membership test for the subdifferential of f(x1,x2,x) =
// max{||x1-x||, ||x2-x||} away from the diagonal x1 = x2 = x
inline bool subdiff_f_membership(const SubgradientTriple& t, const Vec& x1,
                                 const Vec& x2, const Vec& x,
                                 double tol = 1e-8) {
  double d1 = dist(x1, x), d2 = dist(x2, x);
  if (d1 <= 1e-12 && d2 <= 1e-12)
    throw ArgumentError("subdiff_f_membership: x1 = x2 = x");
  if (norm(t.x1s + t.x2s + t.xs) > tol) return false;
  double n1 = norm(t.x1s), n2 = norm(t.x2s);
  if (std::abs(n1 + n2 - 1.0) > tol) return false;
  if (std::abs(dot(t.x1s, x1 - x) - n1 * d1) > tol * std::max(1.0, d1))
    return false;
  if (std::abs(dot(t.x2s, x2 - x) - n2 * d2) > tol * std::max(1.0, d2))
    return false;
  if (d1 < d2 - tol && n1 > tol) return false;
  if (d2 < d1 - tol && n2 > tol) return false;
  return true;
}

// ---- subtransversality: alpha d(x, A∩B) <= max{d(x,A), d(x,B)} ----

inline ConstantEstimate estimate_str(const SetRep& A, const SetRep& B,
                                     const Vec& xbar,
                                     const EstimatorConfig& cfg) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);
  Intersection I = intersect(A, B, cfg.intersect);

  ConstantEstimate est;
  est.kind = ConstantKind::Str;
  est.bias = ConstantEstimate::Bias::UpperBound;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    detail::InfAccum acc;
    for (int i = 0; i < cfg.samples_per_radius; ++i) {
      RngStream rng(cfg.seed, 0x5712 + 0x101 * ri, i);
      Vec x = sample_ball(xbar, r, rng);
      double dI = I.distance(x);
      if (dI <= cfg.exclusion_tol) continue;
      double ratio = std::max(distance(A, x), distance(B, x)) / dI;
      acc.admit(ratio, {{"x", x}});
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  est.oracle_max_residual = I.max_residual();
  return est;
}

// one-sided variant restricted to x in A; not symmetric in (A, B)
inline ConstantEstimate estimate_str_prime(const SetRep& A, const SetRep& B,
                                           const Vec& xbar,
                                           const EstimatorConfig& cfg) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);
  Intersection I = intersect(A, B, cfg.intersect);

  ConstantEstimate est;
  est.kind = ConstantKind::StrPrime;
  est.bias = ConstantEstimate::Bias::UpperBound;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    detail::InfAccum acc;
    for (int i = 0; i < cfg.samples_per_radius; ++i) {
      RngStream rng(cfg.seed, 0x5713 + 0x101 * ri, i);
      auto x = detail::sample_in_set(A, xbar, r, rng);
      if (!x) continue;
      double dI = I.distance(*x);
      if (dI <= cfg.exclusion_tol) continue;
      acc.admit(distance(B, *x) / dI, {{"x", *x}});
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  est.oracle_max_residual = I.max_residual();
  return est;
}

// ---- transversality: the same ratio under independent small translations of
// both sets; translates with provably empty intersection defeat the property
// outright and enter as ratio zero ----

inline ConstantEstimate estimate_tr(const SetRep& A, const SetRep& B,
                                    const Vec& xbar,
                                    const EstimatorConfig& cfg) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);

  ConstantEstimate est;
  est.kind = ConstantKind::Tr;
  est.bias = ConstantEstimate::Bias::UpperBound;
  double worst_res = 0.0;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    detail::InfAccum acc;
    for (int i = 0; i < cfg.samples_per_radius; ++i) {
      RngStream rng(cfg.seed, 0x7214 + 0x101 * ri, i);
      Vec x1 = sample_ball(Vec::zero(xbar.n), r, rng);
      Vec x2 = sample_ball(Vec::zero(xbar.n), r, rng);
      Vec x = sample_ball(xbar, r, rng);
      SetRep At = translate(A, -x1);
      SetRep Bt = translate(B, -x2);
      std::vector<WitnessPoint> w{{"x", x}, {"x1", x1}, {"x2", x2}};
      try {
        Intersection I(At, Bt, cfg.intersect);
        double dI = I.distance(x);
        worst_res = std::max(worst_res, I.max_residual());
        if (dI <= cfg.exclusion_tol) continue;
        double ratio = std::max(distance(At, x), distance(Bt, x)) / dI;
        acc.admit(ratio, std::move(w));
      } catch (const EmptyIntersection&) {
        ++acc.empty_tr;
        acc.admit(0.0, std::move(w));
      }
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  est.oracle_max_residual = worst_res;
  return est;
}

// ---- dual transversality: inf ||x1* + x2*|| over unit-sum normal pairs at
// set points near xbar; the split weight is minimized in closed form ----

inline ConstantEstimate estimate_tr_dual(const SetRep& A, const SetRep& B,
                                         const Vec& xbar,
                                         const EstimatorConfig& cfg) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);

  ConstantEstimate est;
  est.kind = ConstantKind::TrDual;
  est.bias = ConstantEstimate::Bias::UpperBound;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    detail::InfAccum acc;
    for (int i = 0; i < cfg.samples_per_radius; ++i) {
      RngStream rng(cfg.seed, 0x7d15 + 0x101 * ri, i);
      auto a = detail::sample_in_set(A, xbar, r, rng);
      auto b = detail::sample_in_set(B, xbar, r, rng);
      if (!a || !b) continue;
      detail::ConeProbe ca = detail::make_cone_probe(
          A, *a, 0.5 * r, 32, cfg.seed ^ (0xa1 + i + (ri << 16)));
      detail::ConeProbe cb = detail::make_cone_probe(
          B, *b, 0.5 * r, 32, cfg.seed ^ (0xb2 + i + (ri << 16)));
      if (!ca.usable() || !cb.usable()) continue;

      std::vector<Vec> d1 = ca.anchors();
      std::vector<Vec> d2 = cb.anchors();
      Vec r1 = ca.sample_direction(xbar.n, rng);
      Vec r2 = cb.sample_direction(xbar.n, rng);
      if (norm(r1) > 0.5) d1.push_back(r1);
      if (norm(r2) > 0.5) d2.push_back(r2);
      for (const Vec& u1 : d1)
        for (const Vec& u2 : d2)
          acc.admit(detail::min_split_norm(u1, u2),
                    {{"a", *a}, {"b", *b}, {"x1s", u1}, {"x2s", u2}});
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  return est;
}

// ---- intrinsic family ----

// exact cone membership, alignment and distance-ratio relaxed by the current
// radius: for sampled cone directions nu1 at a and nu2 at b, a 1-d search
// places x = a + t nu1 so that x - b aligns with nu2 and ||x-a||/||x-b|| ~ 1.
inline ConstantEstimate estimate_itr(const SetRep& A, const SetRep& B,
                                     const Vec& xbar,
                                     const EstimatorConfig& cfg) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);

  ConstantEstimate est;
  est.kind = ConstantKind::Itr;
  est.bias = ConstantEstimate::Bias::Heuristic;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    double delta = std::max(r, cfg.angular_floor);
    detail::InfAccum acc;
    for (int i = 0; i < cfg.samples_per_radius; ++i) {
      RngStream rng(cfg.seed, 0x1177 + 0x101 * ri, i);
      if (i % 2 == 0) {
        // tied configuration: x equidistant, a and b its feet; the directions
        // x-a and x-b are exact proximal normals with exact alignments, so
        // the pair is admissible without any search
        auto tuple = detail::tied_feet_tuple(A, B, sample_ball(xbar, r, rng));
        if (!tuple) continue;
        const Vec& a = (*tuple)[0];
        const Vec& b = (*tuple)[1];
        const Vec& x = (*tuple)[2];
        if (dist(a, xbar) > r || dist(b, xbar) > r || dist(x, xbar) > r)
          continue;
        if (distance(B, a) <= cfg.exclusion_tol) continue;
        if (distance(A, b) <= cfg.exclusion_tol) continue;
        double na = dist(x, a), nb = dist(x, b);
        if (na < 1e-12 || nb < 1e-12) continue;
        Vec nu1 = (1.0 / na) * (x - a);
        Vec nu2 = (1.0 / nb) * (x - b);
        acc.admit(detail::min_split_norm(nu1, nu2),
                  {{"a", a}, {"b", b}, {"x", x}, {"x1s", nu1}, {"x2s", nu2}});
        continue;
      }
      auto a = detail::sample_in_set(A, xbar, r, rng);
      auto b = detail::sample_in_set(B, xbar, r, rng);
      if (!a || !b) continue;
      if (distance(B, *a) <= cfg.exclusion_tol) continue;  // a in A \ B
      if (distance(A, *b) <= cfg.exclusion_tol) continue;  // b in B \ A
      detail::ConeProbe ca = detail::make_cone_probe(
          A, *a, 0.5 * r, 32, cfg.seed ^ (0xc3 + i + (ri << 16)));
      detail::ConeProbe cb = detail::make_cone_probe(
          B, *b, 0.5 * r, 32, cfg.seed ^ (0xd4 + i + (ri << 16)));
      if (!ca.usable() || !cb.usable()) continue;

      std::vector<Vec> d1 = ca.anchors();
      std::vector<Vec> d2 = cb.anchors();
      Vec r1 = ca.sample_direction(xbar.n, rng);
      Vec r2 = cb.sample_direction(xbar.n, rng);
      if (norm(r1) > 0.5) d1.push_back(r1);
      if (norm(r2) > 0.5) d2.push_back(r2);

      for (const Vec& nu1 : d1)
        for (const Vec& nu2 : d2) {
          // penalty(t) = max(1 - cos(nu2, x(t)-b), |log ratio|) on a t-grid
          // refined around the best cell
          auto penalty = [&](double t) {
            Vec x = *a + t * nu1;
            Vec xb = x - *b;
            double nb = norm(xb);
            if (nb < 1e-12) return 1e9;
            double cos2 = dot(nu2, xb) / nb;
            double ratio = t / nb;
            return std::max(1.0 - cos2, std::abs(ratio - 1.0));
          };
          double lo = 1e-3 * r, hi = 3.0 * r;
          double best_t = lo, best_p = penalty(lo);
          for (int g = 0; g <= 24; ++g) {
            double t = lo + (hi - lo) * g / 24.0;
            double p = penalty(t);
            if (p < best_p) {
              best_p = p;
              best_t = t;
            }
          }
          for (int it = 0; it < 20; ++it) {
            double step = (hi - lo) * std::pow(0.5, it + 2);
            for (double t : {best_t - step, best_t + step})
              if (t > 0 && penalty(t) < best_p) {
                best_p = penalty(t);
                best_t = t;
              }
          }
          if (best_p >= delta) continue;
          Vec x = *a + best_t * nu1;
          if (dist(x, xbar) > 3.0 * r) continue;
          acc.admit(detail::min_split_norm(nu1, nu2),
                    {{"a", *a}, {"b", *b}, {"x", x}, {"x1s", nu1}, {"x2s", nu2}});
        }
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  return est;
}

// convex one-limit variant: x lives on the bisector of [a, b], the dual pair
// aligns with (x-a, x-b) exactly, and admissibility asks those directions to
// be within delta of the respective normal cones.
inline ConstantEstimate estimate_itr_c(const SetRep& A, const SetRep& B,
                                       const Vec& xbar,
                                       const EstimatorConfig& cfg) {
  cfg.validate();
  if (!A.convex() || !B.convex())
    throw NonConvexError("estimate_itr_c: both sets must be convex");
  detail::require_base_point(A, B, xbar, cfg.membership_tol);

  ConstantEstimate est;
  est.kind = ConstantKind::ItrC;
  est.bias = ConstantEstimate::Bias::Heuristic;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    double delta = std::max(r, cfg.angular_floor);
    detail::InfAccum acc;
    // every admitted pair doubles as a subdifferential sample of
    // f = max{||.-x||, ||.-x||}; the split weights are (1/2, 1/2) because the
    // distances tie, so the triple below must always pass membership
    auto admit_pair = [&](const Vec& a, const Vec& b, const ConeRep& ca,
                          const ConeRep& cb, const Vec& x) {
      if (dist(x, xbar) > r) return;
      double na = dist(x, a), nb = dist(x, b);
      if (na < 1e-12 || nb < 1e-12) return;
      if (std::abs(na - nb) > 1e-6 * std::max(1.0, na)) return;
      Vec u1 = (1.0 / na) * (x - a);
      Vec u2 = (1.0 / nb) * (x - b);
      if (cone_distance(ca, u1) >= delta) return;
      if (cone_distance(cb, u2) >= delta) return;
      SubgradientTriple trip{-0.5 * u1, -0.5 * u2, 0.5 * (u1 + u2)};
      ++est.dual_checked;
      if (subdiff_f_membership(trip, a, b, x, 1e-8)) ++est.dual_valid;
      acc.admit(detail::min_split_norm(u1, u2),
                {{"a", a}, {"b", b}, {"x", x}, {"x1s", u1}, {"x2s", u2}});
    };
    for (int i = 0; i < cfg.samples_per_radius; ++i) {
      RngStream rng(cfg.seed, 0x11c6 + 0x101 * ri, i);
      if (i % 2 == 0) {
        auto tuple = detail::tied_feet_tuple(A, B, sample_ball(xbar, r, rng));
        if (!tuple) continue;
        const Vec& ta = (*tuple)[0];
        const Vec& tb = (*tuple)[1];
        if (dist(ta, xbar) > r || dist(tb, xbar) > r) continue;
        if (distance(B, ta) <= cfg.exclusion_tol) continue;
        if (distance(A, tb) <= cfg.exclusion_tol) continue;
        if (dist(ta, tb) < 1e-12) continue;
        admit_pair(ta, tb, convex_normal_cone(A, ta, 1e-7),
                   convex_normal_cone(B, tb, 1e-7), (*tuple)[2]);
        continue;
      }
      auto a = detail::sample_in_set(A, xbar, r, rng);
      auto b = detail::sample_in_set(B, xbar, r, rng);
      if (!a || !b) continue;
      if (distance(B, *a) <= cfg.exclusion_tol) continue;
      if (distance(A, *b) <= cfg.exclusion_tol) continue;
      if (dist(*a, *b) < 1e-12) continue;
      ConeRep ca = convex_normal_cone(A, *a, 1e-7);
      ConeRep cb = convex_normal_cone(B, *b, 1e-7);

      std::vector<Vec> xs;
      // random bisector points
      for (int k = 0; k < 4; ++k)
        xs.push_back(detail::project_to_bisector(sample_ball(xbar, r, rng),
                                                 *a, *b));
      // guided: slide along cone anchor pairs until the mismatch is smallest,
      // then recenter onto the bisector
      for (const Vec& nu1 : cone_anchor_directions(ca))
        for (const Vec& nu2 : cone_anchor_directions(cb)) {
          Vec dn = nu1 - nu2;
          double den = norm2(dn);
          double t = den < 1e-12 ? 0.5 * r
                                 : -dot(*a - *b, dn) / den;
          if (t <= 0) continue;
          xs.push_back(
              detail::project_to_bisector(0.5 * ((*a + t * nu1) + (*b + t * nu2)),
                                          *a, *b));
        }

      for (const Vec& x : xs) admit_pair(*a, *b, ca, cb, x);
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  return est;
}

// two-scale variant: outer tuples as in the convex case, inner perturbations
// at scale radius^2 re-anchor the dual pair at nearby set points; the cone
// relaxation equals the outer radius.
inline ConstantEstimate estimate_itr_w(const SetRep& A, const SetRep& B,
                                       const Vec& xbar,
                                       const EstimatorConfig& cfg) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);

  const int outer_n = std::max(64, cfg.samples_per_radius / 4);
  const int inner_n = std::max(16, cfg.samples_per_radius / 16);

  ConstantEstimate est;
  est.kind = ConstantKind::ItrW;
  est.bias = ConstantEstimate::Bias::Heuristic;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    double delta = std::max(r, cfg.angular_floor);
    detail::InfAccum acc;
    for (int i = 0; i < outer_n; ++i) {
      RngStream rng(cfg.seed, 0x1138 + 0x101 * ri, i);
      std::optional<Vec> a, b;
      std::vector<Vec> xs;
      if (i % 2 == 0) {
        auto tuple = detail::tied_feet_tuple(A, B, sample_ball(xbar, r, rng));
        if (!tuple) continue;
        a = (*tuple)[0];
        b = (*tuple)[1];
        xs.push_back((*tuple)[2]);
      } else {
        a = detail::sample_in_set(A, xbar, r, rng);
        b = detail::sample_in_set(B, xbar, r, rng);
      }
      if (!a || !b) continue;
      if (dist(*a, xbar) > r || dist(*b, xbar) > r) continue;
      if (distance(B, *a) <= cfg.exclusion_tol) continue;
      if (distance(A, *b) <= cfg.exclusion_tol) continue;
      if (dist(*a, *b) < 1e-12) continue;
      // perturbations must stay small relative to the dual-pair geometry or
      // the re-anchored directions degrade into noise
      double eps = std::min(r * r, 5e-4 * dist(*a, *b));

      if (xs.empty()) {
        detail::ConeProbe ca = detail::make_cone_probe(
            A, *a, 0.5 * r, 32, cfg.seed ^ (0xe5 + i + (ri << 16)));
        detail::ConeProbe cb = detail::make_cone_probe(
            B, *b, 0.5 * r, 32, cfg.seed ^ (0xf6 + i + (ri << 16)));
        for (int k = 0; k < 2; ++k)
          xs.push_back(detail::project_to_bisector(sample_ball(xbar, r, rng),
                                                   *a, *b));
        for (const Vec& nu1 : ca.anchors())
          for (const Vec& nu2 : cb.anchors()) {
            Vec dn = nu1 - nu2;
            double den = norm2(dn);
            double t = den < 1e-12 ? 0.5 * r : -dot(*a - *b, dn) / den;
            if (t <= 0) continue;
            xs.push_back(detail::project_to_bisector(
                0.5 * ((*a + t * nu1) + (*b + t * nu2)), *a, *b));
          }
      }

      std::vector<Vec> kept;
      for (const Vec& x : xs) {
        if (dist(x, xbar) > r) continue;
        double na = dist(x, *a), nb = dist(x, *b);
        if (na < 1e-12 || nb < 1e-12) continue;
        if (std::abs(na - nb) > 1e-6 * std::max(1.0, na)) continue;
        if (cfg.strengthened_filter &&
            !(std::max(na, nb) < dist(x, xbar) + 1e-12))
          continue;
        kept.push_back(x);
        if (kept.size() >= 8) break;
      }
      if (kept.empty()) continue;

      std::vector<double> best(kept.size(),
                               std::numeric_limits<double>::infinity());
      std::vector<std::vector<WitnessPoint>> wit(kept.size());
      for (int j = 0; j < inner_n; ++j) {
        RngStream jr(cfg.seed, 0x9138 + 0x101 * ri,
                     (static_cast<std::uint64_t>(i) << 20) |
                         static_cast<std::uint64_t>(j));
        Vec ap = project(A, *a + sample_ball(Vec::zero(xbar.n), eps, jr))
                     .nearest.front();
        Vec bp = project(B, *b + sample_ball(Vec::zero(xbar.n), eps, jr))
                     .nearest.front();
        Vec x1p = *a + sample_ball(Vec::zero(xbar.n), eps, jr);
        Vec x2p = *b + sample_ball(Vec::zero(xbar.n), eps, jr);
        Vec dxp = sample_ball(Vec::zero(xbar.n), eps, jr);
        if (dist(x1p, x2p) < 1e-12) continue;
        detail::ConeProbe cap = detail::make_cone_probe(
            A, ap, 0.5 * r, 16, cfg.seed ^ (0x1e5 + i * 131 + j));
        detail::ConeProbe cbp = detail::make_cone_probe(
            B, bp, 0.5 * r, 16, cfg.seed ^ (0x1f6 + i * 131 + j));
        for (std::size_t xi = 0; xi < kept.size(); ++xi) {
          Vec xp = detail::project_to_bisector(kept[xi] + dxp, x1p, x2p);
          double m1 = dist(xp, x1p), m2 = dist(xp, x2p);
          if (m1 < 1e-12 || m2 < 1e-12) continue;
          Vec u1 = (1.0 / m1) * (xp - x1p);
          Vec u2 = (1.0 / m2) * (xp - x2p);
          if (cap.distance(u1) >= delta) continue;
          if (cbp.distance(u2) >= delta) continue;
          double v = detail::min_split_norm(u1, u2);
          if (v < best[xi]) {
            best[xi] = v;
            wit[xi] = {{"a", ap},   {"b", bp},   {"x", xp},
                       {"x1s", u1}, {"x2s", u2}};
          }
        }
      }
      for (std::size_t xi = 0; xi < kept.size(); ++xi)
        if (best[xi] < std::numeric_limits<double>::infinity())
          acc.admit(best[xi], std::move(wit[xi]));
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  return est;
}

// ---- localized slope constant ----

// outer tuples (a, b, x); the inner limsup of descent ratios of
// f(a,b,x) = max{||x-a||, ||x-b||} under the rho-scaled triple norm is probed
// by designed joint moves plus random perturbations at scales radius^2 / 2^j.
inline ConstantEstimate estimate_str1(const SetRep& A, const SetRep& B,
                                      const Vec& xbar,
                                      const EstimatorConfig& cfg) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);

  const int outer_n = std::max(64, cfg.samples_per_radius / 4);
  const int inner_random = std::max(24, cfg.samples_per_radius / 16);

  ConstantEstimate est;
  est.kind = ConstantKind::Str1;
  est.bias = ConstantEstimate::Bias::Heuristic;

  // half the outer budget goes to tied configurations, where the infimum
  // binds; the rest stays random
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    detail::InfAccum acc;
    for (int i = 0; i < outer_n; ++i) {
      RngStream rng(cfg.seed, 0x5119 + 0x101 * ri, i);
      std::optional<Vec> a, b;
      Vec x = Vec::zero(xbar.n);
      if (i % 2 == 0) {
        auto tuple = detail::tied_feet_tuple(A, B, sample_ball(xbar, r, rng));
        if (!tuple) continue;
        a = (*tuple)[0];
        b = (*tuple)[1];
        x = (*tuple)[2];
        if (dist(*a, xbar) > r || dist(*b, xbar) > r || dist(x, xbar) > r)
          continue;
      } else {
        a = detail::sample_in_set(A, xbar, r, rng);
        b = detail::sample_in_set(B, xbar, r, rng);
        x = sample_ball(xbar, r, rng);
      }
      if (!a || !b) continue;
      if (distance(B, *a) <= cfg.exclusion_tol) continue;
      if (distance(A, *b) <= cfg.exclusion_tol) continue;
      double f0 = f_max(*a, *b, x);
      if (f0 <= cfg.exclusion_tol) continue;

      double inner_max = -1.0;
      auto consider = [&](const Vec& ap, const Vec& bp, const Vec& u) {
        double cost = norm_rho_triple(ap - *a, bp - *b, u - x, r);
        if (cost < 1e-14) return;
        double drop = f0 - f_max(ap, bp, u);
        if (drop <= 0) return;
        inner_max = std::max(inner_max, drop / cost);
      };

      for (int j = 0; j < 3; ++j) {
        // keep the probe step well below f0 so curvature cannot distort the
        // first-order descent ratio
        double h = std::min(r * r, 0.01 * f0) * std::pow(0.5, j);
        // joint slide toward each other with midpoint recentering
        Vec dab = *b - *a;
        if (norm(dab) > 1e-12) {
          Vec d = normalized(dab);
          Vec ap = project(A, *a + h * d).nearest.front();
          Vec bp = project(B, *b - h * d).nearest.front();
          consider(ap, bp, x + 0.5 * ((ap - *a) + (bp - *b)));
          consider(ap, bp, x);
        }
        // steepest x-descent for the max of the two distances
        Vec xa = x - *a, xb = x - *b;
        if (norm(xa) > 1e-12 && norm(xb) > 1e-12) {
          Vec g = normalized(xa) + normalized(xb);
          if (norm(g) > 1e-12) {
            consider(*a, *b, x - h * normalized(g));
          }
        }
        // single-side slides toward the query point's feet
        Vec fa = project(A, x).nearest.front();
        Vec fb = project(B, x).nearest.front();
        if (dist(fa, *a) > 1e-12)
          consider(project(A, *a + h * normalized(fa - *a)).nearest.front(),
                   *b, x);
        if (dist(fb, *b) > 1e-12)
          consider(*a, project(B, *b + h * normalized(fb - *b)).nearest.front(),
                   x);
        // random joint probes
        for (int k = 0; k < inner_random / 3; ++k) {
          RngStream kr(cfg.seed, 0x9519 + 0x101 * ri,
                       (static_cast<std::uint64_t>(i) << 24) |
                           (static_cast<std::uint64_t>(j) << 16) |
                           static_cast<std::uint64_t>(k));
          Vec ap = project(A, *a + sample_ball(Vec::zero(x.n), h, kr))
                       .nearest.front();
          Vec bp = project(B, *b + sample_ball(Vec::zero(x.n), h, kr))
                       .nearest.front();
          Vec u = x + sample_ball(Vec::zero(x.n), h, kr);
          consider(ap, bp, u);
          consider(ap, bp, x);
          consider(*a, *b, u);
        }
      }
      if (inner_max >= 0.0)
        acc.admit(std::min(inner_max, 1.0), {{"a", *a}, {"b", *b}, {"x", x}});
    }
    detail::finish_radius(est, r, acc);
  }
  detail::finish_estimate(est);
  return est;
}

// ---- checks ----

struct SandwichReport {
  bool pass = false;
  double lower = 0.0;
  double upper = 1.0;
  double value = 0.0;
  std::string detail;
};

// two-sided bound linking str and its one-sided variant:
// 1/(2/sp + 1) - slack <= str <= sp + slack
inline SandwichReport check_str_prime_sandwich(const ConstantEstimate& str_est,
                                               const ConstantEstimate& sp_est,
                                               double slack) {
  SandwichReport rep;
  double sp = sp_est.value;
  rep.lower = sp > 0 ? 1.0 / (2.0 / sp + 1.0) : 0.0;
  rep.upper = sp;
  rep.value = str_est.value;
  rep.pass = rep.value >= rep.lower - slack && rep.value <= rep.upper + slack;
  rep.detail = "lower " + std::to_string(rep.lower) + " <= str " +
               std::to_string(rep.value) + " <= upper " +
               std::to_string(rep.upper);
  return rep;
}

struct ConeTransversalityResult {
  bool violated = false;
  Vec witness;               // a direction u with u and -u in the two cones
  double worst_angle = 3.141592653589793;  // smallest angle(u_A, -u_B) seen
};

// searches sampled limiting cones of A and B at xbar for a common direction
// u with -u in the other cone (angular tolerance); absence is only a
// heuristic certificate.
inline ConeTransversalityResult check_normal_cone_transversality(
    const SetRep& A, const SetRep& B, const Vec& xbar,
    const EstimatorConfig& cfg, double angle_tol = 0.05) {
  cfg.validate();
  detail::require_base_point(A, B, xbar, cfg.membership_tol);

  auto harvest = [&](const SetRep& S, std::uint64_t salt) {
    std::vector<Vec> dirs;
    for (const NormalSample& ns :
         limiting_normals(S, xbar, cfg.radii, cfg.samples_per_radius / 4,
                          cfg.seed ^ salt))
      dirs.push_back(ns.direction);
    if (S.convex()) {
      ConeRep c = convex_normal_cone(S, xbar, 1e-7);
      for (const Vec& g : cone_anchor_directions(c)) dirs.push_back(g);
      // coarse conic mixtures widen the reach of the pairwise scan
      for (std::size_t i = 0; i < c.generators.size(); ++i)
        for (std::size_t j = i + 1; j < c.generators.size(); ++j)
          for (double lam : {0.25, 0.5, 0.75}) {
            Vec m = lam * c.generators[i] + (1.0 - lam) * c.generators[j];
            if (norm(m) > 1e-9) dirs.push_back(normalized(m));
          }
    }
    return dirs;
  };

  std::vector<Vec> da = harvest(A, 0xaaaa);
  std::vector<Vec> db = harvest(B, 0xbbbb);

  ConeTransversalityResult res;
  res.witness = xbar;
  for (const Vec& u : da)
    for (const Vec& v : db) {
      double c = std::clamp(dot(u, -v), -1.0, 1.0);
      double ang = std::acos(c);
      if (ang < res.worst_angle) {
        res.worst_angle = ang;
        res.witness = u;
      }
    }
  res.violated = res.worst_angle < angle_tol;
  return res;
}

struct ChainReport {
  bool pass = true;
  std::vector<std::string> violations;
};

// ordering of the intrinsic family plus its relations to str
inline ChainReport check_constant_chain(const ConstantEstimate& itr,
                                        const ConstantEstimate& itr_w,
                                        const ConstantEstimate& itr_c,
                                        const ConstantEstimate& str_est,
                                        const ConstantEstimate* str1,
                                        bool convex, double slack) {
  ChainReport rep;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) {
      rep.pass = false;
      rep.violations.push_back(what);
    }
  };
  for (const ConstantEstimate* e : {&itr, &itr_w, &itr_c, &str_est})
    need(e->value >= -1e-12 && e->value <= 1.0 + 1e-12,
         std::string(e->name()) + " outside [0,1]");
  need(itr.value <= itr_w.value + slack, "itr > itr_w + slack");
  need(itr_w.value <= itr_c.value + slack, "itr_w > itr_c + slack");
  if (str1) need(str1->value <= str_est.value + slack, "str1 > str + slack");
  if (convex) {
    need(std::abs(itr_w.value - itr_c.value) <= slack,
         "|itr_w - itr_c| > slack (convex)");
    need(std::abs(itr_c.value - str_est.value) <= slack,
         "|itr_c - str| > slack (convex)");
  }
  return rep;
}

}  // namespace setreg
