#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "setreg/constants.hpp"
#include "setreg/intersect.hpp"
#include "setreg/projections.hpp"

namespace setreg {

// F(x) = (A - x) x (B - x) on the max product norm
struct PairProductMap {
  SetRep A, B;
  Vec xbar;
};

// G(x1, x2) = {x1 - x2} on A x B with the Euclidean product norm
struct DifferenceMap {
  SetRep A, B;
  Vec xbar;
};

// mapping given by its graph in R^{nx+ny}
struct GraphPairMap {
  SetRep gph;
  int nx = 0, ny = 0;
  Vec xbar, ybar;
};

struct MappingRep {
  std::variant<PairProductMap, DifferenceMap, GraphPairMap> v;
};

struct RegularityEstimate {
  std::string name;  // "rg" or "srg"
  double value = std::numeric_limits<double>::infinity();  // not clamped
  bool infinite = false;  // nothing admissible at the final radius
  std::vector<PerRadius> per_radius;
};

namespace detail {

inline Vec join_vec(const Vec& x, const Vec& y) {
  Vec z = Vec::zero(x.n + y.n);
  for (int i = 0; i < x.n; ++i) z.c[i] = x.c[i];
  for (int i = 0; i < y.n; ++i) z.c[x.n + i] = y.c[i];
  return z;
}

inline Vec slice_vec(const Vec& z, int from, int len) {
  Vec out = Vec::zero(len);
  for (int i = 0; i < len; ++i) out.c[i] = z.c[from + i];
  return out;
}

// coordinate-axis affine through `point` spanning indices [from, from+len)
inline SetRep axis_affine(const Vec& point, int from, int len) {
  std::vector<Vec> basis;
  for (int i = 0; i < len; ++i) basis.push_back(Vec::unit(point.n, from + i));
  return as_set(make_affine(point, basis));
}

struct FwdInv {
  std::optional<double> fwd;  // d(y, F(x)); nullopt when F(x) is empty
  std::optional<double> inv;  // d(x, F^{-1}(y)); nullopt when empty
};

inline FwdInv eval_pair_product(const PairProductMap& m, const Vec& x,
                                const Vec& y1, const Vec& y2,
                                const IntersectOptions& opt) {
  FwdInv r;
  r.fwd = std::max(distance(m.A, y1 + x), distance(m.B, y2 + x));
  try {
    Intersection I(translate(m.A, -y1), translate(m.B, -y2), opt);
    r.inv = I.distance(x);
  } catch (const EmptyIntersection&) {
  }
  return r;
}

inline FwdInv eval_difference(const DifferenceMap& m, const Vec& a,
                              const Vec& b, const Vec& y,
                              const IntersectOptions& opt) {
  FwdInv r;
  Vec gap = a - b - y;
  r.fwd = norm(gap);
  try {
    Intersection I(translate(m.A, -0.5 * y), translate(m.B, 0.5 * y), opt);
    double dm = I.distance(0.5 * (a + b));
    r.inv = std::sqrt(2.0 * dm * dm + 0.5 * norm2(gap));
  } catch (const EmptyIntersection&) {
  }
  return r;
}

inline FwdInv eval_graph_pair(const GraphPairMap& m, const Vec& x,
                              const Vec& y, const IntersectOptions& opt) {
  FwdInv r;
  Vec z = join_vec(x, y);
  try {
    Intersection Sx(m.gph, axis_affine(join_vec(x, Vec::zero(m.ny)), m.nx,
                                       m.ny),
                    opt);
    r.fwd = Sx.distance(z);
  } catch (const EmptyIntersection&) {
  }
  try {
    Intersection Sy(m.gph, axis_affine(join_vec(Vec::zero(m.nx), y), 0, m.nx),
                    opt);
    r.inv = Sy.distance(z);
  } catch (const EmptyIntersection&) {
  }
  return r;
}

}  // namespace detail

// regularity constant: largest alpha with alpha d(x, F^{-1}(y)) <= d(y, F(x))
// for (x, y) near the reference pair; y is pinned to ybar for the
// subregularity variant
inline RegularityEstimate estimate_regularity(const MappingRep& map,
                                              const EstimatorConfig& cfg,
                                              bool subregular) {
  cfg.validate();
  RegularityEstimate est;
  est.name = subregular ? "srg" : "rg";

  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double r = cfg.radii[ri];
    double inf = std::numeric_limits<double>::infinity();
    long adm = 0, n_empty = 0;

    for (int i = 0; i < cfg.samples_per_radius; ++i) {
      RngStream rng(cfg.seed, (subregular ? 0x5269 : 0x7269) + 0x101 * ri, i);
      detail::FwdInv fi;

      if (const auto* pp = std::get_if<PairProductMap>(&map.v)) {
        Vec x = sample_ball(pp->xbar, r, rng);
        Vec y1 = Vec::zero(pp->xbar.n), y2 = Vec::zero(pp->xbar.n);
        if (!subregular) {
          y1 = sample_ball(Vec::zero(pp->xbar.n), r, rng);
          y2 = sample_ball(Vec::zero(pp->xbar.n), r, rng);
        }
        fi = detail::eval_pair_product(*pp, x, y1, y2, cfg.intersect);
      } else if (const auto* dm = std::get_if<DifferenceMap>(&map.v)) {
        Vec a = project(dm->A, sample_ball(dm->xbar, r, rng)).nearest.front();
        Vec b = project(dm->B, sample_ball(dm->xbar, r, rng)).nearest.front();
        double da = dist(a, dm->xbar), db = dist(b, dm->xbar);
        if (std::sqrt(da * da + db * db) > r) continue;
        Vec y = subregular ? Vec::zero(dm->xbar.n)
                           : sample_ball(Vec::zero(dm->xbar.n), r, rng);
        fi = detail::eval_difference(*dm, a, b, y, cfg.intersect);
      } else {
        const auto& gp = std::get<GraphPairMap>(map.v);
        Vec x = sample_ball(gp.xbar, r, rng);
        Vec y = subregular ? gp.ybar : sample_ball(gp.ybar, r, rng);
        fi = detail::eval_graph_pair(gp, x, y, cfg.intersect);
      }

      if (!fi.fwd) continue;  // condition is vacuous at this sample
      if (!fi.inv) {
        ++n_empty;  // empty preimage defeats every positive alpha
        ++adm;
        inf = 0.0;
        continue;
      }
      if (*fi.inv <= cfg.exclusion_tol) continue;
      ++adm;
      inf = std::min(inf, *fi.fwd / *fi.inv);
    }

    PerRadius pr;
    pr.radius = r;
    pr.n_admissible = adm;
    pr.n_empty_translations = n_empty;
    pr.inf_value =
        adm > 0 ? inf : std::numeric_limits<double>::infinity();
    est.per_radius.push_back(pr);
  }

  const PerRadius& last = est.per_radius.back();
  est.value = last.inf_value;
  est.infinite = last.n_admissible == 0;
  return est;
}

inline RegularityEstimate estimate_rg(const MappingRep& map,
                                      const EstimatorConfig& cfg) {
  return estimate_regularity(map, cfg, false);
}

inline RegularityEstimate estimate_srg(const MappingRep& map,
                                       const EstimatorConfig& cfg) {
  return estimate_regularity(map, cfg, true);
}

struct MapBridgeReport {
  bool pass = true;
  double tr = 0.0, rg = 0.0, str = 0.0, srg = 0.0;
  double lower = 0.0, upper = std::numeric_limits<double>::infinity();
  std::vector<std::string> violations;
};

// the product mapping carries both constants exactly: tr = rg and str = srg
inline MapBridgeReport check_pair_product(const SetRep& A, const SetRep& B,
                                          const Vec& xbar,
                                          const EstimatorConfig& cfg) {
  MappingRep map{PairProductMap{A, B, xbar}};
  MapBridgeReport rep;
  rep.tr = estimate_tr(A, B, xbar, cfg).value;
  rep.str = estimate_str(A, B, xbar, cfg).value;
  rep.rg = std::min(estimate_rg(map, cfg).value, 1.0);
  rep.srg = std::min(estimate_srg(map, cfg).value, 1.0);
  if (std::abs(rep.tr - rep.rg) > cfg.slack) {
    rep.pass = false;
    rep.violations.push_back("|tr - rg| > slack");
  }
  if (std::abs(rep.str - rep.srg) > cfg.slack) {
    rep.pass = false;
    rep.violations.push_back("|str - srg| > slack");
  }
  return rep;
}

// graph-vs-horizontal-slice pair: 1/(2/rg + 1) <= tr <= min(rg/2, 1), checked
// with slack since the exact identities live on the max product norm
inline MapBridgeReport check_graph_pair(const GraphPairMap& gp,
                                        const EstimatorConfig& cfg) {
  MappingRep map{gp};
  MapBridgeReport rep;
  rep.rg = estimate_rg(map, cfg).value;

  Vec anchor = detail::join_vec(gp.xbar, gp.ybar);
  SetRep Bbar = detail::axis_affine(anchor, 0, gp.nx);
  rep.tr = estimate_tr(gp.gph, Bbar, anchor, cfg).value;

  rep.lower = rep.rg > 0 ? 1.0 / (2.0 / rep.rg + 1.0) : 0.0;
  rep.upper = std::min(rep.rg / 2.0, 1.0);
  if (rep.tr < rep.lower - cfg.slack) {
    rep.pass = false;
    rep.violations.push_back("tr below 1/(2/rg + 1) - slack");
  }
  if (rep.tr > rep.upper + cfg.slack) {
    rep.pass = false;
    rep.violations.push_back("tr above min(rg/2, 1) + slack");
  }
  return rep;
}

// difference mapping on the Euclidean product:
// 1/(2/rg + 1) <= tr <= 1/sqrt(2/rg^2 - 1), upper infinite once rg >= sqrt(2)
inline MapBridgeReport check_difference_map(const SetRep& A, const SetRep& B,
                                            const Vec& xbar,
                                            const EstimatorConfig& cfg) {
  MappingRep map{DifferenceMap{A, B, xbar}};
  MapBridgeReport rep;
  rep.rg = estimate_rg(map, cfg).value;
  rep.srg = estimate_srg(map, cfg).value;
  rep.tr = estimate_tr(A, B, xbar, cfg).value;

  double v = rep.rg;
  rep.lower = v > 0 ? 1.0 / (2.0 / v + 1.0) : 0.0;
  if (v <= 0) {
    rep.upper = 0.0;
  } else if (v >= std::sqrt(2.0) - 1e-12) {
    rep.upper = std::numeric_limits<double>::infinity();
  } else {
    rep.upper = 1.0 / std::sqrt(2.0 / (v * v) - 1.0);
  }
  if (rep.tr < rep.lower - cfg.slack) {
    rep.pass = false;
    rep.violations.push_back("tr below 1/(2/rg + 1) - slack");
  }
  if (rep.tr > rep.upper + cfg.slack) {
    rep.pass = false;
    rep.violations.push_back("tr above the difference-map upper bound");
  }
  return rep;
}

}  // namespace setreg
