// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Scenario inputs come from the shipped corpus directory.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <setreg/setreg.hpp>

using namespace setreg;

namespace {

int g_failures = 0;

void report(const std::string& tag, bool ok, const std::string& detail) {
  std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", tag.c_str(),
              detail.c_str());
  if (!ok) ++g_failures;
}

const Scenario& by_name(const std::vector<Scenario>& scs,
                        const std::string& name) {
  for (const Scenario& s : scs)
    if (s.name == name) return s;
  std::fprintf(stderr, "missing scenario '%s'\n", name.c_str());
  std::exit(2);
}

const ReportRow* row(const Report& rep, const std::string& scenario,
                     const std::string& quantity) {
  for (const ReportRow& r : rep.rows)
    if (r.scenario == scenario && r.quantity == quantity) return &r;
  return nullptr;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int main() {
  const std::string dir = SETREG_SCENARIO_DIR;
  const char* names[] = {"same_line",      "orthogonal_lines",
                         "line45",         "halfplanes",
                         "tangent_balls",  "union_axes_vs_diagonal",
                         "identity_graph", "scaled_map_2x",
                         "constant_map"};
  std::vector<Scenario> scs;
  for (const char* n : names)
    scs.push_back(load_scenario(dir + "/" + n + ".json"));

  Report rep = run_battery(scs, 0);

  // 1: identical lines give the unit constant to machine-level accuracy
  {
    const ReportRow* r = row(rep, "same_line", "str");
    bool ok = r && std::abs(r->value - 1.0) <= 1e-6;
    report("1", ok,
           "A = B gives str = " + (r ? fmt(r->value) : "<missing>") +
               " (want 1 +- 1e-6)");
  }

  // 2: identical lines give a vanishing translated constant
  {
    const ReportRow* r = row(rep, "same_line", "tr");
    bool ok = r && r->value <= 0.05;
    report("2", ok,
           "A = B gives tr = " + (r ? fmt(r->value) : "<missing>") +
               " at the finest radius (want <= 0.05)");
  }

  // 3: orthogonal lines put the whole family at 1/sqrt(2)
  {
    bool ok = true;
    std::string vals;
    for (const char* q : {"str", "tr", "tr_dual", "itr", "itr_c"}) {
      const ReportRow* r = row(rep, "orthogonal_lines", q);
      double v = r ? r->value : -1.0;
      ok = ok && r && std::abs(v - 0.70710678) <= 0.02;
      vals += std::string(q) + "=" + fmt(v) + " ";
    }
    report("3", ok, vals + "(want all 0.7071 +- 0.02)");
  }

  // 4: one-sided sandwich on every convex scenario
  {
    bool ok = true;
    std::string worst;
    for (const Scenario& sc : scs) {
      if (!(sc.A.convex() && sc.B.convex())) continue;
      double str = estimate_str(sc.A, sc.B, sc.xbar, sc.config).value;
      double sp = estimate_str_prime(sc.A, sc.B, sc.xbar, sc.config).value;
      double lower = sp > 0 ? 1.0 / (2.0 / sp + 1.0) : 0.0;
      bool here = str >= lower - 0.05 && str <= sp + 0.05;
      if (!here) worst += sc.name + " ";
      ok = ok && here;
    }
    report("4", ok,
           ok ? "1/(2/str'+1) - 0.05 <= str <= str' + 0.05 on all convex "
                "scenarios"
              : "sandwich fails on: " + worst);
  }

  // 5: product-space mapping carries tr and str exactly
  {
    bool ok = true;
    std::string detail;
    for (const char* n :
         {"orthogonal_lines", "line45", "tangent_balls", "same_line"}) {
      const Scenario& sc = by_name(scs, n);
      MapBridgeReport pp = check_pair_product(sc.A, sc.B, sc.xbar, sc.config);
      bool here = std::abs(pp.tr - pp.rg) <= 0.05 &&
                  std::abs(pp.str - pp.srg) <= 0.05;
      if (!here)
        detail += std::string(n) + "(dtr=" + fmt(std::abs(pp.tr - pp.rg)) +
                  ",dstr=" + fmt(std::abs(pp.str - pp.srg)) + ") ";
      ok = ok && here;
    }
    report("5", ok,
           ok ? "|tr - rg| <= 0.05 and |str - srg| <= 0.05 on all four pairs"
              : "mismatch on: " + detail);
  }

  // 6: graph-pair and difference-map sandwiches, four bound chains
  {
    const Scenario& gid = by_name(scs, "identity_graph");
    MapBridgeReport gp =
        check_graph_pair(detail::make_graph_map(gid), gid.config);
    const Scenario& orth = by_name(scs, "orthogonal_lines");
    MapBridgeReport dm =
        check_difference_map(orth.A, orth.B, orth.xbar, orth.config);
    bool ok = gp.pass && dm.pass;
    report("6", ok,
           "graph pair tr=" + fmt(gp.tr) + " in [" + fmt(gp.lower) + ", " +
               fmt(gp.upper) + "], difference map tr=" + fmt(dm.tr) + " in [" +
               fmt(dm.lower) + ", " + fmt(dm.upper) + "] (slack 0.05)");
  }

  // 7: linear rates versus the constants, convex and joining flavors
  {
    const Scenario& l45 = by_name(scs, "line45");
    APTrace tr45 = run_ap(l45.A, l45.B, l45.ap->x0);
    double c = fit_rate(tr45.d_int).c;
    double str45 = estimate_str(l45.A, l45.B, l45.xbar, l45.config).value;
    bool ok45 = std::abs(c - 0.5) <= 0.02 &&
                c <= 1.0 - str45 * str45 + 0.05 &&
                str45 >= (1.0 - c) / (3.0 - c) - 0.05;

    const Scenario& un = by_name(scs, "union_axes_vs_diagonal");
    APTrace trun = run_ap(un.A, un.B, un.ap->x0);
    JoiningReport probe = check_joining_conditions(trun.step_norms, 1.0);
    double cu = probe.max_even_ratio;
    bool joined =
        cu > 0 && cu < 1.0 &&
        check_joining_conditions(trun.step_norms, cu * (1.0 + 1e-9)).pass;
    double strun = estimate_str(un.A, un.B, un.xbar, un.config).value;
    bool okun = joined && strun >= (1.0 - cu) / (5.0 - cu) - 0.05;

    report("7", ok45 && okun,
           "line45 c=" + fmt(c) + ", str=" + fmt(str45) + "; union joining c=" +
               fmt(cu) + ", str=" + fmt(strun));
  }

  // 8: intrinsic chain on every scenario, convex collapse included
  {
    bool ok = true;
    std::string detail;
    for (const Scenario& sc : scs) {
      bool convex = sc.A.convex() && sc.B.convex();
      double itr = estimate_itr(sc.A, sc.B, sc.xbar, sc.config).value;
      double itw = estimate_itr_w(sc.A, sc.B, sc.xbar, sc.config).value;
      double itc = convex
                       ? estimate_itr_c(sc.A, sc.B, sc.xbar, sc.config).value
                       : itw;
      bool here = itr <= itw + 0.05 && itw + 0.05 <= itc + 0.10;
      if (convex) {
        double str = estimate_str(sc.A, sc.B, sc.xbar, sc.config).value;
        here = here && std::abs(itc - str) <= 0.05;
      }
      if (!here) detail += sc.name + " ";
      ok = ok && here;
    }
    report("8", ok,
           ok ? "itr <= itr_w + 0.05 <= itr_c + 0.10 on all scenarios, "
                "|itr_c - str| <= 0.05 when convex"
              : "chain fails on: " + detail);
  }

  // 9a: projection laws over 10000 random queries
  {
    struct Entry {
      SetRep S;
      bool convex;
    };
    std::vector<Entry> sets;
    sets.push_back(
        {as_set(make_affine(Vec::zero(2), {Vec::unit(2, 0)})), true});
    sets.push_back({as_set(make_ball(Vec{0.3, -0.2}, 0.8)), true});
    sets.push_back({as_set(make_polyhedron({Halfspace{Vec{1.0, 1.0}, 0.0},
                                            Halfspace{Vec{1.0, -1.0}, 0.0}},
                                           Vec{-1.0, 0.0})),
                    true});
    sets.push_back({as_set(make_polytope({Vec{0.0, 0.0}, Vec{1.0, 0.0},
                                          Vec{1.0, 1.0}, Vec{0.0, 1.0}})),
                    true});
    sets.push_back(
        {SetRep{make_union({make_affine(Vec::zero(2), {Vec::unit(2, 0)}),
                            make_affine(Vec::zero(2), {Vec::unit(2, 1)})})},
         false});

    RngStream rng(90210, 0, 0);
    long queries = 0, bad = 0;
    for (int q = 0; q < 2000; ++q)
      for (const auto& e : sets) {
        Vec x = sample_ball(Vec::zero(2), 3.0, rng);
        ++queries;
        auto pr = project(e.S, x);
        const Vec& p = pr.nearest.front();
        if (dist(project(e.S, p).nearest.front(), p) > 1e-9) ++bad;
        if (std::abs(pr.dist - dist(x, p)) > 1e-12) ++bad;
        Vec y =
            project(e.S, sample_ball(Vec::zero(2), 3.0, rng)).nearest.front();
        if (pr.dist > dist(x, y) + 1e-9) ++bad;
        if (e.convex) {
          Vec z = sample_ball(Vec::zero(2), 3.0, rng);
          Vec pz = project(e.S, z).nearest.front();
          if (dist(p, pz) > dist(x, z) + 1e-9) ++bad;
        }
      }
    report("9a", bad == 0 && queries == 10000,
           "idempotence, optimality, nonexpansiveness over " +
               std::to_string(queries) + " queries, " + std::to_string(bad) +
               " violations");
  }

  // 9b: estimates are bit-identical under fixed seeds
  {
    const Scenario& orth = by_name(scs, "orthogonal_lines");
    bool ok =
        estimate_str(orth.A, orth.B, orth.xbar, orth.config).value ==
            estimate_str(orth.A, orth.B, orth.xbar, orth.config).value &&
        estimate_itr(orth.A, orth.B, orth.xbar, orth.config).value ==
            estimate_itr(orth.A, orth.B, orth.xbar, orth.config).value &&
        estimate_tr(orth.A, orth.B, orth.xbar, orth.config).value ==
            estimate_tr(orth.A, orth.B, orth.xbar, orth.config).value;
    report("9b", ok, "repeated runs with fixed seeds agree bit-for-bit");
  }

  // 9c: doubling the sample budget never raises an infimum estimate
  {
    bool ok = true;
    std::string detail;
    for (const char* n : {"orthogonal_lines", "line45"}) {
      const Scenario& sc = by_name(scs, n);
      EstimatorConfig dense = sc.config;
      dense.samples_per_radius *= 2;
      using Est = ConstantEstimate (*)(const SetRep&, const SetRep&,
                                       const Vec&, const EstimatorConfig&);
      Est ests[] = {estimate_str, estimate_str_prime, estimate_tr,
                    estimate_tr_dual, estimate_itr, estimate_itr_c,
                    estimate_itr_w};
      const char* qn[] = {"str", "str_prime", "tr", "tr_dual", "itr",
                          "itr_c", "itr_w"};
      for (int k = 0; k < 7; ++k) {
        double coarse = ests[k](sc.A, sc.B, sc.xbar, sc.config).value;
        double fine = ests[k](sc.A, sc.B, sc.xbar, dense).value;
        if (fine > coarse + 1e-12) {
          ok = false;
          detail += std::string(n) + ":" + qn[k] + " ";
        }
      }
    }
    report("9c", ok,
           ok ? "refinement monotonicity holds for all infimum estimators"
              : "refinement raised: " + detail);
  }

  // 9d: every dual sample generated by the convex estimator verifies
  {
    bool ok = true;
    long checked = 0;
    for (const char* n : {"orthogonal_lines", "line45", "tangent_balls"}) {
      const Scenario& sc = by_name(scs, n);
      auto est = estimate_itr_c(sc.A, sc.B, sc.xbar, sc.config);
      checked += est.dual_checked;
      ok = ok && est.dual_checked > 0 && est.dual_valid == est.dual_checked;
    }
    report("9d", ok,
           "subdifferential membership verified for " +
               std::to_string(checked) + " generated dual samples");
  }

  // 9e: the normal-cone criterion separates the model pairs
  {
    const Scenario& same = by_name(scs, "same_line");
    const Scenario& orth = by_name(scs, "orthogonal_lines");
    bool ok =
        check_normal_cone_transversality(same.A, same.B, same.xbar,
                                         same.config)
            .violated &&
        !check_normal_cone_transversality(orth.A, orth.B, orth.xbar,
                                          orth.config)
             .violated;
    report("9e", ok,
           "violation detected for A = B, none for orthogonal lines");
  }

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion line(s) failed\n", g_failures);
  return 1;
}
