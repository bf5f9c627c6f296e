#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "setreg/altproj.hpp"
#include "setreg/constants.hpp"
#include "setreg/regmap.hpp"
#include "setreg/scenario.hpp"

namespace setreg {

struct ReportRow {
  std::string scenario;
  std::string quantity;
  double value = 0.0;
  std::string bias;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double margin = 0.0;
  double runtime_ms = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;

  bool all_pass() const {
    for (const ReportRow& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

namespace detail {

inline MappingRep make_mapping(const Scenario& sc) {
  const MappingSpec& ms = *sc.mapping;
  if (ms.kind == "pair_product")
    return MappingRep{PairProductMap{sc.A, sc.B, sc.xbar}};
  if (ms.kind == "difference")
    return MappingRep{DifferenceMap{sc.A, sc.B, sc.xbar}};
  return MappingRep{GraphPairMap{sc.A, ms.nx, ms.ny,
                                 slice_vec(sc.xbar, 0, ms.nx), ms.ybar}};
}

inline GraphPairMap make_graph_map(const Scenario& sc) {
  const MappingSpec& ms = *sc.mapping;
  return GraphPairMap{sc.A, ms.nx, ms.ny, slice_vec(sc.xbar, 0, ms.nx),
                      ms.ybar};
}

// per-scenario memo so checks and estimate rows share estimator runs
struct ScenarioCache {
  const Scenario& sc;
  std::map<std::string, ConstantEstimate> est;
  std::map<std::string, RegularityEstimate> reg;
  std::optional<APTrace> trace;

  explicit ScenarioCache(const Scenario& s) : sc(s) {}

  const ConstantEstimate& constant(const std::string& q) {
    auto it = est.find(q);
    if (it != est.end()) return it->second;
    ConstantEstimate e;
    if (q == "str") e = estimate_str(sc.A, sc.B, sc.xbar, sc.config);
    else if (q == "str_prime")
      e = estimate_str_prime(sc.A, sc.B, sc.xbar, sc.config);
    else if (q == "tr") e = estimate_tr(sc.A, sc.B, sc.xbar, sc.config);
    else if (q == "tr_dual")
      e = estimate_tr_dual(sc.A, sc.B, sc.xbar, sc.config);
    else if (q == "str1") e = estimate_str1(sc.A, sc.B, sc.xbar, sc.config);
    else if (q == "itr") e = estimate_itr(sc.A, sc.B, sc.xbar, sc.config);
    else if (q == "itr_w") e = estimate_itr_w(sc.A, sc.B, sc.xbar, sc.config);
    else if (q == "itr_c") e = estimate_itr_c(sc.A, sc.B, sc.xbar, sc.config);
    else throw ArgumentError("unknown constant '" + q + "'");
    return est.emplace(q, std::move(e)).first->second;
  }

  const RegularityEstimate& regularity(const std::string& q) {
    auto it = reg.find(q);
    if (it != reg.end()) return it->second;
    if (!sc.mapping) throw ArgumentError("scenario has no mapping");
    RegularityEstimate e = q == "rg" ? estimate_rg(make_mapping(sc), sc.config)
                                     : estimate_srg(make_mapping(sc),
                                                    sc.config);
    return reg.emplace(q, std::move(e)).first->second;
  }

  const APTrace& ap() {
    if (!trace) {
      if (!sc.ap) throw ArgumentError("scenario has no ap section");
      APOptions opt;
      opt.max_iters = sc.ap->max_iters;
      opt.intersect = sc.config.intersect;
      trace = run_ap(sc.A, sc.B, sc.ap->x0, opt);
    }
    return *trace;
  }
};

struct QuantityResult {
  double value = 0.0;
  std::string bias;
};

inline QuantityResult compute_quantity(ScenarioCache& cache,
                                       const std::string& q) {
  if (q == "rg" || q == "srg") return {cache.regularity(q).value, "upper"};
  if (q == "ap_rate") return {fit_rate(cache.ap().d_int).c, "fit"};
  const ConstantEstimate& e = cache.constant(q);
  return {e.value, e.bias == ConstantEstimate::Bias::UpperBound ? "upper"
                                                                : "heuristic"};
}

// establish a linear rate certificate and test the quantitative link to str
inline bool run_rate_bounds(ScenarioCache& cache) {
  const Scenario& sc = cache.sc;
  const APTrace& tr = cache.ap();
  RateFit fit = fit_rate(tr.d_int);
  bool convex = sc.A.convex() && sc.B.convex();
  double str_value = cache.constant("str").value;
  const double floor = 1e-11;

  double c_used;
  bool established;
  if (sc.ap->mode == "monotone") {
    double c_emp = 0.0;
    for (std::size_t k = 0; k + 1 < tr.d_int.size(); ++k) {
      if (tr.d_int[k] <= floor) break;
      c_emp = std::max(c_emp, tr.d_int[k + 1] / tr.d_int[k]);
    }
    c_used = std::max(fit.c, c_emp);
    established = c_used < 1.0 - 1e-9 &&
                  check_linear_monotone(tr.d_int, c_used, floor).pass;
  } else {
    JoiningReport probe = check_joining_conditions(tr.step_norms, 1.0, floor);
    c_used = probe.max_even_ratio > 0 ? probe.max_even_ratio : fit.c;
    established =
        c_used < 1.0 - 1e-9 &&
        check_joining_conditions(tr.step_norms, c_used * (1 + 1e-9), floor)
            .pass;
  }
  if (!established) return false;
  return verify_rate_bounds(str_value, c_used, convex, sc.config.slack).pass;
}

inline bool run_check(ScenarioCache& cache, const std::string& name) {
  const Scenario& sc = cache.sc;
  const EstimatorConfig& cfg = sc.config;
  if (name == "str_prime_sandwich")
    return check_str_prime_sandwich(cache.constant("str"),
                                    cache.constant("str_prime"), cfg.slack)
        .pass;
  if (name == "cone_transversality") {
    ConeTransversalityResult res =
        check_normal_cone_transversality(sc.A, sc.B, sc.xbar, cfg);
    return res.violated == sc.cone_violation_expected;
  }
  if (name == "chain") {
    bool convex = sc.A.convex() && sc.B.convex();
    const ConstantEstimate& itr = cache.constant("itr");
    const ConstantEstimate& itr_w = cache.constant("itr_w");
    const ConstantEstimate& str = cache.constant("str");
    if (convex) {
      const ConstantEstimate& itr_c = cache.constant("itr_c");
      const ConstantEstimate& str1 = cache.constant("str1");
      return check_constant_chain(itr, itr_w, itr_c, str, &str1, true,
                                  cfg.slack)
          .pass;
    }
    return check_constant_chain(itr, itr_w, itr_w, str, nullptr, false,
                                cfg.slack)
        .pass;
  }
  if (name == "pair_product")
    return check_pair_product(sc.A, sc.B, sc.xbar, cfg).pass;
  if (name == "graph_pair")
    return check_graph_pair(make_graph_map(sc), cfg).pass;
  if (name == "difference_map")
    return check_difference_map(sc.A, sc.B, sc.xbar, cfg).pass;
  if (name == "rate_bounds") return run_rate_bounds(cache);
  throw ArgumentError("unknown check '" + name + "'");
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count();
}

}  // namespace detail

inline std::vector<ReportRow> run_scenario(const Scenario& sc) {
  detail::ScenarioCache cache(sc);
  std::vector<ReportRow> rows;

  for (const ExpectedValue& ev : sc.estimates) {
    ReportRow row;
    row.scenario = sc.name;
    row.quantity = ev.quantity;
    row.expected = ev.expected;
    row.tolerance = ev.tolerance;
    auto t0 = std::chrono::steady_clock::now();
    try {
      detail::QuantityResult qr = detail::compute_quantity(cache, ev.quantity);
      row.value = qr.value;
      row.bias = qr.bias;
      row.margin = ev.tolerance - std::abs(row.value - ev.expected);
      row.pass = row.margin >= 0.0;
    } catch (const std::exception&) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.bias = "error";
      row.margin = -std::numeric_limits<double>::infinity();
      row.pass = false;
    }
    row.runtime_ms = detail::elapsed_ms(t0);
    rows.push_back(row);
  }

  for (const std::string& name : sc.checks) {
    ReportRow row;
    row.scenario = sc.name;
    row.quantity = "check:" + name;
    row.expected = 1.0;
    row.tolerance = 0.5;
    row.bias = "check";
    auto t0 = std::chrono::steady_clock::now();
    try {
      row.value = detail::run_check(cache, name) ? 1.0 : 0.0;
      row.margin = row.tolerance - std::abs(row.value - row.expected);
      row.pass = row.margin >= 0.0;
    } catch (const std::exception&) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.bias = "error";
      row.margin = -std::numeric_limits<double>::infinity();
      row.pass = false;
    }
    row.runtime_ms = detail::elapsed_ms(t0);
    rows.push_back(row);
  }
  return rows;
}

inline Report run_battery(const std::vector<Scenario>& scenarios,
                          int threads = 0) {
  if (threads <= 0)
    threads = static_cast<int>(
        std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::vector<ReportRow>> results(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= scenarios.size()) break;
      results[i] = run_scenario(scenarios[i]);
    }
  };
  std::vector<std::thread> pool;
  std::size_t nw =
      std::min<std::size_t>(static_cast<std::size_t>(threads),
                            std::max<std::size_t>(1, scenarios.size()));
  for (std::size_t t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  Report rep;
  for (const auto& rs : results)
    rep.rows.insert(rep.rows.end(), rs.begin(), rs.end());
  return rep;
}

namespace detail {

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace detail

inline std::string to_csv(const Report& rep) {
  std::string out =
      "scenario,quantity,value,bias,expected,tolerance,pass,margin,"
      "runtime_ms\n";
  for (const ReportRow& r : rep.rows) {
    out += r.scenario + "," + r.quantity + "," + detail::fmt_num(r.value) +
           "," + r.bias + "," + detail::fmt_num(r.expected) + "," +
           detail::fmt_num(r.tolerance) + "," + (r.pass ? "1" : "0") + "," +
           detail::fmt_num(r.margin) + "," + detail::fmt_num(r.runtime_ms) +
           "\n";
  }
  return out;
}

inline std::string to_markdown(const Report& rep) {
  std::string out =
      "| scenario | quantity | value | bias | expected | tolerance | pass | "
      "margin | runtime_ms |\n"
      "|---|---|---|---|---|---|---|---|---|\n";
  for (const ReportRow& r : rep.rows) {
    out += "| " + r.scenario + " | " + r.quantity + " | " +
           detail::fmt_num(r.value) + " | " + r.bias + " | " +
           detail::fmt_num(r.expected) + " | " + detail::fmt_num(r.tolerance) +
           " | " + (r.pass ? "yes" : "no") + " | " + detail::fmt_num(r.margin) +
           " | " + detail::fmt_num(r.runtime_ms) + " |\n";
  }
  return out;
}

}  // namespace setreg
