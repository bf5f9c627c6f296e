#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "setreg/intersect.hpp"
#include "setreg/projections.hpp"

namespace setreg {

struct APOptions {
  int max_iters = 2000;
  double stop_tol = 1e-12;
  IntersectOptions intersect;
};

struct APTrace {
  std::vector<Vec> x_seq;  // iterates on A, starting from the projected seed
  std::vector<Vec> b_seq;  // interleaved iterates on B
  std::vector<Vec> z_seq;  // full alternating sequence x0, b0, x1, b1, ...
  std::vector<double> d_int;       // d(x_k, A cap B) per A-iterate
  std::vector<double> step_norms;  // consecutive distances along z_seq
  bool converged = false;
  Vec limit;
};

// alternating projections B-then-A from P_A(x0); ties resolve to the
// first-listed nearest point
inline APTrace run_ap(const SetRep& A, const SetRep& B, const Vec& x0,
                      const APOptions& opt = {}) {
  if (opt.max_iters < 1) throw ValidationError("max_iters", "must be >= 1");
  Intersection I(A, B, opt.intersect);

  APTrace tr;
  Vec x = project(A, x0).nearest.front();
  tr.x_seq.push_back(x);
  tr.z_seq.push_back(x);
  tr.d_int.push_back(I.distance(x));
  tr.limit = x;

  for (int k = 0; k < opt.max_iters; ++k) {
    Vec b = project(B, x).nearest.front();
    double s1 = dist(b, x);
    tr.b_seq.push_back(b);
    tr.z_seq.push_back(b);
    tr.step_norms.push_back(s1);

    Vec xn = project(A, b).nearest.front();
    double s2 = dist(xn, b);
    tr.x_seq.push_back(xn);
    tr.z_seq.push_back(xn);
    tr.step_norms.push_back(s2);
    tr.d_int.push_back(I.distance(xn));

    x = xn;
    tr.limit = x;
    if (std::max(s1, s2) <= opt.stop_tol) {
      tr.converged = true;
      break;
    }
  }
  return tr;
}

struct RateFit {
  double c = 0.0;       // fitted linear rate, clamped to [0, 1]
  double alpha = 0.0;   // fitted prefactor
  double residual = 0.0;  // rms log-residual over the fit window
  int window = 0;
};

// least-squares fit of log d_k against k over the tail half of the positive
// entries; entries at or below 1e-12 are treated as numerically zero
inline RateFit fit_rate(const std::vector<double>& d) {
  std::vector<std::pair<int, double>> pts;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 1e-12) pts.emplace_back(static_cast<int>(i), std::log(d[i]));
  if (pts.size() < 4)
    throw InsufficientData("fit_rate: fewer than 4 positive samples");

  std::size_t m = pts.size();
  std::size_t wn = std::max<std::size_t>(4, m / 2);
  std::size_t start = m - wn;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = static_cast<double>(wn);
  for (std::size_t i = start; i < m; ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += static_cast<double>(pts[i].first) * pts[i].first;
    sxy += pts[i].first * pts[i].second;
  }
  double den = n * sxx - sx * sx;
  if (den <= 0) throw InsufficientData("fit_rate: degenerate index window");
  double slope = (n * sxy - sx * sy) / den;
  double intercept = (sy - slope * sx) / n;

  RateFit fit;
  fit.c = std::clamp(std::exp(slope), 0.0, 1.0);
  fit.alpha = std::exp(intercept);
  fit.window = static_cast<int>(wn);
  double ss = 0;
  for (std::size_t i = start; i < m; ++i) {
    double e = pts[i].second - slope * pts[i].first - intercept;
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

struct MonotoneReport {
  bool pass = true;
  int first_violation = -1;
  double worst_excess = 0.0;  // largest d_{k+1} - c d_k above the floor
};

// d_{k+1} <= c d_k until the sequence drops below the noise floor
inline MonotoneReport check_linear_monotone(const std::vector<double>& d,
                                            double c,
                                            double noise_floor = 1e-11) {
  MonotoneReport rep;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (d[k] <= noise_floor) break;
    double excess = d[k + 1] - c * d[k];
    if (excess > noise_floor) {
      rep.pass = false;
      if (rep.first_violation < 0) rep.first_violation = static_cast<int>(k);
      rep.worst_excess = std::max(rep.worst_excess, excess);
    }
  }
  return rep;
}

struct JoiningReport {
  bool steps_nonincreasing = true;
  bool even_ratio_ok = true;
  bool pass = true;
  double max_even_ratio = 0.0;  // largest observed step_{j+2} / step_j
};

// steps must never grow, and every second step must contract by c
inline JoiningReport check_joining_conditions(const std::vector<double>& steps,
                                              double c,
                                              double noise_floor = 1e-11) {
  JoiningReport rep;
  for (std::size_t j = 0; j + 1 < steps.size(); ++j) {
    if (steps[j] <= noise_floor) break;
    if (steps[j + 1] > steps[j] * (1.0 + 1e-9) + noise_floor)
      rep.steps_nonincreasing = false;
  }
  for (std::size_t j = 0; j + 2 < steps.size(); ++j) {
    if (steps[j] <= noise_floor) break;
    rep.max_even_ratio = std::max(rep.max_even_ratio, steps[j + 2] / steps[j]);
    if (steps[j + 2] > c * steps[j] + noise_floor) rep.even_ratio_ok = false;
  }
  rep.pass = rep.steps_nonincreasing && rep.even_ratio_ok;
  return rep;
}

struct RateBoundReport {
  bool pass = true;
  double c = 0.0;
  double str = 0.0;
  double upper_c = 1.0;    // convex only: 1 - str^2
  double lower_str = 0.0;  // (1-c)/(3-c) convex, (1-c)/(5-c) otherwise
  std::vector<std::string> violations;
};

// quantitative links between the fitted rate and the subtransversality
// constant; the nonconvex direction assumes the monotone or joining
// behaviour was established separately
inline RateBoundReport verify_rate_bounds(double str_value, double c,
                                          bool convex, double slack) {
  RateBoundReport rep;
  rep.c = c;
  rep.str = str_value;
  if (convex) {
    rep.upper_c = 1.0 - str_value * str_value;
    rep.lower_str = (1.0 - c) / (3.0 - c);
    if (c > rep.upper_c + slack) {
      rep.pass = false;
      rep.violations.push_back("rate exceeds 1 - str^2 + slack");
    }
    if (str_value < rep.lower_str - slack) {
      rep.pass = false;
      rep.violations.push_back("str below (1-c)/(3-c) - slack");
    }
  } else {
    rep.lower_str = (1.0 - c) / (5.0 - c);
    if (str_value < rep.lower_str - slack) {
      rep.pass = false;
      rep.violations.push_back("str below (1-c)/(5-c) - slack");
    }
  }
  return rep;
}

}  // namespace setreg
