#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "setreg/errors.hpp"
#include "setreg/rng.hpp"

namespace setreg {

inline constexpr int kMaxDim = 8;

// Dense vector in R^n, 1 <= n <= 8, inline storage.
struct Vec {
  std::array<double, kMaxDim> c{};
  int n = 0;

  Vec() = default;
  explicit Vec(int dim) : n(dim) {
    if (dim < 1 || dim > kMaxDim)
      throw DimensionMismatch("Vec: dimension " + std::to_string(dim) +
                              " outside [1, " + std::to_string(kMaxDim) + "]");
  }
  Vec(std::initializer_list<double> xs) : n(static_cast<int>(xs.size())) {
    if (n < 1 || n > kMaxDim)
      throw DimensionMismatch("Vec: initializer size outside [1, 8]");
    int i = 0;
    for (double x : xs) c[i++] = x;
  }

  static Vec zero(int dim) { return Vec(dim); }

  static Vec unit(int dim, int axis) {
    Vec v(dim);
    v[axis] = 1.0;
    return v;
  }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n; ++i) c[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }
};

inline void require_same_dim(const Vec& a, const Vec& b, const char* where) {
  if (a.n != b.n)
    throw DimensionMismatch(std::string(where) + ": dimensions " +
                            std::to_string(a.n) + " vs " + std::to_string(b.n));
}

inline double dot(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

inline Vec normalized(const Vec& a) {
  double m = norm(a);
  if (m == 0.0) throw ArgumentError("normalized: zero vector");
  return (1.0 / m) * a;
}

inline bool approx_eq(const Vec& a, const Vec& b, double tol) {
  return a.n == b.n && dist(a, b) <= tol;
}

// Euclidean ambient norm; all set distances in the library use it.
inline double norm_euclid(const Vec& a) { return norm(a); }

// max{||x||, rho ||x1||, rho ||x2||} on triples (x1, x2, x)
inline double norm_rho_triple(const Vec& x1, const Vec& x2, const Vec& x,
                              double rho) {
  if (rho <= 0.0) throw ArgumentError("norm_rho_triple: rho must be positive");
  require_same_dim(x1, x, "norm_rho_triple");
  require_same_dim(x2, x, "norm_rho_triple");
  return std::max(norm(x), rho * std::max(norm(x1), norm(x2)));
}

// dual pairing partner of norm_rho_triple: ||xs|| + (||x1s|| + ||x2s||)/rho
inline double dual_norm_rho_triple(const Vec& x1s, const Vec& x2s,
                                   const Vec& xs, double rho) {
  if (rho <= 0.0)
    throw ArgumentError("dual_norm_rho_triple: rho must be positive");
  require_same_dim(x1s, xs, "dual_norm_rho_triple");
  require_same_dim(x2s, xs, "dual_norm_rho_triple");
  return norm(xs) + (norm(x1s) + norm(x2s)) / rho;
}

// f(x1, x2, x) = max{||x1 - x||, ||x2 - x||}
inline double f_max(const Vec& x1, const Vec& x2, const Vec& x) {
  require_same_dim(x1, x, "f_max");
  require_same_dim(x2, x, "f_max");
  return std::max(dist(x1, x), dist(x2, x));
}

// ---- sampling helpers ----

inline Vec sample_unit_sphere(int dim, RngStream& rng) {
  for (;;) {
    Vec v(dim);
    double m2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      v[i] = rng.next_normal();
      m2 += v[i] * v[i];
    }
    if (m2 > 1e-24) return (1.0 / std::sqrt(m2)) * v;
  }
}

inline Vec sample_ball(const Vec& center, double radius, RngStream& rng) {
  Vec dir = sample_unit_sphere(center.n, rng);
  double r = radius * std::pow(rng.next_double(), 1.0 / center.n);
  return center + r * dir;
}

// Orthonormal basis of the orthogonal complement of span{vs}; vs need not be
// independent. Gram-Schmidt against the accepted set, drop near-zero rests.
inline std::vector<Vec> orthonormal_complement(const std::vector<Vec>& vs,
                                               int dim) {
  std::vector<Vec> accepted;
  auto reduce = [&](Vec w) {
    for (const Vec& u : accepted) w -= dot(w, u) * u;
    return w;
  };
  for (const Vec& v : vs) {
    Vec w = reduce(v);
    double m = norm(w);
    if (m > 1e-10) accepted.push_back((1.0 / m) * w);
  }
  std::size_t span_rank = accepted.size();
  for (int i = 0; i < dim; ++i) {
    Vec w = reduce(Vec::unit(dim, i));
    double m = norm(w);
    if (m > 1e-10) accepted.push_back((1.0 / m) * w);
  }
  return {accepted.begin() + span_rank, accepted.end()};
}

inline std::vector<Vec> orthonormalize(const std::vector<Vec>& vs) {
  std::vector<Vec> accepted;
  for (const Vec& v : vs) {
    Vec w = v;
    for (const Vec& u : accepted) w -= dot(w, u) * u;
    double m = norm(w);
    if (m > 1e-10) accepted.push_back((1.0 / m) * w);
  }
  return accepted;
}

}  // namespace setreg
