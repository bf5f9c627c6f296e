#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <setreg/constants.hpp>

using namespace setreg;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;
constexpr double kSinPi8 = 0.38268343236508977;

SetRep xaxis() { return as_set(make_affine(Vec::zero(2), {Vec::unit(2, 0)})); }
SetRep yaxis() { return as_set(make_affine(Vec::zero(2), {Vec::unit(2, 1)})); }
SetRep diag() {
  return as_set(make_affine(Vec::zero(2), {normalized(Vec{1.0, 1.0})}));
}
SetRep lower_hp() {
  return as_set(make_polyhedron({Halfspace{Vec{0.0, 1.0}, 0.0}},
                                Vec{0.0, -1.0}));
}
SetRep upper_hp() {
  return as_set(make_polyhedron({Halfspace{Vec{0.0, -1.0}, 0.0}},
                                Vec{0.0, 1.0}));
}
SetRep lower_ball() { return as_set(make_ball(Vec{0.0, -1.0}, 1.0)); }
SetRep upper_ball() { return as_set(make_ball(Vec{0.0, 1.0}, 1.0)); }

const Vec kOrigin = Vec::zero(2);

}  // namespace

TEST_CASE("identical lines: str is exactly one and tr vanishes") {
  EstimatorConfig cfg;
  auto str = estimate_str(xaxis(), xaxis(), kOrigin, cfg);
  CHECK(str.value == Catch::Approx(1.0).margin(1e-9));
  CHECK(str.bias == ConstantEstimate::Bias::UpperBound);
  auto tr = estimate_tr(xaxis(), xaxis(), kOrigin, cfg);
  CHECK(tr.value == Catch::Approx(0.0).margin(1e-9));
  // translated problems are almost surely infeasible for parallel lines
  CHECK(tr.per_radius.back().n_empty_translations > 0);
}

TEST_CASE("orthogonal lines: the full family sits at 1/sqrt(2)") {
  EstimatorConfig cfg;
  SetRep A = xaxis(), B = yaxis();
  CHECK(estimate_str(A, B, kOrigin, cfg).value ==
        Catch::Approx(kInvSqrt2).margin(0.02));
  CHECK(estimate_tr(A, B, kOrigin, cfg).value ==
        Catch::Approx(kInvSqrt2).margin(0.02));
  CHECK(estimate_tr_dual(A, B, kOrigin, cfg).value ==
        Catch::Approx(kInvSqrt2).margin(0.02));
  CHECK(estimate_itr(A, B, kOrigin, cfg).value ==
        Catch::Approx(kInvSqrt2).margin(0.02));
  CHECK(estimate_itr_c(A, B, kOrigin, cfg).value ==
        Catch::Approx(kInvSqrt2).margin(0.02));
  CHECK(estimate_itr_w(A, B, kOrigin, cfg).value ==
        Catch::Approx(kInvSqrt2).margin(0.05));
  CHECK(estimate_str1(A, B, kOrigin, cfg).value ==
        Catch::Approx(kInvSqrt2).margin(0.05));
  CHECK(estimate_str_prime(A, B, kOrigin, cfg).value ==
        Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("lines at 45 degrees: constants land on sin(pi/8)") {
  EstimatorConfig cfg;
  SetRep A = xaxis(), B = diag();
  CHECK(estimate_str(A, B, kOrigin, cfg).value ==
        Catch::Approx(kSinPi8).margin(0.02));
  CHECK(estimate_tr_dual(A, B, kOrigin, cfg).value ==
        Catch::Approx(kSinPi8).margin(0.02));
  CHECK(estimate_itr(A, B, kOrigin, cfg).value ==
        Catch::Approx(kSinPi8).margin(0.05));
  CHECK(estimate_itr_c(A, B, kOrigin, cfg).value ==
        Catch::Approx(kSinPi8).margin(0.05));
  CHECK(estimate_str1(A, B, kOrigin, cfg).value ==
        Catch::Approx(kSinPi8).margin(0.05));
}

TEST_CASE("opposing halfplanes: empty duals collapse to the convention") {
  EstimatorConfig cfg;
  SetRep A = lower_hp(), B = upper_hp();
  CHECK(estimate_str(A, B, kOrigin, cfg).value ==
        Catch::Approx(1.0).margin(0.05));
  CHECK(estimate_tr(A, B, kOrigin, cfg).value ==
        Catch::Approx(0.0).margin(0.05));
  CHECK(estimate_tr_dual(A, B, kOrigin, cfg).value ==
        Catch::Approx(0.0).margin(0.05));
  // no admissible dual pair exists off the intersection, so the infimum
  // estimate stays at its vacuous ceiling, matching str
  auto itc = estimate_itr_c(A, B, kOrigin, cfg);
  CHECK(itc.value == 1.0);
  CHECK(itc.per_radius.back().n_admissible == 0);
}

TEST_CASE("tangent balls: every constant estimate collapses toward zero") {
  EstimatorConfig cfg;
  SetRep A = lower_ball(), B = upper_ball();
  CHECK(estimate_str(A, B, kOrigin, cfg).value <= 0.05);
  CHECK(estimate_tr_dual(A, B, kOrigin, cfg).value <= 0.05);
  CHECK(estimate_itr(A, B, kOrigin, cfg).value <= 0.05);
  CHECK(estimate_itr_c(A, B, kOrigin, cfg).value <= 0.05);
  CHECK(estimate_itr_w(A, B, kOrigin, cfg).value <= 0.05);
  CHECK(estimate_str1(A, B, kOrigin, cfg).value <= 0.05);
}

TEST_CASE("estimates are deterministic under a fixed seed") {
  EstimatorConfig cfg;
  SetRep A = xaxis(), B = yaxis();
  auto s1 = estimate_str(A, B, kOrigin, cfg);
  auto s2 = estimate_str(A, B, kOrigin, cfg);
  CHECK(s1.value == s2.value);
  REQUIRE(s1.per_radius.size() == s2.per_radius.size());
  for (std::size_t k = 0; k < s1.per_radius.size(); ++k) {
    CHECK(s1.per_radius[k].inf_value == s2.per_radius[k].inf_value);
    CHECK(s1.per_radius[k].n_admissible == s2.per_radius[k].n_admissible);
  }
  auto t1 = estimate_itr(A, B, kOrigin, cfg);
  auto t2 = estimate_itr(A, B, kOrigin, cfg);
  CHECK(t1.value == t2.value);
}

TEST_CASE("doubling the sample budget never raises an infimum estimate") {
  EstimatorConfig base;
  EstimatorConfig dense = base;
  dense.samples_per_radius = 2 * base.samples_per_radius;

  struct Pair {
    SetRep A, B;
  };
  std::vector<Pair> pairs;
  pairs.push_back({xaxis(), yaxis()});
  pairs.push_back({xaxis(), diag()});

  using Estimator = ConstantEstimate (*)(const SetRep&, const SetRep&,
                                         const Vec&, const EstimatorConfig&);
  Estimator ests[] = {estimate_str, estimate_str_prime, estimate_tr,
                      estimate_tr_dual, estimate_itr, estimate_itr_c,
                      estimate_itr_w};
  for (const Pair& p : pairs)
    for (Estimator e : ests) {
      double coarse = e(p.A, p.B, kOrigin, base).value;
      double fine = e(p.A, p.B, kOrigin, dense).value;
      CHECK(fine <= coarse + 1e-12);
    }
}

TEST_CASE("per-radius records cover the schedule and witness is kept") {
  EstimatorConfig cfg;
  auto est = estimate_str(xaxis(), yaxis(), kOrigin, cfg);
  REQUIRE(est.per_radius.size() == cfg.radii.size());
  for (std::size_t k = 0; k + 1 < est.per_radius.size(); ++k)
    CHECK(est.per_radius[k].radius > est.per_radius[k + 1].radius);
  REQUIRE_FALSE(est.argmin_witness.empty());
  bool has_x = false;
  for (const WitnessPoint& w : est.argmin_witness)
    if (w.label == "x") has_x = true;
  CHECK(has_x);
}

TEST_CASE("subdifferential membership accepts exact tied triples") {
  Vec a{1.0, 0.0}, b{-1.0, 0.0}, x{0.0, 0.0};
  Vec u1 = normalized(x - a), u2 = normalized(x - b);
  SubgradientTriple good{-0.5 * u1, -0.5 * u2, 0.5 * (u1 + u2)};
  CHECK(subdiff_f_membership(good, a, b, x));

  // sum not zero
  SubgradientTriple bad1{-0.5 * u1, -0.5 * u2, Vec{0.0, 0.3}};
  CHECK_FALSE(subdiff_f_membership(bad1, a, b, x));
  // wrong total dual mass
  SubgradientTriple bad2{-0.8 * u1, -0.8 * u2, 0.8 * (u1 + u2)};
  CHECK_FALSE(subdiff_f_membership(bad2, a, b, x));
  // misaligned first block
  SubgradientTriple bad3{0.5 * u1, -0.5 * u2, 0.5 * (u2 - u1)};
  CHECK_FALSE(subdiff_f_membership(bad3, a, b, x));
}

TEST_CASE("subdifferential membership enforces the max structure") {
  // x strictly nearer to b: all dual mass must sit on the a-block
  Vec a{2.0, 0.0}, b{0.0, 0.5}, x{0.0, 0.0};
  Vec u1 = normalized(x - a);
  SubgradientTriple onA{-1.0 * u1, Vec::zero(2), u1};
  CHECK(subdiff_f_membership(onA, a, b, x));
  Vec u2 = normalized(x - b);
  SubgradientTriple onB{Vec::zero(2), -1.0 * u2, u2};
  CHECK_FALSE(subdiff_f_membership(onB, a, b, x));

  CHECK_THROWS_AS(
      subdiff_f_membership(onA, Vec::zero(2), Vec::zero(2), Vec::zero(2)),
      ArgumentError);
}

TEST_CASE("dual samples produced by the convex estimator all verify") {
  EstimatorConfig cfg;
  struct Pair {
    SetRep A, B;
  };
  std::vector<Pair> pairs;
  pairs.push_back({xaxis(), yaxis()});
  pairs.push_back({xaxis(), diag()});
  pairs.push_back({lower_ball(), upper_ball()});
  for (const Pair& p : pairs) {
    auto est = estimate_itr_c(p.A, p.B, kOrigin, cfg);
    CHECK(est.dual_checked > 0);
    CHECK(est.dual_valid == est.dual_checked);
  }
}

TEST_CASE("config validation names the offending field") {
  EstimatorConfig cfg;
  cfg.samples_per_radius = 10;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  EstimatorConfig incr;
  incr.radii = {0.1, 0.2};
  CHECK_THROWS_AS(incr.validate(), ValidationError);

  EstimatorConfig tiny;
  tiny.radii = {1e-9};
  CHECK_THROWS_AS(tiny.validate(), ValidationError);

  EstimatorConfig badtol;
  badtol.membership_tol = 0.0;
  CHECK_THROWS_AS(badtol.validate(), ValidationError);

  try {
    EstimatorConfig c;
    c.samples_per_radius = 1;
    c.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("samples_per_radius") !=
          std::string::npos);
  }
}

TEST_CASE("base point membership is enforced") {
  EstimatorConfig cfg;
  CHECK_THROWS_AS(estimate_str(xaxis(), yaxis(), Vec{1.0, 1.0}, cfg),
                  MembershipError);
  CHECK_THROWS_AS(estimate_itr_c(lower_ball(), upper_ball(), Vec{0.0, 0.5},
                                 cfg),
                  MembershipError);
}

TEST_CASE("itr_c refuses nonconvex inputs") {
  SetRep U = SetRep{make_union({make_affine(Vec::zero(2), {Vec::unit(2, 0)}),
                                make_affine(Vec::zero(2), {Vec::unit(2, 1)})})};
  EstimatorConfig cfg;
  CHECK_THROWS_AS(estimate_itr_c(U, diag(), kOrigin, cfg), NonConvexError);
}

TEST_CASE("one-sided sandwich holds on the probe pairs") {
  EstimatorConfig cfg;
  auto str = estimate_str(xaxis(), yaxis(), kOrigin, cfg);
  auto sp = estimate_str_prime(xaxis(), yaxis(), kOrigin, cfg);
  auto rep = check_str_prime_sandwich(str, sp, cfg.slack);
  CHECK(rep.pass);
  CHECK(rep.lower == Catch::Approx(1.0 / 3.0).margin(0.02));
}

TEST_CASE("chain checker flags fabricated violations") {
  auto mk = [](double v) {
    ConstantEstimate e;
    e.value = v;
    return e;
  };
  ConstantEstimate itr = mk(0.9), itw = mk(0.3), itc = mk(0.8), str = mk(0.8);
  auto rep = check_constant_chain(itr, itw, itc, str, nullptr, false, 0.05);
  CHECK_FALSE(rep.pass);
  REQUIRE_FALSE(rep.violations.empty());

  auto ok = check_constant_chain(mk(0.3), mk(0.32), mk(0.33), mk(0.35),
                                 nullptr, true, 0.05);
  CHECK(ok.pass);
}

TEST_CASE("normal cone transversality criterion separates the model pairs") {
  EstimatorConfig cfg;
  auto bad = check_normal_cone_transversality(xaxis(), xaxis(), kOrigin, cfg);
  CHECK(bad.violated);
  CHECK(bad.worst_angle == Catch::Approx(0.0).margin(1e-9));
  auto good = check_normal_cone_transversality(xaxis(), yaxis(), kOrigin, cfg);
  CHECK_FALSE(good.violated);
  CHECK(good.worst_angle > 1.0);
}
