#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <setreg/normal_cones.hpp>
#include <setreg/projections.hpp>
#include <setreg/set_rep.hpp>

using namespace setreg;

namespace {

SetRep xaxis() { return as_set(make_affine(Vec::zero(2), {Vec::unit(2, 0)})); }

SetRep axes_union() {
  return SetRep{make_union({make_affine(Vec::zero(2), {Vec::unit(2, 0)}),
                            make_affine(Vec::zero(2), {Vec::unit(2, 1)})})};
}

SetRep lower_ball() { return as_set(make_ball(Vec{0.0, -1.0}, 1.0)); }

bool any_dir_near(const std::vector<NormalSample>& ns, const Vec& target,
                  double tol) {
  for (const NormalSample& s : ns)
    if (dist(s.direction, target) <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("affine normal cone is the orthogonal lineality space") {
  ConeRep c = convex_normal_cone(xaxis(), Vec{2.0, 0.0}, 1e-7);
  CHECK(c.exact);
  CHECK_FALSE(c.trivial());
  CHECK(cone_distance(c, Vec{0.0, 1.0}) == Catch::Approx(0.0).margin(1e-12));
  CHECK(cone_distance(c, Vec{0.0, -3.0}) == Catch::Approx(0.0).margin(1e-12));
  CHECK(cone_distance(c, Vec{1.0, 0.0}) == Catch::Approx(1.0));
}

TEST_CASE("ball normal cone is the outward ray at the boundary") {
  ConeRep c = convex_normal_cone(lower_ball(), Vec::zero(2), 1e-7);
  CHECK_FALSE(c.trivial());
  CHECK(cone_distance(c, Vec{0.0, 1.0}) == Catch::Approx(0.0).margin(1e-12));
  CHECK(cone_distance(c, Vec{0.0, -1.0}) == Catch::Approx(1.0));
  // scaling along the ray stays inside the cone
  CHECK(cone_distance(c, Vec{0.0, 2.5}) == Catch::Approx(0.0).margin(1e-12));

  ConeRep interior = convex_normal_cone(lower_ball(), Vec{0.0, -1.0}, 1e-7);
  CHECK(interior.trivial());
  CHECK(cone_distance(interior, Vec{0.0, 1.0}) == Catch::Approx(1.0));
}

TEST_CASE("polyhedron corner cone spans the active outward normals") {
  SetRep W = as_set(make_polyhedron({Halfspace{Vec{1.0, 1.0}, 0.0},
                                     Halfspace{Vec{1.0, -1.0}, 0.0}},
                                    Vec{-1.0, 0.0}));
  ConeRep c = convex_normal_cone(W, Vec::zero(2), 1e-7);
  // the apex cone contains e1 (as a conic mix of the two wall normals)
  CHECK(cone_distance(c, Vec{1.0, 0.0}) == Catch::Approx(0.0).margin(1e-10));
  CHECK(cone_distance(c, normalized(Vec{1.0, 1.0})) ==
        Catch::Approx(0.0).margin(1e-10));
  CHECK(cone_distance(c, Vec{-1.0, 0.0}) == Catch::Approx(1.0));
  // off the corner only one wall is active
  ConeRep edge = convex_normal_cone(W, Vec{-1.0, 1.0}, 1e-7);
  CHECK(cone_distance(edge, normalized(Vec{1.0, 1.0})) ==
        Catch::Approx(0.0).margin(1e-10));
  CHECK(cone_distance(edge, normalized(Vec{1.0, -1.0})) >
        0.5);
}

TEST_CASE("polytope vertex cone matches the polar of the incident edges") {
  SetRep sq = as_set(make_polytope(
      {Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 1.0}}));
  ConeRep c = convex_normal_cone(sq, Vec{1.0, 1.0}, 1e-7);
  CHECK(cone_distance(c, normalized(Vec{1.0, 1.0})) ==
        Catch::Approx(0.0).margin(1e-9));
  CHECK(cone_distance(c, Vec{1.0, 0.0}) == Catch::Approx(0.0).margin(1e-9));
  CHECK(cone_distance(c, Vec{-1.0, 0.0}) == Catch::Approx(1.0).margin(1e-9));
  ConeRep inside = convex_normal_cone(sq, Vec{0.5, 0.5}, 1e-7);
  CHECK(inside.trivial());
}

TEST_CASE("proximal normals at a union cross point are empty") {
  // every ambient direction at the crossing recovers a foot on one of the
  // axes, never the crossing itself
  auto ns = proximal_normals(axes_union(), Vec::zero(2), 64, 0.5, 7);
  CHECK(ns.empty());
}

TEST_CASE("proximal normals away from the cross align with the axis normal") {
  auto ns = proximal_normals(axes_union(), Vec{1.0, 0.0}, 64, 0.25, 7);
  REQUIRE_FALSE(ns.empty());
  for (const NormalSample& s : ns)
    CHECK(std::abs(s.direction[1]) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("limiting normals at the cross harvest all four axis normals") {
  auto ns = limiting_normals(axes_union(), Vec::zero(2),
                             {0.5, 0.25, 0.125, 0.0625}, 96, 11);
  REQUIRE_FALSE(ns.empty());
  CHECK(any_dir_near(ns, Vec{0.0, 1.0}, 0.02));
  CHECK(any_dir_near(ns, Vec{0.0, -1.0}, 0.02));
  CHECK(any_dir_near(ns, Vec{1.0, 0.0}, 0.02));
  CHECK(any_dir_near(ns, Vec{-1.0, 0.0}, 0.02));
}

TEST_CASE("frechet check refutes tangents and keeps true normals") {
  SetRep b = lower_ball();
  std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625};
  FrechetCheck tangent =
      frechet_normal_check(b, Vec::zero(2), Vec{1.0, 0.0}, radii, 0.2, 400, 7);
  CHECK(tangent.refuted);
  FrechetCheck outward =
      frechet_normal_check(b, Vec::zero(2), Vec{0.0, 1.0}, radii, 0.2, 400, 7);
  CHECK_FALSE(outward.refuted);
}

TEST_CASE("cone distance solves the nearest-point problem on rays") {
  ConeRep c;
  c.generators = {Vec{1.0, 0.0}};
  // nearest point of the ray {t e1 : t >= 0} to (-1, 1) is the origin
  CHECK(cone_distance(c, Vec{-1.0, 1.0}) == Catch::Approx(std::sqrt(2.0)));
  // and to (1, 1) it is e1
  CHECK(cone_distance(c, Vec{1.0, 1.0}) == Catch::Approx(1.0));
}

TEST_CASE("anchor directions are unit and lie in the cone") {
  ConeRep c = convex_normal_cone(lower_ball(), Vec::zero(2), 1e-7);
  auto anchors = cone_anchor_directions(c);
  REQUIRE_FALSE(anchors.empty());
  for (const Vec& g : anchors) {
    CHECK(norm(g) == Catch::Approx(1.0));
    CHECK(cone_distance(c, g) < 1e-9);
  }
}
