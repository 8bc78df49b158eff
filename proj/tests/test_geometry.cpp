#include <catch2/catch_amalgamated.hpp>

#include "discq/geometry.hpp"
#include "discq/rng.hpp"
#include "support.hpp"

using namespace discq;

namespace {

Polyhedron halfline_cross() {
  // R+ x {0} as { <-e1,y> <= 0 ; <e2,y> = 0 }
  Polyhedron C;
  C.add_le(rat_vec({-1, 0}), Rat(0));
  C.add_eq(rat_vec({0, 1}), Rat(0));
  return C;
}

}  // namespace

TEST_CASE("active_set on boundary and interior points", "[geometry]") {
  Polyhedron C = halfline_cross();
  REQUIRE(active_set(C, rat_vec({1, 0})).empty());
  REQUIRE(active_set(C, rat_vec({0, 0})) == std::vector<std::size_t>{0});
  REQUIRE_THROWS_AS(active_set(C, rat_vec({-1, 0})), InfeasiblePoint);

  Polyhedron C2;
  C2.add_le({Rat(1, 2), Rat(-1, 2), Rat(1, 2)}, Rat(0));
  C2.add_le({Rat(-1, 2), Rat(1), Rat(-1)}, Rat(0));
  REQUIRE(active_set(C2, rat_vec({0, 0, 0})) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("normal cones of polyhedral pieces", "[geometry]") {
  SECTION("orthant-type cone at the origin") {
    Polyhedron C1;
    C1.add_le(rat_vec({-1, 0, 0}), Rat(0));
    C1.add_le(rat_vec({0, 1, 0}), Rat(0));
    C1.add_le(rat_vec({0, 0, -1}), Rat(0));
    ConeGenerators nc = normal_cone(C1, rat_vec({0, 0, 0}));
    REQUIRE(nc.lines.empty());
    REQUIRE(nc.rays.size() == 3);
    REQUIRE(nc.independent);
    REQUIRE(cone_member(nc, rat_vec({-1, 0, 0})));
    REQUIRE(cone_member(nc, rat_vec({0, 1, 0})));
    REQUIRE(cone_member(nc, rat_vec({0, 0, -1})));
    REQUIRE_FALSE(cone_member(nc, rat_vec({1, 0, 0})));
  }
  SECTION("interior point gives the trivial cone") {
    Polyhedron B = Polyhedron::box({{Rat(-1), Rat(1)}, {Rat(-1), Rat(1)}});
    ConeGenerators nc = normal_cone(B, rat_vec({0, 0}));
    REQUIRE(nc.trivial());
  }
  SECTION("half-line piece yields a line at relative-interior points") {
    ConeGenerators nc = normal_cone(halfline_cross(), rat_vec({1, 0}));
    REQUIRE(nc.rays.empty());
    REQUIRE(nc.lines == RatMat{rat_vec({0, 1})});
  }
}

TEST_CASE("H-rep to generators on axis cases", "[geometry][dd]") {
  SECTION("negative quadrant") {
    ConeGenerators g = hrep_to_generators({rat_vec({1, 0}), rat_vec({0, 1})}, {}, 2);
    REQUIRE(g.lines.empty());
    REQUIRE(g.rays == RatMat{rat_vec({-1, 0}), rat_vec({0, -1})});
  }
  SECTION("coordinate plane in R^3") {
    ConeGenerators g = hrep_to_generators({}, {rat_vec({0, 0, 1})}, 3);
    REQUIRE(g.rays.empty());
    REQUIRE(g.lines.size() == 2);
    REQUIRE(cone_member(g, rat_vec({1, 0, 0})));
    REQUIRE(cone_member(g, rat_vec({0, -5, 0})));
    REQUIRE_FALSE(cone_member(g, rat_vec({0, 0, 1})));
  }
  SECTION("empty cone collapses to the origin") {
    ConeGenerators g =
        hrep_to_generators({rat_vec({1, 0}), rat_vec({-1, 0}), rat_vec({0, 1}), rat_vec({0, -1})},
                           {rat_vec({1, 1})}, 2);
    // {v : v = 0}
    REQUIRE(g.trivial());
  }
}

TEST_CASE("generator/H-rep round-trip preserves the cone", "[geometry][dd]") {
  Rng rng(101);
  int nontrivial = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t dim = 2 + rng.raw() % 3;  // 2..4
    std::size_t gens = 1 + rng.raw() % 6;
    ConeGenerators g = support::random_cone(rng, dim, gens);
    ConeGenerators canon = canonical_cone(g);
    REQUIRE(cone_equal(g, canon));
    if (!canon.trivial()) ++nontrivial;
    // second round-trip is the identity on canonical forms
    ConeGenerators canon2 = canonical_cone(canon);
    REQUIRE(canon.rays == canon2.rays);
    REQUIRE(canon.lines == canon2.lines);
  }
  REQUIRE(nontrivial > 300);
}

TEST_CASE("cone membership agrees with the subset-enumeration oracle", "[geometry][oracle]") {
  Rng rng(7);
  int members = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t dim = 2 + rng.raw() % 2;  // 2..3
    ConeGenerators g = support::random_cone(rng, dim, 1 + rng.raw() % 4);
    RatVec v(dim);
    for (auto& x : v) x = Rat(static_cast<long>(rng.raw() % 9) - 4);
    bool lp = cone_member(g, v);
    bool oracle = support::cone_member_oracle(g, v);
    REQUIRE(lp == oracle);
    if (lp) ++members;
  }
  REQUIRE(members > 20);

  ConeGenerators neg_quadrant;
  neg_quadrant.dim = 2;
  neg_quadrant.rays = {rat_vec({-1, 0}), rat_vec({0, -1})};
  REQUIRE(cone_member(neg_quadrant, rat_vec({-1, -1})));
  REQUIRE_FALSE(cone_member(neg_quadrant, rat_vec({1, 0})));

  ConeGenerators c2;
  c2.dim = 3;
  c2.rays = {RatVec{Rat(-1, 2), Rat(1), Rat(-1)}, RatVec{Rat(0), Rat(1), Rat(-1)}};
  REQUIRE(cone_member(c2, rat_vec({0, 1, -1})));
}

TEST_CASE("projection onto polyhedra", "[geometry]") {
  SECTION("box clamp") {
    Polyhedron C = halfline_cross();
    Projection p = project(C, rat_vec({2, 3}));
    REQUIRE(p.point == RatVec{Rat(2), Rat(0)});
    REQUIRE(p.dist_sq == 9);
  }
  SECTION("feasible point is fixed") {
    Polyhedron C = halfline_cross();
    Projection p = project(C, rat_vec({5, 0}));
    REQUIRE(p.point == RatVec{Rat(5), Rat(0)});
    REQUIRE(p.dist_sq == 0);
  }
  SECTION("halfplane") {
    Polyhedron C;
    C.add_le(rat_vec({1, 1}), Rat(0));
    Projection p = project(C, rat_vec({1, 1}));
    REQUIRE(p.point == RatVec{Rat(0), Rat(0)});
    REQUIRE(p.dist_sq == 2);
  }
  SECTION("empty polyhedron throws") {
    Polyhedron C;
    C.add_le(rat_vec({1}), Rat(-1));
    C.add_le(rat_vec({-1}), Rat(-1));
    REQUIRE(C.empty());
    REQUIRE_THROWS_AS(project(C, rat_vec({0})), EmptyPolyhedron);
  }
}

TEST_CASE("projection satisfies the variational inequality", "[geometry]") {
  Rng rng(55);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t dim = 2 + rng.raw() % 2;
    Polyhedron C = support::random_polyhedron(rng, dim, 2 + rng.raw() % 3);
    RatVec y(dim);
    for (auto& v : y) v = Rat(static_cast<long>(rng.raw() % 11) - 5);
    Projection p = project(C, y);
    RatVec ymz = sub(y, p.point);
    RatVec origin(dim, Rat(0));
    REQUIRE(C.contains(origin));
    // <y - z, w - z> <= 0 for feasible w (exact check, 50 samples)
    for (int k = 0; k < 50; ++k) {
      RatVec w(dim);
      for (auto& v : w) v = make_rat(static_cast<long>(rng.raw() % 9) - 6, 2);
      if (!C.contains(w)) continue;
      REQUIRE(dot(ymz, sub(w, p.point)) <= 0);
    }
  }
}

TEST_CASE("normal cone equals the polar of the tangent cone", "[geometry][dd]") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t dim = 2 + rng.raw() % 2;
    Polyhedron C = support::random_polyhedron(rng, dim, 2 + rng.raw() % 3);
    RatVec x(dim, Rat(0));  // origin feasible by construction
    ConeGenerators nc = normal_cone(C, x);
    // tangent cone at x: active rows as a homogeneous H-rep
    RatMat ineq, eq;
    for (std::size_t j = 0; j < C.rows(); ++j) {
      Rat s = C.rhs[j] - dot(C.normals[j], x);
      if (s != 0) continue;
      if (C.is_eq[j])
        eq.push_back(C.normals[j]);
      else
        ineq.push_back(C.normals[j]);
    }
    ConeGenerators tangent = hrep_to_generators(ineq, eq, dim);
    // polar of the tangent cone: {v : <v,w> <= 0 for all tangent generators w}
    ConeGenerators polar = hrep_to_generators(tangent.rays, tangent.lines, dim);
    REQUIRE(cone_equal(nc, polar));
  }
}

TEST_CASE("rank operation", "[geometry]") {
  REQUIRE(rank(RatMat{rat_vec({1, 1, 1}), rat_vec({1, -3, -2})}) == 2);
  REQUIRE(rank(RatMat{}) == 0);
  RatVec v = rat_vec({2, -1});
  REQUIRE(rank(RatMat{v, scale(Rat(2), v)}) == 1);
}
