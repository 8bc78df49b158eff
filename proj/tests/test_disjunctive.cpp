#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "discq/disjunctive.hpp"
#include "discq/rng.hpp"
#include "support.hpp"

using namespace discq;

namespace {

bool has_ray(const LimitingGenerators& lim, const RatVec& v) {
  RatVec p = primitive(v);
  for (const RatVec& r : lim.rays)
    if (r == p) return true;
  return false;
}

bool strata_equal(const LimitingGenerators& a, const LimitingGenerators& b) {
  auto key = [](const Stratum& s) { return std::make_pair(s.cone.lines, s.cone.rays); };
  std::set<std::pair<RatMat, RatMat>> ka, kb;
  for (const Stratum& s : a.strata) ka.insert(key(s));
  for (const Stratum& s : b.strata) kb.insert(key(s));
  return ka == kb;
}

}  // namespace

TEST_CASE("active pieces", "[disjunctive]") {
  DisjunctiveSet oe = DisjunctiveSet::omega_E();
  REQUIRE(active_pieces(oe, rat_vec({0, 0})) == std::vector<std::size_t>{0, 1});
  REQUIRE(active_pieces(oe, rat_vec({1, 0})) == std::vector<std::size_t>{0});
  REQUIRE_THROWS_AS(active_pieces(oe, rat_vec({1, 1})), InfeasiblePoint);

  DisjunctiveSet gamma = support::counterexample_gamma();
  REQUIRE(active_pieces(gamma, rat_vec({0, 0, 0})) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("regular normal cone of the union", "[disjunctive]") {
  SECTION("counterexample set at the origin: cone{a2,a3}") {
    ConeGenerators nc = regular_nc(support::counterexample_gamma(), rat_vec({0, 0, 0}));
    REQUIRE(nc.lines.empty());
    REQUIRE(nc.rays.size() == 2);
    // a2 = (-1/2,1,-1) -> primitive (-1,2,-2); a3 = (0,1,-1)
    REQUIRE(cone_member(nc, RatVec{Rat(-1, 2), Rat(1), Rat(-1)}));
    REQUIRE(cone_member(nc, rat_vec({0, 1, -1})));
    ConeGenerators expect;
    expect.dim = 3;
    expect.rays = {rat_vec({-1, 2, -2}), rat_vec({0, 1, -1})};
    REQUIRE(cone_equal(nc, expect));
  }
  SECTION("omega_E at the origin: negative quadrant") {
    ConeGenerators nc = regular_nc(DisjunctiveSet::omega_E(), rat_vec({0, 0}));
    REQUIRE(nc.rays == RatMat{rat_vec({-1, 0}), rat_vec({0, -1})});
    REQUIRE(nc.lines.empty());
  }
  SECTION("single-piece union equals the piece cone") {
    Polyhedron C;
    C.add_le(rat_vec({-1, 0}), Rat(0));
    C.add_eq(rat_vec({0, 1}), Rat(0));
    DisjunctiveSet single({C});
    ConeGenerators a = regular_nc(single, rat_vec({0, 0}));
    ConeGenerators b = normal_cone(C, rat_vec({0, 0}));
    REQUIRE(cone_equal(a, b));
  }
}

TEST_CASE("limiting normal cone via stratum enumeration", "[disjunctive]") {
  SECTION("counterexample set: six generators at the origin") {
    LimitingGenerators lim = limiting_nc(support::counterexample_gamma(), rat_vec({0, 0, 0}));
    REQUIRE(lim.lines.empty());
    REQUIRE(lim.rays.size() == 6);
    REQUIRE(has_ray(lim, RatVec{Rat(1, 2), Rat(-1, 2), Rat(1, 2)}));   // a1
    REQUIRE(has_ray(lim, RatVec{Rat(-1, 2), Rat(1), Rat(-1)}));        // a2
    REQUIRE(has_ray(lim, rat_vec({0, 1, -1})));                        // a3
    REQUIRE(has_ray(lim, rat_vec({-1, 0, 0})));
    REQUIRE(has_ray(lim, rat_vec({0, 1, 0})));
    REQUIRE(has_ray(lim, rat_vec({0, 0, -1})));
  }
  SECTION("omega_E at the origin") {
    LimitingGenerators lim = limiting_nc(DisjunctiveSet::omega_E(), rat_vec({0, 0}));
    REQUIRE(lim.strata.size() == 3);
    REQUIRE(lim.rays == RatMat{rat_vec({-1, 0}), rat_vec({0, -1})});
    REQUIRE(lim.lines == RatMat{rat_vec({0, 1}), rat_vec({1, 0})});
  }
  SECTION("interior point of one piece") {
    DisjunctiveSet ov = DisjunctiveSet::omega_V();
    LimitingGenerators lim = limiting_nc(ov, rat_vec({-1, 1}));
    REQUIRE(lim.strata.size() == 1);
    REQUIRE(lim.strata[0].cone.trivial());
  }
}

TEST_CASE("limiting membership battery", "[disjunctive]") {
  DisjunctiveSet oe = DisjunctiveSet::omega_E();
  LimitingGenerators lim = limiting_nc(oe, rat_vec({0, 0}));
  REQUIRE(limiting_member(lim, rat_vec({-1, -1})));
  REQUIRE(limiting_member(lim, rat_vec({1, 0})));
  REQUIRE(limiting_member(lim, rat_vec({0, 1})));
  REQUIRE_FALSE(limiting_member(lim, rat_vec({1, 1})));
  REQUIRE_FALSE(limiting_member(lim, rat_vec({-1, 1})));

  DisjunctiveSet os = DisjunctiveSet::omega_S();
  LimitingGenerators lims = limiting_nc(os, rat_vec({0, 0}));
  REQUIRE(limiting_member(lims, rat_vec({3, 0})));
  REQUIRE_FALSE(limiting_member(lims, rat_vec({1, 1})));
}

TEST_CASE("regular cone is contained in the limiting cone", "[disjunctive]") {
  for (const DisjunctiveSet& G : {DisjunctiveSet::omega_E(), DisjunctiveSet::omega_V(),
                                  DisjunctiveSet::omega_S()}) {
    ConeGenerators reg = regular_nc(G, rat_vec({0, 0}));
    LimitingGenerators lim = limiting_nc(G, rat_vec({0, 0}));
    for (const RatVec& r : reg.rays) REQUIRE(limiting_member(lim, r));
    for (const RatVec& l : reg.lines) {
      REQUIRE(limiting_member(lim, l));
      REQUIRE(limiting_member(lim, neg(l)));
    }
  }
  DisjunctiveSet gamma = support::counterexample_gamma();
  ConeGenerators reg = regular_nc(gamma, rat_vec({0, 0, 0}));
  LimitingGenerators lim = limiting_nc(gamma, rat_vec({0, 0, 0}));
  for (const RatVec& r : reg.rays) REQUIRE(limiting_member(lim, r));
}

TEST_CASE("limiting normals come from some active piece cone", "[disjunctive]") {
  // N_Gamma(xbar) subset of the union of the active pieces' regular cones
  Rng rng(13);
  DisjunctiveSet gamma = support::counterexample_gamma();
  RatVec xbar = rat_vec({0, 0, 0});
  LimitingGenerators lim = limiting_nc(gamma, xbar);
  std::vector<ConeGenerators> piece_cones;
  for (std::size_t r : active_pieces(gamma, xbar))
    piece_cones.push_back(normal_cone(gamma.pieces[r], xbar));
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    RatVec v(3);
    for (auto& x : v) x = make_rat(static_cast<long>(rng.raw() % 9) - 4, 1 + rng.raw() % 2);
    if (!limiting_member(lim, v)) continue;
    ++checked;
    bool in_some_piece = false;
    for (const ConeGenerators& pc : piece_cones)
      if (cone_member(pc, v)) in_some_piece = true;
    REQUIRE(in_some_piece);
  }
  REQUIRE(checked > 10);
}

TEST_CASE("dimension-two inclusion and its dimension-three failure", "[disjunctive]") {
  SECTION("p <= 2: every limiting generator sits in an active piece's generator set") {
    for (const DisjunctiveSet& G : {DisjunctiveSet::omega_E(), DisjunctiveSet::omega_V(),
                                    DisjunctiveSet::omega_S()}) {
      RatVec origin = rat_vec({0, 0});
      LimitingGenerators lim = limiting_nc(G, origin);
      RatMat piece_gens;
      for (std::size_t r : active_pieces(G, origin)) {
        ConeGenerators nc = normal_cone(G.pieces[r], origin);
        for (const RatVec& v : nc.rays) piece_gens.push_back(v);
        for (const RatVec& v : nc.lines) {
          piece_gens.push_back(v);
          piece_gens.push_back(primitive(neg(v)));
        }
      }
      for (const RatVec& r : lim.rays)
        REQUIRE(std::find(piece_gens.begin(), piece_gens.end(), r) != piece_gens.end());
      for (const RatVec& l : lim.lines) {
        bool found = std::find(piece_gens.begin(), piece_gens.end(), l) != piece_gens.end() ||
                     std::find(piece_gens.begin(), piece_gens.end(), primitive(neg(l))) !=
                         piece_gens.end();
        REQUIRE(found);
      }
    }
  }
  SECTION("p = 3: a3 is a limiting generator outside both piece generator sets") {
    DisjunctiveSet gamma = support::counterexample_gamma();
    RatVec origin = rat_vec({0, 0, 0});
    LimitingGenerators lim = limiting_nc(gamma, origin);
    RatVec a3 = rat_vec({0, 1, -1});
    REQUIRE(has_ray(lim, a3));
    RatMat piece_gens;
    for (std::size_t r : active_pieces(gamma, origin)) {
      ConeGenerators nc = normal_cone(gamma.pieces[r], origin);
      for (const RatVec& v : nc.rays) piece_gens.push_back(v);
    }
    REQUIRE(piece_gens.size() == 5);
    REQUIRE(std::find(piece_gens.begin(), piece_gens.end(), a3) == piece_gens.end());
  }
}

TEST_CASE("distance to a disjunctive set", "[disjunctive]") {
  DisjunctiveSet oe = DisjunctiveSet::omega_E();
  REQUIRE(distance_sq(oe, rat_vec({1, 1})) == 1);
  REQUIRE(distance_sq(oe, rat_vec({2, 0})) == 0);
  DisjunctiveSet ov = DisjunctiveSet::omega_V();
  REQUIRE(distance_sq(ov, rat_vec({2, 3})) == 4);  // projects to (0,3) in the first piece

  // brute-force grid cross-check on dim-2 sets
  Rng rng(3);
  for (const DisjunctiveSet& G : {oe, ov, DisjunctiveSet::omega_S()}) {
    for (int trial = 0; trial < 20; ++trial) {
      RatVec y{make_rat(static_cast<long>(rng.raw() % 9) - 4, 2),
               make_rat(static_cast<long>(rng.raw() % 9) - 4, 2)};
      double exact = distance(G, y);
      double best = 1e100;
      for (int i = -40; i <= 40; ++i) {
        for (int j = -40; j <= 40; ++j) {
          RatVec w{Rat(i, 8), Rat(j, 8)};
          bool inside = false;
          for (const Polyhedron& C : G.pieces)
            if (C.contains(w)) inside = true;
          if (!inside) continue;
          double d = std::sqrt(norm_sq(sub(y, w)).get_d());
          best = std::min(best, d);
        }
      }
      REQUIRE(std::abs(exact - best) < 0.2);  // grid resolution bound
      REQUIRE(exact <= best + 1e-9);
    }
  }
}

TEST_CASE("closed forms agree with the generic enumeration", "[disjunctive]") {
  struct Case {
    DisjunctiveSet::Tag tag;
    DisjunctiveSet set;
  };
  std::vector<Case> cases = {{DisjunctiveSet::Tag::OmegaE, DisjunctiveSet::omega_E()},
                             {DisjunctiveSet::Tag::OmegaV, DisjunctiveSet::omega_V()},
                             {DisjunctiveSet::Tag::OmegaS, DisjunctiveSet::omega_S()}};
  for (const Case& c : cases) {
    for (int i = -2; i <= 2; ++i) {
      for (int j = -2; j <= 2; ++j) {
        RatVec y{Rat(i), Rat(j)};
        bool inside = false;
        for (const Polyhedron& P : c.set.pieces)
          if (P.contains(y)) inside = true;
        if (!inside) {
          REQUIRE_THROWS(closed_form_nc(c.tag, y));
          continue;
        }
        LimitingGenerators closed = closed_form_nc(c.tag, y);
        LimitingGenerators generic = limiting_nc(c.set, y);
        INFO("tag " << static_cast<int>(c.tag) << " at (" << i << "," << j << ")");
        REQUIRE(strata_equal(closed, generic));
        REQUIRE(closed.rays == generic.rays);
        REQUIRE(closed.lines == generic.lines);
      }
    }
  }
}

TEST_CASE("closed-form specifics", "[disjunctive]") {
  LimitingGenerators oe = closed_form_nc(DisjunctiveSet::Tag::OmegaE, rat_vec({1, 0}));
  REQUIRE(oe.strata.size() == 1);
  REQUIRE(oe.strata[0].cone.lines == RatMat{rat_vec({0, 1})});

  LimitingGenerators os = closed_form_nc(DisjunctiveSet::Tag::OmegaS, rat_vec({0, 0}));
  // span{e1} ∪ span{e2} plus the trivial stratum
  REQUIRE(os.strata.size() == 3);
  REQUIRE(limiting_member(os, rat_vec({4, 0})));
  REQUIRE(limiting_member(os, rat_vec({0, -2})));
  REQUIRE_FALSE(limiting_member(os, rat_vec({1, -1})));

  REQUIRE_THROWS_AS(closed_form_nc(DisjunctiveSet::Tag::Generic, rat_vec({0, 0})),
                    TagMismatch);
}

TEST_CASE("cone containment in a union of cones", "[disjunctive]") {
  DisjunctiveSet oe = DisjunctiveSet::omega_E();
  LimitingGenerators lim = limiting_nc(oe, rat_vec({0, 0}));
  std::vector<ConeGenerators> strata;
  for (const Stratum& s : lim.strata) strata.push_back(s.cone);

  ConeGenerators quadrant;
  quadrant.dim = 2;
  quadrant.rays = {rat_vec({-1, 0}), rat_vec({0, -1})};
  REQUIRE(cone_in_union(quadrant, strata));

  ConeGenerators halfplane;
  halfplane.dim = 2;
  halfplane.rays = {rat_vec({-1, 0})};
  halfplane.lines = {rat_vec({0, 1})};
  REQUIRE_FALSE(cone_in_union(halfplane, strata));

  ConeGenerators line;
  line.dim = 2;
  line.lines = {rat_vec({1, 0})};
  REQUIRE(cone_in_union(line, strata));
}
