#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "sdq/gallery.hpp"
#include "sdq/modules.hpp"

using namespace sdq;

TEST_CASE("mixed-radix encoding, arithmetic and orders") {
  FiniteModule m = make_pm(3, 2, false);  // Z9 x Z3, action x, ideal (p, x)
  CHECK(m.p() == 3);
  CHECK(m.rank() == 2);
  CHECK(m.size() == 27);
  CHECK(m.moduli() == std::vector<int64_t>{9, 3});
  for (elem a = 0; a < 27; ++a) {
    CHECK(m.encode(m.decode(a)) == a);
    CHECK(m.add(a, m.neg(a)) == 0);
    CHECK(m.sub(a, a) == 0);
    CHECK(m.scale(9, a) == 0);  // exponent of the group divides 9
    CHECK(m.scale(2, a) == m.add(a, a));
  }
  CHECK(m.encode({4, 2}) == 14);
  CHECK(m.label(14) == "(4,2)");
  CHECK(m.basis(0) == m.encode({1, 0}));
  CHECK(m.additive_order(m.basis(0)) == 9);
  CHECK(m.additive_order(m.basis(1)) == 3);
  CHECK(m.additive_order(0) == 1);
  // x acts by (a0, a1) -> (3*a1, 0)
  CHECK(m.act("x", m.encode({4, 2})) == m.encode({6, 0}));
  CHECK(m.has_action("x"));
  CHECK(!m.has_action("y"));
  CHECK_THROWS_AS(m.action("y"), MagmaError);
}

TEST_CASE("construction validates the declared data") {
  // declared invertible but singular
  CHECK_THROWS_AS(FiniteModule(3, {1}, {{"x", {0}, true, 0}}, {"p"}),
                  MagmaError);
  // a matrix that does not respect the congruences between coordinates:
  // a Z9 row reading a Z3 coordinate needs a coefficient divisible by 3
  CHECK_THROWS_AS(FiniteModule(3, {2, 1}, {{"x", {0, 1, 0, 0}, false, 0}},
                               {"p"}),
                  MagmaError);
  // unknown ideal name
  CHECK_THROWS_AS(FiniteModule(3, {1}, {{"x", {0}, false, 0}}, {"q"}),
                  MagmaError);
  // non-prime p
  CHECK_THROWS_AS(FiniteModule(4, {1}, {}, {"p"}), MagmaError);
}

TEST_CASE("module text format round-trip") {
  for (bool shifted : {false, true}) {
    FiniteModule m = make_pm(3, 3, shifted);
    FiniteModule back = FiniteModule::load(m.save());
    CHECK(back.size() == m.size());
    CHECK(back.exps() == m.exps());
    CHECK(back.ideal() == m.ideal());
    REQUIRE(back.actions().size() == m.actions().size());
    for (size_t i = 0; i < m.actions().size(); ++i) {
      CHECK(back.actions()[i].name == m.actions()[i].name);
      CHECK(back.actions()[i].invertible == m.actions()[i].invertible);
      for (elem a = 0; a < m.size(); ++a)
        CHECK(back.act(i, a) == m.act(i, a));
    }
  }
  CHECK_THROWS_AS(FiniteModule::load(""), MagmaError);
  CHECK_THROWS_AS(FiniteModule::load("3 1\naction x\n"), MagmaError);
  // comments and the explicit invertible flag survive
  FiniteModule c = build_c();
  FiniteModule cc = FiniteModule::load("# a comment\n" + c.save());
  CHECK(cc.action("x").invertible);
  CHECK(cc.action("x").order == c.action("x").order);
}

TEST_CASE("socle series and radical of the P_m family") {
  for (int64_t p : {2, 3, 5}) {
    for (int mm = 1; mm <= 3; ++mm) {
      for (bool shifted : {false, true}) {
        CAPTURE(p);
        CAPTURE(mm);
        CAPTURE(shifted);
        FiniteModule m = make_pm(p, mm, shifted);
        std::vector<SubSet> chain = socle_series(m);
        REQUIRE(int(chain.size()) == mm);
        int64_t expect = 1;
        for (int k = 1; k <= mm; ++k) {
          for (int i = 0; i < k; ++i) expect *= p;  // * p^k
          CHECK(int64_t(chain[size_t(k - 1)].size()) == expect);
          if (k > 1) CHECK(chain[size_t(k - 2)].subset_of(chain[size_t(k - 1)]));
        }
        CHECK(chain.back().is_full());
        CHECK(is_cocyclic(m));
        SubSet j = jacobson_radical(m);
        if (mm == 1) CHECK(j.size() == 1);
        else CHECK(j == chain[size_t(mm - 2)]);
        // J = pM for this family
        SubSet pm_set(m.size());
        for (elem a = 0; a < m.size(); ++a)
          pm_set.insert(m.scale(p, a));
        CHECK(j == pm_set);
        CHECK(gen_count(m) == mm);
      }
    }
  }
  // a module whose ideal action never dies is rejected
  CHECK_THROWS_AS(socle_series(FiniteModule(
                      3, {1}, {{"x", {1}, true, 0}}, {"x"})),
                  MagmaError);
}

TEST_CASE("gen_count cross-check on small modules") {
  CHECK(gen_count(make_pm(3, 2, false), true) == 2);
  CHECK(gen_count(make_pm(3, 2, true), true) == 2);
  CHECK(gen_count(make_pm(2, 3, false), true) == 3);
  CHECK(gen_count(make_pm(5, 1, true), true) == 1);
}

TEST_CASE("submodule lattices of plain and shifted P_m coincide") {
  for (int64_t p : {2, 3}) {
    for (int mm : {2, 3}) {
      CAPTURE(p);
      CAPTURE(mm);
      SubmoduleLattice plain = submodules(make_pm(p, mm, false));
      SubmoduleLattice shifted = submodules(make_pm(p, mm, true));
      REQUIRE(plain.complete);
      REQUIRE(shifted.complete);
      CHECK(plain.subs == shifted.subs);
    }
  }
  SubmoduleLattice l3 = submodules(make_pm(3, 3, false));
  CHECK(l3.subs.size() == 46);
  // inclusions are sound: every recorded edge is a strict inclusion
  for (auto [lo, hi] : l3.inclusions) {
    CHECK(l3.subs[lo].subset_of(l3.subs[hi]));
    CHECK(l3.subs[lo].size() < l3.subs[hi].size());
  }
}

TEST_CASE("span generates exactly the submodule") {
  FiniteModule m = make_pm(3, 2, false);
  SubSet s = m.span({m.encode({0, 1})});
  // x(0,1) = (3,0), so the span is { (3k, l) }, nine elements
  CHECK(s.size() == 9);
  for (elem a : s.elements()) {
    auto co = m.decode(a);
    CHECK(co[0] % 3 == 0);
  }
  CHECK(m.span({0}).size() == 1);
  // spans are action- and sum-closed
  for (elem a : s.elements()) {
    CHECK(s.contains(m.act("x", a)));
    for (elem b : s.elements()) CHECK(s.contains(m.add(a, b)));
  }
}

TEST_CASE("module isomorphism search") {
  // plain and shifted P_2 share the carrier but differ as modules: x is
  // nilpotent on one and invertible on the other
  ModuleIso no = module_iso(make_pm(3, 2, false), make_pm(3, 2, true));
  CHECK(!no.map);
  CHECK(no.complete);
  // a module is isomorphic to itself via the identity
  FiniteModule m = make_pm(3, 2, true);
  ModuleIso self = module_iso(m, m);
  REQUIRE(self.map);
  for (elem a = 0; a < m.size(); ++a) {
    for (elem b = 0; b < m.size(); ++b)
      CHECK((*self.map)[size_t(m.add(a, b))] ==
            m.add((*self.map)[size_t(a)], (*self.map)[size_t(b)]));
    CHECK((*self.map)[size_t(m.act("x", a))] ==
          m.act("x", (*self.map)[size_t(a)]));
  }
  // P_{3,1} embeds its action names into the extended module: iso found
  FiniteModule p31 = make_pm(3, 3, true);
  FiniteModule c = build_c();
  ModuleIso hit = module_iso(p31, c);
  CHECK(hit.map);
  // the reverse direction requires actions the P-module does not carry
  CHECK_THROWS_WITH_AS(module_iso(c, p31),
                       doctest::Contains("lacks the action"), MagmaError);
}

TEST_CASE("module_iso_into finds embeddings onto a given submodule") {
  FiniteModule p1 = make_pm(3, 1, false);
  FiniteModule p2 = make_pm(3, 2, false);
  SubSet socle1 = socle_series(p2).front();  // {0, 9, 18}: x acts as zero
  ModuleIso in = module_iso_into(p1, p2, socle1);
  REQUIRE(in.map);
  const std::vector<elem>& f = *in.map;
  CHECK(f[0] == 0);
  // injective additive intertwiner landing in the socle
  for (elem a = 0; a < 3; ++a) {
    CHECK(socle1.contains(f[size_t(a)]));
    for (elem b = 0; b < 3; ++b) {
      CHECK(f[size_t(p1.add(a, b))] == p2.add(f[size_t(a)], f[size_t(b)]));
      if (a != b) CHECK(f[size_t(a)] != f[size_t(b)]);
    }
    CHECK(f[size_t(p1.act("x", a))] == p2.act("x", f[size_t(a)]));
  }
  // additive mismatch: P_2 cannot land on the cyclic Z27 submodule of P_3
  FiniteModule p3 = make_pm(3, 3, false);
  ModuleIso out = module_iso_into(p2, p3, p3.span({p3.basis(0)}));
  CHECK(!out.map);
  CHECK(out.complete);
  // action names are matched by name, and missing ones are an error
  CHECK_THROWS_WITH_AS(module_iso_into(make_pm(3, 1, true), p2, socle1),
                       doctest::Contains("lacks the action"), MagmaError);
  // a cardinality mismatch is already a definitive no
  ModuleIso mismatch = module_iso_into(p2, p2, socle1);
  CHECK(!mismatch.map);
  CHECK(mismatch.complete);
}

TEST_CASE("aligned_quotient") {
  FiniteModule m = make_pm(3, 2, false);
  std::vector<SubSet> chain = socle_series(m);
  FiniteModule q = aligned_quotient(m, chain[0]);
  CHECK(q.size() == 9);
  CHECK(q.p() == 3);
  // x maps into the killed socle, so the induced action is zero
  for (elem a = 0; a < q.size(); ++a) CHECK(q.act("x", a) == 0);
  // quotient by the full module is trivial
  CHECK(aligned_quotient(m, chain[1]).size() == 1);
}

TEST_CASE("extend_to_r2 inverts the shifted action") {
  FiniteModule e = extend_to_r2(make_pm(3, 2, true));
  for (const char* name : {"x", "x^-1", "1-x", "(1-x)^-1", "1+x"})
    CHECK(e.has_action(name));
  CHECK(!e.has_action("3"));
  CHECK(e.action("x").invertible);
  for (elem a = 0; a < e.size(); ++a) {
    CHECK(e.act("x^-1", e.act("x", a)) == a);
    CHECK(e.act("(1-x)^-1", e.act("1-x", a)) == a);
    CHECK(e.act("1-x", a) == e.sub(a, e.act("x", a)));
    CHECK(e.act("1+x", a) == e.add(a, e.act("x", a)));
  }
  // plain x is not invertible, so the extension is rejected
  CHECK_THROWS_AS(extend_to_r2(make_pm(3, 2, false)), MagmaError);
}

TEST_CASE("the order-729 gallery module") {
  FiniteModule c = build_c();
  CHECK(c.size() == 729);
  CHECK(c.exps() == std::vector<int>{3, 2, 1});
  CHECK(is_cocyclic(c));
  std::vector<SubSet> chain = socle_series(c);
  REQUIRE(chain.size() == 3);
  CHECK(chain[0].size() == 3);
  CHECK(chain[1].size() == 27);
  CHECK(jacobson_radical(c) == chain[1]);
  CHECK(gen_count(c) == 3);  // same generator count as the order-729 P module
  // "3" is the triple-add scalar
  for (elem a = 0; a < 729; ++a) CHECK(c.act("3", a) == c.scale(3, a));
}
