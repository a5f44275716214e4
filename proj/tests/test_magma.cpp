#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "sdq/gallery.hpp"
#include "sdq/magma.hpp"
#include "test_util.hpp"

using namespace sdq;

namespace {

// The 3-element Steiner quasigroup x*y = -x-y (mod 3): idempotent,
// commutative and key-symmetric.
Magma steiner3() {
  std::vector<uint16_t> t(9);
  for (elem a = 0; a < 3; ++a)
    for (elem b = 0; b < 3; ++b) t[size_t(a) * 3 + b] = uint16_t((6 - a - b) % 3);
  return Magma(3, std::move(t));
}

Magma z_add(elem n) {
  std::vector<uint16_t> t(size_t(n) * size_t(n));
  for (elem a = 0; a < n; ++a)
    for (elem b = 0; b < n; ++b) t[size_t(a) * n + b] = uint16_t((a + b) % n);
  return Magma(n, std::move(t));
}

}  // namespace

TEST_CASE("construction, indexing and divisions") {
  Magma m = z_add(5);
  CHECK(m.size() == 5);
  for (elem a = 0; a < 5; ++a)
    for (elem b = 0; b < 5; ++b) {
      CHECK(m.at(a, b) == (a + b) % 5);
      CHECK(m.at(a, m.ldiv(a, b)) == b);
      CHECK(m.at(m.rdiv(a, b), a) == b);
    }
  const DivisionTables& d = m.divisions();
  CHECK(d.ldiv.size() == 25);
  CHECK(d.rdiv.size() == 25);
  CHECK(m.label(3) == "3");  // default labels are the indices
}

TEST_CASE("construction rejects malformed tables") {
  CHECK_THROWS_AS(Magma(2, std::vector<uint16_t>{0, 1, 1}), MagmaError);
  CHECK_THROWS_AS(Magma(2, std::vector<uint16_t>{0, 1, 1, 2}), MagmaError);
  CHECK_THROWS_AS(Magma(0, std::vector<uint16_t>{}), MagmaError);
  CHECK_THROWS_AS(
      Magma(2, std::vector<uint16_t>{0, 1, 1, 0}, {"just-one-label"}),
      MagmaError);
}

TEST_CASE("text format round-trip with labels") {
  Magma m(2, {0, 1, 1, 0}, {"e", "g"});
  Magma back = Magma::load(m.save());
  CHECK(back == m);
  CHECK(back.label(0) == "e");
  CHECK(back.label(1) == "g");
  CHECK_THROWS_AS(Magma::load("2\n0 1\n"), MagmaError);      // short table
  CHECK_THROWS_AS(Magma::load("2\n0 1\n1 7\n"), MagmaError); // range
  CHECK_THROWS_AS(Magma::load(""), MagmaError);
  Magma d1 = build_d1();
  CHECK(Magma::load(d1.save()) == d1);
  CHECK(Magma::load(d1.save()).label(1) == "(0,0,0,1)");
}

TEST_CASE("is_latin reports the broken line") {
  CHECK(is_latin(z_add(7)).ok);
  // duplicate in row 0
  LatinCheck r = is_latin(Magma(2, {0, 0, 1, 0}));
  CHECK(!r.ok);
  CHECK(r.kind == LatinCheck::Kind::row);
  CHECK(r.index == 0);
  CHECK(r.value == 0);
  CHECK(r.first_pos == 0);
  CHECK(r.second_pos == 1);
  CHECK(!r.describe().empty());
  // rows fine, column 0 duplicated
  LatinCheck c = is_latin(Magma(2, {0, 1, 0, 1}));
  CHECK(!c.ok);
  CHECK(c.kind == LatinCheck::Kind::column);
  CHECK(c.index == 0);
}

TEST_CASE("identity catalogue on known structures") {
  Magma s = steiner3();
  CHECK(s.holds(identities::idempotent()));
  CHECK(s.holds(identities::commutative()));
  CHECK(s.holds(identities::key_symmetric()));
  CHECK(s.holds(identities::medial()));
  CHECK(!s.holds(identities::associative()));
  Magma z = z_add(9);
  CHECK(z.holds(identities::associative()));
  CHECK(z.holds(identities::medial()));
  CHECK(!z.holds(identities::idempotent()));
  // memoized holds() stays consistent across repeated queries
  CHECK(s.holds(identities::medial()));
  Magma copy = s;  // caches are shared between copies
  CHECK(copy.holds(identities::medial()));
}

TEST_CASE("order-81 gallery quasigroup: laws and frozen medial witness") {
  Magma m = build_d1();
  CHECK(is_latin(m).ok);
  CHECK(m.holds(identities::idempotent()));
  CHECK(m.holds(identities::commutative()));
  CHECK(m.holds(identities::key_symmetric()));
  CHECK(m.holds(identities::left_distributive()));
  CHECK(m.holds(identities::right_distributive()));
  CHECK(m.holds(identities::ch_law()));
  IdentityResult r = check_identity(m, identities::medial());
  CHECK(!r.holds);
  // row-major lex-first counterexample, variables by first appearance
  CHECK(r.assignment == std::vector<elem>{0, 1, 3, 9});
  CHECK(m.label(r.lhs_value) == "(0,1,1,1)");
  CHECK(m.label(r.rhs_value) == "(2,1,1,1)");
  // the threaded sweep returns the same first witness
  IdentityResult r2 = check_identity(m, identities::medial(), 2);
  CHECK(r2.assignment == r.assignment);
  CHECK(r2.lhs_value == r.lhs_value);
  CHECK(r2.rhs_value == r.rhs_value);
}

TEST_CASE("fast evaluator agrees with the naive evaluator on random tables") {
  std::mt19937 rng(0x5d1a);
  const Identity* ids[] = {
      &identities::idempotent(),        &identities::commutative(),
      &identities::key_symmetric(),     &identities::left_distributive(),
      &identities::right_distributive(), &identities::medial(),
      &identities::ch_law(),            &identities::associative()};
  for (int t = 0; t < 50; ++t) {
    elem n = elem(1 + t % 5);
    Magma m = testutil::random_magma(n, rng);
    for (const Identity* id : ids) {
      IdentityResult a = check_identity(m, *id);
      IdentityResult b = check_identity_naive(m, *id);
      REQUIRE(a.holds == b.holds);
      if (!a.holds) {
        REQUIRE(a.assignment == b.assignment);
        REQUIRE(a.lhs_value == b.lhs_value);
        REQUIRE(a.rhs_value == b.rhs_value);
      }
    }
  }
}

TEST_CASE("Identity::parse matches the built-in catalogue") {
  Identity med = Identity::parse("medial", "(x*y)*(u*v) = (x*u)*(y*v)");
  CHECK(med.var_count == 4);
  std::mt19937 rng(0xfeed);
  for (int t = 0; t < 20; ++t) {
    Magma m = testutil::random_magma(elem(2 + t % 4), rng);
    IdentityResult a = check_identity(m, med);
    IdentityResult b = check_identity(m, identities::medial());
    CHECK(a.holds == b.holds);
    if (!a.holds) CHECK(a.assignment == b.assignment);
  }
  CHECK_THROWS_AS(Identity::parse("bad", "x*y"), MagmaError);
  CHECK_THROWS_AS(Identity::parse("bad", "x*(y = z"), MagmaError);
}

TEST_CASE("parastrophes") {
  std::mt19937 rng(0x600d);
  for (int t = 0; t < 10; ++t) {
    Magma m = testutil::random_latin(elem(2 + t % 4), rng);
    Magma op = parastrophe(m, Parastrophe::opposite);
    Magma ld = parastrophe(m, Parastrophe::left_division);
    Magma rd = parastrophe(m, Parastrophe::right_division);
    CHECK(is_latin(op).ok);
    CHECK(is_latin(ld).ok);
    CHECK(is_latin(rd).ok);
    for (elem a = 0; a < m.size(); ++a)
      for (elem b = 0; b < m.size(); ++b) {
        CHECK(op.at(a, b) == m.at(b, a));
        CHECK(ld.at(a, m.at(a, b)) == b);
        CHECK(rd.at(m.at(b, a), a) == b);
        CHECK(parastrophe(m, Parastrophe::od).at(a, b) == m.ldiv(b, a));
        CHECK(parastrophe(m, Parastrophe::do_).at(a, b) == m.rdiv(a, b));
      }
    CHECK(parastrophe(op, Parastrophe::opposite) == m);
  }
  // parastrophes need a Latin square
  CHECK_THROWS_AS(parastrophe(Magma(2, {0, 0, 0, 0}),
                              Parastrophe::left_division),
                  MagmaError);
}

TEST_CASE("order-15 gallery example: symmetric-like laws fail as expected") {
  Magma m = build_example_810vi();
  CHECK(m.size() == 15);
  CHECK(is_latin(m).ok);
  CHECK(m.holds(identities::commutative()));
  CHECK(!m.holds(identities::idempotent()));
  CHECK(!m.holds(identities::left_distributive()));
}
