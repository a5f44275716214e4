#pragma once

// Loops (quasigroups with a two-sided neutral element), commutative Moufang
// loop invariants, and arithmetical-form recovery for distributive
// quasigroups.
//
// Loop operations are written additively in the comments: a+b is the magma
// product, 0 the neutral element, [a,b,c] the associator, i.e. the unique z
// with z + (a+(b+c)) = (a+b)+c.

#include <optional>
#include <string>
#include <vector>

#include "sdq/magma.hpp"
#include "sdq/subalgebra.hpp"

namespace sdq {

// The unique two-sided neutral element of m, if one exists.
std::optional<elem> find_neutral(const Magma& m);

struct Loop {
  Magma magma;
  elem neutral = -1;

  elem size() const { return magma.size(); }
  elem add(elem a, elem b) const { return magma.at(a, b); }
  // -x: the unique z with x + z = 0 (two-sided once commutativity holds).
  elem neg(elem x) const { return magma.ldiv(x, neutral); }
  // a - b = a + (-b)
  elem sub(elem a, elem b) const { return add(a, neg(b)); }
};

// Wraps a magma as a loop; throws MagmaError when the table is not a Latin
// square or has no neutral element.
Loop as_loop(const Magma& m);

struct CmlCheck {
  bool holds = true;
  std::string law;         // on failure: "commutative" or "ch"
  IdentityResult witness;  // the first failing assignment of that law
};

// Checks x+y = y+x and (x+x)+(a+b) = (x+a)+(x+b) exhaustively.
CmlCheck is_commutative_moufang(const Loop& l, int threads = 1);

// [a,b,c]: the unique z with z + (a+(b+c)) = (a+b)+c.
elem associator(const Loop& l, elem a, elem b, elem c);

// Z(L) = { a : (a+x)+y = a+(x+y) for all x,y }, by per-candidate scan with
// early exit. (For a commutative loop this is the centre.)
SubSet centre(const Loop& l, int threads = 1);

// A(L): the subloop generated by all associators [a,b,c]; full n^3 sweep
// followed by subalgebra closure.
SubSet associator_subloop(const Loop& l, int threads = 1);

// 0 for the trivial loop, 1 for abelian, else 1 + class of L/Z(L). Throws
// when the centre is trivial on a non-abelian loop (the chain would not
// terminate; cannot happen for a commutative Moufang loop). When
// `generated_by` is given, additionally enforces class <= generated_by - 1.
int nilpotence_class(const Loop& l, std::optional<int> generated_by = {});

// Quotient loop L/P for a normal subloop P. Normality is established two
// independent ways -- the associator condition [p,x,y] in P for all p in P,
// x,y in L, and direct coset well-definedness -- and both must agree;
// throws MagmaError when P is not a normal subloop.
Loop quotient(const Loop& l, const SubSet& p);

struct ArithmeticalForm {
  Loop loop;            // x+y = (x/w) * (w\y), neutral w
  std::vector<elem> f;  // f(x) = x*w
  std::vector<elem> g;  // g(y) = w*y
  elem a = -1;          // central summand of x*y = f(x)+g(y)+a; here the
                        // neutral w itself (i.e. the summand is zero)
};

// Recovers the arithmetical form of a distributive quasigroup at base point
// w: builds the loop, f and g, then verifies every clause of the contract
// (loop is a commutative Moufang loop with neutral w; f,g are commuting
// 1-central automorphisms, meaning x+f(x) and x+g(x) are central; f+g = 1;
// and x*y = f(x)+g(y) reproduces the source table). Throws MagmaError
// naming the first clause that fails; `not distributive` when the
// precondition fails.
ArithmeticalForm arithmetical_form(const Magma& m, elem w);

}  // namespace sdq
