#pragma once

// Ternary algebras (a finite module plus a trilinear map tau subject to
// T0-T3), the loop construction x*y = x + y + tau(x,y,x-y) turning a ternary
// algebra into a quasimodule nilpotent of class at most 2, quasimodules
// themselves (a commutative Moufang loop with named scalar actions),
// their parastrophes, and isomorphism / anti-isomorphism search.
//
// tau is kept as a sparse list of monomials
//   value(out) += coef * a(i) * b(j) * c(k)
// which covers both inputs the callers use: coefficient formulas are sparse
// monomial lists already, and a full structure tensor on the canonical
// generators converts to one monomial per nonzero tensor coordinate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdq/loops.hpp"
#include "sdq/modules.hpp"
#include "sdq/subalgebra.hpp"

namespace sdq {

struct TauMonomial {
  int out = 0;       // target coordinate
  int64_t coef = 0;  // taken mod the target coordinate's modulus
  int i = 0, j = 0, k = 0;  // slot coordinates: coef * a(i) * b(j) * c(k)
};

struct TernaryAlgebra {
  FiniteModule module;
  std::vector<TauMonomial> tau;

  // tau(a, b, c) as an element of the module.
  elem eval(elem a, elem b, elem c) const;
  // tau-bar(x,y,z) = tau(x,y,z) + tau(y,z,x) + tau(z,x,y).
  elem bar(elem x, elem y, elem z) const;
  // tau on the canonical generators: tensor entry (i,j,k), densely indexed
  // as (i*t + j)*t + k.
  std::vector<elem> structure_tensor() const;
};

// Builds the monomial form from a full t^3 structure tensor (entry (i,j,k)
// at index (i*t+j)*t+k is the element tau(e_i,e_j,e_k)).
TernaryAlgebra ternary_from_tensor(FiniteModule module,
                                   const std::vector<elem>& tensor);

// Result of validate_ternary: ok, or the violated condition ("trilinear",
// "T0", "T1", "T2", "T3") with a witness.
struct TernaryCheck {
  bool ok = true;
  std::string condition;
  std::vector<elem> witness;
  std::string detail;
};

// Verifies trilinearity (full check on generators, plus sampled additivity
// in each slot) and T0-T3. T0/T2/T3 are checked on the structure tensor and
// extend to all arguments by trilinearity; T1 is checked on all pairs.
TernaryCheck validate_ternary(const TernaryAlgebra& a, uint64_t samples = 200);

// An(a) = { a : tau(a,x,y) = 0 = tau(x,y,a) for all x,y }; with T1 this
// also annihilates the middle slot.
SubSet annihilator(const TernaryAlgebra& a);

// ---------------------------------------------------------------------------
// Quasimodules.

// A commutative Moufang loop together with named scalar actions (loop
// endomorphisms, not necessarily bijective). The ideal lists the generators
// of the ideal I for the quasimodule axiom r x + (y + z) = (r x + y) + z;
// the reserved name "p" means the scalar p = add-p-times map.
struct Quasimodule {
  Loop loop{Magma(1, std::vector<uint16_t>{0}), 0};
  int64_t p = 3;
  std::vector<std::string> action_names;
  std::vector<std::vector<elem>> action_maps;
  std::vector<std::string> ideal;

  elem size() const { return loop.size(); }
  bool has_action(const std::string& name) const;
  const std::vector<elem>& action(const std::string& name) const;
  elem act(const std::string& name, elem a) const { return action(name)[size_t(a)]; }
  // The scalar c (c >= 0) through repeated loop addition.
  elem scale(int64_t c, elem a) const;

  // Loop tables and all actions equal (names compared as sorted sets).
  bool operator==(const Quasimodule& o) const;
};

// Verifies the quasimodule invariants on the instance: the loop is a CML;
// every action is a loop endomorphism fixing 0; actions commute pairwise;
// actions named e and e^-1 compose to the identity; when x and 1-x are both
// present, x a + (1-x) a = a; and the quasimodule axiom holds for every
// ideal generator (checked as u + (y+z) = (u+y) + z for every u in the
// generator's image and all y, z). Throws MagmaError naming the first
// failing clause.
void validate_quasimodule(const Quasimodule& q);

// 6.1: builds the loop x*y = x + y + tau(x,y,x-y) and wraps it as a
// quasimodule. Carries over every module action, synthesizes 1+x (as
// a + x a), 1-x (as a - x a, module arithmetic) and the permutation
// inverses x^-1, (1-x)^-1 when x is present and bijective. Verifies: the
// loop is a CML; each action is an endomorphism of the new loop; the
// quasimodule axiom; the centre formula Z = { a : tau-bar(a,x,y) = 0 for
// all x,y }; and that the associator subloop is generated by the image of
// tau-bar. Throws MagmaError naming the failing clause.
Quasimodule q_of(const TernaryAlgebra& a, int threads = 1);

// 9.1: wraps arithmetical_form(m, w) as a quasimodule: loop x+y =
// (x/w)(w\y), action x = f (right translation by w), 1-x = g, plus 1+x and
// the permutation inverses. Verifies the quasimodule invariants and the
// reconstruction a*b = x a + (1-x) b on all pairs.
Quasimodule quasimodule_of_distributive(const Magma& m, elem w);

// 9.9 parastrophes: same loop, rewired scalar actions.
//   alpha: x -> (1-x),           1-x -> x
//   beta:  x -> x^-1,            1-x -> 1 - x^-1
//   gamma: x -> -x(1-x)^-1,      1-x -> (1-x)^-1
// The four actions x, 1-x, x^-1, (1-x)^-1 must be present; the result
// carries the rewired four, a re-synthesized 1+x, and any further actions
// (central scalars such as "3") verbatim.
enum class ParastropheKind { alpha, beta, gamma };
Quasimodule quasimodule_parastrophe(const Quasimodule& q, ParastropheKind kind);

// ---------------------------------------------------------------------------
// Hom search.

struct QmHomResult {
  std::optional<std::vector<elem>> map;
  bool complete = true;  // search space fully traversed (none is a proof)
  uint64_t nodes = 0;
};

enum class QmHomMode { iso, anti };

// Backtracking over images of a generating set of q1 (greedy, maximizing
// closure growth), extending each assignment by closure over loop sums and
// actions with conflict detection, pruned by (loop element order, orbit
// length under each action) profiles. iso matches actions by name; anti
// swaps x with 1-x and x^-1 with (1-x)^-1 (the loops are commutative, so
// the binary anti/iso distinction is vacuous; the content is the action
// swap). A found map is re-verified exhaustively. Throws MagmaError
// "budget exhausted" when complete = true was requested and the node budget
// is hit.
QmHomResult quasimodule_hom_search(const Quasimodule& q1,
                                   const Quasimodule& q2, QmHomMode mode,
                                   bool complete = true,
                                   uint64_t budget = 5000000);

}  // namespace sdq
