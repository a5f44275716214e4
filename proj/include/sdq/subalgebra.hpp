#pragma once

// Subquasigroups, congruences and normality.
//
// A normal congruence is an equivalence r satisfying
//   (C1) a r b  =>  (ac) r (bc) and (ca) r (cb),
//   (C2) a r b and (ac) r (bd)  =>  c r d,
//   (C3) a r b and (ca) r (db)  =>  c r d;
// for finite quasigroups (C2) and (C3) follow from (C1). A subquasigroup is
// normal when it is a block of some normal congruence, and it suffices to
// look at the smallest congruence gluing P x P: any congruence with block P
// contains it, so P is a block of one iff it is a block of the smallest.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdq/magma.hpp"

namespace sdq {

// A subset of 0..n-1 kept both as a bitmap and as a sorted element list.
class SubSet {
 public:
  SubSet() = default;
  explicit SubSet(elem n) : n_(n), bits_((size_t(n) + 63) / 64, 0) {}
  SubSet(elem n, const std::vector<elem>& elems);

  elem universe() const { return n_; }
  elem size() const { return elem(list_.size()); }
  bool contains(elem x) const {
    return (bits_[size_t(x) >> 6] >> (x & 63)) & 1;
  }
  // Inserts x, keeping the list sorted; returns false if already present.
  bool insert(elem x);
  const std::vector<elem>& elements() const { return list_; }
  bool is_full() const { return size() == n_; }
  bool subset_of(const SubSet& o) const;

  bool operator==(const SubSet& o) const {
    return n_ == o.n_ && bits_ == o.bits_;
  }
  // Total order for deterministic set families (by size, then content).
  bool operator<(const SubSet& o) const;
  size_t hash() const;

 private:
  elem n_ = 0;
  std::vector<uint64_t> bits_;
  std::vector<elem> list_;
};

// Frozen union-find result: classes of a partition of 0..n-1.
class Partition {
 public:
  Partition(elem n, std::vector<elem> canon);

  elem universe() const { return n_; }
  elem rep(elem x) const { return canon_[size_t(x)]; }
  elem class_count() const { return classes_; }
  bool same(elem a, elem b) const { return rep(a) == rep(b); }
  // The class of x as a SubSet.
  SubSet block_of(elem x) const;
  // All classes, each sorted, ordered by smallest element.
  std::vector<std::vector<elem>> blocks() const;

 private:
  elem n_ = 0, classes_ = 0;
  std::vector<elem> canon_;  // canon_[x] = smallest element of x's class
};

// ---------------------------------------------------------------------------

// Smallest subset containing gens and closed under product, left division
// and right division. (For finite quasigroups product closure already
// implies the divisions; closing under all three is still linear here and
// keeps the contract obvious.) gens must be non-empty.
SubSet closure(const Magma& m, const std::vector<elem>& gens);
SubSet closure(const Magma& m, const SubSet& gens);
inline SubSet closure(const Magma& m, std::initializer_list<elem> gens) {
  return closure(m, std::vector<elem>(gens));
}

struct SubFamily {
  std::vector<SubSet> subs;  // sorted by (size, elements)
  bool complete = true;      // false when the budget cut the join closure short
};

// Every subquasigroup, found as closures of singletons and pairs followed by
// closing the family under joins to a fixpoint. `budget` bounds the number
// of distinct subalgebras held; when exceeded the partial family is returned
// with complete = false.
SubFamily all_subquasigroups(const Magma& m, size_t budget = 100000);

// { (x*a)*(y*b) : x,y in P }
SubSet coset_product(const Magma& m, const SubSet& P, elem a, elem b);

// Smallest equivalence containing `seed` pairs and closed under (C1); the
// C1-propagation enqueues (a*c, b*c) and (c*a, c*b) for every c whenever the
// classes of a and b merge.
Partition principal_congruence(const Magma& m,
                               const std::vector<std::pair<elem, elem>>& seed);

enum class NormalityMethod {
  congruence,        // block test in the principal congruence gluing P x P
  coset_cardinality  // |Pa * Pb| = |P| for all a, b (Lemma for
                     // left-distributive quasigroups only)
};

struct NormalityResult {
  bool normal = false;
  // congruence method: the block containing P (equals P iff normal).
  // coset-cardinality method: on failure the offending pair and cardinality.
  SubSet block;
  elem witness_a = -1, witness_b = -1;
  elem witness_card = -1;
};

NormalityResult is_normal(const Magma& m, const SubSet& P,
                          NormalityMethod method = NormalityMethod::congruence);

enum class HamiltonianStrategy { automatic, two_generated, exhaustive };

struct HamiltonianResult {
  bool hamiltonian = false;
  HamiltonianStrategy used = HamiltonianStrategy::exhaustive;
  size_t subquasigroups_checked = 0;
  std::optional<SubSet> offender;  // a non-normal subquasigroup, if any
};

// Hamiltonian = every subquasigroup is normal. For a left-distributive
// quasigroup it is enough that every two-generated subquasigroup <x, base>
// (x != base, one fixed base) is normal; the two_generated strategy does
// exactly that sweep, deduplicating the closures first, and refuses to run
// when left distributivity fails. `automatic` picks two_generated when
// left-distributivity holds, else exhaustive enumeration. Throws when the
// exhaustive enumeration exhausts its budget (a partial sweep proves
// nothing).
HamiltonianResult is_hamiltonian(
    const Magma& m, HamiltonianStrategy strategy = HamiltonianStrategy::automatic,
    elem base = 0, size_t budget = 100000);

// Simple = n > 1 and the principal congruence of every pair a != b collapses
// everything.
bool is_simple(const Magma& m);

}  // namespace sdq
