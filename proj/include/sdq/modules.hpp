#pragma once

// Finite modules over Z[x]-style rings, presented concretely: the carrier is
// a product of cyclic p-groups Z_{p^{k_0}} x ... x Z_{p^{k_{t-1}}} and every
// ring generator acts through an integer matrix taken componentwise mod the
// moduli. Elements are mixed-radix indices with coordinate 0 most
// significant: index(a) = a(0)*stride_0 + ... + a(t-1), stride_i = product
// of the later moduli.
//
// The P_m family: moduli (p^m, p^{m-1}, ..., p) with the shift action
// (x a)(i) = p*a(i+1) (last coordinate 0); the shifted variant P_{m,1}
// replaces x by x-1, i.e. (x a)(i) = p*a(i+1) - a(i).

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sdq/magma.hpp"
#include "sdq/subalgebra.hpp"

namespace sdq {

// The ring presentation a module lives over: the prime p and the names of
// the endomorphisms generating the maximal ideal under study ("p" is the
// reserved name for multiplication by p; every other entry must name an
// action of the module).
struct RingSpec {
  int64_t p = 0;
  std::vector<std::string> ideal;
};

struct Action {
  std::string name;
  std::vector<int64_t> mat;  // t x t, row-major; row i is taken mod p^{k_i}
  bool invertible = false;   // declared; verified at construction
  int64_t order = 0;         // multiplicative order, when invertible
};

class FiniteModule {
 public:
  FiniteModule(int64_t p, std::vector<int> exps, std::vector<Action> actions,
               std::vector<std::string> ideal);

  // Text format: first line "p k0 k1 ...", then "action <name>" blocks with
  // t rows of t integers, then optional "invertible <name>" and
  // "ideal <name> <name> ..." lines. '#' starts a comment.
  static FiniteModule load(const std::string& text);
  std::string save() const;

  int64_t p() const { return p_; }
  int rank() const { return int(exps_.size()); }
  const std::vector<int>& exps() const { return exps_; }
  const std::vector<int64_t>& moduli() const { return moduli_; }
  const std::vector<int64_t>& strides() const { return strides_; }
  elem size() const { return n_; }
  const std::vector<Action>& actions() const { return actions_; }
  const std::vector<std::string>& ideal() const { return ideal_; }
  const Action& action(const std::string& name) const;
  bool has_action(const std::string& name) const;

  // Mixed-radix element indexing.
  elem encode(const std::vector<int64_t>& coords) const;
  std::vector<int64_t> decode(elem a) const;
  std::string label(elem a) const;  // "(a0,a1,...)"

  // Additive group and actions.
  elem add(elem a, elem b) const;
  elem neg(elem a) const;
  elem sub(elem a, elem b) const { return add(a, neg(b)); }
  elem scale(int64_t c, elem a) const;
  elem act(const std::string& name, elem a) const;
  elem act(size_t action_index, elem a) const;
  int64_t additive_order(elem a) const;
  elem basis(int i) const;  // e_i

  // Additive + action span of gens (a submodule; finiteness makes closure
  // under + enough to give negation).
  SubSet span(const std::vector<elem>& gens) const;

 private:
  // Small modules get one-shot addition/action lookup tables, built lazily
  // and shared between copies (the module data is immutable).
  struct DenseCache {
    std::once_flag once;
    bool built = false;
    std::vector<uint16_t> add;                // n*n row-major
    std::vector<std::vector<uint16_t>> acts;  // one table per action
  };
  const DenseCache* dense() const;

  int64_t p_;
  std::vector<int> exps_;
  std::vector<int64_t> moduli_, strides_;
  elem n_;
  std::vector<Action> actions_;
  std::vector<std::string> ideal_;
  std::shared_ptr<DenseCache> dense_ = std::make_shared<DenseCache>();

  void validate();
};

// ---------------------------------------------------------------------------
// The P_m / P_{m,1} family on the carrier (p^m, ..., p).

// plain: action x with (x a)(i) = p*a(i+1); ideal (p, x).
// shifted = P_{m,1}: action x with (x a)(i) = p*a(i+1) - a(i), which is
// invertible; ideal (p, 1+x).
FiniteModule make_pm(int64_t p, int m, bool shifted);

// Adds the inverse actions x^-1 and (1-x)^-1 (and the action 1-x itself) as
// matrix powers, after verifying that x and 1-x are bijections; their
// multiplicative orders are recorded on the actions. Throws MagmaError
// naming the singular action and a nonzero kernel element when not
// invertible.
FiniteModule extend_to_r2(const FiniteModule& m);

// ---------------------------------------------------------------------------
// Socle series, radical, generators, submodules.

// S_1 = { a : e(a) = 0 for every ideal action e }, S_{k+1} = { a : e(a) in
// S_k for every e }; ascending chain ending at the full module. `ideal`
// entries are action names, with "p" meaning multiplication by p. Throws
// when the module is not ideal-torsion (the chain would stall).
std::vector<SubSet> socle_series(const FiniteModule& m,
                                 const std::vector<std::string>& ideal);
std::vector<SubSet> socle_series(const FiniteModule& m);  // declared ideal

// J(M) = pM + sum of e(M) over the non-"p" ideal actions e, as a span.
// Requires the declared ideal to be torsion (verified).
SubSet jacobson_radical(const FiniteModule& m);

// log_p |M / J(M)|. With cross_check, also determines the minimal size of a
// generating set by direct search (only feasible for small modules) and
// throws on disagreement.
int gen_count(const FiniteModule& m, bool cross_check = false);

struct SubmoduleLattice {
  std::vector<SubSet> subs;  // sorted by (size, elements)
  // (i, j) present iff subs[i] is a proper subset of subs[j].
  std::vector<std::pair<int, int>> inclusions;
  bool complete = true;
};

// All submodules: cyclic spans of every element, then join closure to a
// fixpoint. `budget` bounds the family size.
SubmoduleLattice submodules(const FiniteModule& m, size_t budget = 100000);

// true iff |S_1| = p (simple socle; essential automatically in a finite
// module).
bool is_cocyclic(const FiniteModule& m);

// ---------------------------------------------------------------------------
// Isomorphism and aligned quotients.

struct ModuleIso {
  std::optional<std::vector<elem>> map;  // map[a] = image; empty when none
  bool complete = true;                  // search exhausted within budget
  uint64_t nodes = 0;                    // candidate images tried
};

// Complete backtracking search for an isomorphism (additive + every action
// of `a`), over images of a generating sequence of `a`, pruned by
// (additive order, per-action orbit size) fingerprints. Actions are paired
// by name: every action name of `a` must also be carried by `b`; actions
// only `b` has are ignored.
ModuleIso module_iso(const FiniteModule& a, const FiniteModule& b,
                     uint64_t budget = 5000000);

// Same search, but the image is constrained to the submodule `image` of b
// (|image| must equal |a|); used to test "b has a submodule isomorphic
// to a".
ModuleIso module_iso_into(const FiniteModule& a, const FiniteModule& b,
                          const SubSet& image, uint64_t budget = 5000000);

// Quotient M/S for a coordinate-aligned submodule S = prod p^{q_i}Z_{p^{k_i}}
// (each coordinate cut at a fixed power); the result has moduli (p^{q_0},
// ..., p^{q_{t-1}}) and the same action matrices. Throws when S is not of
// this shape, is not action-closed, or the matrices do not stay well-defined
// on the quotient moduli.
FiniteModule aligned_quotient(const FiniteModule& m, const SubSet& s);

}  // namespace sdq
