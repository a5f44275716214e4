#include "sdq/subalgebra.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace sdq {

SubSet::SubSet(elem n, const std::vector<elem>& elems) : SubSet(n) {
  for (elem x : elems) {
    if (x < 0 || x >= n) throw MagmaError("SubSet: element out of range");
    insert(x);
  }
}

bool SubSet::insert(elem x) {
  uint64_t& word = bits_[size_t(x) >> 6];
  uint64_t bit = uint64_t(1) << (x & 63);
  if (word & bit) return false;
  word |= bit;
  list_.insert(std::lower_bound(list_.begin(), list_.end(), x), x);
  return true;
}

bool SubSet::operator<(const SubSet& o) const {
  if (list_.size() != o.list_.size()) return list_.size() < o.list_.size();
  return list_ < o.list_;
}

size_t SubSet::hash() const {
  size_t h = size_t(n_);
  for (uint64_t w : bits_) h = h * 1000003u ^ size_t(w);
  return h;
}

bool SubSet::subset_of(const SubSet& o) const {
  if (n_ != o.n_) throw MagmaError("SubSet: universe mismatch");
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~o.bits_[i]) return false;
  return true;
}

Partition::Partition(elem n, std::vector<elem> canon)
    : n_(n), canon_(std::move(canon)) {
  for (elem x = 0; x < n_; ++x)
    if (canon_[size_t(x)] == x) ++classes_;
}

SubSet Partition::block_of(elem x) const {
  SubSet s(n_);
  elem r = rep(x);
  for (elem y = 0; y < n_; ++y)
    if (rep(y) == r) s.insert(y);
  return s;
}

std::vector<std::vector<elem>> Partition::blocks() const {
  std::vector<std::vector<elem>> out;
  std::vector<elem> slot(size_t(n_), -1);
  for (elem x = 0; x < n_; ++x) {
    elem r = rep(x);
    if (slot[size_t(r)] < 0) {
      slot[size_t(r)] = elem(out.size());
      out.emplace_back();
    }
    out[size_t(slot[size_t(r)])].push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------

SubSet closure(const Magma& m, const std::vector<elem>& gens) {
  if (gens.empty()) throw MagmaError("closure: empty generator set");
  const elem n = m.size();
  SubSet s(n);
  std::vector<elem> work;
  for (elem g : gens) {
    if (g < 0 || g >= n) throw MagmaError("closure: generator out of range");
    if (s.insert(g)) work.push_back(g);
  }
  const DivisionTables& div = m.divisions();
  auto push = [&](elem x) {
    if (s.insert(x)) work.push_back(x);
  };
  // Worklist: combine each newly added element with everything present.
  for (size_t i = 0; i < work.size(); ++i) {
    elem a = work[i];
    // snapshot: elements list only grows, and pairs with later entries are
    // handled when those entries are popped themselves
    std::vector<elem> present = s.elements();
    for (elem b : present) {
      push(m.at(a, b));
      push(m.at(b, a));
      push(elem(div.ldiv[size_t(a) * n + b]));
      push(elem(div.ldiv[size_t(b) * n + a]));
      push(elem(div.rdiv[size_t(a) * n + b]));
      push(elem(div.rdiv[size_t(b) * n + a]));
    }
  }
  return s;
}

SubSet closure(const Magma& m, const SubSet& gens) {
  return closure(m, gens.elements());
}

namespace {

struct SubSetHash {
  size_t operator()(const SubSet& s) const { return s.hash(); }
};

}  // namespace

SubFamily all_subquasigroups(const Magma& m, size_t budget) {
  const elem n = m.size();
  SubFamily fam;
  std::unordered_set<SubSet, SubSetHash> seen;
  std::deque<SubSet> queue;
  bool over = false;
  auto add = [&](SubSet s) {
    if (over) return;
    if (seen.size() >= budget && !seen.count(s)) {
      over = true;
      return;
    }
    if (seen.insert(s).second) queue.push_back(std::move(s));
  };
  // Closures of singletons and pairs generate the whole family under joins.
  for (elem a = 0; a < n && !over; ++a) add(closure(m, {a}));
  for (elem a = 0; a < n && !over; ++a)
    for (elem b = a + 1; b < n && !over; ++b) add(closure(m, {a, b}));
  // Join-closure: combine each queued subset with every known one.
  while (!queue.empty() && !over) {
    SubSet s = std::move(queue.front());
    queue.pop_front();
    std::vector<SubSet> snapshot(seen.begin(), seen.end());
    for (const SubSet& t : snapshot) {
      if (s == t || s.is_full() || t.is_full()) continue;
      std::vector<elem> gens = s.elements();
      const std::vector<elem>& te = t.elements();
      gens.insert(gens.end(), te.begin(), te.end());
      add(closure(m, gens));
      if (over) break;
    }
  }
  fam.complete = !over;
  fam.subs.assign(seen.begin(), seen.end());
  std::sort(fam.subs.begin(), fam.subs.end());
  return fam;
}

SubSet coset_product(const Magma& m, const SubSet& P, elem a, elem b) {
  const elem n = m.size();
  SubSet out(n);
  std::vector<elem> Pa, Pb;
  Pa.reserve(size_t(P.size()));
  Pb.reserve(size_t(P.size()));
  for (elem x : P.elements()) Pa.push_back(m.at(x, a));
  for (elem y : P.elements()) Pb.push_back(m.at(y, b));
  for (elem u : Pa)
    for (elem v : Pb) out.insert(m.at(u, v));
  return out;
}

namespace {

// Union-find with path halving; merge enqueues the C1 consequences.
struct UnionFind {
  std::vector<elem> parent;
  explicit UnionFind(elem n) : parent(size_t(n)) {
    for (elem i = 0; i < n; ++i) parent[size_t(i)] = i;
  }
  elem find(elem x) {
    while (parent[size_t(x)] != x) {
      parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
      x = parent[size_t(x)];
    }
    return x;
  }
  // Returns true if a merge actually happened.
  bool unite(elem a, elem b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[size_t(b)] = a;  // keep the smaller representative
    return true;
  }
};

}  // namespace

Partition principal_congruence(
    const Magma& m, const std::vector<std::pair<elem, elem>>& seed) {
  const elem n = m.size();
  UnionFind uf(n);
  std::deque<std::pair<elem, elem>> work(seed.begin(), seed.end());
  while (!work.empty()) {
    auto [a, b] = work.front();
    work.pop_front();
    if (!uf.unite(a, b)) continue;
    for (elem c = 0; c < n; ++c) {
      elem l1 = m.at(a, c), l2 = m.at(b, c);
      if (uf.find(l1) != uf.find(l2)) work.emplace_back(l1, l2);
      elem r1 = m.at(c, a), r2 = m.at(c, b);
      if (uf.find(r1) != uf.find(r2)) work.emplace_back(r1, r2);
    }
  }
  std::vector<elem> canon(static_cast<size_t>(n));
  for (elem x = 0; x < n; ++x) canon[size_t(x)] = uf.find(x);
  // Path-halving leaves the minimum as root (unite keeps the smaller rep),
  // so canon[x] is already the smallest element of x's class.
  return Partition(n, std::move(canon));
}

NormalityResult is_normal(const Magma& m, const SubSet& P,
                          NormalityMethod method) {
  NormalityResult res;
  if (P.size() == 0) throw MagmaError("is_normal: empty subset");
  if (method == NormalityMethod::congruence) {
    // Glue P x P and test whether P comes back out as a whole block.
    std::vector<std::pair<elem, elem>> seed;
    const std::vector<elem>& es = P.elements();
    for (size_t i = 1; i < es.size(); ++i) seed.emplace_back(es[0], es[i]);
    Partition cong = principal_congruence(m, seed);
    res.block = cong.block_of(es[0]);
    res.normal = (res.block == P);
    return res;
  }
  // Coset-cardinality criterion; only sound for left-distributive input.
  if (!m.holds(identities::left_distributive()))
    throw MagmaError(
        "is_normal: coset_cardinality method requires left distributivity");
  // Distinct translates P*a repeat; dedup them before forming the quadratic
  // pair sweep.
  const elem n = m.size();
  std::vector<SubSet> translates;
  std::vector<elem> translate_rep;  // an `a` giving each distinct P*a
  {
    std::unordered_set<SubSet, SubSetHash> distinct;
    for (elem a = 0; a < n; ++a) {
      SubSet Pa(n);
      for (elem x : P.elements()) Pa.insert(m.at(x, a));
      if (distinct.insert(Pa).second) {
        translates.push_back(std::move(Pa));
        translate_rep.push_back(a);
      }
    }
  }
  for (size_t i = 0; i < translates.size(); ++i) {
    for (size_t j = 0; j < translates.size(); ++j) {
      SubSet prod(n);
      for (elem u : translates[i].elements())
        for (elem v : translates[j].elements()) prod.insert(m.at(u, v));
      if (prod.size() != P.size()) {
        res.normal = false;
        res.witness_a = translate_rep[i];
        res.witness_b = translate_rep[j];
        res.witness_card = prod.size();
        res.block = std::move(prod);
        return res;
      }
    }
  }
  res.normal = true;
  return res;
}

HamiltonianResult is_hamiltonian(const Magma& m, HamiltonianStrategy strategy,
                                 elem base, size_t budget) {
  HamiltonianResult res;
  const elem n = m.size();
  if (base < 0 || base >= n) throw MagmaError("is_hamiltonian: base out of range");
  if (strategy == HamiltonianStrategy::automatic) {
    strategy = m.holds(identities::left_distributive())
                   ? HamiltonianStrategy::two_generated
                   : HamiltonianStrategy::exhaustive;
  }
  if (strategy == HamiltonianStrategy::two_generated) {
    // For a left-distributive quasigroup, normality of every two-generated
    // subquasigroup <x, base> for one fixed base already forces every
    // subquasigroup to be normal, so this sweep is a complete decision
    // procedure there. Refuse to run when the hypothesis fails rather than
    // silently give a partial answer.
    if (!m.holds(identities::left_distributive()))
      throw MagmaError(
          "is_hamiltonian: two_generated strategy requires left "
          "distributivity");
    res.used = HamiltonianStrategy::two_generated;
    // Many <x, base> coincide; dedup before the (costlier) normality tests.
    std::unordered_set<SubSet, SubSetHash> distinct;
    for (elem x = 0; x < n; ++x) {
      if (x == base) continue;
      distinct.insert(closure(m, {x, base}));
    }
    std::vector<SubSet> subs(distinct.begin(), distinct.end());
    std::sort(subs.begin(), subs.end());
    for (SubSet& s : subs) {
      ++res.subquasigroups_checked;
      NormalityResult nr = is_normal(m, s);
      if (!nr.normal) {
        res.hamiltonian = false;
        res.offender = std::move(s);
        return res;
      }
    }
    res.hamiltonian = true;
    return res;
  }
  res.used = HamiltonianStrategy::exhaustive;
  SubFamily fam = all_subquasigroups(m, budget);
  if (!fam.complete)
    throw MagmaError("is_hamiltonian: subquasigroup budget exhausted");
  for (SubSet& s : fam.subs) {
    ++res.subquasigroups_checked;
    NormalityResult nr = is_normal(m, s);
    if (!nr.normal) {
      res.hamiltonian = false;
      res.offender = std::move(s);
      return res;
    }
  }
  res.hamiltonian = true;
  return res;
}

bool is_simple(const Magma& m) {
  const elem n = m.size();
  if (n <= 1) return false;
  for (elem a = 0; a < n; ++a)
    for (elem b = a + 1; b < n; ++b) {
      Partition p = principal_congruence(m, {{a, b}});
      if (p.class_count() != 1) return false;
    }
  return true;
}

}  // namespace sdq
