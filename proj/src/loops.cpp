#include "sdq/loops.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>

namespace sdq {

std::optional<elem> find_neutral(const Magma& m) {
  const elem n = m.size();
  for (elem e = 0; e < n; ++e) {
    bool ok = true;
    for (elem a = 0; a < n && ok; ++a)
      ok = m.at(e, a) == a && m.at(a, e) == a;
    if (ok) return e;  // unique: a second neutral e' gives e = e*e' = e'
  }
  return std::nullopt;
}

Loop as_loop(const Magma& m) {
  LatinCheck lc = is_latin(m);
  if (!lc.ok) throw MagmaError("as_loop: " + lc.describe());
  std::optional<elem> e = find_neutral(m);
  if (!e) throw MagmaError("as_loop: no neutral element");
  return Loop{m, *e};
}

CmlCheck is_commutative_moufang(const Loop& l, int threads) {
  CmlCheck out;
  IdentityResult comm = check_identity(l.magma, identities::commutative(), threads);
  if (!comm.holds) {
    out.holds = false;
    out.law = "commutative";
    out.witness = std::move(comm);
    return out;
  }
  IdentityResult ch = check_identity(l.magma, identities::ch_law(), threads);
  if (!ch.holds) {
    out.holds = false;
    out.law = "ch";
    out.witness = std::move(ch);
  }
  return out;
}

elem associator(const Loop& l, elem a, elem b, elem c) {
  // z + (a+(b+c)) = (a+b)+c has a unique solution in any quasigroup.
  elem t = l.add(a, l.add(b, c));
  elem s = l.add(l.add(a, b), c);
  return l.magma.rdiv(t, s);
}

namespace {

// Runs fn(lo, hi) over a chunking of 0..n-1 on `threads` workers.
void parallel_chunks(elem n, int threads,
                     const std::function<void(elem, elem)>& fn) {
  if (threads <= 1 || n < 4) {
    fn(0, n);
    return;
  }
  int nw = std::min<int>(threads, n);
  std::vector<std::thread> pool;
  elem per = (n + nw - 1) / nw;
  for (int w = 0; w < nw; ++w) {
    elem lo = per * w, hi = std::min<elem>(n, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

SubSet centre(const Loop& l, int threads) {
  const elem n = l.size();
  std::vector<char> central(size_t(n), 0);
  parallel_chunks(n, threads, [&](elem lo, elem hi) {
    for (elem a = lo; a < hi; ++a) {
      bool ok = true;
      for (elem x = 0; x < n && ok; ++x) {
        elem ax = l.add(a, x);
        for (elem y = 0; y < n; ++y)
          if (l.add(ax, y) != l.add(a, l.add(x, y))) {
            ok = false;
            break;
          }
      }
      central[size_t(a)] = ok ? 1 : 0;
    }
  });
  SubSet z(n);
  for (elem a = 0; a < n; ++a)
    if (central[size_t(a)]) z.insert(a);
  return z;
}

SubSet associator_subloop(const Loop& l, int threads) {
  const elem n = l.size();
  const DivisionTables& div = l.magma.divisions();
  const uint16_t* table = l.magma.data();
  // Collect every associator value; per-worker bitmaps, merged afterwards.
  int nw = std::max(1, threads);
  std::vector<std::vector<char>> hits(size_t(nw),
                                      std::vector<char>(size_t(n), 0));
  std::atomic<int> next_worker{0};
  parallel_chunks(n, threads, [&](elem lo, elem hi) {
    std::vector<char>& hit = hits[size_t(next_worker.fetch_add(1))];
    for (elem a = lo; a < hi; ++a)
      for (elem b = 0; b < n; ++b) {
        elem ab = table[size_t(a) * n + b];
        for (elem c = 0; c < n; ++c) {
          elem t = table[size_t(a) * n + table[size_t(b) * n + c]];
          elem s = table[size_t(ab) * n + c];
          hit[size_t(div.rdiv[size_t(t) * n + s])] = 1;
        }
      }
  });
  std::vector<elem> gens;
  for (elem z = 0; z < n; ++z)
    for (int w = 0; w < nw; ++w)
      if (hits[size_t(w)][size_t(z)]) {
        gens.push_back(z);
        break;
      }
  return closure(l.magma, gens);
}

int nilpotence_class(const Loop& l, std::optional<int> generated_by) {
  int cls = 0;
  Loop cur = l;
  while (cur.size() > 1) {
    SubSet z = centre(cur);
    if (z.size() == cur.size()) {
      ++cls;
      break;
    }
    if (z.size() <= 1)
      throw MagmaError(
          "nilpotence_class: trivial centre on a non-abelian loop; the "
          "central chain does not terminate");
    cur = quotient(cur, z);
    ++cls;
  }
  if (generated_by && cls > *generated_by - 1)
    throw MagmaError("nilpotence_class: class " + std::to_string(cls) +
                     " exceeds the bound " + std::to_string(*generated_by - 1) +
                     " for a " + std::to_string(*generated_by) +
                     "-generated commutative Moufang loop");
  return cls;
}

Loop quotient(const Loop& l, const SubSet& p) {
  const elem n = l.size();
  if (p.size() == 0 || !p.contains(l.neutral))
    throw MagmaError("quotient: subset is not a subloop (missing neutral)");
  if (!(closure(l.magma, p.elements()) == p))
    throw MagmaError("quotient: subset is not closed");
  const elem pn = p.size();
  if (n % pn != 0) throw MagmaError("quotient: subloop order does not divide loop order");

  // Normality, criterion 1: [q,x,y] in P for all q in P, x,y in L.
  bool assoc_ok = true;
  for (elem q : p.elements()) {
    for (elem x = 0; x < n && assoc_ok; ++x)
      for (elem y = 0; y < n; ++y)
        if (!p.contains(associator(l, q, x, y))) {
          assoc_ok = false;
          break;
        }
    if (!assoc_ok) break;
  }

  // Normality, criterion 2: the cosets x+P partition L and the induced
  // product on them is well defined.
  bool coset_ok = true;
  std::vector<elem> cid(size_t(n), -1);  // coset id per element
  std::vector<elem> rep;                 // least element of each coset
  for (elem x = 0; x < n && coset_ok; ++x) {
    if (cid[size_t(x)] >= 0) continue;
    elem id = elem(rep.size());
    rep.push_back(x);
    elem count = 0;
    for (elem q : p.elements()) {
      elem y = l.add(x, q);
      if (cid[size_t(y)] >= 0) {
        coset_ok = false;  // cosets overlap: not a partition
        break;
      }
      cid[size_t(y)] = id;
      ++count;
    }
    if (count != pn) coset_ok = false;
  }
  std::vector<uint16_t> qtable;
  if (coset_ok) {
    const elem qn = n / pn;
    qtable.assign(size_t(qn) * qn, 0);
    for (elem i = 0; i < qn && coset_ok; ++i)
      for (elem j = 0; j < qn; ++j)
        qtable[size_t(i) * qn + j] =
            uint16_t(cid[size_t(l.add(rep[size_t(i)], rep[size_t(j)]))]);
    // Well-definedness: cid(x+y) must only depend on (cid(x), cid(y)).
    for (elem x = 0; x < n && coset_ok; ++x)
      for (elem y = 0; y < n; ++y)
        if (cid[size_t(l.add(x, y))] !=
            elem(qtable[size_t(cid[size_t(x)]) * (n / pn) + cid[size_t(y)]])) {
          coset_ok = false;
          break;
        }
  }

  if (assoc_ok != coset_ok)
    throw MagmaError(
        "quotient: normality criteria disagree (associator condition vs "
        "coset well-definedness); this must not happen");
  if (!assoc_ok) throw MagmaError("quotient: subloop is not normal");

  const elem qn = n / pn;
  std::vector<std::string> labels;
  if (!l.magma.labels().empty()) {
    labels.reserve(size_t(qn));
    for (elem i = 0; i < qn; ++i)
      labels.push_back("[" + l.magma.label(rep[size_t(i)]) + "]");
  }
  Magma qm(qn, std::move(qtable), std::move(labels));
  return Loop{std::move(qm), cid[size_t(l.neutral)]};
}

ArithmeticalForm arithmetical_form(const Magma& m, elem w) {
  const elem n = m.size();
  if (w < 0 || w >= n) throw MagmaError("arithmetical_form: base point out of range");
  if (!m.holds(identities::left_distributive()) ||
      !m.holds(identities::right_distributive()))
    throw MagmaError("arithmetical_form: not distributive");

  // x + y := (x/w) * (w\y);  f(x) := x*w;  g(y) := w*y.
  std::vector<uint16_t> table(size_t(n) * n);
  for (elem x = 0; x < n; ++x) {
    elem xl = m.rdiv(w, x);  // x/w
    for (elem y = 0; y < n; ++y)
      table[size_t(x) * n + y] = uint16_t(m.at(xl, m.ldiv(w, y)));
  }
  Magma lm(n, std::move(table), m.labels());
  LatinCheck lc = is_latin(lm);
  if (!lc.ok)
    throw MagmaError("arithmetical_form: recovered table is not a quasigroup: " +
                     lc.describe());
  std::optional<elem> e = find_neutral(lm);
  if (!e || *e != w)
    throw MagmaError("arithmetical_form: base point is not neutral in the recovered loop");
  Loop loop{std::move(lm), w};

  CmlCheck cml = is_commutative_moufang(loop);
  if (!cml.holds)
    throw MagmaError("arithmetical_form: recovered loop is not a commutative "
                     "Moufang loop (law: " + cml.law + ")");

  std::vector<elem> f(static_cast<size_t>(n)), g(static_cast<size_t>(n));
  for (elem x = 0; x < n; ++x) {
    f[size_t(x)] = m.at(x, w);
    g[size_t(x)] = m.at(w, x);
  }
  auto is_permutation = [&](const std::vector<elem>& v) {
    std::vector<char> seen(size_t(n), 0);
    for (elem x : v) {
      if (seen[size_t(x)]) return false;
      seen[size_t(x)] = 1;
    }
    return true;
  };
  if (!is_permutation(f) || !is_permutation(g))
    throw MagmaError("arithmetical_form: f or g is not a permutation");
  // Automorphisms of the loop, and they commute.
  for (elem x = 0; x < n; ++x) {
    if (f[size_t(g[size_t(x)])] != g[size_t(f[size_t(x)])])
      throw MagmaError("arithmetical_form: f and g do not commute");
    for (elem y = 0; y < n; ++y) {
      if (f[size_t(loop.add(x, y))] != loop.add(f[size_t(x)], f[size_t(y)]))
        throw MagmaError("arithmetical_form: f is not an automorphism");
      if (g[size_t(loop.add(x, y))] != loop.add(g[size_t(x)], g[size_t(y)]))
        throw MagmaError("arithmetical_form: g is not an automorphism");
    }
  }
  // 1-central: x + f(x) and x + g(x) lie in the centre.
  SubSet z = centre(loop);
  for (elem x = 0; x < n; ++x)
    if (!z.contains(loop.add(x, f[size_t(x)])) ||
        !z.contains(loop.add(x, g[size_t(x)])))
      throw MagmaError("arithmetical_form: f or g is not 1-central");
  // The distributive relation g = 1 - f, and the product reproduction.
  for (elem x = 0; x < n; ++x)
    if (loop.add(f[size_t(x)], g[size_t(x)]) != x)
      throw MagmaError("arithmetical_form: f + g is not the identity");
  for (elem x = 0; x < n; ++x)
    for (elem y = 0; y < n; ++y)
      if (loop.add(f[size_t(x)], g[size_t(y)]) != m.at(x, y))
        throw MagmaError("arithmetical_form: f(x)+g(y) does not reproduce the product");

  return ArithmeticalForm{std::move(loop), std::move(f), std::move(g), w};
}

}  // namespace sdq
