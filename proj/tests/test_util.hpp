// Shared helpers for the test suite: seeded random tables and brute-force
// oracles kept deliberately naive so that library results are checked
// against an independent implementation.
#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "sdq/magma.hpp"
#include "sdq/subalgebra.hpp"

namespace testutil {

using sdq::elem;
using sdq::Magma;

// Arbitrary magma table (not necessarily Latin) of order n.
inline Magma random_magma(elem n, std::mt19937& rng) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<uint16_t> t(size_t(n) * size_t(n));
  for (uint16_t& v : t) v = uint16_t(pick(rng));
  return Magma(n, std::move(t));
}

// Uniform-ish random Latin square of order n by row-wise backtracking with
// shuffled candidate order. n is tiny here, so this always terminates fast.
inline Magma random_latin(elem n, std::mt19937& rng) {
  std::vector<uint16_t> t(size_t(n) * size_t(n));
  std::vector<uint32_t> col_used(size_t(n), 0);
  std::vector<std::vector<int>> order(size_t(n), std::vector<int>{});
  for (elem r = 0; r < n;) {
    std::vector<int> base(size_t(n), 0);
    std::iota(base.begin(), base.end(), 0);
    std::shuffle(base.begin(), base.end(), rng);
    // fill row r by backtracking over columns
    std::vector<int> choice(size_t(n), -1);
    uint32_t row_used = 0;
    int c = 0;
    bool ok = true;
    std::vector<int> tried(size_t(n), 0);
    while (c < n) {
      int k = tried[size_t(c)];
      for (; k < n; ++k) {
        int v = base[size_t(k)];
        if ((row_used >> v & 1) || (col_used[size_t(c)] >> v & 1)) continue;
        break;
      }
      if (k == n) {
        tried[size_t(c)] = 0;
        if (--c < 0) {
          ok = false;  // row unfillable against fixed prefix: retry the row
          break;
        }
        int v = choice[size_t(c)];
        row_used &= ~(1u << v);
        col_used[size_t(c)] &= ~(1u << v);
        ++tried[size_t(c)];
        continue;
      }
      int v = base[size_t(k)];
      choice[size_t(c)] = v;
      tried[size_t(c)] = k;
      row_used |= 1u << v;
      col_used[size_t(c)] |= 1u << v;
      ++c;
    }
    if (!ok) continue;
    order[size_t(r)] = choice;
    for (elem cc = 0; cc < n; ++cc)
      t[size_t(r) * n + cc] = uint16_t(choice[size_t(cc)]);
    ++r;
  }
  return Magma(n, std::move(t));
}

// All set partitions of {0..n-1} as block-index vectors (restricted growth
// strings); Bell(5) = 52, so exhaustive is fine.
inline std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(size_t(n), 0);
  auto rec = [&](auto&& self, int i, int maxb) -> void {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (int b = 0; b <= maxb + 1; ++b) {
      a[size_t(i)] = b;
      self(self, i + 1, std::max(maxb, b));
    }
  };
  rec(rec, 0, -1);
  return out;
}

// Is the partition (given by block indices) a congruence of m, i.e.
// compatible with the product and both divisions?
inline bool is_congruence(const Magma& m, const std::vector<int>& blk) {
  elem n = m.size();
  for (elem a = 0; a < n; ++a)
    for (elem b = 0; b < n; ++b) {
      if (blk[size_t(a)] != blk[size_t(b)]) continue;
      for (elem c = 0; c < n; ++c) {
        if (blk[size_t(m.at(a, c))] != blk[size_t(m.at(b, c))]) return false;
        if (blk[size_t(m.at(c, a))] != blk[size_t(m.at(c, b))]) return false;
        if (blk[size_t(m.ldiv(c, a))] != blk[size_t(m.ldiv(c, b))])
          return false;
        if (blk[size_t(m.rdiv(c, a))] != blk[size_t(m.rdiv(c, b))])
          return false;
      }
    }
  return true;
}

// Normality by definition: some congruence has P as one of its blocks.
inline bool normal_by_definition(const Magma& m, const sdq::SubSet& p) {
  for (const std::vector<int>& blk : all_partitions(m.size())) {
    if (!is_congruence(m, blk)) continue;
    int b = blk[size_t(p.elements().front())];
    bool match = true;
    for (elem x = 0; x < m.size(); ++x)
      if ((blk[size_t(x)] == b) != p.contains(x)) {
        match = false;
        break;
      }
    if (match) return true;
  }
  return false;
}

}  // namespace testutil
