#include "sdq/magma.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <sstream>
#include <thread>

namespace sdq {

Magma::Magma(elem n, std::vector<uint16_t> table, std::vector<std::string> labels)
    : n_(n), table_(std::move(table)), labels_(std::move(labels)) {
  if (n <= 0) throw MagmaError("magma size must be positive");
  if (n > 65535) throw MagmaError("magma size exceeds 65535");
  if (table_.size() != size_t(n) * n)
    throw MagmaError("table has " + std::to_string(table_.size()) +
                     " entries, expected " + std::to_string(size_t(n) * n));
  for (uint16_t v : table_)
    if (v >= n) throw MagmaError("table entry " + std::to_string(v) +
                                 " out of range 0.." + std::to_string(n - 1));
  if (!labels_.empty() && labels_.size() != size_t(n))
    throw MagmaError("label count does not match magma size");
}

std::string Magma::label(elem a) const {
  if (labels_.empty()) return std::to_string(a);
  return labels_[size_t(a)];
}

const DivisionTables& Magma::divisions() const {
  std::call_once(div_->once, [this] {
    auto d = std::make_unique<DivisionTables>();
    const size_t nn = size_t(n_) * n_;
    d->ldiv.assign(nn, uint16_t(0xffff));
    d->rdiv.assign(nn, uint16_t(0xffff));
    for (elem a = 0; a < n_; ++a)
      for (elem x = 0; x < n_; ++x) {
        d->ldiv[size_t(a) * n_ + at(a, x)] = uint16_t(x);
        d->rdiv[size_t(a) * n_ + at(x, a)] = uint16_t(x);
      }
    div_->tables = std::move(d);
  });
  return *div_->tables;
}

elem Magma::ldiv(elem a, elem b) const {
  uint16_t x = divisions().ldiv[size_t(a) * n_ + b];
  // 0xffff marks "no solution" (a duplicate in the row overwrote one slot
  // and left another empty); n <= 65535 keeps the sentinel unambiguous.
  if (x == 0xffff)
    throw MagmaError("left division undefined: row " + std::to_string(a) +
                     " is not a permutation");
  return elem(x);
}

elem Magma::rdiv(elem a, elem b) const {
  uint16_t x = divisions().rdiv[size_t(a) * n_ + b];
  if (x == 0xffff)
    throw MagmaError("right division undefined: column " + std::to_string(a) +
                     " is not a permutation");
  return elem(x);
}

bool Magma::holds(const Identity& id) const {
  std::lock_guard<std::mutex> lock(memo_->mu);
  for (const auto& [name, value] : memo_->entries)
    if (name == id.name) return value;
  bool value = check_identity(*this, id).holds;
  memo_->entries.emplace_back(id.name, value);
  return value;
}

// ---------------------------------------------------------------------------

std::string LatinCheck::describe() const {
  if (ok) return "ok";
  std::ostringstream os;
  os << (kind == Kind::row ? "row " : "column ") << index << " repeats value "
     << value << " at positions " << first_pos << " and " << second_pos;
  return os.str();
}

LatinCheck is_latin(const Magma& m) {
  const elem n = m.size();
  std::vector<elem> seen(size_t(n), -1);
  for (elem r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), elem(-1));
    for (elem c = 0; c < n; ++c) {
      elem v = m.at(r, c);
      if (seen[v] >= 0)
        return {false, LatinCheck::Kind::row, r, v, seen[v], c};
      seen[v] = c;
    }
  }
  for (elem c = 0; c < n; ++c) {
    std::fill(seen.begin(), seen.end(), elem(-1));
    for (elem r = 0; r < n; ++r) {
      elem v = m.at(r, c);
      if (seen[v] >= 0)
        return {false, LatinCheck::Kind::column, c, v, seen[v], r};
      seen[v] = r;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Identity parsing

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  std::map<char, int16_t>& vars;
  std::vector<TermNode>& nodes;

  void skip() {
    while (pos < s.size() && std::isspace(uint8_t(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw MagmaError("identity parse error at offset " + std::to_string(pos) +
                     ": " + why);
  }

  // term := atom { '*' atom } with '*' optional between atoms; atoms are
  // single letters or parenthesized terms. '*' associates pairwise only when
  // fully parenthesized; a bare chain "x*y*z" is rejected to avoid silently
  // picking an association.
  int16_t parse_atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of term");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      int16_t t = parse_term();
      skip();
      if (pos >= s.size() || s[pos] != ')') fail("expected ')'");
      ++pos;
      return t;
    }
    if (!std::isalpha(uint8_t(c))) fail("expected variable or '('");
    ++pos;
    auto it = vars.find(c);
    if (it == vars.end())
      it = vars.emplace(c, int16_t(vars.size())).first;
    nodes.push_back(TermNode{-1, -1, it->second});
    return int16_t(nodes.size() - 1);
  }

  int16_t parse_term() {
    int16_t left = parse_atom();
    skip();
    int count = 0;
    while (pos < s.size() && s[pos] != ')' && s[pos] != '=') {
      if (s[pos] == '*') {
        ++pos;
        skip();
      }
      if (++count > 1) fail("ambiguous unparenthesized product");
      int16_t right = parse_atom();
      nodes.push_back(TermNode{left, right, -1});
      left = int16_t(nodes.size() - 1);
      skip();
    }
    return left;
  }
};

}  // namespace

Identity Identity::parse(const std::string& name, const std::string& text) {
  Identity id;
  id.name = name;
  std::map<char, int16_t> vars;
  size_t eq = text.find('=');
  if (eq == std::string::npos) throw MagmaError("identity has no '='");
  std::string l = text.substr(0, eq), r = text.substr(eq + 1);
  {
    Parser p{l, 0, vars, id.nodes};
    id.lhs = p.parse_term();
    p.skip();
    if (p.pos != l.size()) p.fail("trailing junk on left term");
  }
  {
    Parser p{r, 0, vars, id.nodes};
    id.rhs = p.parse_term();
    p.skip();
    if (p.pos != r.size()) p.fail("trailing junk on right term");
  }
  id.var_count = int(vars.size());
  return id;
}

namespace identities {
#define SDQ_IDENTITY(fn, txt)                           \
  const Identity& fn() {                                \
    static const Identity id = Identity::parse(#fn, txt); \
    return id;                                          \
  }
SDQ_IDENTITY(idempotent, "x*x = x")
SDQ_IDENTITY(commutative, "x*y = y*x")
SDQ_IDENTITY(key_symmetric, "x*(x*y) = y")
SDQ_IDENTITY(left_distributive, "x*(y*z) = (x*y)*(x*z)")
SDQ_IDENTITY(right_distributive, "(x*y)*z = (x*z)*(y*z)")
SDQ_IDENTITY(medial, "(x*y)*(u*v) = (x*u)*(y*v)")
SDQ_IDENTITY(ch_law, "(x*x)*(y*z) = (x*y)*(x*z)")
SDQ_IDENTITY(associative, "(x*y)*z = x*(y*z)")
#undef SDQ_IDENTITY
}  // namespace identities

// ---------------------------------------------------------------------------
// Identity evaluation
//
// The evaluator compiles both terms into a straight-line program over value
// slots, after structural deduplication of common subterms. Every instruction
// is tagged with the highest variable its subterm mentions, so during the
// row-major sweep only the instructions at the levels whose variables just
// changed are re-executed. For the identities in the catalog this matches the
// cost of a hand-written nested loop.

namespace {

struct Instr {
  int32_t dst, a, b;  // slot[dst] = table[slot[a]*n + slot[b]]
};

struct Plan {
  int var_count = 0;
  int slot_count = 0;
  int lhs_slot = -1, rhs_slot = -1;
  // instructions grouped by level (= highest variable mentioned)
  std::vector<std::vector<Instr>> by_level;
};

Plan compile(const Identity& id) {
  Plan p;
  p.var_count = id.var_count;
  p.slot_count = id.var_count;  // slots 0..var_count-1 hold the assignment
  std::map<std::pair<int, int>, int> cse;     // (slot_a, slot_b) -> slot
  std::vector<int> node_slot(id.nodes.size(), -1);
  std::vector<int> node_level(id.nodes.size(), -1);
  std::vector<int> slot_level(id.var_count);
  for (int v = 0; v < id.var_count; ++v) slot_level[v] = v;
  p.by_level.resize(std::max(1, id.var_count));

  for (size_t i = 0; i < id.nodes.size(); ++i) {
    const TermNode& nd = id.nodes[i];
    if (nd.var >= 0) {
      node_slot[i] = nd.var;
      node_level[i] = nd.var;
      continue;
    }
    int sa = node_slot[nd.a], sb = node_slot[nd.b];
    auto key = std::make_pair(sa, sb);
    auto it = cse.find(key);
    if (it != cse.end()) {
      node_slot[i] = it->second;
      node_level[i] = slot_level[it->second];
      continue;
    }
    int lvl = std::max(node_level[nd.a], node_level[nd.b]);
    int dst = p.slot_count++;
    slot_level.push_back(lvl);
    p.by_level[size_t(lvl)].push_back(Instr{dst, sa, sb});
    cse.emplace(key, dst);
    node_slot[i] = dst;
    node_level[i] = lvl;
  }
  p.lhs_slot = node_slot[size_t(id.lhs)];
  p.rhs_slot = node_slot[size_t(id.rhs)];
  return p;
}

// Sweeps assignments with slots[0..k-1] = assignment; v0 restricted to
// [v0_begin, v0_end). Returns the first failure in that range.
IdentityResult sweep_range(const Magma& m, const Plan& p, elem v0_begin,
                           elem v0_end, const std::atomic<elem>* stop_at) {
  const elem n = m.size();
  const uint16_t* T = m.data();
  const int k = p.var_count;
  IdentityResult res;

  std::vector<elem> slot(size_t(p.slot_count), 0);
  auto run_level = [&](int lvl) {
    for (const Instr& ins : p.by_level[size_t(lvl)])
      slot[size_t(ins.dst)] =
          T[size_t(slot[size_t(ins.a)]) * n + slot[size_t(ins.b)]];
  };

  if (k == 0) {  // degenerate: constant identity (cannot occur from parse)
    return res;
  }

  for (elem v0 = v0_begin; v0 < v0_end; ++v0) {
    if (stop_at && v0 > stop_at->load(std::memory_order_relaxed)) break;
    slot[0] = v0;
    for (int l = 1; l < k; ++l) slot[size_t(l)] = 0;
    for (int l = 0; l < k; ++l) run_level(l);
    for (;;) {
      if (slot[size_t(p.lhs_slot)] != slot[size_t(p.rhs_slot)]) {
        res.holds = false;
        res.assignment.assign(slot.begin(), slot.begin() + k);
        res.lhs_value = slot[size_t(p.lhs_slot)];
        res.rhs_value = slot[size_t(p.rhs_slot)];
        return res;
      }
      int d = k - 1;
      while (d >= 1 && slot[size_t(d)] == n - 1) {
        slot[size_t(d)] = 0;
        --d;
      }
      if (d < 1) break;
      ++slot[size_t(d)];
      for (int l = d; l < k; ++l) run_level(l);
    }
  }
  return res;
}

}  // namespace

IdentityResult check_identity(const Magma& m, const Identity& id, int threads) {
  const Plan p = compile(id);
  const elem n = m.size();
  if (p.var_count == 0) return {};
  if (threads <= 1 || n < 8 || p.var_count == 1)
    return sweep_range(m, p, 0, n, nullptr);

  const int nw = std::min<int>(threads, n);
  std::atomic<elem> stop_at{n};  // earliest v0 with a known failure
  std::atomic<elem> next{0};
  std::vector<IdentityResult> found(static_cast<size_t>(nw));
  std::vector<std::thread> pool;
  const elem chunk = std::max<elem>(1, n / (nw * 8));
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        elem lo = next.fetch_add(chunk);
        if (lo >= n) return;
        elem hi = std::min<elem>(n, lo + chunk);
        if (lo > stop_at.load(std::memory_order_relaxed)) return;
        IdentityResult r = sweep_range(m, p, lo, hi, &stop_at);
        if (!r.holds) {
          elem cur = stop_at.load(std::memory_order_relaxed);
          while (r.assignment[0] < cur &&
                 !stop_at.compare_exchange_weak(cur, r.assignment[0])) {
          }
          if (found[size_t(w)].holds ||
              r.assignment < found[size_t(w)].assignment)
            found[size_t(w)] = std::move(r);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  IdentityResult best;
  for (auto& r : found)
    if (!r.holds && (best.holds || r.assignment < best.assignment))
      best = std::move(r);
  return best;
}

IdentityResult check_identity_naive(const Magma& m, const Identity& id) {
  const elem n = m.size();
  const int k = id.var_count;
  std::vector<elem> a(size_t(k), 0);

  // plain recursive term evaluation, no caching anywhere
  auto eval = [&](auto&& self, int node) -> elem {
    const TermNode& nd = id.nodes[size_t(node)];
    if (nd.var >= 0) return a[size_t(nd.var)];
    return m.at(self(self, nd.a), self(self, nd.b));
  };

  for (;;) {
    elem l = eval(eval, id.lhs), r = eval(eval, id.rhs);
    if (l != r) return {false, a, l, r};
    int d = k - 1;
    while (d >= 0 && a[size_t(d)] == n - 1) a[size_t(d--)] = 0;
    if (d < 0) break;
    ++a[size_t(d)];
  }
  return {};
}

// ---------------------------------------------------------------------------

Magma parastrophe(const Magma& m, Parastrophe kind) {
  LatinCheck lc = is_latin(m);
  if (!lc.ok) throw MagmaError("parastrophe requires a quasigroup: " + lc.describe());
  const elem n = m.size();
  const DivisionTables& d = m.divisions();
  std::vector<uint16_t> t(size_t(n) * n);
  for (elem a = 0; a < n; ++a)
    for (elem b = 0; b < n; ++b) {
      uint16_t v = 0;
      switch (kind) {
        case Parastrophe::opposite:       v = uint16_t(m.at(b, a)); break;
        case Parastrophe::left_division:  v = d.ldiv[size_t(a) * n + b]; break;
        case Parastrophe::right_division: v = d.rdiv[size_t(b) * n + a]; break;
        case Parastrophe::od:             v = d.ldiv[size_t(b) * n + a]; break;
        case Parastrophe::do_:            v = d.rdiv[size_t(a) * n + b]; break;
      }
      t[size_t(a) * n + b] = v;
    }
  return Magma(n, std::move(t), m.labels());
}

// ---------------------------------------------------------------------------
// Text format

Magma Magma::load(const std::string& text) {
  std::vector<uint16_t> table;
  std::vector<std::pair<elem, std::string>> labels;
  elem n = -1;
  size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  auto err = [&](size_t col, const std::string& why) -> MagmaError {
    return MagmaError("parse error at line " + std::to_string(line_no) +
                      ", column " + std::to_string(col + 1) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    // split off a trailing '#' comment; "# label i = name" carries a label
    std::string comment;
    if (size_t h = line.find('#'); h != std::string::npos) {
      comment = line.substr(h + 1);
      line = line.substr(0, h);
    }
    if (!comment.empty()) {
      std::istringstream cs(comment);
      std::string kw;
      long idx;
      if (cs >> kw && kw == "label" && cs >> idx) {
        std::string eq, name;
        cs >> eq;
        std::getline(cs, name);
        size_t b = name.find_first_not_of(' ');
        if (eq == "=" && b != std::string::npos)
          labels.emplace_back(elem(idx), name.substr(b));
      }
    }
    std::istringstream ls(line);
    long v;
    while (ls >> v) {
      if (n < 0) {
        if (v <= 0 || v > 65535) throw err(0, "size must be in 1..65535");
        n = elem(v);
        table.reserve(size_t(n) * n);
        continue;
      }
      if (v < 0 || v >= n) {
        auto g = ls.tellg();
        throw err(g < 0 ? line.size() : size_t(g),
                  "index " + std::to_string(v) + " out of range 0.." +
                      std::to_string(n - 1));
      }
      if (table.size() >= size_t(n) * n) throw err(0, "too many entries");
      table.push_back(uint16_t(v));
    }
    if (!ls.eof()) {
      std::string bad;
      ls.clear();
      ls >> bad;
      throw err(line.find(bad), "unexpected token '" + bad + "'");
    }
  }
  if (n < 0) throw MagmaError("parse error: empty input");
  if (table.size() != size_t(n) * n)
    throw MagmaError("parse error: expected " + std::to_string(size_t(n) * n) +
                     " entries, got " + std::to_string(table.size()));
  std::vector<std::string> label_vec;
  if (!labels.empty()) {
    label_vec.assign(size_t(n), "");
    for (auto& [i, s] : labels) {
      if (i < 0 || i >= n)
        throw MagmaError("label index " + std::to_string(i) + " out of range");
      label_vec[size_t(i)] = s;
    }
  }
  return Magma(n, std::move(table), std::move(label_vec));
}

std::string Magma::save() const {
  std::ostringstream os;
  os << n_ << "\n";
  for (elem a = 0; a < n_; ++a) {
    for (elem b = 0; b < n_; ++b) {
      if (b) os << ' ';
      os << at(a, b);
    }
    os << "\n";
  }
  for (size_t i = 0; i < labels_.size(); ++i)
    if (!labels_[i].empty())
      os << "# label " << i << " = " << labels_[i] << "\n";
  return os.str();
}

}  // namespace sdq
