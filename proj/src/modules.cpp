#include "sdq/modules.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace sdq {

namespace {

bool is_prime(int64_t p) {
  if (p < 2) return false;
  for (int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int64_t mod_pos(int64_t v, int64_t m) {
  v %= m;
  return v < 0 ? v + m : v;
}

int64_t pow_i64(int64_t b, int e) {
  int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Multiplication by p as a matrix, for ideal entries named "p".
std::vector<int64_t> scalar_matrix(int t, int64_t c) {
  std::vector<int64_t> m(size_t(t) * t, 0);
  for (int i = 0; i < t; ++i) m[size_t(i) * t + i] = c;
  return m;
}

// Reduce every row of a t x t integer matrix mod the row's modulus.
void reduce_rows(std::vector<int64_t>& m, const std::vector<int64_t>& moduli) {
  int t = int(moduli.size());
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      m[size_t(i) * t + j] = mod_pos(m[size_t(i) * t + j], moduli[size_t(i)]);
}

std::vector<int64_t> mat_mul(const std::vector<int64_t>& a,
                             const std::vector<int64_t>& b, int t,
                             const std::vector<int64_t>& moduli) {
  std::vector<int64_t> c(size_t(t) * t, 0);
  for (int i = 0; i < t; ++i)
    for (int k = 0; k < t; ++k) {
      int64_t v = a[size_t(i) * t + k];
      if (v == 0) continue;
      for (int j = 0; j < t; ++j)
        c[size_t(i) * t + j] += v * b[size_t(k) * t + j];
    }
  reduce_rows(c, moduli);
  return c;
}

// Two integer matrices induce the same endomorphism iff they agree entrywise
// mod the row modulus (columns with a trivial modulus are irrelevant).
bool same_endomorphism(const std::vector<int64_t>& a,
                       const std::vector<int64_t>& b,
                       const std::vector<int64_t>& moduli) {
  int t = int(moduli.size());
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) {
      if (moduli[size_t(j)] == 1) continue;
      if (mod_pos(a[size_t(i) * t + j] - b[size_t(i) * t + j],
                  moduli[size_t(i)]) != 0)
        return false;
    }
  return true;
}

// ---- small F_p linear algebra (row vectors) ----

// Row-reduces `rows` (vectors over F_p) in place to echelon form, dropping
// zero rows; returns the rank.
int echelonize(std::vector<std::vector<int64_t>>& rows, int64_t p) {
  size_t r = 0;
  size_t cols = rows.empty() ? 0 : rows[0].size();
  for (size_t c = 0; c < cols && r < rows.size(); ++c) {
    size_t piv = r;
    while (piv < rows.size() && rows[piv][c] % p == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    // normalize pivot to 1
    int64_t inv = 1, v = mod_pos(rows[r][c], p);
    for (int64_t k = 1; k < p; ++k)
      if (k * v % p == 1) {
        inv = k;
        break;
      }
    for (auto& x : rows[r]) x = mod_pos(x * inv, p);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      int64_t f = mod_pos(rows[i][c], p);
      if (f == 0) continue;
      for (size_t j = 0; j < cols; ++j)
        rows[i][j] = mod_pos(rows[i][j] - f * rows[r][j], p);
    }
    ++r;
  }
  rows.resize(r);
  return int(r);
}

// Basis of { v : M v = 0 } over F_p, where M is given as a list of rows.
std::vector<std::vector<int64_t>> nullspace(
    std::vector<std::vector<int64_t>> rows, int64_t p, size_t cols) {
  echelonize(rows, p);
  std::vector<int> pivot_col;
  std::vector<char> is_pivot(cols, 0);
  for (const auto& row : rows)
    for (size_t c = 0; c < cols; ++c)
      if (row[c] != 0) {
        pivot_col.push_back(int(c));
        is_pivot[c] = 1;
        break;
      }
  std::vector<std::vector<int64_t>> basis;
  for (size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    std::vector<int64_t> v(cols, 0);
    v[free_c] = 1;
    for (size_t r = 0; r < rows.size(); ++r)
      v[size_t(pivot_col[r])] = mod_pos(-rows[r][free_c], p);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

// ---------------------------------------------------------------------------

FiniteModule::FiniteModule(int64_t p, std::vector<int> exps,
                           std::vector<Action> actions,
                           std::vector<std::string> ideal)
    : p_(p),
      exps_(std::move(exps)),
      actions_(std::move(actions)),
      ideal_(std::move(ideal)) {
  if (!is_prime(p_)) throw MagmaError("FiniteModule: p must be prime");
  if (exps_.empty()) throw MagmaError("FiniteModule: empty moduli list");
  const int t = int(exps_.size());
  moduli_.resize(size_t(t));
  for (int i = 0; i < t; ++i) {
    if (exps_[size_t(i)] < 0)
      throw MagmaError("FiniteModule: negative modulus exponent");
    moduli_[size_t(i)] = pow_i64(p_, exps_[size_t(i)]);
  }
  strides_.assign(size_t(t), 1);
  int64_t total = 1;
  for (int i = t - 1; i >= 0; --i) {
    strides_[size_t(i)] = total;
    total *= moduli_[size_t(i)];
    if (total > (int64_t(1) << 31) - 1)
      throw MagmaError("FiniteModule: carrier too large");
  }
  n_ = elem(total);
  validate();
}

void FiniteModule::validate() {
  const int t = rank();
  std::unordered_set<std::string> names;
  for (const Action& a : actions_) {
    if (a.name.empty() || a.name == "p")
      throw MagmaError("FiniteModule: bad action name");
    if (!names.insert(a.name).second)
      throw MagmaError("FiniteModule: duplicate action name '" + a.name + "'");
    if (a.mat.size() != size_t(t) * size_t(t))
      throw MagmaError("FiniteModule: action '" + a.name +
                       "' matrix has wrong shape");
    // Well-definedness: entry (i,j) maps Z_{p^{k_j}} -> Z_{p^{k_i}}; it must
    // kill p^{k_j}, i.e. be divisible by p^{max(0, k_i - k_j)}.
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) {
        int need = std::max(0, exps_[size_t(i)] - exps_[size_t(j)]);
        if (mod_pos(a.mat[size_t(i) * t + j], pow_i64(p_, need)) != 0)
          throw MagmaError("FiniteModule: action '" + a.name + "' entry (" +
                           std::to_string(i) + "," + std::to_string(j) +
                           ") is not well-defined mod the moduli");
      }
  }
  // Actions commute pairwise (as endomorphisms).
  for (size_t i = 0; i < actions_.size(); ++i)
    for (size_t j = i + 1; j < actions_.size(); ++j) {
      auto ab = mat_mul(actions_[i].mat, actions_[j].mat, t, moduli_);
      auto ba = mat_mul(actions_[j].mat, actions_[i].mat, t, moduli_);
      if (!same_endomorphism(ab, ba, moduli_))
        throw MagmaError("FiniteModule: actions '" + actions_[i].name +
                         "' and '" + actions_[j].name + "' do not commute");
    }
  // Invertibility claims: bijective iff bijective on M/pM (finite Nakayama),
  // i.e. the matrix mod p restricted to nontrivial coordinates has full
  // rank. Orders are found by iterating powers.
  for (Action& a : actions_) {
    if (!a.invertible) {
      a.order = 0;
      continue;
    }
    std::vector<std::vector<int64_t>> rows;
    for (int i = 0; i < t; ++i) {
      if (exps_[size_t(i)] == 0) continue;
      std::vector<int64_t> row;
      for (int j = 0; j < t; ++j) {
        if (exps_[size_t(j)] == 0) continue;
        row.push_back(mod_pos(a.mat[size_t(i) * t + j], p_));
      }
      rows.push_back(std::move(row));
    }
    size_t dim = rows.size();
    if (echelonize(rows, p_) != int(dim))
      throw MagmaError("FiniteModule: action '" + a.name +
                       "' is declared invertible but is singular");
    std::vector<int64_t> ident = scalar_matrix(t, 1);
    std::vector<int64_t> pw = a.mat;
    reduce_rows(pw, moduli_);
    int64_t order = 1;
    while (!same_endomorphism(pw, ident, moduli_)) {
      pw = mat_mul(pw, a.mat, t, moduli_);
      if (++order > 1000000)
        throw MagmaError("FiniteModule: order of action '" + a.name +
                         "' not found within bound");
    }
    a.order = order;
  }
  for (const std::string& name : ideal_)
    if (name != "p" && !has_action(name))
      throw MagmaError("FiniteModule: ideal entry '" + name +
                       "' names no action");
}

const Action& FiniteModule::action(const std::string& name) const {
  for (const Action& a : actions_)
    if (a.name == name) return a;
  throw MagmaError("FiniteModule: no action named '" + name + "'");
}

bool FiniteModule::has_action(const std::string& name) const {
  for (const Action& a : actions_)
    if (a.name == name) return true;
  return false;
}

elem FiniteModule::encode(const std::vector<int64_t>& coords) const {
  if (coords.size() != size_t(rank()))
    throw MagmaError("FiniteModule: coordinate count mismatch");
  int64_t idx = 0;
  for (int i = 0; i < rank(); ++i)
    idx += mod_pos(coords[size_t(i)], moduli_[size_t(i)]) * strides_[size_t(i)];
  return elem(idx);
}

std::vector<int64_t> FiniteModule::decode(elem a) const {
  std::vector<int64_t> coords(static_cast<size_t>(rank()));
  int64_t v = a;
  for (int i = 0; i < rank(); ++i) {
    coords[size_t(i)] = v / strides_[size_t(i)];
    v %= strides_[size_t(i)];
  }
  return coords;
}

std::string FiniteModule::label(elem a) const {
  std::vector<int64_t> c = decode(a);
  std::string s = "(";
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + ")";
}

elem FiniteModule::add(elem a, elem b) const {
  int64_t idx = 0;
  int64_t va = a, vb = b;
  for (int i = 0; i < rank(); ++i) {
    int64_t s = strides_[size_t(i)];
    int64_t ca = va / s, cb = vb / s;
    va %= s;
    vb %= s;
    int64_t c = ca + cb;
    if (c >= moduli_[size_t(i)]) c -= moduli_[size_t(i)];
    idx += c * s;
  }
  return elem(idx);
}

elem FiniteModule::neg(elem a) const {
  int64_t idx = 0;
  int64_t va = a;
  for (int i = 0; i < rank(); ++i) {
    int64_t s = strides_[size_t(i)];
    int64_t ca = va / s;
    va %= s;
    if (ca != 0) idx += (moduli_[size_t(i)] - ca) * s;
  }
  return elem(idx);
}

elem FiniteModule::scale(int64_t c, elem a) const {
  std::vector<int64_t> coords = decode(a);
  for (int i = 0; i < rank(); ++i)
    coords[size_t(i)] = mod_pos(coords[size_t(i)] * c, moduli_[size_t(i)]);
  return encode(coords);
}

elem FiniteModule::act(size_t action_index, elem a) const {
  const Action& e = actions_.at(action_index);
  const int t = rank();
  std::vector<int64_t> coords = decode(a);
  int64_t idx = 0;
  for (int i = 0; i < t; ++i) {
    int64_t v = 0;
    for (int j = 0; j < t; ++j) v += e.mat[size_t(i) * t + j] * coords[size_t(j)];
    idx += mod_pos(v, moduli_[size_t(i)]) * strides_[size_t(i)];
  }
  return elem(idx);
}

elem FiniteModule::act(const std::string& name, elem a) const {
  for (size_t i = 0; i < actions_.size(); ++i)
    if (actions_[i].name == name) return act(i, a);
  throw MagmaError("FiniteModule: no action named '" + name + "'");
}

int64_t FiniteModule::additive_order(elem a) const {
  std::vector<int64_t> coords = decode(a);
  int64_t ord = 1;
  for (int i = 0; i < rank(); ++i) {
    int64_t m = moduli_[size_t(i)];
    int64_t o = m / std::gcd(coords[size_t(i)], m);
    ord = std::lcm(ord, o);
  }
  return ord;
}

elem FiniteModule::basis(int i) const {
  if (i < 0 || i >= rank()) throw MagmaError("FiniteModule: basis index out of range");
  if (moduli_[size_t(i)] == 1) return 0;
  return elem(strides_[size_t(i)]);
}

const FiniteModule::DenseCache* FiniteModule::dense() const {
  std::call_once(dense_->once, [this] {
    if (int64_t(n_) * n_ > 4000000) return;  // tables would be too large
    DenseCache& d = *dense_;
    d.add.resize(size_t(n_) * size_t(n_));
    for (elem a = 0; a < n_; ++a)
      for (elem b = a; b < n_; ++b) {
        uint16_t s = uint16_t(add(a, b));
        d.add[size_t(a) * n_ + b] = s;
        d.add[size_t(b) * n_ + a] = s;
      }
    d.acts.resize(actions_.size());
    for (size_t e = 0; e < actions_.size(); ++e) {
      d.acts[e].resize(size_t(n_));
      for (elem a = 0; a < n_; ++a) d.acts[e][size_t(a)] = uint16_t(act(e, a));
    }
    d.built = true;
  });
  return dense_->built ? dense_.get() : nullptr;
}

SubSet FiniteModule::span(const std::vector<elem>& gens) const {
  // Phase 1: close the generators under the actions; phase 2: additive
  // closure with the phase-1 set as adders. The result contains every sum of
  // action-word images of generators, which is exactly the submodule they
  // generate (negation comes for free in a finite group).
  const DenseCache* d = dense();
  std::vector<char> in_t(size_t(n_), 0);
  std::vector<elem> torbit;
  std::deque<elem> queue;
  auto push_t = [&](elem x) {
    if (!in_t[size_t(x)]) {
      in_t[size_t(x)] = 1;
      torbit.push_back(x);
      queue.push_back(x);
    }
  };
  for (elem g : gens) {
    if (g < 0 || g >= n_) throw MagmaError("span: generator out of range");
    push_t(g);
  }
  while (!queue.empty()) {
    elem x = queue.front();
    queue.pop_front();
    for (size_t e = 0; e < actions_.size(); ++e)
      push_t(d ? elem(d->acts[e][size_t(x)]) : act(e, x));
  }
  std::vector<char> in_s(size_t(n_), 0);
  std::vector<elem> astack;
  in_s[0] = 1;
  astack.push_back(0);
  while (!astack.empty()) {
    elem x = astack.back();
    astack.pop_back();
    for (elem t : torbit) {
      elem y = d ? elem(d->add[size_t(x) * n_ + t]) : add(x, t);
      if (!in_s[size_t(y)]) {
        in_s[size_t(y)] = 1;
        astack.push_back(y);
      }
    }
  }
  SubSet out(n_);
  for (elem x = 0; x < n_; ++x)
    if (in_s[size_t(x)]) out.insert(x);
  return out;
}

// ---------------------------------------------------------------------------
// Text format.

FiniteModule FiniteModule::load(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int64_t p = 0;
  std::vector<int> exps;
  std::vector<Action> actions;
  std::vector<std::string> ideal;
  std::vector<std::string> invertible_names;
  bool have_header = false;
  auto strip = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  int lineno = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = strip(line);
      if (s.empty() || s[0] == '#') continue;
      out = s;
      return true;
    }
    return false;
  };
  std::string s;
  while (next_line(s)) {
    std::istringstream ls(s);
    if (!have_header) {
      int64_t v;
      if (!(ls >> p)) throw MagmaError("module file: bad header line");
      while (ls >> v) exps.push_back(int(v));
      if (exps.empty()) throw MagmaError("module file: header needs exponents");
      have_header = true;
      continue;
    }
    std::string word;
    ls >> word;
    if (word == "action") {
      std::string name;
      if (!(ls >> name)) throw MagmaError("module file: action needs a name");
      const int t = int(exps.size());
      std::vector<int64_t> mat;
      for (int i = 0; i < t; ++i) {
        std::string row;
        if (!next_line(row))
          throw MagmaError("module file: action '" + name +
                           "' matrix truncated");
        std::istringstream rs(row);
        int64_t v;
        int got = 0;
        while (rs >> v) {
          mat.push_back(v);
          ++got;
        }
        if (got != t)
          throw MagmaError("module file: action '" + name + "' row " +
                           std::to_string(i) + " needs " + std::to_string(t) +
                           " entries");
      }
      actions.push_back(Action{name, std::move(mat), false, 0});
    } else if (word == "invertible") {
      std::string name;
      while (ls >> name) invertible_names.push_back(name);
    } else if (word == "ideal") {
      std::string name;
      while (ls >> name) ideal.push_back(name);
    } else {
      throw MagmaError("module file: unknown directive '" + word + "' at line " +
                       std::to_string(lineno));
    }
  }
  if (!have_header) throw MagmaError("module file: empty");
  for (const std::string& name : invertible_names) {
    bool found = false;
    for (Action& a : actions)
      if (a.name == name) {
        a.invertible = true;
        found = true;
      }
    if (!found)
      throw MagmaError("module file: invertible names unknown action '" +
                       name + "'");
  }
  return FiniteModule(p, std::move(exps), std::move(actions), std::move(ideal));
}

std::string FiniteModule::save() const {
  std::ostringstream out;
  out << p_;
  for (int e : exps_) out << " " << e;
  out << "\n";
  const int t = rank();
  for (const Action& a : actions_) {
    out << "action " << a.name << "\n";
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < t; ++j) {
        if (j) out << " ";
        out << a.mat[size_t(i) * t + j];
      }
      out << "\n";
    }
  }
  bool any_inv = false;
  for (const Action& a : actions_)
    if (a.invertible) {
      out << (any_inv ? " " : "invertible") << " " << a.name;
      any_inv = true;
    }
  if (any_inv) out << "\n";
  if (!ideal_.empty()) {
    out << "ideal";
    for (const std::string& name : ideal_) out << " " << name;
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// P_m family.

FiniteModule make_pm(int64_t p, int m, bool shifted) {
  if (!is_prime(p) || m < 1) throw MagmaError("make_pm: need prime p and m >= 1");
  std::vector<int> exps;
  for (int i = 0; i < m; ++i) exps.push_back(m - i);
  std::vector<int64_t> x(size_t(m) * size_t(m), 0);
  for (int i = 0; i + 1 < m; ++i) x[size_t(i) * m + i + 1] = p;
  if (shifted)
    for (int i = 0; i < m; ++i) x[size_t(i) * m + i] = -1;
  std::vector<Action> actions;
  actions.push_back(Action{"x", x, shifted, 0});
  std::vector<std::string> ideal;
  if (shifted) {
    // Ker of the map onto F_p sending x to -1 is generated by p and 1+x.
    std::vector<int64_t> one_plus_x = x;
    for (int i = 0; i < m; ++i) one_plus_x[size_t(i) * m + i] += 1;
    actions.push_back(Action{"1+x", std::move(one_plus_x), false, 0});
    ideal = {"p", "1+x"};
  } else {
    ideal = {"p", "x"};
  }
  return FiniteModule(p, std::move(exps), std::move(actions), std::move(ideal));
}

FiniteModule extend_to_r2(const FiniteModule& m) {
  const int t = m.rank();
  if (!m.has_action("x")) throw MagmaError("extend_to_r2: module has no action 'x'");
  const std::vector<int64_t>& moduli = m.moduli();

  auto invert = [&](const std::string& name, const std::vector<int64_t>& mat)
      -> std::pair<std::vector<int64_t>, int64_t> {
    // Bijectivity on M is equivalent to full rank mod p on the nontrivial
    // coordinates; on failure, exhibit a kernel element by direct scan.
    std::vector<std::vector<int64_t>> rows;
    for (int i = 0; i < t; ++i) {
      if (m.exps()[size_t(i)] == 0) continue;
      std::vector<int64_t> row;
      for (int j = 0; j < t; ++j) {
        if (m.exps()[size_t(j)] == 0) continue;
        row.push_back(mod_pos(mat[size_t(i) * t + j], m.p()));
      }
      rows.push_back(std::move(row));
    }
    size_t dim = rows.size();
    if (echelonize(rows, m.p()) != int(dim)) {
      // singular: find a nonzero kernel element for the error message
      FiniteModule probe(m.p(), m.exps(), {Action{"e", mat, false, 0}}, {});
      for (elem a = 1; a < m.size(); ++a)
        if (probe.act(size_t(0), a) == 0)
          throw MagmaError("extend_to_r2: action '" + name +
                           "' is singular; kernel element " + m.label(a));
      throw MagmaError("extend_to_r2: action '" + name + "' is singular");
    }
    std::vector<int64_t> ident = scalar_matrix(t, 1);
    std::vector<int64_t> pw = mat;
    reduce_rows(pw, moduli);
    int64_t order = 1;
    std::vector<int64_t> prev = ident;
    while (!same_endomorphism(pw, ident, moduli)) {
      prev = pw;
      pw = mat_mul(pw, mat, t, moduli);
      if (++order > 1000000)
        throw MagmaError("extend_to_r2: order of '" + name + "' not found");
    }
    return {prev, order};  // mat^(order-1) = inverse
  };

  const std::vector<int64_t>& x = m.action("x").mat;
  std::vector<int64_t> one_minus_x(size_t(t) * size_t(t));
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      one_minus_x[size_t(i) * t + j] = (i == j ? 1 : 0) - x[size_t(i) * t + j];

  auto [x_inv, x_ord] = invert("x", x);
  auto [omx_inv, omx_ord] = invert("1-x", one_minus_x);

  std::vector<Action> actions = m.actions();
  for (Action& a : actions)
    if (a.name == "x" && !a.invertible) a.invertible = true;
  auto add_action = [&](const std::string& name, std::vector<int64_t> mat,
                        bool invertible) {
    for (const Action& a : actions)
      if (a.name == name) return;  // already present
    actions.push_back(Action{name, std::move(mat), invertible, 0});
  };
  add_action("x^-1", std::move(x_inv), true);
  add_action("1-x", std::move(one_minus_x), true);
  add_action("(1-x)^-1", std::move(omx_inv), true);
  (void)x_ord;
  (void)omx_ord;
  return FiniteModule(m.p(), m.exps(), std::move(actions), m.ideal());
}

// ---------------------------------------------------------------------------
// Socle series and radical.

std::vector<SubSet> socle_series(const FiniteModule& m,
                                 const std::vector<std::string>& ideal) {
  if (ideal.empty()) throw MagmaError("socle_series: empty ideal");
  const int t = m.rank();
  const elem n = m.size();
  std::vector<std::vector<int64_t>> mats;
  for (const std::string& name : ideal)
    mats.push_back(name == "p" ? scalar_matrix(t, m.p()) : m.action(name).mat);

  std::vector<SubSet> chain;
  std::vector<char> prev(size_t(n), 0);
  prev[0] = 1;
  elem prev_count = 1;
  const std::vector<int64_t>& moduli = m.moduli();
  const std::vector<int64_t>& strides = m.strides();
  for (;;) {
    SubSet layer(n);
    std::vector<char> cur(size_t(n), 0);
    elem count = 0;
    std::vector<int64_t> coords(size_t(t), 0);
    for (elem a = 0;; ++a) {
      bool member;
      if (prev[size_t(a)]) {
        member = true;  // the chain ascends, no need to recheck
      } else {
        member = true;
        for (const auto& mat : mats) {
          int64_t idx = 0;
          for (int i = 0; i < t; ++i) {
            int64_t v = 0;
            for (int j = 0; j < t; ++j)
              v += mat[size_t(i) * t + j] * coords[size_t(j)];
            idx += mod_pos(v, moduli[size_t(i)]) * strides[size_t(i)];
          }
          if (!prev[size_t(idx)]) {
            member = false;
            break;
          }
        }
      }
      if (member) {
        cur[size_t(a)] = 1;
        layer.insert(a);
        ++count;
      }
      if (a + 1 == n) break;
      // odometer increment of the coordinate vector
      for (int i = t - 1; i >= 0; --i) {
        if (++coords[size_t(i)] < moduli[size_t(i)]) break;
        coords[size_t(i)] = 0;
      }
    }
    if (count == prev_count && count != n)
      throw MagmaError(
          "socle_series: module is not ideal-torsion (chain stalled at " +
          std::to_string(count) + " of " + std::to_string(n) + " elements)");
    chain.push_back(std::move(layer));
    if (count == n) return chain;
    prev = std::move(cur);
    prev_count = count;
  }
}

std::vector<SubSet> socle_series(const FiniteModule& m) {
  return socle_series(m, m.ideal());
}

SubSet jacobson_radical(const FiniteModule& m) {
  if (m.ideal().empty())
    throw MagmaError("jacobson_radical: module declares no ideal");
  // Torsion precondition, checked on M/pM: the ideal actions mod p must be
  // jointly nilpotent. Computed as an ascending kernel chain over F_p.
  {
    const int64_t p = m.p();
    std::vector<std::vector<std::vector<int64_t>>> amats;  // as F_p rows
    size_t dim = 0;
    for (int i = 0; i < m.rank(); ++i)
      if (m.exps()[size_t(i)] > 0) ++dim;
    for (const std::string& name : m.ideal()) {
      if (name == "p") continue;  // p acts as zero on M/pM
      const std::vector<int64_t>& mat = m.action(name).mat;
      std::vector<std::vector<int64_t>> rows;
      for (int i = 0; i < m.rank(); ++i) {
        if (m.exps()[size_t(i)] == 0) continue;
        std::vector<int64_t> row;
        for (int j = 0; j < m.rank(); ++j) {
          if (m.exps()[size_t(j)] == 0) continue;
          row.push_back(mod_pos(mat[size_t(i) * m.rank() + j], p));
        }
        rows.push_back(std::move(row));
      }
      amats.push_back(std::move(rows));
    }
    // W_0 = 0; W_{k+1} = { v : A v in W_k for all A }; must reach F_p^dim.
    std::vector<std::vector<int64_t>> w;  // current basis (row vectors)
    for (;;) {
      if (w.size() == dim) break;
      // rows of q form a matrix with kernel exactly span(w)
      std::vector<std::vector<int64_t>> q =
          nullspace(w, p, dim);  // basis of the perp space
      std::vector<std::vector<int64_t>> stacked;
      for (const auto& amat : amats)
        for (const auto& qrow : q) {
          // row = qrow * A
          std::vector<int64_t> row(dim, 0);
          for (size_t j = 0; j < dim; ++j) {
            int64_t v = 0;
            for (size_t i = 0; i < dim; ++i) v += qrow[i] * amat[i][j];
            row[j] = mod_pos(v, p);
          }
          stacked.push_back(std::move(row));
        }
      std::vector<std::vector<int64_t>> next = nullspace(stacked, p, dim);
      if (next.size() <= w.size() && !amats.empty())
        throw MagmaError(
            "jacobson_radical: declared ideal is not torsion on this module");
      if (amats.empty()) break;  // ideal = (p): always torsion on a p-group
      w = std::move(next);
    }
  }
  // J = pM + sum of e(M): the span of { p e_i } and { e(e_j) }.
  std::vector<elem> gens;
  for (int i = 0; i < m.rank(); ++i) gens.push_back(m.scale(m.p(), m.basis(i)));
  for (const std::string& name : m.ideal()) {
    if (name == "p") continue;
    for (int j = 0; j < m.rank(); ++j)
      gens.push_back(m.act(name, m.basis(j)));
  }
  return m.span(gens);
}

int gen_count(const FiniteModule& m, bool cross_check) {
  SubSet j = jacobson_radical(m);
  int64_t quot = int64_t(m.size()) / j.size();
  int g = 0;
  while (quot > 1) {
    if (quot % m.p() != 0)
      throw MagmaError("gen_count: |M/J| is not a power of p");
    quot /= m.p();
    ++g;
  }
  if (!cross_check) return g;

  // Brute force: the minimal size of a generating set, by exhausting all
  // subsets one size at a time (feasible only for small modules). Uses
  // local lookup tables and epoch-stamped scratch buffers so the hot loop
  // is pure table lookups.
  const elem n = m.size();
  if (n > 729)
    throw MagmaError("gen_count: cross-check infeasible for |M| > 3^6");
  std::vector<uint16_t> addt(size_t(n) * size_t(n));
  for (elem a = 0; a < n; ++a)
    for (elem b = a; b < n; ++b) {
      uint16_t s = uint16_t(m.add(a, b));
      addt[size_t(a) * n + b] = s;
      addt[size_t(b) * n + a] = s;
    }
  std::vector<std::vector<uint16_t>> actt(m.actions().size());
  for (size_t e = 0; e < m.actions().size(); ++e) {
    actt[e].resize(size_t(n));
    for (elem a = 0; a < n; ++a) actt[e][size_t(a)] = uint16_t(m.act(e, a));
  }
  std::vector<int32_t> tstamp(size_t(n), -1), sstamp(size_t(n), -1);
  std::vector<elem> torbit, sorder;
  int32_t epoch = 0;
  auto spans_all = [&](const std::vector<elem>& gens) {
    ++epoch;
    torbit.clear();
    sorder.clear();
    for (elem g : gens)
      if (tstamp[size_t(g)] != epoch) {
        tstamp[size_t(g)] = epoch;
        torbit.push_back(g);
      }
    for (size_t q = 0; q < torbit.size(); ++q)
      for (const auto& tab : actt) {
        elem y = elem(tab[size_t(torbit[q])]);
        if (tstamp[size_t(y)] != epoch) {
          tstamp[size_t(y)] = epoch;
          torbit.push_back(y);
        }
      }
    sstamp[0] = epoch;
    sorder.push_back(0);
    for (size_t q = 0; q < sorder.size(); ++q) {
      const uint16_t* row = &addt[size_t(sorder[q]) * n];
      for (elem t : torbit) {
        elem y = elem(row[size_t(t)]);
        if (sstamp[size_t(y)] != epoch) {
          sstamp[size_t(y)] = epoch;
          sorder.push_back(y);
        }
      }
    }
    return elem(sorder.size()) == n;
  };
  int brute = -1;
  if (n == 1) {
    brute = 0;
  } else {
    std::vector<elem> pick;
    // grows subsets in lexicographic order, one target size at a time
    std::function<bool(int, elem)> search = [&](int need, elem from) {
      if (need == 0) return spans_all(pick);
      for (elem a = from; a < n; ++a) {
        pick.push_back(a);
        if (search(need - 1, a + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    for (int k = 1; k <= m.rank() + 1; ++k)
      if (search(k, 0)) {
        brute = k;
        break;
      }
  }
  if (brute != g)
    throw MagmaError("gen_count: radical formula gives " + std::to_string(g) +
                     " but brute force found " + std::to_string(brute));
  return g;
}

// ---------------------------------------------------------------------------
// Submodule lattice.

namespace {
struct SubSetHash {
  size_t operator()(const SubSet& s) const { return s.hash(); }
};
}  // namespace

SubmoduleLattice submodules(const FiniteModule& m, size_t budget) {
  const elem n = m.size();
  if (n > 59049) throw MagmaError("submodules: module too large to enumerate");
  SubmoduleLattice lat;
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
  for (elem a = 0; a < n && !over; ++a) add(m.span({a}));
  while (!queue.empty() && !over) {
    SubSet s = std::move(queue.front());
    queue.pop_front();
    std::vector<SubSet> snapshot(seen.begin(), seen.end());
    for (const SubSet& t : snapshot) {
      if (s == t || s.is_full() || t.is_full()) continue;
      std::vector<elem> gens = s.elements();
      const std::vector<elem>& te = t.elements();
      gens.insert(gens.end(), te.begin(), te.end());
      add(m.span(gens));
      if (over) break;
    }
  }
  lat.complete = !over;
  lat.subs.assign(seen.begin(), seen.end());
  std::sort(lat.subs.begin(), lat.subs.end());
  for (size_t i = 0; i < lat.subs.size(); ++i)
    for (size_t j = 0; j < lat.subs.size(); ++j)
      if (i != j && lat.subs[i].size() < lat.subs[j].size() &&
          lat.subs[i].subset_of(lat.subs[j]))
        lat.inclusions.emplace_back(int(i), int(j));
  return lat;
}

bool is_cocyclic(const FiniteModule& m) {
  std::vector<SubSet> chain = socle_series(m);
  return chain.front().size() == elem(m.p());
}

// ---------------------------------------------------------------------------
// Isomorphism search.

namespace {

// (additive order, orbit size under each action in declaration order);
// preserved by any isomorphism matching actions by name, provided both
// modules list their shared actions in the same order.
std::vector<int64_t> fingerprint(const FiniteModule& m,
                                 const std::vector<size_t>& action_idx,
                                 elem a) {
  std::vector<int64_t> fp;
  fp.push_back(m.additive_order(a));
  for (size_t e : action_idx) {
    // orbit a, e(a), e^2(a), ... until repetition
    std::vector<elem> seen{a};
    elem x = a;
    for (;;) {
      x = m.act(e, x);
      bool dup = false;
      for (elem y : seen)
        if (y == x) {
          dup = true;
          break;
        }
      if (dup) break;
      seen.push_back(x);
    }
    fp.push_back(int64_t(seen.size()));
  }
  return fp;
}

struct IsoSearch {
  const FiniteModule& a;
  const FiniteModule& b;
  const SubSet* target = nullptr;  // restrict images to this subset of b
  uint64_t budget = 0;
  uint64_t nodes = 0;
  bool complete = true;
  std::vector<size_t> act_a, act_b;  // shared actions, matched by name
  std::vector<std::vector<int64_t>> fp_a;
  std::vector<std::optional<std::vector<int64_t>>> fp_b;

  const std::vector<int64_t>& fpb(elem x) {
    if (!fp_b[size_t(x)]) fp_b[size_t(x)] = fingerprint(b, act_b, x);
    return *fp_b[size_t(x)];
  }

  struct State {
    std::vector<elem> map_ab, map_ba;
    std::vector<elem> domain;  // mapped a-elements in processed order
  };

  // Adds g -> img and closes the partial map under + and the actions,
  // checking consistency, injectivity, image membership and fingerprints.
  bool extend(State& st, elem g, elem img) {
    std::deque<std::pair<elem, elem>> q;
    q.emplace_back(g, img);
    while (!q.empty()) {
      auto [u, fu] = q.front();
      q.pop_front();
      elem known = st.map_ab[size_t(u)];
      if (known != -1) {
        if (known != fu) return false;
        continue;
      }
      if (st.map_ba[size_t(fu)] != -1) return false;
      if (target && !target->contains(fu)) return false;
      if (fp_a[size_t(u)] != fpb(fu)) return false;
      st.map_ab[size_t(u)] = fu;
      st.map_ba[size_t(fu)] = u;
      st.domain.push_back(u);
      for (elem v : st.domain)
        q.emplace_back(a.add(u, v), b.add(fu, st.map_ab[size_t(v)]));
      for (size_t k = 0; k < act_a.size(); ++k)
        q.emplace_back(a.act(act_a[k], u), b.act(act_b[k], fu));
    }
    return true;
  }

  std::optional<std::vector<elem>> recurse(const State& st,
                                           const std::vector<elem>& gens,
                                           size_t gi) {
    if (gi == gens.size()) {
      if (elem(st.domain.size()) != a.size()) return std::nullopt;
      return st.map_ab;
    }
    elem g = gens[gi];
    const std::vector<int64_t>& want = fp_a[size_t(g)];
    auto try_candidates = [&](auto&& for_each) -> std::optional<std::vector<elem>> {
      std::optional<std::vector<elem>> found;
      for_each([&](elem cand) -> bool {
        if (st.map_ba[size_t(cand)] != -1) return true;
        if (want != fpb(cand)) return true;
        if (++nodes > budget) {
          complete = false;
          return false;
        }
        State next = st;
        if (extend(next, g, cand)) {
          found = recurse(next, gens, gi + 1);
          if (found || !complete) return false;
        }
        return true;
      });
      return found;
    };
    if (target)
      return try_candidates([&](auto&& fn) {
        for (elem cand : target->elements())
          if (!fn(cand)) return;
      });
    return try_candidates([&](auto&& fn) {
      for (elem cand = 0; cand < b.size(); ++cand)
        if (!fn(cand)) return;
    });
  }
};

std::vector<elem> greedy_generators(const FiniteModule& m) {
  std::vector<elem> gens;
  SubSet s = m.span({});
  while (s.size() < m.size()) {
    elem g = 0;
    while (s.contains(g)) ++g;
    gens.push_back(g);
    s = m.span(gens);
  }
  return gens;
}

ModuleIso run_iso(const FiniteModule& a, const FiniteModule& b,
                  const SubSet* target, uint64_t budget) {
  ModuleIso out;
  // The searches match actions by name: every action of the source must be
  // carried by the target (extra target actions are ignored, so e.g. a module
  // with only the x-action embeds into one that also lists derived actions).
  std::vector<std::pair<std::string, size_t>> na, nb;
  for (size_t i = 0; i < a.actions().size(); ++i)
    na.emplace_back(a.actions()[i].name, i);
  std::sort(na.begin(), na.end());
  for (auto& [name, idx] : na) {
    bool hit = false;
    for (size_t j = 0; j < b.actions().size() && !hit; ++j)
      if (b.actions()[j].name == name) {
        nb.emplace_back(name, j);
        hit = true;
      }
    if (!hit)
      throw MagmaError("module_iso: target lacks the action '" + name + "'");
  }

  elem target_size = target ? target->size() : b.size();
  if (a.size() != target_size) return out;
  if (a.p() != b.p()) return out;

  IsoSearch search{a, b, target, budget, 0, true, {}, {}, {}, {}};
  for (auto& [name, idx] : na) search.act_a.push_back(idx);
  for (auto& [name, idx] : nb) search.act_b.push_back(idx);
  search.fp_a.reserve(size_t(a.size()));
  for (elem x = 0; x < a.size(); ++x)
    search.fp_a.push_back(fingerprint(a, search.act_a, x));
  search.fp_b.assign(size_t(b.size()), std::nullopt);

  IsoSearch::State st;
  st.map_ab.assign(size_t(a.size()), -1);
  st.map_ba.assign(size_t(b.size()), -1);
  if (!search.extend(st, 0, 0)) return out;  // 0 -> 0 must always work

  std::vector<elem> gens = greedy_generators(a);
  std::optional<std::vector<elem>> found = search.recurse(st, gens, 0);
  out.nodes = search.nodes;
  out.complete = search.complete;
  if (!found) return out;

  // The closure already verified additivity and actions on every pair it
  // processed; re-verify exhaustively when cheap.
  const std::vector<elem>& map = *found;
  if (a.size() <= 1024) {
    for (elem x = 0; x < a.size(); ++x)
      for (elem y = 0; y < a.size(); ++y)
        if (map[size_t(a.add(x, y))] !=
            b.add(map[size_t(x)], map[size_t(y)]))
          throw MagmaError("module_iso: internal verification failed");
    for (size_t k = 0; k < search.act_a.size(); ++k)
      for (elem x = 0; x < a.size(); ++x)
        if (map[size_t(a.act(search.act_a[k], x))] !=
            b.act(search.act_b[k], map[size_t(x)]))
          throw MagmaError("module_iso: internal verification failed");
  }
  out.map = std::move(map);
  return out;
}

}  // namespace

ModuleIso module_iso(const FiniteModule& a, const FiniteModule& b,
                     uint64_t budget) {
  return run_iso(a, b, nullptr, budget);
}

ModuleIso module_iso_into(const FiniteModule& a, const FiniteModule& b,
                          const SubSet& image, uint64_t budget) {
  return run_iso(a, b, &image, budget);
}

// ---------------------------------------------------------------------------
// Aligned quotients.

FiniteModule aligned_quotient(const FiniteModule& m, const SubSet& s) {
  const int t = m.rank();
  if (s.size() == 0 || !s.contains(0))
    throw MagmaError("aligned_quotient: subset is not a submodule");
  // Minimal p-adic valuation of each coordinate across the subset.
  std::vector<int> v(static_cast<size_t>(t));
  for (int i = 0; i < t; ++i) v[size_t(i)] = m.exps()[size_t(i)];
  for (elem a : s.elements()) {
    std::vector<int64_t> c = m.decode(a);
    for (int i = 0; i < t; ++i) {
      int64_t x = c[size_t(i)];
      if (x == 0) continue;
      int val = 0;
      while (x % m.p() == 0) {
        x /= m.p();
        ++val;
      }
      v[size_t(i)] = std::min(v[size_t(i)], val);
    }
  }
  // S must be exactly prod p^{v_i} Z_{p^{k_i}}.
  int64_t expect = 1;
  for (int i = 0; i < t; ++i)
    expect *= pow_i64(m.p(), m.exps()[size_t(i)] - v[size_t(i)]);
  if (expect != s.size())
    throw MagmaError(
        "aligned_quotient: subset is not a coordinate-aligned submodule");
  // Action closure (on the aligned generators; actions are additive).
  for (const Action& e : m.actions())
    for (int i = 0; i < t; ++i) {
      if (v[size_t(i)] >= m.exps()[size_t(i)]) continue;
      elem gen = m.scale(pow_i64(m.p(), v[size_t(i)]), m.basis(i));
      if (!s.contains(m.act(e.name, gen)))
        throw MagmaError("aligned_quotient: subset is not closed under action '" +
                         e.name + "'");
    }
  // Quotient: moduli p^{v_i}, same matrices; invertibility re-checked (an
  // action bijective upstairs stays bijective on the quotient, but verify
  // rather than assume).
  std::vector<Action> actions = m.actions();
  for (Action& e : actions) {
    if (!e.invertible) continue;
    std::vector<std::vector<int64_t>> rows;
    for (int i = 0; i < t; ++i) {
      if (v[size_t(i)] == 0) continue;
      std::vector<int64_t> row;
      for (int j = 0; j < t; ++j) {
        if (v[size_t(j)] == 0) continue;
        row.push_back(mod_pos(e.mat[size_t(i) * t + j], m.p()));
      }
      rows.push_back(std::move(row));
    }
    size_t dim = rows.size();
    if (echelonize(rows, m.p()) != int(dim)) e.invertible = false;
    e.order = 0;
  }
  return FiniteModule(m.p(), v, std::move(actions), m.ideal());
}

}  // namespace sdq
