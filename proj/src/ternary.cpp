#include "sdq/ternary.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

namespace sdq {

namespace {

int64_t mod_pos(int64_t v, int64_t m) {
  v %= m;
  return v < 0 ? v + m : v;
}

int64_t pow_i64(int64_t b, int e) {
  int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// tau coordinates from predecoded argument coordinates.
void eval_coords(const std::vector<TauMonomial>& tau,
                 const std::vector<int64_t>& moduli, const int64_t* a,
                 const int64_t* b, const int64_t* c, int64_t* out, int t) {
  for (int i = 0; i < t; ++i) out[i] = 0;
  for (const TauMonomial& m : tau)
    out[m.out] += m.coef * a[m.i] * b[m.j] * c[m.k];
  for (int i = 0; i < t; ++i) out[i] = mod_pos(out[i], moduli[size_t(i)]);
}

}  // namespace

elem TernaryAlgebra::eval(elem a, elem b, elem c) const {
  const int t = module.rank();
  std::vector<int64_t> ca = module.decode(a), cb = module.decode(b),
                       cc = module.decode(c);
  std::vector<int64_t> out(static_cast<size_t>(t));
  eval_coords(tau, module.moduli(), ca.data(), cb.data(), cc.data(),
              out.data(), t);
  return module.encode(out);
}

elem TernaryAlgebra::bar(elem x, elem y, elem z) const {
  return module.add(module.add(eval(x, y, z), eval(y, z, x)), eval(z, x, y));
}

std::vector<elem> TernaryAlgebra::structure_tensor() const {
  const int t = module.rank();
  std::vector<elem> tensor(size_t(t) * t * t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      for (int k = 0; k < t; ++k)
        tensor[(size_t(i) * t + j) * t + k] =
            eval(module.basis(i), module.basis(j), module.basis(k));
  return tensor;
}

TernaryAlgebra ternary_from_tensor(FiniteModule module,
                                   const std::vector<elem>& tensor) {
  const int t = module.rank();
  if (tensor.size() != size_t(t) * t * t)
    throw MagmaError("ternary_from_tensor: tensor has wrong shape");
  std::vector<TauMonomial> tau;
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      for (int k = 0; k < t; ++k) {
        elem v = tensor[(size_t(i) * t + j) * t + k];
        if (v == 0) continue;
        std::vector<int64_t> coords = module.decode(v);
        for (int out = 0; out < t; ++out)
          if (coords[size_t(out)] != 0)
            tau.push_back(TauMonomial{out, coords[size_t(out)], i, j, k});
      }
  return TernaryAlgebra{std::move(module), std::move(tau)};
}

TernaryCheck validate_ternary(const TernaryAlgebra& a, uint64_t samples) {
  const FiniteModule& m = a.module;
  const int t = m.rank();
  const elem n = m.size();

  // Trilinearity, exact part: every monomial must be well-defined, i.e.
  // coef * p^{k_i} (and k_j, k_k) must vanish mod p^{k_out}.
  for (const TauMonomial& mono : a.tau) {
    int slot_min = std::min({m.exps()[size_t(mono.i)], m.exps()[size_t(mono.j)],
                             m.exps()[size_t(mono.k)]});
    int need = std::max(0, m.exps()[size_t(mono.out)] - slot_min);
    if (mod_pos(mono.coef, pow_i64(m.p(), need)) != 0)
      return TernaryCheck{false,
                          "trilinear",
                          {m.basis(mono.i), m.basis(mono.j), m.basis(mono.k)},
                          "monomial coefficient " + std::to_string(mono.coef) +
                              " into coordinate " + std::to_string(mono.out) +
                              " is not well-defined"};
  }
  // Trilinearity, sampled: additivity in each slot.
  std::mt19937_64 rng(0x7e51a7u);
  for (uint64_t s = 0; s < samples; ++s) {
    elem x = elem(rng() % uint64_t(n)), x2 = elem(rng() % uint64_t(n));
    elem y = elem(rng() % uint64_t(n)), z = elem(rng() % uint64_t(n));
    if (a.eval(m.add(x, x2), y, z) !=
        m.add(a.eval(x, y, z), a.eval(x2, y, z)))
      return TernaryCheck{false, "trilinear", {x, x2, y, z}, "slot 1"};
    if (a.eval(y, m.add(x, x2), z) !=
        m.add(a.eval(y, x, z), a.eval(y, x2, z)))
      return TernaryCheck{false, "trilinear", {x, x2, y, z}, "slot 2"};
    if (a.eval(y, z, m.add(x, x2)) !=
        m.add(a.eval(y, z, x), a.eval(y, z, x2)))
      return TernaryCheck{false, "trilinear", {x, x2, y, z}, "slot 3"};
  }

  // T0: every ideal action kills every tau value; by trilinearity it is
  // enough to kill the structure-tensor entries.
  std::vector<elem> tensor = a.structure_tensor();
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      for (int k = 0; k < t; ++k) {
        elem v = tensor[(size_t(i) * t + j) * t + k];
        if (v == 0) continue;
        for (const std::string& r : m.ideal()) {
          elem img = (r == "p") ? m.scale(m.p(), v) : m.act(r, v);
          if (img != 0)
            return TernaryCheck{
                false,
                "T0",
                {m.basis(i), m.basis(j), m.basis(k)},
                r + "*tau(e" + std::to_string(i) + ",e" + std::to_string(j) +
                    ",e" + std::to_string(k) + ") = " + m.label(img) +
                    " != 0"};
        }
      }

  // T1 on all pairs.
  for (elem x = 0; x < n; ++x)
    for (elem y = 0; y < n; ++y)
      if (a.eval(x, x, y) != 0)
        return TernaryCheck{false, "T1", {x, y}, "tau(x,x,y) != 0"};

  // T2/T3: tau(tau(..),u,v) and tau(u,v,tau(..)); the first/third argument
  // ranges over combinations of tensor values, so by trilinearity the
  // distinct nonzero tensor values against all pairs are enough.
  std::vector<elem> values;
  for (elem v : tensor)
    if (v != 0 && std::find(values.begin(), values.end(), v) == values.end())
      values.push_back(v);
  for (elem w : values)
    for (elem u = 0; u < n; ++u)
      for (elem v = 0; v < n; ++v) {
        if (a.eval(w, u, v) != 0)
          return TernaryCheck{false, "T2", {w, u, v}, "tau(tau-value,u,v) != 0"};
        if (a.eval(u, v, w) != 0)
          return TernaryCheck{false, "T3", {u, v, w}, "tau(u,v,tau-value) != 0"};
      }

  return TernaryCheck{};
}

SubSet annihilator(const TernaryAlgebra& a) {
  const FiniteModule& m = a.module;
  const int t = m.rank();
  SubSet out(m.size());
  for (elem x = 0; x < m.size(); ++x) {
    bool ann = true;
    for (int j = 0; j < t && ann; ++j)
      for (int k = 0; k < t && ann; ++k)
        if (a.eval(x, m.basis(j), m.basis(k)) != 0 ||
            a.eval(m.basis(j), m.basis(k), x) != 0)
          ann = false;
    if (ann) out.insert(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quasimodules.

bool Quasimodule::has_action(const std::string& name) const {
  for (const std::string& s : action_names)
    if (s == name) return true;
  return false;
}

const std::vector<elem>& Quasimodule::action(const std::string& name) const {
  for (size_t i = 0; i < action_names.size(); ++i)
    if (action_names[i] == name) return action_maps[i];
  throw MagmaError("Quasimodule: no action named '" + name + "'");
}

elem Quasimodule::scale(int64_t c, elem a) const {
  if (c < 0) throw MagmaError("Quasimodule: negative scalar");
  elem r = loop.neutral;
  for (int64_t i = 0; i < c; ++i) r = loop.add(r, a);
  return r;
}

bool Quasimodule::operator==(const Quasimodule& o) const {
  if (!(loop.magma == o.loop.magma) || loop.neutral != o.loop.neutral ||
      p != o.p)
    return false;
  auto sorted_actions = [](const Quasimodule& q) {
    std::vector<std::pair<std::string, const std::vector<elem>*>> v;
    for (size_t i = 0; i < q.action_names.size(); ++i)
      v.emplace_back(q.action_names[i], &q.action_maps[i]);
    std::sort(v.begin(), v.end());
    return v;
  };
  auto va = sorted_actions(*this), vb = sorted_actions(o);
  if (va.size() != vb.size()) return false;
  for (size_t i = 0; i < va.size(); ++i)
    if (va[i].first != vb[i].first || *va[i].second != *vb[i].second)
      return false;
  std::vector<std::string> ia = ideal, ib = o.ideal;
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  return ia == ib;
}

void validate_quasimodule(const Quasimodule& q) {
  const Loop& l = q.loop;
  const elem n = l.size();
  if (q.action_names.size() != q.action_maps.size())
    throw MagmaError("quasimodule: action name/map count mismatch");
  CmlCheck cml = is_commutative_moufang(l);
  if (!cml.holds)
    throw MagmaError("quasimodule: loop violates " + cml.law);
  for (size_t e = 0; e < q.action_maps.size(); ++e) {
    const std::vector<elem>& f = q.action_maps[e];
    const std::string& name = q.action_names[e];
    if (f.size() != size_t(n))
      throw MagmaError("quasimodule: action '" + name + "' has wrong size");
    if (f[size_t(l.neutral)] != l.neutral)
      throw MagmaError("quasimodule: action '" + name + "' moves 0");
    for (elem x = 0; x < n; ++x)
      for (elem y = 0; y < n; ++y)
        if (f[size_t(l.add(x, y))] != l.add(f[size_t(x)], f[size_t(y)]))
          throw MagmaError("quasimodule: action '" + name +
                           "' is not a loop endomorphism");
  }
  for (size_t e = 0; e < q.action_maps.size(); ++e)
    for (size_t g = e + 1; g < q.action_maps.size(); ++g)
      for (elem x = 0; x < n; ++x)
        if (q.action_maps[e][size_t(q.action_maps[g][size_t(x)])] !=
            q.action_maps[g][size_t(q.action_maps[e][size_t(x)])])
          throw MagmaError("quasimodule: actions '" + q.action_names[e] +
                           "' and '" + q.action_names[g] + "' do not commute");
  // e and e^-1 compose to the identity (both directions).
  for (size_t e = 0; e < q.action_names.size(); ++e)
    for (size_t g = 0; g < q.action_names.size(); ++g) {
      const std::string& base = q.action_names[e];
      const std::string& inv = q.action_names[g];
      if (inv != base + "^-1" && inv != "(" + base + ")^-1") continue;
      for (elem x = 0; x < n; ++x)
        if (q.action_maps[g][size_t(q.action_maps[e][size_t(x)])] != x ||
            q.action_maps[e][size_t(q.action_maps[g][size_t(x)])] != x)
          throw MagmaError("quasimodule: '" + inv + "' is not inverse to '" +
                           base + "'");
    }
  if (q.has_action("x") && q.has_action("1-x")) {
    const std::vector<elem>& fx = q.action("x");
    const std::vector<elem>& fg = q.action("1-x");
    for (elem a = 0; a < n; ++a)
      if (l.add(fx[size_t(a)], fg[size_t(a)]) != a)
        throw MagmaError("quasimodule: x a + (1-x) a != a");
  }
  // Quasimodule axiom r x + (y + z) = (r x + y) + z for ideal generators r:
  // it only depends on u = r x, so sweep the image of r against all pairs.
  for (const std::string& r : q.ideal) {
    std::vector<char> seen(size_t(n), 0);
    std::vector<elem> image;
    for (elem x = 0; x < n; ++x) {
      elem u = (r == "p") ? q.scale(q.p, x) : q.act(r, x);
      if (!seen[size_t(u)]) {
        seen[size_t(u)] = 1;
        image.push_back(u);
      }
    }
    const uint16_t* tab = l.magma.data();
    for (elem u : image)
      for (elem y = 0; y < n; ++y) {
        elem uy = elem(tab[size_t(u) * n + y]);
        for (elem z = 0; z < n; ++z)
          if (tab[size_t(u) * n + tab[size_t(y) * n + z]] !=
              tab[size_t(uy) * n + z])
            throw MagmaError("quasimodule: axiom r x+(y+z)=(r x+y)+z fails for r = " +
                             r);
      }
  }
}

namespace {

// Adds an action (skipping duplicates by name).
void add_action(Quasimodule& q, const std::string& name,
                std::vector<elem> map) {
  if (q.has_action(name)) return;
  q.action_names.push_back(name);
  q.action_maps.push_back(std::move(map));
}

// Inverse permutation, or nullopt when not a bijection.
std::optional<std::vector<elem>> invert_map(const std::vector<elem>& f) {
  std::vector<elem> inv(f.size(), -1);
  for (size_t x = 0; x < f.size(); ++x) {
    if (inv[size_t(f[x])] != -1) return std::nullopt;
    inv[size_t(f[x])] = elem(x);
  }
  return inv;
}

}  // namespace

Quasimodule q_of(const TernaryAlgebra& a, int threads) {
  TernaryCheck tc = validate_ternary(a);
  if (!tc.ok)
    throw MagmaError("q_of: ternary-invalid (" + tc.condition + ": " +
                     tc.detail + ")");
  const FiniteModule& m = a.module;
  const elem n = m.size();
  const int t = m.rank();

  // Predecode all coordinates once, then fill the loop table.
  std::vector<int64_t> coords(size_t(n) * size_t(t));
  for (elem x = 0; x < n; ++x) {
    std::vector<int64_t> c = m.decode(x);
    std::copy(c.begin(), c.end(), coords.begin() + size_t(x) * t);
  }
  std::vector<uint16_t> table(size_t(n) * size_t(n));
  std::vector<int64_t> tv(static_cast<size_t>(t));
  std::vector<int64_t> sum(static_cast<size_t>(t));
  std::vector<std::string> labels(static_cast<size_t>(n));
  for (elem x = 0; x < n; ++x) labels[size_t(x)] = m.label(x);
  for (elem x = 0; x < n; ++x) {
    const int64_t* cx = &coords[size_t(x) * t];
    for (elem y = 0; y < n; ++y) {
      const int64_t* cy = &coords[size_t(y) * t];
      elem d = m.sub(x, y);
      eval_coords(a.tau, m.moduli(), cx, cy, &coords[size_t(d) * t], tv.data(),
                  t);
      for (int i = 0; i < t; ++i) sum[size_t(i)] = cx[i] + cy[i] + tv[size_t(i)];
      table[size_t(x) * n + y] = uint16_t(m.encode(sum));
    }
  }
  Magma loop_magma(n, std::move(table), std::move(labels));
  Loop loop = as_loop(loop_magma);
  if (loop.neutral != 0) throw MagmaError("q_of: 0 is not neutral");
  CmlCheck cml = is_commutative_moufang(loop, threads);
  if (!cml.holds) throw MagmaError("q_of: loop violates " + cml.law);

  Quasimodule q;
  q.loop = loop;
  q.p = m.p();
  q.ideal = m.ideal();
  for (size_t e = 0; e < m.actions().size(); ++e) {
    std::vector<elem> map(static_cast<size_t>(n));
    for (elem x = 0; x < n; ++x) map[size_t(x)] = m.act(e, x);
    add_action(q, m.actions()[e].name, std::move(map));
  }
  if (q.has_action("x")) {
    const std::vector<elem>& fx = q.action("x");
    std::vector<elem> plus(static_cast<size_t>(n));
    std::vector<elem> minus(static_cast<size_t>(n));
    for (elem x = 0; x < n; ++x) {
      // (1+x)a and (1-x)a agree between module arithmetic and loop sums
      // (6.1: (r+s)a = ra + sa in the new loop); insist on it.
      plus[size_t(x)] = m.add(x, fx[size_t(x)]);
      if (plus[size_t(x)] != loop.add(x, fx[size_t(x)]))
        throw MagmaError("q_of: (1+x)a differs between module and loop");
      minus[size_t(x)] = m.sub(x, fx[size_t(x)]);
      if (minus[size_t(x)] != loop.sub(x, fx[size_t(x)]))
        throw MagmaError("q_of: (1-x)a differs between module and loop");
    }
    add_action(q, "1+x", std::move(plus));
    add_action(q, "1-x", minus);
    if (auto inv = invert_map(q.action("x"))) add_action(q, "x^-1", *inv);
    if (auto inv = invert_map(minus)) add_action(q, "(1-x)^-1", *inv);
  }
  validate_quasimodule(q);

  // 6.1 centre formula: Z(A(*)) = { a : tau-bar(a, x, y) = 0 for all x,y },
  // reduced to generator pairs by trilinearity.
  SubSet z = centre(loop, threads);
  SubSet zf(n);
  for (elem x = 0; x < n; ++x) {
    bool in = true;
    for (int j = 0; j < t && in; ++j)
      for (int k = 0; k < t && in; ++k)
        if (a.bar(x, m.basis(j), m.basis(k)) != 0) in = false;
    if (in) zf.insert(x);
  }
  if (!(z == zf))
    throw MagmaError("q_of: centre does not match the tau-bar formula");

  // 6.1 associator subloop = subloop generated by Im(tau-bar).
  SubSet assoc = associator_subloop(loop, threads);
  std::vector<elem> gens{loop.neutral};
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      for (int k = 0; k < t; ++k) {
        elem v = a.bar(m.basis(i), m.basis(j), m.basis(k));
        if (v != 0) gens.push_back(v);
      }
  if (!(closure(loop.magma, gens) == assoc))
    throw MagmaError(
        "q_of: associator subloop does not match the image of tau-bar");
  return q;
}

Quasimodule quasimodule_of_distributive(const Magma& m, elem w) {
  ArithmeticalForm af = arithmetical_form(m, w);
  const elem n = m.size();
  Quasimodule q;
  q.loop = af.loop;
  int64_t p = 2;
  while (n % p != 0) ++p;
  q.p = p;
  q.ideal = {"p", "1+x"};
  add_action(q, "x", af.f);
  add_action(q, "1-x", af.g);
  std::vector<elem> plus(static_cast<size_t>(n));
  for (elem a = 0; a < n; ++a)
    plus[size_t(a)] = q.loop.add(a, af.f[size_t(a)]);
  add_action(q, "1+x", std::move(plus));
  auto finv = invert_map(af.f);
  auto ginv = invert_map(af.g);
  if (!finv || !ginv)
    throw MagmaError("quasimodule_of_distributive: action not invertible");
  add_action(q, "x^-1", *finv);
  add_action(q, "(1-x)^-1", *ginv);
  validate_quasimodule(q);
  for (elem a = 0; a < n; ++a)
    for (elem b = 0; b < n; ++b)
      if (m.at(a, b) != q.loop.add(af.f[size_t(a)], af.g[size_t(b)]))
        throw MagmaError(
            "quasimodule_of_distributive: reconstruction a*b = x a + (1-x) b "
            "failed");
  return q;
}

Quasimodule quasimodule_parastrophe(const Quasimodule& q,
                                    ParastropheKind kind) {
  for (const char* need : {"x", "1-x", "x^-1", "(1-x)^-1"})
    if (!q.has_action(need))
      throw MagmaError(std::string("quasimodule_parastrophe: missing action '") +
                       need + "'");
  const elem n = q.size();
  const std::vector<elem>& x = q.action("x");
  const std::vector<elem>& gx = q.action("1-x");
  const std::vector<elem>& xi = q.action("x^-1");
  const std::vector<elem>& gi = q.action("(1-x)^-1");

  std::vector<elem> nx, ngx, nxi, ngi;
  switch (kind) {
    case ParastropheKind::alpha:
      nx = gx;
      ngx = x;
      nxi = gi;
      ngi = xi;
      break;
    case ParastropheKind::beta: {
      nx = xi;
      nxi = x;
      ngx.resize(size_t(n));  // (1-x)* = 1 - x^-1
      for (elem a = 0; a < n; ++a)
        ngx[size_t(a)] = q.loop.sub(a, xi[size_t(a)]);
      auto inv = invert_map(ngx);
      if (!inv)
        throw MagmaError("quasimodule_parastrophe: 1 - x^-1 is not a bijection");
      ngi = *inv;
      break;
    }
    case ParastropheKind::gamma: {
      nx.resize(size_t(n));  // x. = -x(1-x)^-1
      for (elem a = 0; a < n; ++a)
        nx[size_t(a)] = q.loop.neg(x[size_t(gi[size_t(a)])]);
      auto inv = invert_map(nx);
      if (!inv)
        throw MagmaError(
            "quasimodule_parastrophe: -x(1-x)^-1 is not a bijection");
      nxi = *inv;
      ngx = gi;  // (1-x). = (1-x)^-1
      ngi = gx;
      break;
    }
  }
  Quasimodule out;
  out.loop = q.loop;
  out.p = q.p;
  out.ideal = q.ideal;
  add_action(out, "x", std::move(nx));
  add_action(out, "1-x", std::move(ngx));
  add_action(out, "x^-1", std::move(nxi));
  add_action(out, "(1-x)^-1", std::move(ngi));
  std::vector<elem> plus(static_cast<size_t>(n));
  const std::vector<elem>& ox = out.action("x");
  for (elem a = 0; a < n; ++a)
    plus[size_t(a)] = out.loop.add(a, ox[size_t(a)]);
  add_action(out, "1+x", std::move(plus));
  // Any further actions (e.g. the scalar "3") are carried over verbatim;
  // they must not depend on x, which is the caller's responsibility.
  static const char* canonical[] = {"x", "1-x", "x^-1", "(1-x)^-1", "1+x"};
  for (size_t e = 0; e < q.action_names.size(); ++e) {
    bool is_canon = false;
    for (const char* c : canonical)
      if (q.action_names[e] == c) is_canon = true;
    if (!is_canon) add_action(out, q.action_names[e], q.action_maps[e]);
  }
  validate_quasimodule(out);
  return out;
}

// ---------------------------------------------------------------------------
// Hom search.

namespace {

// Closure of a set under loop products and all action maps.
SubSet qm_closure(const Quasimodule& q, const std::vector<elem>& gens) {
  const elem n = q.size();
  const uint16_t* tab = q.loop.magma.data();
  std::vector<char> in(size_t(n), 0);
  std::vector<elem> order;
  auto push = [&](elem v) {
    if (!in[size_t(v)]) {
      in[size_t(v)] = 1;
      order.push_back(v);
    }
  };
  push(q.loop.neutral);
  for (elem g : gens) push(g);
  for (size_t head = 0; head < order.size(); ++head) {
    elem a = order[head];
    for (size_t i = 0; i <= head; ++i) push(elem(tab[size_t(a) * n + order[i]]));
    for (const std::vector<elem>& f : q.action_maps) push(f[size_t(a)]);
  }
  SubSet s(n);
  for (elem v = 0; v < n; ++v)
    if (in[size_t(v)]) s.insert(v);
  return s;
}

std::vector<elem> qm_generators(const Quasimodule& q) {
  const elem n = q.size();
  std::vector<elem> gens;
  SubSet cur = qm_closure(q, gens);
  while (cur.size() < n) {
    elem best = -1, best_size = -1;
    for (elem cand = 0; cand < n; ++cand) {
      if (cur.contains(cand)) continue;
      std::vector<elem> trial = gens;
      trial.push_back(cand);
      elem sz = qm_closure(q, trial).size();
      if (sz > best_size) {
        best_size = sz;
        best = cand;
      }
    }
    gens.push_back(best);
    cur = qm_closure(q, gens);
  }
  return gens;
}

// Loop element order (additive order in the CML).
int64_t loop_order(const Loop& l, elem a) {
  int64_t k = 1;
  elem v = a;
  while (v != l.neutral) {
    v = l.add(v, a);
    if (++k > l.size()) throw MagmaError("loop_order: runaway");
  }
  return k;
}

int64_t orbit_length(const std::vector<elem>& f, elem a) {
  // length of the eventually-periodic forward orbit a, f(a), f^2(a), ...
  std::vector<elem> seen{a};
  elem x = a;
  for (;;) {
    x = f[size_t(x)];
    for (elem y : seen)
      if (y == x) return int64_t(seen.size());
    seen.push_back(x);
  }
}

struct QmSearch {
  const Quasimodule& a;
  const Quasimodule& b;
  uint64_t budget;
  uint64_t nodes = 0;
  bool complete = true;
  // paired action maps (a-side index i pairs with b-side index i)
  std::vector<const std::vector<elem>*> acts_a, acts_b;
  std::vector<std::vector<int64_t>> fp_a;
  std::vector<std::optional<std::vector<int64_t>>> fp_b;

  std::vector<int64_t> fingerprint_a(elem v) const {
    std::vector<int64_t> fp{loop_order(a.loop, v)};
    for (const auto* f : acts_a) fp.push_back(orbit_length(*f, v));
    return fp;
  }
  const std::vector<int64_t>& fingerprint_b(elem v) {
    if (!fp_b[size_t(v)]) {
      std::vector<int64_t> fp{loop_order(b.loop, v)};
      for (const auto* f : acts_b) fp.push_back(orbit_length(*f, v));
      fp_b[size_t(v)] = std::move(fp);
    }
    return *fp_b[size_t(v)];
  }

  struct State {
    std::vector<elem> map_ab, map_ba, domain;
  };

  bool extend(State& st, elem g, elem img) {
    const elem na = a.size();
    const uint16_t* ta = a.loop.magma.data();
    const uint16_t* tb = b.loop.magma.data();
    std::vector<std::pair<elem, elem>> queue{{g, img}};
    for (size_t head = 0; head < queue.size(); ++head) {
      auto [u, fu] = queue[head];
      elem known = st.map_ab[size_t(u)];
      if (known != -1) {
        if (known != fu) return false;
        continue;
      }
      if (st.map_ba[size_t(fu)] != -1) return false;
      if (fp_a[size_t(u)] != fingerprint_b(fu)) return false;
      st.map_ab[size_t(u)] = fu;
      st.map_ba[size_t(fu)] = u;
      st.domain.push_back(u);
      for (elem v : st.domain)
        queue.emplace_back(elem(ta[size_t(u) * na + v]),
                           elem(tb[size_t(fu) * b.size() + st.map_ab[size_t(v)]]));
      for (size_t k = 0; k < acts_a.size(); ++k)
        queue.emplace_back((*acts_a[k])[size_t(u)], (*acts_b[k])[size_t(fu)]);
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
    if (st.map_ab[size_t(g)] != -1) {
      // generator already forced by the closure of earlier choices
      return recurse(st, gens, gi + 1);
    }
    const std::vector<int64_t>& want = fp_a[size_t(g)];
    for (elem cand = 0; cand < b.size(); ++cand) {
      if (st.map_ba[size_t(cand)] != -1) continue;
      if (want != fingerprint_b(cand)) continue;
      if (++nodes > budget) {
        complete = false;
        return std::nullopt;
      }
      State next = st;
      if (extend(next, g, cand)) {
        auto found = recurse(next, gens, gi + 1);
        if (found || !complete) return found;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

QmHomResult quasimodule_hom_search(const Quasimodule& q1,
                                   const Quasimodule& q2, QmHomMode mode,
                                   bool complete, uint64_t budget) {
  QmHomResult out;
  if (q1.size() != q2.size() || q1.p != q2.p) return out;

  QmSearch search{q1, q2, budget, 0, true, {}, {}, {}, {}};
  if (mode == QmHomMode::iso) {
    std::vector<std::string> na = q1.action_names, nb = q2.action_names;
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    if (na != nb)
      throw MagmaError("quasimodule_hom_search: different action symbols");
    for (const std::string& name : na) {
      search.acts_a.push_back(&q1.action(name));
      search.acts_b.push_back(&q2.action(name));
    }
  } else {
    // anti: intertwine x with 1-x (and the inverses correspondingly)
    static const std::pair<const char*, const char*> swap_pairs[] = {
        {"x", "1-x"}, {"1-x", "x"}, {"x^-1", "(1-x)^-1"}, {"(1-x)^-1", "x^-1"}};
    for (auto [from, to] : swap_pairs) {
      if (!q1.has_action(from) || !q2.has_action(to))
        throw MagmaError(
            "quasimodule_hom_search: anti mode needs x, 1-x and inverses");
      search.acts_a.push_back(&q1.action(from));
      search.acts_b.push_back(&q2.action(to));
    }
  }
  search.fp_a.reserve(size_t(q1.size()));
  for (elem v = 0; v < q1.size(); ++v)
    search.fp_a.push_back(search.fingerprint_a(v));
  search.fp_b.assign(size_t(q2.size()), std::nullopt);

  QmSearch::State st;
  st.map_ab.assign(size_t(q1.size()), -1);
  st.map_ba.assign(size_t(q2.size()), -1);
  if (!search.extend(st, q1.loop.neutral, q2.loop.neutral)) return out;

  std::vector<elem> gens = qm_generators(q1);
  std::optional<std::vector<elem>> found = search.recurse(st, gens, 0);
  out.nodes = search.nodes;
  out.complete = search.complete;
  if (!out.complete && complete)
    throw MagmaError("quasimodule_hom_search: budget exhausted");
  if (!found) return out;

  // Re-verify the certificate exhaustively: bijective loop homomorphism
  // intertwining every paired action.
  const std::vector<elem>& map = *found;
  {
    std::vector<char> hit(size_t(q2.size()), 0);
    for (elem v = 0; v < q1.size(); ++v) {
      if (hit[size_t(map[size_t(v)])])
        throw MagmaError("quasimodule_hom_search: certificate not injective");
      hit[size_t(map[size_t(v)])] = 1;
    }
    const elem n = q1.size();
    const uint16_t* ta = q1.loop.magma.data();
    const uint16_t* tb = q2.loop.magma.data();
    for (elem x = 0; x < n; ++x)
      for (elem y = 0; y < n; ++y)
        if (map[size_t(ta[size_t(x) * n + y])] !=
            elem(tb[size_t(map[size_t(x)]) * n + map[size_t(y)]]))
          throw MagmaError(
              "quasimodule_hom_search: certificate is not a loop homomorphism");
    for (size_t k = 0; k < search.acts_a.size(); ++k)
      for (elem x = 0; x < n; ++x)
        if (map[size_t((*search.acts_a[k])[size_t(x)])] !=
            (*search.acts_b[k])[size_t(map[size_t(x)])])
          throw MagmaError(
              "quasimodule_hom_search: certificate does not intertwine actions");
  }
  out.map = map;
  return out;
}

}  // namespace sdq
