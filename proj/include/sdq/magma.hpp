#pragma once

// Finite magmas as dense multiplication tables, plus the identity-checking
// machinery used throughout the verification suite.
//
// Conventions:
//   * elements are indices 0..n-1; any structured meaning ("(a0,a1,a2)")
//     lives in the optional labels only,
//   * table(a,b) is the product a*b,
//   * identities are terms over the single binary symbol '*'; variables are
//     numbered by first appearance in the identity's textual form, and
//     check_identity scans assignments in row-major lexicographic order over
//     that numbering, so a reported witness is always the first failure.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdq {

using elem = int32_t;

class MagmaError : public std::runtime_error {
 public:
  explicit MagmaError(const std::string& what) : std::runtime_error(what) {}
};

// Lazily built division tables; see Magma::divisions().
struct DivisionTables {
  // ldiv[a*n+b] = x with a*x = b;  rdiv[a*n+b] = y with y*a = b.
  std::vector<uint16_t> ldiv, rdiv;
};

struct Identity;

class Magma {
 public:
  Magma(elem n, std::vector<uint16_t> table,
        std::vector<std::string> labels = {});

  // Parse/serialize the plain text table format (see docs/FORMATS.md).
  static Magma load(const std::string& text);
  std::string save() const;

  elem size() const { return n_; }
  elem at(elem a, elem b) const { return table_[size_t(a) * n_ + b]; }
  const uint16_t* data() const { return table_.data(); }
  const std::vector<std::string>& labels() const { return labels_; }
  // The label of a, or the decimal index when the table carries no labels.
  std::string label(elem a) const;

  // Left/right division; requires the table to be a quasigroup in the row
  // resp. column being used (checked; throws MagmaError otherwise).
  elem ldiv(elem a, elem b) const;  // x with a*x = b
  elem rdiv(elem a, elem b) const;  // y with y*a = b
  const DivisionTables& divisions() const;

  bool operator==(const Magma& o) const {
    return n_ == o.n_ && table_ == o.table_;
  }

  // Memoized yes/no result of an identity check (keyed by identity name;
  // a pure function of the immutable table, so safe to share between
  // copies). Lets hot paths re-ask "is this left-distributive?" without
  // re-running the O(n^3) sweep.
  bool holds(const Identity& id) const;

 private:
  // The division tables are built once on demand and shared between copies
  // (the table itself is immutable, so sharing is safe).
  struct DivCache {
    std::once_flag once;
    std::unique_ptr<DivisionTables> tables;
  };
  struct MemoCache {
    std::mutex mu;
    std::vector<std::pair<std::string, bool>> entries;
  };

  elem n_;
  std::vector<uint16_t> table_;
  std::vector<std::string> labels_;
  std::shared_ptr<DivCache> div_ = std::make_shared<DivCache>();
  std::shared_ptr<MemoCache> memo_ = std::make_shared<MemoCache>();
};

// ---------------------------------------------------------------------------
// Latin-square check

struct LatinCheck {
  bool ok = true;
  // On failure: whether a row or a column is broken, its index, and the
  // duplicated value with the two positions where it occurs.
  enum class Kind { row, column } kind = Kind::row;
  elem index = -1, value = -1, first_pos = -1, second_pos = -1;
  std::string describe() const;
};

LatinCheck is_latin(const Magma& m);

// ---------------------------------------------------------------------------
// Identities

// A term over one binary symbol, flattened children-before-parents.
// Leaves have var >= 0; interior nodes combine two earlier nodes.
struct TermNode {
  int16_t a = -1, b = -1;  // children (node ids) for interior nodes
  int16_t var = -1;        // variable id for leaves
};

struct Identity {
  std::string name;
  int var_count = 0;
  std::vector<TermNode> nodes;
  int lhs = -1, rhs = -1;  // root node ids

  // Parse "lhs = rhs" where terms are single-letter variables and
  // parenthesized applications, e.g. "(x*y)*(u*v) = (x*u)*(y*v)".
  static Identity parse(const std::string& name, const std::string& text);
};

// The identities the suite cares about, as data.
namespace identities {
const Identity& idempotent();         // x*x = x
const Identity& commutative();        // x*y = y*x
const Identity& key_symmetric();      // x*(x*y) = y
const Identity& left_distributive();  // x*(y*z) = (x*y)*(x*z)
const Identity& right_distributive(); // (x*y)*z = (x*z)*(y*z)
const Identity& medial();             // (x*y)*(u*v) = (x*u)*(y*v)
const Identity& ch_law();             // (x*x)*(y*z) = (x*y)*(x*z)
const Identity& associative();        // (x*y)*z = x*(y*z)
}  // namespace identities

struct IdentityResult {
  bool holds = true;
  std::vector<elem> assignment;  // the first failing assignment (if any)
  elem lhs_value = -1, rhs_value = -1;
};

// Exhaustive n^var_count sweep. The witness (when the identity fails) is the
// row-major lexicographically first failing assignment regardless of the
// thread count.
IdentityResult check_identity(const Magma& m, const Identity& id,
                              int threads = 1);

// Naive reference evaluator (used as an oracle in tests): evaluates the term
// tree recursively for every assignment, no precomputation.
IdentityResult check_identity_naive(const Magma& m, const Identity& id);

// ---------------------------------------------------------------------------
// Parastrophes

enum class Parastrophe {
  opposite,        // a∘b = b*a
  left_division,   // a∘b = a\b
  right_division,  // a∘b = a/b
  od,              // a∘b = b\a
  do_,             // a∘b = b/a
};

Magma parastrophe(const Magma& m, Parastrophe kind);

}  // namespace sdq
