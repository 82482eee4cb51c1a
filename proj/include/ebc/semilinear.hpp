#pragma once

// Predicate and piecewise-affine function descriptions with direct
// reference evaluators. These evaluators are the ground truth the verifier
// compares compiled networks against.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ebc/crn.hpp"

namespace ebc {

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

enum class ThresholdSense { Le, Ge };

/// w.x <= c or w.x >= c over named input variables. The surface syntax
/// keeps both orientations; le_form() gives the normalized <= view.
struct ThresholdAtom {
  std::map<std::string, Coef> weights;
  Coef bound = 0;
  ThresholdSense sense = ThresholdSense::Le;

  void validate() const {
    if (weights.empty()) throw SpecError("threshold atom with no variables");
  }

  /// Normalized (w, c) with meaning w.x <= c.
  std::pair<std::map<std::string, Coef>, Coef> le_form() const {
    if (sense == ThresholdSense::Le) return {weights, bound};
    std::map<std::string, Coef> w;
    for (auto& [v, k] : weights) w[v] = -k;
    return {w, -bound};
  }

  /// Normalized (w, t) with meaning w.x >= t.
  std::pair<std::map<std::string, Coef>, Coef> ge_form() const {
    if (sense == ThresholdSense::Ge) return {weights, bound};
    std::map<std::string, Coef> w;
    for (auto& [v, k] : weights) w[v] = -k;
    return {w, -bound};
  }

  bool operator==(const ThresholdAtom&) const = default;
};

/// w.x == c (mod m), weights and residue reduced mod m at construction.
struct ModAtom {
  std::map<std::string, Coef> weights;
  Coef residue = 0;
  Coef modulus = 2;

  static ModAtom make(std::map<std::string, Coef> w, Coef c, Coef m) {
    if (m < 2) throw SpecError("mod atom needs modulus >= 2");
    ModAtom a;
    a.modulus = m;
    for (auto& [v, k] : w) a.weights[v] = ((k % m) + m) % m;
    a.residue = ((c % m) + m) % m;
    if (a.weights.empty()) throw SpecError("mod atom with no variables");
    return a;
  }

  bool operator==(const ModAtom&) const = default;
};

struct PredicateExpr;
using PredicatePtr = std::shared_ptr<const PredicateExpr>;

/// Boolean combination tree over threshold and mod atoms.
struct PredicateExpr {
  enum class Kind { Threshold, Mod, And, Or, Not };
  Kind kind;
  std::optional<ThresholdAtom> threshold;
  std::optional<ModAtom> mod;
  PredicatePtr left, right;  // Not uses left only

  static PredicatePtr atom(ThresholdAtom a) {
    a.validate();
    auto e = std::make_shared<PredicateExpr>();
    e->kind = Kind::Threshold;
    e->threshold = std::move(a);
    return e;
  }
  static PredicatePtr atom(ModAtom a) {
    auto e = std::make_shared<PredicateExpr>();
    e->kind = Kind::Mod;
    e->mod = std::move(a);
    return e;
  }
  static PredicatePtr make_and(PredicatePtr l, PredicatePtr r) {
    auto e = std::make_shared<PredicateExpr>();
    e->kind = Kind::And;
    e->left = std::move(l);
    e->right = std::move(r);
    return e;
  }
  static PredicatePtr make_or(PredicatePtr l, PredicatePtr r) {
    auto e = std::make_shared<PredicateExpr>();
    e->kind = Kind::Or;
    e->left = std::move(l);
    e->right = std::move(r);
    return e;
  }
  static PredicatePtr make_not(PredicatePtr c) {
    auto e = std::make_shared<PredicateExpr>();
    e->kind = Kind::Not;
    e->left = std::move(c);
    return e;
  }

  void collect_variables(std::set<std::string>& out) const {
    switch (kind) {
      case Kind::Threshold:
        for (auto& [v, k] : threshold->weights) out.insert(v);
        break;
      case Kind::Mod:
        for (auto& [v, k] : mod->weights) out.insert(v);
        break;
      case Kind::Not:
        left->collect_variables(out);
        break;
      default:
        left->collect_variables(out);
        right->collect_variables(out);
    }
  }
};

/// A predicate plus its declared variable list. The variable order is the
/// input-vector order everywhere downstream.
struct PredicateSpec {
  std::vector<std::string> variables;
  PredicatePtr expr;

  void validate() const {
    if (!expr) throw SpecError("empty predicate");
    std::set<std::string> declared(variables.begin(), variables.end());
    if (declared.size() != variables.size()) throw SpecError("duplicate variable declaration");
    std::set<std::string> used;
    expr->collect_variables(used);
    for (auto& v : used)
      if (!declared.count(v)) throw SpecError("undeclared variable: " + v);
  }
};

using Valuation = std::map<std::string, Count>;

inline Valuation valuation_of(const std::vector<std::string>& vars, const std::vector<Count>& x) {
  if (vars.size() != x.size()) throw SpecError("input vector arity mismatch");
  Valuation val;
  for (std::size_t i = 0; i < vars.size(); i++) {
    if (x[i] < 0) throw SpecError("negative input");
    val[vars[i]] = x[i];
  }
  return val;
}

namespace detail {
inline Count dot(const std::map<std::string, Coef>& w, const Valuation& x) {
  Count acc = 0;
  for (auto& [v, k] : w) {
    auto it = x.find(v);
    if (it == x.end()) throw SpecError("undeclared variable: " + v);
    acc += Count(k) * it->second;
  }
  return acc;
}
}  // namespace detail

inline bool eval_expr(const PredicateExpr& e, const Valuation& x) {
  using Kind = PredicateExpr::Kind;
  switch (e.kind) {
    case Kind::Threshold: {
      auto [w, c] = e.threshold->le_form();
      return detail::dot(w, x) <= c;
    }
    case Kind::Mod: {
      Count s = detail::dot(e.mod->weights, x);
      return s % e.mod->modulus == e.mod->residue;
    }
    case Kind::And:
      return eval_expr(*e.left, x) && eval_expr(*e.right, x);
    case Kind::Or:
      return eval_expr(*e.left, x) || eval_expr(*e.right, x);
    case Kind::Not:
      return !eval_expr(*e.left, x);
  }
  throw SpecError("corrupt predicate tree");
}

/// The oracle: truth value by direct arithmetic.
inline bool eval_predicate(const PredicateSpec& spec, const std::vector<Count>& x) {
  return eval_expr(*spec.expr, valuation_of(spec.variables, x));
}

/// One affine piece f(x) = b + (1/d) sum n_i (x_i - c_i), defined on a
/// semilinear domain. Variables missing from the maps have n_i = c_i = 0.
struct AffinePiece {
  PredicatePtr domain;
  Coef offset_b = 0;                       // b >= 0
  Coef divisor_d = 1;                      // d >= 1
  std::map<std::string, Coef> numerators;  // n_i = d * a_i
  std::map<std::string, Coef> offsets_c;   // c_i >= 0

  void validate() const {
    if (!domain) throw SpecError("affine piece without domain");
    if (offset_b < 0) throw SpecError("negative offset b");
    if (divisor_d < 1) throw SpecError("divisor d must be positive");
    for (auto& [v, c] : offsets_c)
      if (c < 0) throw SpecError("negative offset c for " + v);
  }

  Coef numerator(const std::string& v) const {
    auto it = numerators.find(v);
    return it == numerators.end() ? 0 : it->second;
  }
  Coef offset(const std::string& v) const {
    auto it = offsets_c.find(v);
    return it == offsets_c.end() ? 0 : it->second;
  }

  bool contains(const Valuation& x) const { return eval_expr(*domain, x); }

  /// Exact value; throws if the piece is invalid at x (x_i < c_i,
  /// non-integer, or negative result).
  Count value(const Valuation& x) const {
    Count num = Count(offset_b) * divisor_d;
    for (auto& [v, n] : numerators) {
      auto it = x.find(v);
      if (it == x.end()) throw SpecError("undeclared variable: " + v);
      Count shifted = it->second - offset(v);
      if (shifted < 0)
        throw SpecError("input below offset c for variable " + v + " inside claimed domain");
      num += Count(n) * shifted;
    }
    // variables with an offset but no numerator still require x_i >= c_i
    for (auto& [v, c] : offsets_c) {
      auto it = x.find(v);
      if (it != x.end() && it->second < c)
        throw SpecError("input below offset c for variable " + v + " inside claimed domain");
    }
    if (num % divisor_d != 0) throw SpecError("non-integer value inside claimed domain");
    Count val = num / divisor_d;
    if (val < 0) throw SpecError("negative value inside claimed domain");
    return val;
  }
};

struct PiecewiseFn {
  std::vector<std::string> variables;
  std::vector<AffinePiece> pieces;

  void validate() const {
    if (pieces.empty()) throw SpecError("function with no pieces");
    std::set<std::string> declared(variables.begin(), variables.end());
    if (declared.size() != variables.size()) throw SpecError("duplicate variable declaration");
    for (auto& p : pieces) {
      p.validate();
      std::set<std::string> used;
      p.domain->collect_variables(used);
      for (auto& [v, k] : p.numerators) used.insert(v);
      for (auto& [v, k] : p.offsets_c) used.insert(v);
      for (auto& v : used)
        if (!declared.count(v)) throw SpecError("undeclared variable: " + v);
    }
  }
};

class NoPiece : public SpecError {
 public:
  explicit NoPiece(const std::string& w) : SpecError(w) {}
};
class MultiplePieces : public SpecError {
 public:
  explicit MultiplePieces(const std::string& w) : SpecError(w) {}
};

/// Index of the unique piece containing x. Throws NoPiece / MultiplePieces.
inline std::size_t piece_index(const PiecewiseFn& f, const Valuation& x) {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < f.pieces.size(); i++) {
    if (f.pieces[i].contains(x)) {
      if (found) throw MultiplePieces("pieces " + std::to_string(*found) + " and " +
                                      std::to_string(i) + " both cover the input");
      found = i;
    }
  }
  if (!found) throw NoPiece("no piece covers the input");
  return *found;
}

inline bool defined_at(const PiecewiseFn& f, const std::vector<Count>& x) {
  Valuation val = valuation_of(f.variables, x);
  std::size_t n = 0;
  for (auto& p : f.pieces) n += p.contains(val) ? 1 : 0;
  return n == 1;
}

/// The oracle: exact value of the unique applicable piece.
inline Count eval_function(const PiecewiseFn& f, const std::vector<Count>& x) {
  Valuation val = valuation_of(f.variables, x);
  return f.pieces[piece_index(f, val)].value(val);
}

struct DisjointnessViolation {
  std::vector<Count> point;
  std::vector<std::size_t> covering_pieces;  // size != 1
  std::string detail;                        // set for value errors (non-integer etc.)
};

/// Enumerate {0..grid_bound}^d and report every point covered by a number
/// of pieces other than one, plus any point where the covering piece's
/// formula misbehaves. Empty result means the decomposition passes at this
/// bound.
inline std::vector<DisjointnessViolation> check_disjoint(const PiecewiseFn& f, Coef grid_bound) {
  if (grid_bound < 0) throw SpecError("negative grid bound");
  f.validate();
  std::vector<DisjointnessViolation> out;
  std::size_t d = f.variables.size();
  std::vector<Count> x(d, Count(0));
  while (true) {
    Valuation val = valuation_of(f.variables, x);
    std::vector<std::size_t> covering;
    for (std::size_t i = 0; i < f.pieces.size(); i++)
      if (f.pieces[i].contains(val)) covering.push_back(i);
    if (covering.size() != 1) {
      out.push_back({x, covering, covering.empty() ? "uncovered" : "overlap"});
    } else {
      try {
        (void)f.pieces[covering[0]].value(val);
      } catch (const SpecError& e) {
        out.push_back({x, covering, e.what()});
      }
    }
    // odometer increment
    std::size_t i = 0;
    for (; i < d; i++) {
      if (x[i] < grid_bound) {
        x[i] += 1;
        for (std::size_t j = 0; j < i; j++) x[j] = 0;
        break;
      }
    }
    if (i == d) break;
    if (d == 0) break;
  }
  return out;
}

}  // namespace ebc
