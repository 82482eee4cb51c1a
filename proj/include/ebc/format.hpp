#pragma once

// Text formats:
//
//   .crn — reaction network documents.
//       # comment
//       species: X L0 L1
//       input: X
//       context: L0            (items "k S", comma separated, k default 1)
//       yes: L1
//       no: L0
//       rxn: X + L0 -> L1
//       rxn: 2 X -> 0          ('0' denotes the empty side)
//
//     A document with yes:/no: lines is a decider, one with output: is a
//     computer ("output: Y" or diff form "output: Y^P - Y^C"); plain
//     networks have neither. Printing is canonical and parse(print(x))
//     reproduces x exactly, including species order.
//
//   .spec — s-expression predicate / function descriptions.
//       (pred (vars X1 X2) (ge ((1 X1) (-1 X2)) 0))
//       (fn (vars X) (piece (domain (ge ((1 X)) 0)) (b 0) (d 2)
//                           (n ((1 X))) (c ((0 X)))) ...)
//     expr := (le PAIRS k) | (ge PAIRS k) | (mod PAIRS c m)
//           | (and e e) | (or e e) | (not e),  PAIRS := ((w var)...)
//     A bare expr is also accepted; variables then default to the ones
//     mentioned, sorted.
//
// Species identifiers: [A-Za-z][A-Za-z0-9_'^.]* — the dot admits the
// compiler's namespaced species.

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ebc/crn.hpp"
#include "ebc/semilinear.hpp"

namespace ebc {

class ParseError : public std::runtime_error {
 public:
  int line, column;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " +
                           msg),
        line(l),
        column(c) {}
};

struct CrnDocument {
  enum class Kind { Plain, Decider, Computer };
  Kind kind = Kind::Plain;
  Crd crd;  // valid when Decider
  Crc crc;  // valid when Computer
  Crn crn;  // valid when Plain

  const Crn& network() const {
    switch (kind) {
      case Kind::Decider:
        return crd.crn;
      case Kind::Computer:
        return crc.crn;
      default:
        return crn;
    }
  }
};

struct SpecDocument {
  std::optional<PredicateSpec> predicate;
  std::optional<PiecewiseFn> function;
};

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
inline bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '^' ||
         c == '.';
}

class LineScanner {
 public:
  LineScanner(const std::string& s, int line) : s_(s), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) pos_++;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    pos_++;
  }
  bool accept(char c) {
    if (peek() == c) {
      pos_++;
      return true;
    }
    return false;
  }
  bool accept_arrow() {
    skip_ws();
    if (pos_ + 1 < s_.size() && s_[pos_] == '-' && s_[pos_ + 1] == '>') {
      pos_ += 2;
      return true;
    }
    return false;
  }
  std::optional<long long> number() {
    skip_ws();
    std::size_t p = pos_;
    bool neg = p < s_.size() && s_[p] == '-';
    if (neg) p++;
    if (p >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[p]))) return std::nullopt;
    long long v = 0;
    while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
      v = v * 10 + (s_[p] - '0');
      p++;
    }
    pos_ = p;
    return neg ? -v : v;
  }
  std::optional<std::string> identifier() {
    skip_ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) return std::nullopt;
    std::size_t p = pos_;
    while (p < s_.size() && ident_cont(s_[p])) p++;
    std::string id = s_.substr(pos_, p - pos_);
    pos_ = p;
    return id;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(line_, static_cast<int>(pos_) + 1, msg);
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_;
};

}  // namespace detail

inline CrnDocument parse_crn(const std::string& text) {
  struct RawReaction {
    std::vector<std::pair<std::string, Coef>> reactants, products;
    int line;
  };
  std::vector<std::string> species_decl;
  std::vector<std::string> inputs;
  std::vector<std::pair<std::string, Count>> context;
  std::vector<std::string> yes, no;
  std::optional<std::string> out_pos, out_neg;
  std::vector<RawReaction> raw;
  bool has_voters = false, has_output = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    detail::LineScanner sc(line, lineno);
    if (sc.at_end()) continue;
    auto word = sc.identifier();
    if (!word) sc.fail("expected a directive");
    if (!sc.accept(':')) sc.fail("expected ':' after directive '" + *word + "'");

    auto name_list = [&](std::vector<std::string>& out) {
      while (!sc.at_end()) {
        auto id = sc.identifier();
        if (!id) sc.fail("expected a species name");
        out.push_back(*id);
        sc.accept(',');
      }
    };

    if (*word == "species") {
      name_list(species_decl);
    } else if (*word == "input") {
      name_list(inputs);
    } else if (*word == "yes") {
      has_voters = true;
      name_list(yes);
    } else if (*word == "no") {
      has_voters = true;
      name_list(no);
    } else if (*word == "output") {
      has_output = true;
      auto id = sc.identifier();
      if (!id) sc.fail("expected output species");
      out_pos = *id;
      if (sc.accept('-')) {
        auto id2 = sc.identifier();
        if (!id2) sc.fail("expected negative output species after '-'");
        out_neg = *id2;
      }
      if (!sc.at_end()) sc.fail("trailing text after output directive");
    } else if (*word == "context") {
      while (!sc.at_end()) {
        long long k = sc.number().value_or(1);
        if (k < 0) sc.fail("negative context count");
        auto id = sc.identifier();
        if (!id) sc.fail("expected a species name in context");
        context.emplace_back(*id, Count(k));
        sc.accept(',');
      }
    } else if (*word == "rxn") {
      RawReaction r;
      r.line = lineno;
      auto side = [&](std::vector<std::pair<std::string, Coef>>& items) {
        // '0' alone denotes the empty multiset
        if (sc.peek() == '0') {
          sc.expect('0');
          return;
        }
        while (true) {
          long long k = sc.number().value_or(1);
          if (k <= 0) sc.fail("stoichiometric coefficients must be positive");
          auto id = sc.identifier();
          if (!id) sc.fail("expected a species name");
          items.emplace_back(*id, k);
          if (!sc.accept('+')) break;
        }
      };
      side(r.reactants);
      if (!sc.accept_arrow()) sc.fail("expected '->'");
      side(r.products);
      if (!sc.at_end()) sc.fail("trailing text after reaction");
      if (r.reactants.empty() && r.products.empty()) sc.fail("empty reaction");
      raw.push_back(std::move(r));
    } else {
      sc.fail("unknown directive '" + *word + "'");
    }
  }

  if (has_voters && has_output)
    throw ParseError(lineno, 1, "document declares both voters and an output species");

  Crn crn;
  {
    std::set<std::string> seen;
    for (auto& s : species_decl) {
      if (!seen.insert(s).second) throw ParseError(1, 1, "duplicate species '" + s + "'");
      crn.add_species(s);
    }
  }
  auto touch = [&](const std::string& s) { return crn.add_species(s); };
  for (auto& s : inputs) touch(s);
  for (auto& [s, k] : context) touch(s);
  for (auto& s : yes) touch(s);
  for (auto& s : no) touch(s);
  if (out_pos) touch(*out_pos);
  if (out_neg) touch(*out_neg);
  for (auto& r : raw) {
    for (auto& [s, k] : r.reactants) touch(s);
    for (auto& [s, k] : r.products) touch(s);
  }
  for (auto& r : raw) {
    Multiset rr, pp;
    for (auto& [s, k] : r.reactants) rr[crn.species_or_throw(s)] += k;
    for (auto& [s, k] : r.products) pp[crn.species_or_throw(s)] += k;
    try {
      crn.add_reaction(Reaction(std::move(rr), std::move(pp)));
    } catch (const CrnError& e) {
      throw ParseError(r.line, 1, e.what());
    }
  }

  CrnDocument doc;
  auto build_context = [&]() {
    Configuration c(crn.species_count());
    for (auto& [s, k] : context) c.counts[crn.species_or_throw(s)] += k;
    return c;
  };
  if (has_voters) {
    doc.kind = CrnDocument::Kind::Decider;
    doc.crd.crn = crn;
    for (auto& s : inputs) doc.crd.inputs.push_back(crn.species_or_throw(s));
    for (auto& s : yes) doc.crd.yes_voters.insert(crn.species_or_throw(s));
    for (auto& s : no) doc.crd.no_voters.insert(crn.species_or_throw(s));
    doc.crd.context = build_context();
    doc.crd.validate();
  } else if (has_output) {
    doc.kind = CrnDocument::Kind::Computer;
    doc.crc.crn = crn;
    for (auto& s : inputs) doc.crc.inputs.push_back(crn.species_or_throw(s));
    doc.crc.output = crn.species_or_throw(*out_pos);
    if (out_neg) doc.crc.output_neg = crn.species_or_throw(*out_neg);
    doc.crc.context = build_context();
    doc.crc.validate();
  } else {
    doc.kind = CrnDocument::Kind::Plain;
    doc.crn = crn;
    if (!inputs.empty() || !context.empty())
      throw ParseError(1, 1, "input/context directives require voters or an output");
  }
  return doc;
}

namespace detail {

inline std::string print_side(const Crn& crn, const Multiset& m) {
  if (m.empty()) return "0";
  std::string s;
  bool first = true;
  for (auto& [sp, k] : m) {
    if (!first) s += " + ";
    first = false;
    if (k != 1) s += std::to_string(k) + " ";
    s += crn.name(sp);
  }
  return s;
}

inline void print_network_body(std::string& out, const Crn& crn) {
  out += "species:";
  for (auto& n : crn.species_names()) out += " " + n;
  out += "\n";
}

inline void print_reactions(std::string& out, const Crn& crn) {
  for (const Reaction& r : crn.reactions())
    out += "rxn: " + print_side(crn, r.reactants) + " -> " + print_side(crn, r.products) + "\n";
}

inline void print_context(std::string& out, const Crn& crn, const Configuration& ctx) {
  std::string items;
  for (int s = 0; s < crn.species_count(); s++) {
    if (ctx.counts[s] == 0) continue;
    if (!items.empty()) items += ", ";
    if (ctx.counts[s] != 1) items += ctx.counts[s].str() + " ";
    items += crn.name(s);
  }
  if (!items.empty()) out += "context: " + items + "\n";
}

}  // namespace detail

inline std::string print_crn(const Crn& crn) {
  std::string out;
  detail::print_network_body(out, crn);
  detail::print_reactions(out, crn);
  return out;
}

inline std::string print_crn(const Crd& crd) {
  std::string out;
  detail::print_network_body(out, crd.crn);
  if (!crd.inputs.empty()) {
    out += "input:";
    for (SpeciesId s : crd.inputs) out += " " + crd.crn.name(s);
    out += "\n";
  }
  detail::print_context(out, crd.crn, crd.context);
  out += "yes:";
  for (SpeciesId s : crd.yes_voters) out += " " + crd.crn.name(s);
  out += "\n";
  out += "no:";
  for (SpeciesId s : crd.no_voters) out += " " + crd.crn.name(s);
  out += "\n";
  detail::print_reactions(out, crd.crn);
  return out;
}

inline std::string print_crn(const Crc& crc) {
  std::string out;
  detail::print_network_body(out, crc.crn);
  if (!crc.inputs.empty()) {
    out += "input:";
    for (SpeciesId s : crc.inputs) out += " " + crc.crn.name(s);
    out += "\n";
  }
  detail::print_context(out, crc.crn, crc.context);
  out += "output: " + crc.crn.name(crc.output);
  if (crc.output_neg >= 0) out += " - " + crc.crn.name(crc.output_neg);
  out += "\n";
  detail::print_reactions(out, crc.crn);
  return out;
}

inline std::string print_crn(const CrnDocument& doc) {
  switch (doc.kind) {
    case CrnDocument::Kind::Decider:
      return print_crn(doc.crd);
    case CrnDocument::Kind::Computer:
      return print_crn(doc.crc);
    default:
      return print_crn(doc.crn);
  }
}

// ---------------------------------------------------------------------------
// s-expression spec format

namespace detail {

struct Sexp {
  // atom when children empty and text set; list otherwise
  std::string text;
  std::vector<Sexp> children;
  bool is_list = false;
  int line = 1, col = 1;

  bool atom() const { return !is_list; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }
};

class SexpParser {
 public:
  explicit SexpParser(const std::string& s) : s_(s) {}

  Sexp parse_one() {
    Sexp e = parse();
    skip();
    if (pos_ < s_.size()) throw ParseError(line_, col(), "trailing text after expression");
    return e;
  }

 private:
  Sexp parse() {
    skip();
    if (pos_ >= s_.size()) throw ParseError(line_, col(), "unexpected end of input");
    Sexp e;
    e.line = line_;
    e.col = col();
    if (s_[pos_] == '(') {
      advance();
      e.is_list = true;
      while (true) {
        skip();
        if (pos_ >= s_.size()) throw ParseError(line_, col(), "unclosed '('");
        if (s_[pos_] == ')') {
          advance();
          break;
        }
        e.children.push_back(parse());
      }
    } else {
      std::size_t p = pos_;
      while (p < s_.size() && !std::isspace(static_cast<unsigned char>(s_[p])) && s_[p] != '(' &&
             s_[p] != ')')
        p++;
      e.text = s_.substr(pos_, p - pos_);
      while (pos_ < p) advance();
    }
    return e;
  }

  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (s_[pos_] == '\n') {
      line_++;
      linestart_ = pos_ + 1;
    }
    pos_++;
  }
  int col() const { return static_cast<int>(pos_ - linestart_) + 1; }

  const std::string& s_;
  std::size_t pos_ = 0, linestart_ = 0;
  int line_ = 1;
};

inline long long sexp_int(const Sexp& e) {
  if (!e.atom()) e.fail("expected an integer");
  try {
    std::size_t used = 0;
    long long v = std::stoll(e.text, &used);
    if (used != e.text.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    e.fail("expected an integer, got '" + e.text + "'");
  }
}

inline std::map<std::string, Coef> sexp_pairs(const Sexp& e) {
  if (!e.is_list) e.fail("expected a list of (weight var) pairs");
  std::map<std::string, Coef> w;
  for (const Sexp& p : e.children) {
    if (!p.is_list || p.children.size() != 2 || !p.children[1].atom())
      p.fail("expected a (weight var) pair");
    w[p.children[1].text] += sexp_int(p.children[0]);
  }
  return w;
}

inline PredicatePtr sexp_expr(const Sexp& e) {
  if (!e.is_list || e.children.empty() || !e.children[0].atom())
    e.fail("expected a predicate expression");
  const std::string& head = e.children[0].text;
  auto arity = [&](std::size_t n) {
    if (e.children.size() != n + 1)
      e.fail("'" + head + "' takes " + std::to_string(n) + " argument(s)");
  };
  try {
    if (head == "le" || head == "ge") {
      arity(2);
      ThresholdAtom a;
      a.weights = sexp_pairs(e.children[1]);
      a.bound = sexp_int(e.children[2]);
      a.sense = head == "le" ? ThresholdSense::Le : ThresholdSense::Ge;
      return PredicateExpr::atom(a);
    }
    if (head == "mod") {
      arity(3);
      return PredicateExpr::atom(
          ModAtom::make(sexp_pairs(e.children[1]), sexp_int(e.children[2]),
                        sexp_int(e.children[3])));
    }
    if (head == "and") {
      arity(2);
      return PredicateExpr::make_and(sexp_expr(e.children[1]), sexp_expr(e.children[2]));
    }
    if (head == "or") {
      arity(2);
      return PredicateExpr::make_or(sexp_expr(e.children[1]), sexp_expr(e.children[2]));
    }
    if (head == "not") {
      arity(1);
      return PredicateExpr::make_not(sexp_expr(e.children[1]));
    }
  } catch (const SpecError& err) {
    e.fail(err.what());
  }
  e.fail("unknown operator '" + head + "'");
}

inline std::vector<std::string> sexp_vars(const Sexp& e) {
  if (!e.is_list || e.children.empty() || !e.children[0].atom() || e.children[0].text != "vars")
    e.fail("expected a (vars ...) declaration");
  std::vector<std::string> vars;
  for (std::size_t i = 1; i < e.children.size(); i++) {
    if (!e.children[i].atom()) e.children[i].fail("expected a variable name");
    vars.push_back(e.children[i].text);
  }
  return vars;
}

inline AffinePiece sexp_piece(const Sexp& e) {
  if (!e.is_list || e.children.empty() || !e.children[0].atom() || e.children[0].text != "piece")
    e.fail("expected a (piece ...) form");
  AffinePiece p;
  for (std::size_t i = 1; i < e.children.size(); i++) {
    const Sexp& f = e.children[i];
    if (!f.is_list || f.children.empty() || !f.children[0].atom())
      f.fail("expected a piece field");
    const std::string& key = f.children[0].text;
    if (key == "domain" && f.children.size() == 2) {
      p.domain = sexp_expr(f.children[1]);
    } else if (key == "b" && f.children.size() == 2) {
      p.offset_b = sexp_int(f.children[1]);
    } else if (key == "d" && f.children.size() == 2) {
      p.divisor_d = sexp_int(f.children[1]);
    } else if (key == "n" && f.children.size() == 2) {
      p.numerators = sexp_pairs(f.children[1]);
    } else if (key == "c" && f.children.size() == 2) {
      p.offsets_c = sexp_pairs(f.children[1]);
    } else {
      f.fail("unknown piece field '" + key + "'");
    }
  }
  try {
    p.validate();
  } catch (const SpecError& err) {
    e.fail(err.what());
  }
  return p;
}

}  // namespace detail

inline SpecDocument parse_spec(const std::string& text) {
  detail::Sexp root = detail::SexpParser(text).parse_one();
  SpecDocument doc;
  if (root.is_list && !root.children.empty() && root.children[0].atom() &&
      root.children[0].text == "pred") {
    if (root.children.size() != 3) root.fail("expected (pred (vars ...) expr)");
    PredicateSpec spec;
    spec.variables = detail::sexp_vars(root.children[1]);
    spec.expr = detail::sexp_expr(root.children[2]);
    try {
      spec.validate();
    } catch (const SpecError& err) {
      root.fail(err.what());
    }
    doc.predicate = std::move(spec);
  } else if (root.is_list && !root.children.empty() && root.children[0].atom() &&
             root.children[0].text == "fn") {
    if (root.children.size() < 3) root.fail("expected (fn (vars ...) piece...)");
    PiecewiseFn fn;
    fn.variables = detail::sexp_vars(root.children[1]);
    for (std::size_t i = 2; i < root.children.size(); i++)
      fn.pieces.push_back(detail::sexp_piece(root.children[i]));
    try {
      fn.validate();
    } catch (const SpecError& err) {
      root.fail(err.what());
    }
    doc.function = std::move(fn);
  } else {
    // bare expression: variables default to the mentioned ones, sorted
    PredicateSpec spec;
    spec.expr = detail::sexp_expr(root);
    std::set<std::string> used;
    spec.expr->collect_variables(used);
    spec.variables.assign(used.begin(), used.end());
    doc.predicate = std::move(spec);
  }
  return doc;
}

/// Parses "3 X1, 5 X2" style count lists (counts default to 1).
inline std::map<std::string, Count> parse_count_list(const std::string& text) {
  detail::LineScanner sc(text, 1);
  std::map<std::string, Count> out;
  while (!sc.at_end()) {
    long long k = sc.number().value_or(1);
    if (k < 0) sc.fail("negative count");
    auto id = sc.identifier();
    if (!id) sc.fail("expected a species name");
    out[*id] += k;
    sc.accept(',');
  }
  return out;
}

}  // namespace ebc
