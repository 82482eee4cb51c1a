#pragma once

// Compilation of predicate expressions and piecewise-affine functions into
// execution-bounded deciders and computers.
//
// All constructions are deterministic: species declaration order, reaction
// order and the dotted namespace prefixes depend only on the input
// expression tree, so compiled artifacts are reproducible and diffable.

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ebc/crn.hpp"
#include "ebc/semilinear.hpp"

namespace ebc {

enum class VoterKind { SingleVoting, AllVoting };
enum class CrcMode { DiffRepresentation, SingleOutput };

struct CompiledCrd {
  Crd crd;
  VoterKind voter_kind = VoterKind::SingleVoting;
  std::string ns;  // prefix applied to internal species when embedded
};

struct CompiledCrc {
  Crc crc;
  CrcMode mode = CrcMode::DiffRepresentation;
};

namespace detail {

/// Vote of the single voter present in the initial context.
inline bool initial_vote(const Crd& crd) {
  Count voters = 0;
  bool yes = false;
  for (SpeciesId s : crd.yes_voters)
    if (crd.context.counts.at(s) > 0) {
      voters += crd.context.counts.at(s);
      yes = true;
    }
  for (SpeciesId s : crd.no_voters)
    if (crd.context.counts.at(s) > 0) voters += crd.context.counts.at(s);
  if (voters != 1) throw CrnError("context does not hold exactly one voter");
  return yes;
}

/// Copies a sub-CRD's species and reactions into `parent` under a name
/// prefix; returns the id mapping. Context merging is the caller's job.
inline std::vector<SpeciesId> embed(Crn& parent, const Crn& sub, const std::string& prefix) {
  std::vector<SpeciesId> map(sub.species_count());
  for (int s = 0; s < sub.species_count(); s++) map[s] = parent.add_species(prefix + sub.name(s));
  for (const Reaction& r : sub.reactions()) {
    Multiset rr, pp;
    for (auto& [s, c] : r.reactants) rr.emplace(map[s], c);
    for (auto& [s, c] : r.products) pp.emplace(map[s], c);
    parent.add_reaction(Reaction(std::move(rr), std::move(pp)));
  }
  return map;
}

inline Coef weight_of(const std::map<std::string, Coef>& w, const std::string& v) {
  auto it = w.find(v);
  return it == w.end() ? 0 : it->second;
}

}  // namespace detail

/// Mod-counting decider: a single leader cycles through the m residue
/// states while consuming the input. Variables absent from the atom (or
/// with weight divisible by m) get a plain sink reaction so the input is
/// still fully consumed.
inline CompiledCrd compile_mod(const ModAtom& atom, const std::vector<std::string>& variables) {
  CompiledCrd out;
  Crn& crn = out.crd.crn;
  std::vector<SpeciesId> xs;
  for (auto& v : variables) xs.push_back(crn.add_species(v));
  std::vector<SpeciesId> leaders;
  for (Coef j = 0; j < atom.modulus; j++)
    leaders.push_back(crn.add_species("L" + std::to_string(j)));
  for (std::size_t i = 0; i < variables.size(); i++) {
    Coef w = detail::weight_of(atom.weights, variables[i]);  // already reduced mod m
    if (w == 0) {
      crn.add_reaction(Reaction({{xs[i], 1}}, {}));
      continue;
    }
    for (Coef j = 0; j < atom.modulus; j++)
      crn.add_reaction(
          Reaction({{xs[i], 1}, {leaders[j], 1}}, {{leaders[(j + w) % atom.modulus], 1}}));
  }
  out.crd.inputs = xs;
  for (Coef j = 0; j < atom.modulus; j++)
    (j == atom.residue ? out.crd.yes_voters : out.crd.no_voters).insert(leaders[j]);
  out.crd.context = Configuration(crn.species_count());
  out.crd.context.counts[leaders[0]] = 1;
  out.crd.validate();
  return out;
}

inline CompiledCrd compile_mod(const ModAtom& atom) {
  std::vector<std::string> vars;
  for (auto& [v, w] : atom.weights) vars.push_back(v);
  return compile_mod(atom, vars);
}

/// Threshold decider for w.x >= t (the atom is normalized to >=-form).
/// Inputs convert to positive/negative unit species; a single leader
/// consumes them alternatingly, so its final state reports #P >= #N.
/// The threshold itself enters as initial units: t copies of N when
/// t > 0, -t copies of P when t < 0.
inline CompiledCrd compile_threshold(const ThresholdAtom& atom,
                                     const std::vector<std::string>& variables) {
  auto [w, t] = atom.ge_form();
  CompiledCrd out;
  Crn& crn = out.crd.crn;
  std::vector<SpeciesId> xs;
  for (auto& v : variables) xs.push_back(crn.add_species(v));
  SpeciesId P = crn.add_species("P");
  SpeciesId N = crn.add_species("N");
  SpeciesId LY = crn.add_species("L_Y");
  SpeciesId LN = crn.add_species("L_N");
  for (std::size_t i = 0; i < variables.size(); i++) {
    Coef wi = detail::weight_of(w, variables[i]);
    if (wi > 0)
      crn.add_reaction(Reaction({{xs[i], 1}}, {{P, wi}}));
    else if (wi < 0)
      crn.add_reaction(Reaction({{xs[i], 1}}, {{N, -wi}}));
    else
      crn.add_reaction(Reaction({{xs[i], 1}}, {}));
  }
  crn.add_reaction(Reaction({{LY, 1}, {N, 1}}, {{LN, 1}}));
  crn.add_reaction(Reaction({{LN, 1}, {P, 1}}, {{LY, 1}}));
  out.crd.inputs = xs;
  out.crd.yes_voters = {LY};
  out.crd.no_voters = {LN};
  out.crd.context = Configuration(crn.species_count());
  out.crd.context.counts[LY] = 1;
  if (t > 0) out.crd.context.counts[N] = t;
  if (t < 0) out.crd.context.counts[P] = -t;
  out.crd.validate();
  return out;
}

inline CompiledCrd compile_threshold(const ThresholdAtom& atom) {
  std::vector<std::string> vars;
  for (auto& [v, k] : atom.weights) vars.push_back(v);
  return compile_threshold(atom, vars);
}

namespace detail {

inline CompiledCrd compile_expr(const PredicateExpr& e, const std::vector<std::string>& variables);

/// Binary and/or combinator: split each input molecule into one copy per
/// sub-decider, run both in their own namespaces, and track the pair of
/// votes in a four-state recorder catalyzed by the sub-deciders' voters.
inline CompiledCrd combine(const PredicateExpr& e, const std::vector<std::string>& variables) {
  CompiledCrd left = compile_expr(*e.left, variables);
  CompiledCrd right = compile_expr(*e.right, variables);
  bool is_or = e.kind == PredicateExpr::Kind::Or;

  CompiledCrd out;
  Crn& crn = out.crd.crn;
  std::vector<SpeciesId> xs;
  for (auto& v : variables) xs.push_back(crn.add_species(v));
  // recorder V_{b1 b2}: b1 = left vote, b2 = right vote
  SpeciesId V[2][2];
  V[0][0] = crn.add_species("V_NN");
  V[0][1] = crn.add_species("V_NY");
  V[1][0] = crn.add_species("V_YN");
  V[1][1] = crn.add_species("V_YY");
  std::vector<SpeciesId> lmap = embed(crn, left.crd.crn, "L.");
  std::vector<SpeciesId> rmap = embed(crn, right.crd.crn, "R.");

  for (std::size_t i = 0; i < variables.size(); i++)
    crn.add_reaction(
        Reaction({{xs[i], 1}}, {{lmap[left.crd.inputs[i]], 1}, {rmap[right.crd.inputs[i]], 1}}));

  auto record = [&](SpeciesId voter, bool left_side, bool vote) {
    // the voter flips its own coordinate of the recorder, both values of
    // the other coordinate
    for (int other = 0; other < 2; other++) {
      SpeciesId from = left_side ? V[!vote][other] : V[other][!vote];
      SpeciesId to = left_side ? V[vote][other] : V[other][vote];
      crn.add_reaction(Reaction({{voter, 1}, {from, 1}}, {{voter, 1}, {to, 1}}));
    }
  };
  for (SpeciesId s : left.crd.yes_voters) record(lmap[s], true, true);
  for (SpeciesId s : left.crd.no_voters) record(lmap[s], true, false);
  for (SpeciesId s : right.crd.yes_voters) record(rmap[s], false, true);
  for (SpeciesId s : right.crd.no_voters) record(rmap[s], false, false);

  out.crd.inputs = xs;
  for (int a = 0; a < 2; a++)
    for (int b = 0; b < 2; b++) {
      bool yes = is_or ? (a || b) : (a && b);
      (yes ? out.crd.yes_voters : out.crd.no_voters).insert(V[a][b]);
    }

  out.crd.context = Configuration(crn.species_count());
  for (int s = 0; s < left.crd.crn.species_count(); s++)
    out.crd.context.counts[lmap[s]] += left.crd.context.counts[s];
  for (int s = 0; s < right.crd.crn.species_count(); s++)
    out.crd.context.counts[rmap[s]] += right.crd.context.counts[s];
  // the recorder must agree with the sub-leaders before any reaction fires
  bool b1 = initial_vote(left.crd);
  bool b2 = initial_vote(right.crd);
  out.crd.context.counts[V[b1][b2]] = 1;
  out.crd.validate();
  return out;
}

inline CompiledCrd compile_expr(const PredicateExpr& e, const std::vector<std::string>& variables) {
  using Kind = PredicateExpr::Kind;
  switch (e.kind) {
    case Kind::Threshold:
      return compile_threshold(*e.threshold, variables);
    case Kind::Mod:
      return compile_mod(*e.mod, variables);
    case Kind::Not: {
      CompiledCrd c = compile_expr(*e.left, variables);
      std::swap(c.crd.yes_voters, c.crd.no_voters);
      return c;
    }
    case Kind::And:
    case Kind::Or:
      return combine(e, variables);
  }
  throw CrnError("unreachable");
}

}  // namespace detail

inline CompiledCrd compile_predicate(const PredicateSpec& spec) {
  spec.validate();
  return detail::compile_expr(*spec.expr, spec.variables);
}

/// Converts a single-voting decider so every species carries a vote. Each
/// non-voter S is split into opinionated copies S^0/S^1; the unique voter
/// propagates its vote, and every original reaction is replaced by one
/// variant per reactant-opinion combination. When all reactant opinions
/// agree the products inherit that opinion; on disagreement products fall
/// back to opinion 0.
inline CompiledCrd make_all_voting(const CompiledCrd& in) {
  if (in.voter_kind != VoterKind::SingleVoting)
    throw CrnError("make_all_voting expects a single-voting decider");
  const Crd& src = in.crd;
  CompiledCrd out;
  out.voter_kind = VoterKind::AllVoting;
  out.ns = in.ns;
  Crn& crn = out.crd.crn;

  const int n = src.crn.species_count();
  // variant[s][b] = id of S^b; voters map to themselves in both slots
  std::vector<std::array<SpeciesId, 2>> variant(n);
  auto vote_of = [&](SpeciesId s) {
    return src.yes_voters.count(s) ? 1 : 0;  // only meaningful for voters
  };
  for (SpeciesId s = 0; s < n; s++) {
    if (src.is_voter(s)) {
      SpeciesId id = crn.add_species(src.crn.name(s));
      variant[s] = {id, id};
    } else {
      variant[s] = {crn.add_species(src.crn.name(s) + "^0"),
                    crn.add_species(src.crn.name(s) + "^1")};
    }
  }

  std::set<std::pair<Multiset, Multiset>> seen;
  auto emit = [&](Multiset r, Multiset p) {
    if (r == p) return;  // variant collapsed to a no-op
    if (!seen.insert({r, p}).second) return;
    crn.add_reaction(Reaction(std::move(r), std::move(p)));
  };

  for (const Reaction& rxn : src.crn.reactions()) {
    // one opinion slot per reactant molecule (not per species): mixed
    // opinions within a species are a real disagreement
    std::vector<SpeciesId> slots;
    for (auto& [s, c] : rxn.reactants)
      for (Coef k = 0; k < c; k++) slots.push_back(s);
    std::vector<int> opinion(slots.size(), 0);
    while (true) {
      bool all1 = true, all0 = true;
      Multiset r;
      for (std::size_t i = 0; i < slots.size(); i++) {
        int b = src.is_voter(slots[i]) ? vote_of(slots[i]) : opinion[i];
        (b ? all0 : all1) = false;
        r[variant[slots[i]][src.is_voter(slots[i]) ? 0 : opinion[i]]]++;
      }
      int pb = all1 ? 1 : 0;  // unanimous 1 keeps 1; anything else yields 0
      if (slots.empty()) pb = 0;
      Multiset p;
      for (auto& [s, c] : rxn.products) p[variant[s][src.is_voter(s) ? 0 : pb]] += c;
      emit(std::move(r), std::move(p));
      // next opinion assignment, skipping slots pinned by voters
      std::size_t i = 0;
      for (; i < slots.size(); i++) {
        if (src.is_voter(slots[i])) continue;
        if (opinion[i] == 0) {
          opinion[i] = 1;
          for (std::size_t j = 0; j < i; j++) opinion[j] = 0;
          break;
        }
      }
      if (i == slots.size()) break;
    }
  }

  // vote propagation
  for (SpeciesId v = 0; v < n; v++) {
    if (!src.is_voter(v)) continue;
    int b = vote_of(v);
    for (SpeciesId s = 0; s < n; s++) {
      if (src.is_voter(s)) continue;
      crn.add_reaction(Reaction({{variant[v][0], 1}, {variant[s][!b], 1}},
                                {{variant[v][0], 1}, {variant[s][b], 1}}));
    }
  }

  int b0 = detail::initial_vote(src);
  for (SpeciesId s : src.inputs) out.crd.inputs.push_back(variant[s][b0]);
  out.crd.context = Configuration(crn.species_count());
  for (SpeciesId s = 0; s < n; s++)
    out.crd.context.counts[variant[s][src.is_voter(s) ? 0 : b0]] += src.context.counts[s];
  for (SpeciesId s = 0; s < n; s++) {
    bool yes = src.yes_voters.count(s);
    bool no = src.no_voters.count(s);
    if (yes) {
      out.crd.yes_voters.insert(variant[s][0]);
    } else if (no) {
      out.crd.no_voters.insert(variant[s][0]);
    } else {
      out.crd.no_voters.insert(variant[s][0]);
      out.crd.yes_voters.insert(variant[s][1]);
    }
  }
  out.crd.validate();
  return out;
}

/// Diff-representation computer for one affine piece
/// f(x) = b + sum_i n_i (x_i - c_i) / d (the domain is ignored here; it
/// matters only when pieces are combined). Subtraction ladder, then
/// multiplication into d-th units, then division by subscript accumulation.
inline CompiledCrc compile_affine(const AffinePiece& piece,
                                  const std::vector<std::string>& variables) {
  piece.validate();
  CompiledCrc out;
  out.mode = CrcMode::DiffRepresentation;
  Crc& crc = out.crc;
  Crn& net = crc.crn;
  const Coef d = piece.divisor_d;

  struct PerVar {
    SpeciesId input;                // X_{i,1}
    std::vector<SpeciesId> ladder;  // X_{i,2}..X_{i,c_i} (index m-2)
    SpeciesId prime;                // X_i'
  };
  std::vector<PerVar> pv;
  for (auto& v : variables) {
    PerVar p;
    p.input = net.add_species(v);
    Coef c = piece.offset(v);
    for (Coef m = 2; m <= c; m++) p.ladder.push_back(net.add_species(v + "_" + std::to_string(m)));
    p.prime = net.add_species(v + "'");
    pv.push_back(p);
  }
  SpeciesId YP = net.add_species("Y^P");
  SpeciesId YC = net.add_species("Y^C");
  std::vector<SpeciesId> DP, DC;  // D_1..D_{d-1}, created lazily below
  bool need_pos = false, need_neg = false;
  for (auto& v : variables) {
    Coef ni = piece.numerator(v);
    need_pos = need_pos || ni > 0;
    need_neg = need_neg || ni < 0;
  }
  if (d > 1) {
    for (Coef m = 1; m <= d - 1; m++) {
      if (need_pos) DP.push_back(net.add_species("D_" + std::to_string(m) + "^P"));
      if (need_neg) DC.push_back(net.add_species("D_" + std::to_string(m) + "^C"));
    }
  }

  auto x_at = [&](const PerVar& p, Coef m) {  // species X_{i,m}
    return m == 1 ? p.input : p.ladder[m - 2];
  };

  for (std::size_t i = 0; i < variables.size(); i++) {
    const PerVar& p = pv[i];
    Coef c = piece.offset(variables[i]);
    if (c == 0) {
      net.add_reaction(Reaction({{p.input, 1}}, {{p.prime, 1}}));
    } else {
      for (Coef m = 1; m <= c; m++) {
        for (Coef q = m; q <= c; q++) {  // unordered pairs {m, q}
          Multiset r;
          r[x_at(p, m)] += 1;
          r[x_at(p, q)] += 1;
          if (m + q <= c) {
            net.add_reaction(Reaction(std::move(r), {{x_at(p, m + q), 1}}));
          } else {
            Multiset prod{{x_at(p, c), 1}};
            prod[p.prime] += m + q - c;
            net.add_reaction(Reaction(std::move(r), std::move(prod)));
          }
        }
      }
    }
    Coef ni = piece.numerator(variables[i]);
    if (ni == 0) {
      net.add_reaction(Reaction({{p.prime, 1}}, {}));
    } else if (d == 1) {
      net.add_reaction(
          Reaction({{p.prime, 1}}, {{ni > 0 ? YP : YC, ni > 0 ? ni : -ni}}));
    } else {
      net.add_reaction(
          Reaction({{p.prime, 1}}, {{ni > 0 ? DP[0] : DC[0], ni > 0 ? ni : -ni}}));
    }
  }

  if (d > 1) {
    auto division = [&](const std::vector<SpeciesId>& D, SpeciesId Y) {
      if (D.empty()) return;
      for (Coef m = 1; m <= d - 1; m++) {
        for (Coef q = m; q <= d - 1; q++) {
          Multiset r;
          r[D[m - 1]] += 1;
          r[D[q - 1]] += 1;
          if (m + q <= d - 1) {
            net.add_reaction(Reaction(std::move(r), {{D[m + q - 1], 1}}));
          } else {
            Multiset prod{{Y, 1}};
            if (m + q - d > 0) prod[D[m + q - d - 1]] += 1;
            net.add_reaction(Reaction(std::move(r), std::move(prod)));
          }
        }
      }
    };
    division(DP, YP);
    division(DC, YC);
  }

  for (auto& p : pv) crc.inputs.push_back(p.input);
  crc.output = YP;
  crc.output_neg = YC;
  crc.context = Configuration(net.species_count());
  crc.context.counts[YP] = piece.offset_b;
  crc.validate();
  return out;
}

inline CompiledCrc compile_affine(const AffinePiece& piece) {
  std::set<std::string> used;
  piece.domain->collect_variables(used);
  for (auto& [v, k] : piece.numerators) used.insert(v);
  for (auto& [v, k] : piece.offsets_c) used.insert(v);
  return compile_affine(piece, std::vector<std::string>(used.begin(), used.end()));
}

/// Piecewise function computer: every piece's affine computer and domain
/// decider run in parallel on split copies of the input; the domain vote
/// activates or retracts that piece's diff-representation output and
/// mirrors it into the single global output Y.
inline CompiledCrc compile_function(const PiecewiseFn& f, Coef disjointness_bound = 6) {
  f.validate();
  auto violations = check_disjoint(f, disjointness_bound);
  if (!violations.empty()) {
    std::string what = "domain decomposition invalid at {";
    for (std::size_t i = 0; i < violations[0].point.size(); i++)
      what += (i ? "," : "") + violations[0].point[i].str();
    throw SpecError(what + "}: " + violations[0].detail);
  }

  CompiledCrc out;
  out.mode = CrcMode::SingleOutput;
  Crn& crn = out.crc.crn;

  std::vector<SpeciesId> xs;
  for (auto& v : f.variables) xs.push_back(crn.add_species(v));
  SpeciesId Y = crn.add_species("Y");
  SpeciesId K = crn.add_species("K");

  out.crc.context = Configuration(0);  // resized at the end
  std::vector<Count> ctx;              // sparse merge buffer, by final id
  auto ensure_ctx = [&](SpeciesId s) {
    if (static_cast<std::size_t>(s) >= ctx.size()) ctx.resize(s + 1, Count(0));
  };

  std::vector<Multiset> split_per_var(f.variables.size());
  std::vector<Reaction> late;  // activation reactions, appended after subnets

  for (std::size_t i = 0; i < f.pieces.size(); i++) {
    const AffinePiece& piece = f.pieces[i];
    std::string tag = std::to_string(i + 1);
    PredicateSpec dom{f.variables, piece.domain};
    CompiledCrd pred = compile_predicate(dom);
    CompiledCrc aff = compile_affine(piece, f.variables);

    std::vector<SpeciesId> pmap = detail::embed(crn, pred.crd.crn, "P" + tag + ".");
    std::vector<SpeciesId> fmap = detail::embed(crn, aff.crc.crn, "F" + tag + ".");
    for (int s = 0; s < pred.crd.crn.species_count(); s++)
      if (pred.crd.context.counts[s] != 0) {
        ensure_ctx(pmap[s]);
        ctx[pmap[s]] += pred.crd.context.counts[s];
      }
    for (int s = 0; s < aff.crc.crn.species_count(); s++)
      if (aff.crc.context.counts[s] != 0) {
        ensure_ctx(fmap[s]);
        ctx[fmap[s]] += aff.crc.context.counts[s];
      }
    for (std::size_t k = 0; k < f.variables.size(); k++) {
      split_per_var[k][pmap[pred.crd.inputs[k]]] += 1;
      split_per_var[k][fmap[aff.crc.inputs[k]]] += 1;
    }

    // the piece's own Y^P / Y^C act as the inactive output forms
    SpeciesId Yhat_p = fmap[aff.crc.output];
    SpeciesId Yhat_c = fmap[aff.crc.output_neg];
    SpeciesId Yact_p = crn.add_species("Yact" + tag + "^P");
    SpeciesId Yact_c = crn.add_species("Yact" + tag + "^C");
    SpeciesId M = crn.add_species("M" + tag);

    for (SpeciesId v : pred.crd.yes_voters) {
      SpeciesId L = pmap[v];
      late.push_back(Reaction({{L, 1}, {Yhat_p, 1}}, {{L, 1}, {Yact_p, 1}, {Y, 1}}));
      late.push_back(Reaction({{L, 1}, {Yhat_c, 1}}, {{L, 1}, {Yact_c, 1}}));
    }
    for (SpeciesId v : pred.crd.no_voters) {
      SpeciesId L = pmap[v];
      late.push_back(Reaction({{L, 1}, {Yact_p, 1}}, {{L, 1}, {M, 1}}));
      late.push_back(Reaction({{L, 1}, {Yact_c, 1}}, {{L, 1}, {Yhat_c, 1}}));
    }
    late.push_back(Reaction({{M, 1}, {Y, 1}}, {{Yhat_p, 1}}));
    late.push_back(Reaction({{Yact_p, 1}, {Yact_c, 1}}, {{K, 1}}));
  }
  late.push_back(Reaction({{K, 1}, {Y, 1}}, {}));

  // one-shot input split feeding every subnet
  for (std::size_t k = 0; k < f.variables.size(); k++)
    crn.add_reaction(Reaction({{xs[k], 1}}, Multiset(split_per_var[k])));

  out.crc.inputs = xs;
  out.crc.output = Y;
  out.crc.output_neg = -1;
  out.crc.context = Configuration(crn.species_count());
  for (std::size_t s = 0; s < ctx.size(); s++) out.crc.context.counts[s] = ctx[s];
  for (const Reaction& r : late) crn.add_reaction(r);
  out.crc.validate();
  return out;
}

}  // namespace ebc
