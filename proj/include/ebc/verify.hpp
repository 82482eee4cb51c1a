#pragma once

// Exhaustive desk-scale semantics: breadth-first reachability with
// self-covering detection (Karp-Miller-style ancestor comparison along the
// discovery-tree path), terminal extraction, and stable-computation
// verdicts against the semilinear oracles.
//
// Configurations are packed into 64-bit count vectors in a flat arena;
// visited dedup is global, the covering comparison is path-relative.
//
// An optional stubborn-set reduction (deadlock-preserving partial order
// reduction) is available for the large composed-CRC state spaces. It
// preserves the set of reachable terminal configurations exactly, which is
// all the terminal-based verdicts below need; it does not preserve the
// full reachable set, so invariant sweeps over `reached` should use the
// full mode.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ebc/crn.hpp"
#include "ebc/semilinear.hpp"

namespace ebc {

struct ExploreLimits {
  std::size_t max_configs = 2'000'000;
  std::size_t max_depth = 100'000;
  bool reduce = false;  // stubborn-set reduction (terminal-preserving)
};

struct SelfCoveringWitness {
  std::vector<int> reactions;  // reaction indices applied from init
  std::size_t cover_i = 0;     // positions along the path, x_i <= x_j
  std::size_t cover_j = 0;
};

class ExploreReport {
 public:
  int width = 0;  // species count
  std::vector<int64_t> arena;
  struct Node {
    uint32_t parent;
    int32_t via_reaction;  // -1 for root
    uint32_t depth;
    int64_t total;
  };
  std::vector<Node> nodes;
  std::vector<uint32_t> terminal_nodes;
  std::optional<SelfCoveringWitness> witness;
  bool truncated = false;
  std::string limit_hit;
  bool reduced = false;

  std::size_t reached_count() const { return nodes.size(); }

  const int64_t* raw(std::size_t node) const { return arena.data() + std::size_t(node) * width; }

  Configuration config_at(std::size_t node) const {
    Configuration c(width);
    const int64_t* p = raw(node);
    for (int i = 0; i < width; i++) c.counts[i] = p[i];
    return c;
  }

  std::vector<Configuration> terminals() const {
    std::vector<Configuration> out;
    out.reserve(terminal_nodes.size());
    for (uint32_t t : terminal_nodes) out.push_back(config_at(t));
    return out;
  }

  /// Reaction indices along the discovery-tree path from the root to node.
  std::vector<int> path_to(std::size_t node) const {
    std::vector<int> rev;
    for (std::size_t n = node; nodes[n].via_reaction >= 0; n = nodes[n].parent)
      rev.push_back(nodes[n].via_reaction);
    return std::vector<int>(rev.rbegin(), rev.rend());
  }
};

namespace detail {

inline uint64_t hash_config(const int64_t* p, int width) {
  uint64_t h = 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < width; i++) {
    uint64_t x = static_cast<uint64_t>(p[i]);
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    h = (h ^ x) * 0x94d049bb133111ebull;
  }
  return h;
}

inline bool covers(const int64_t* lo, const int64_t* hi, int width) {
  for (int i = 0; i < width; i++)
    if (hi[i] < lo[i]) return false;
  return true;
}

// Deadlock-preserving stubborn set at a configuration. Closure rules:
// an enabled member pulls in every reaction sharing one of its reactant
// species; a disabled member picks one insufficient reactant species and
// pulls in every net producer of it. The seed minimizing the number of
// enabled members wins.
class StubbornSets {
 public:
  explicit StubbornSets(const Crn& crn) : crn_(&crn) {
    const auto& rxns = crn.reactions();
    int m = static_cast<int>(rxns.size());
    conflict_.resize(m);
    for (int a = 0; a < m; a++) {
      for (int b = 0; b < m; b++) {
        if (a == b) continue;
        for (auto& [s, c] : rxns[a].reactants) {
          if (rxns[b].reactants.count(s)) {
            conflict_[a].push_back(b);
            break;
          }
        }
      }
    }
    producers_.resize(crn.species_count());
    for (int j = 0; j < m; j++)
      for (int s = 0; s < crn.species_count(); s++)
        if (rxns[j].net(s) > 0) producers_[s].push_back(j);
  }

  // `enabled` flags per reaction; returns the reactions to expand.
  std::vector<int> choose(const int64_t* config, const std::vector<bool>& enabled) const {
    const auto& rxns = crn_->reactions();
    int m = static_cast<int>(rxns.size());
    std::vector<int> best;
    std::size_t best_size = SIZE_MAX;
    std::vector<int> mark(m, 0);
    int stamp = 0;
    for (int seed = 0; seed < m; seed++) {
      if (!enabled[seed]) continue;
      stamp++;
      std::vector<int> stack{seed};
      std::vector<int> members;
      mark[seed] = stamp;
      while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        members.push_back(t);
        if (enabled[t]) {
          for (int u : conflict_[t])
            if (mark[u] != stamp) {
              mark[u] = stamp;
              stack.push_back(u);
            }
        } else {
          // first insufficient reactant
          for (auto& [s, c] : rxns[t].reactants) {
            if (config[s] < c) {
              for (int u : producers_[s])
                if (mark[u] != stamp) {
                  mark[u] = stamp;
                  stack.push_back(u);
                }
              break;
            }
          }
        }
      }
      std::vector<int> en;
      for (int t : members)
        if (enabled[t]) en.push_back(t);
      if (en.size() < best_size) {
        best_size = en.size();
        best = std::move(en);
        if (best_size == 1) break;
      }
    }
    return best;
  }

 private:
  const Crn* crn_;
  std::vector<std::vector<int>> conflict_;
  std::vector<std::vector<int>> producers_;
};

}  // namespace detail

/// Breadth-first expansion of reach(init). Every generated successor is
/// compared against the ancestors on its discovery path; the first
/// componentwise covering aborts the search with a witness. Without a
/// witness the search runs to exhaustion or truncates at the limits
/// (reported, never silent).
inline ExploreReport explore(const Crn& crn, const Configuration& init,
                             const ExploreLimits& limits = {}) {
  if (limits.max_configs == 0 || limits.max_depth == 0) throw CrnError("limits must be positive");
  const int width = crn.species_count();
  const auto& rxns = crn.reactions();
  const int m = static_cast<int>(rxns.size());

  ExploreReport rep;
  rep.width = width;
  rep.reduced = limits.reduce;

  if (static_cast<int>(init.counts.size()) != width) throw CrnError("init dimension mismatch");

  std::vector<int64_t> root(width);
  for (int i = 0; i < width; i++) {
    if (init.counts[i] < 0 || init.counts[i] > Count(int64_t{1} << 60))
      throw CrnError("initial count out of verifier range");
    root[i] = init.counts[i].convert_to<int64_t>();
  }

  std::unordered_map<uint64_t, std::vector<uint32_t>> seen;
  auto equal_at = [&](uint32_t node, const int64_t* p) {
    const int64_t* q = rep.raw(node);
    for (int i = 0; i < width; i++)
      if (p[i] != q[i]) return false;
    return true;
  };
  auto lookup = [&](const int64_t* p, uint64_t h) -> std::optional<uint32_t> {
    auto it = seen.find(h);
    if (it == seen.end()) return std::nullopt;
    for (uint32_t n : it->second)
      if (equal_at(n, p)) return n;
    return std::nullopt;
  };

  auto push_node = [&](const int64_t* p, uint64_t h, uint32_t parent, int32_t via,
                       uint32_t depth) -> uint32_t {
    uint32_t id = static_cast<uint32_t>(rep.nodes.size());
    rep.arena.insert(rep.arena.end(), p, p + width);
    int64_t total = 0;
    for (int i = 0; i < width; i++) total += p[i];
    rep.nodes.push_back({parent, via, depth, total});
    seen[h].push_back(id);
    return id;
  };

  uint64_t root_hash = detail::hash_config(root.data(), width);
  push_node(root.data(), root_hash, 0, -1, 0);

  std::optional<detail::StubbornSets> stubborn;
  if (limits.reduce) stubborn.emplace(crn);

  std::vector<int64_t> succ(width);
  std::deque<uint32_t> frontier{0};

  while (!frontier.empty()) {
    uint32_t q = frontier.front();
    frontier.pop_front();
    const uint32_t depth = rep.nodes[q].depth;

    std::vector<bool> enabled(m, false);
    bool any = false;
    {
      const int64_t* cfg = rep.raw(q);
      for (int j = 0; j < m; j++) {
        bool ok = true;
        for (auto& [s, c] : rxns[j].reactants)
          if (cfg[s] < c) {
            ok = false;
            break;
          }
        enabled[j] = ok;
        any = any || ok;
      }
    }
    if (!any) {
      rep.terminal_nodes.push_back(q);
      continue;
    }
    if (depth + 1 > limits.max_depth) {
      rep.truncated = true;
      rep.limit_hit = "max_depth";
      continue;
    }

    std::vector<int> expand;
    if (stubborn) {
      expand = stubborn->choose(rep.raw(q), enabled);
    } else {
      for (int j = 0; j < m; j++)
        if (enabled[j]) expand.push_back(j);
    }

    for (int j : expand) {
      {
        const int64_t* cfg = rep.raw(q);
        for (int i = 0; i < width; i++) succ[i] = cfg[i];
      }
      for (auto& [s, c] : rxns[j].reactants) succ[s] -= c;
      int64_t total = 0;
      for (auto& [s, c] : rxns[j].products) {
        succ[s] += c;
        if (succ[s] > (int64_t{1} << 60)) throw CrnError("count overflow during exploration");
      }
      for (int i = 0; i < width; i++) total += succ[i];

      // covering check against the generating path (path-relative)
      for (uint32_t a = q;; a = rep.nodes[a].parent) {
        if (rep.nodes[a].total <= total && detail::covers(rep.raw(a), succ.data(), width)) {
          SelfCoveringWitness w;
          w.reactions = rep.path_to(q);
          w.reactions.push_back(j);
          w.cover_i = rep.nodes[a].depth;
          w.cover_j = depth + 1;
          rep.witness = std::move(w);
          return rep;
        }
        if (rep.nodes[a].via_reaction < 0) break;
      }

      uint64_t h = detail::hash_config(succ.data(), width);
      if (lookup(succ.data(), h)) continue;
      if (rep.nodes.size() >= limits.max_configs) {
        rep.truncated = true;
        rep.limit_hit = "max_configs";
        return rep;
      }
      uint32_t id = push_node(succ.data(), h, q, j, depth + 1);
      frontier.push_back(id);
    }
  }
  return rep;
}

/// Replays a witness from init and checks the claimed covering pair. Used
/// by tests and by certificate cross-validation.
inline bool validate_witness(const Crn& crn, const Configuration& init,
                             const SelfCoveringWitness& w) {
  if (w.cover_i >= w.cover_j || w.cover_j != w.reactions.size()) return false;
  Configuration c = init;
  Configuration at_i;
  if (w.cover_i == 0) at_i = c;
  for (std::size_t k = 0; k < w.reactions.size(); k++) {
    int j = w.reactions[k];
    if (j < 0 || j >= static_cast<int>(crn.reactions().size())) return false;
    if (!applicable(c, crn.reactions()[j])) return false;
    c = apply(c, crn.reactions()[j]);
    if (k + 1 == w.cover_i) at_i = c;
  }
  for (int s = 0; s < crn.species_count(); s++)
    if (c.counts[s] < at_i.counts[s]) return false;
  return true;
}

enum class VerdictKind { Pass, Fail, Inconclusive };

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::string detail;
  std::vector<Count> input;
  std::optional<int> expected;               // for predicates
  std::optional<Count> expected_value;       // for functions
  std::vector<int> counterexample;           // reaction path to a bad terminal
  std::optional<SelfCoveringWitness> witness;

  bool passed() const { return kind == VerdictKind::Pass; }
};

/// Pass iff the CRD is witness-free from context+input and every reachable
/// terminal configuration votes unanimously for eval_predicate(expr, x).
/// (Terminal configurations are stable, and in an execution bounded CRN
/// every configuration reaches one, so checking terminals is sound.)
///
/// The all-zero initial configuration is vacuously passing: no reaction
/// can ever fire and the global output is undefined by definition, so
/// there is nothing to decide.
inline Verdict check_stably_decides(const Crd& crd, const PredicateSpec& expr,
                                    const std::vector<Count>& input,
                                    const ExploreLimits& limits = {}) {
  Verdict v;
  v.input = input;
  bool expected = eval_predicate(expr, input);
  v.expected = expected ? 1 : 0;
  Configuration init = crd.initial(input);
  if (init.is_zero()) {
    v.kind = VerdictKind::Pass;
    v.detail = "vacuous: empty initial configuration";
    return v;
  }
  ExploreReport rep = explore(crd.crn, init, limits);
  if (rep.witness) {
    v.kind = VerdictKind::Fail;
    v.detail = "self-covering path from initial configuration (not execution bounded)";
    v.witness = rep.witness;
    return v;
  }
  if (rep.truncated) {
    v.kind = VerdictKind::Inconclusive;
    v.detail = "exploration truncated: " + rep.limit_hit;
    return v;
  }
  for (uint32_t t : rep.terminal_nodes) {
    Configuration c = rep.config_at(t);
    Output out = global_output(crd, c);
    bool ok = (expected && out == Output::Yes) || (!expected && out == Output::No);
    if (!ok) {
      v.kind = VerdictKind::Fail;
      v.detail = "terminal configuration " + c.to_string(crd.crn) + " outputs " +
                 (out == Output::Undefined ? std::string("undefined")
                                           : std::to_string(out == Output::Yes ? 1 : 0)) +
                 ", expected " + std::to_string(expected ? 1 : 0);
      v.counterexample = rep.path_to(t);
      return v;
    }
  }
  v.kind = VerdictKind::Pass;
  v.detail = std::to_string(rep.terminal_nodes.size()) + " terminal configuration(s), " +
             std::to_string(rep.reached_count()) + " reached";
  return v;
}

/// Pass iff every reachable terminal configuration carries output count
/// equal to eval_function(f, x). For diff-representation CRCs the checked
/// quantity is #Y^P - #Y^C. Inputs outside dom f yield a vacuous pass.
inline Verdict check_stably_computes(const Crc& crc, const PiecewiseFn& f,
                                     const std::vector<Count>& input,
                                     const ExploreLimits& limits = {}) {
  Verdict v;
  v.input = input;
  if (!defined_at(f, input)) {
    v.kind = VerdictKind::Pass;
    v.detail = "vacuous: input outside function domain";
    return v;
  }
  Count expected = eval_function(f, input);
  v.expected_value = expected;
  Configuration init = crc.initial(input);
  ExploreReport rep = explore(crc.crn, init, limits);
  if (rep.witness) {
    v.kind = VerdictKind::Fail;
    v.detail = "self-covering path from initial configuration (not execution bounded)";
    v.witness = rep.witness;
    return v;
  }
  if (rep.truncated) {
    v.kind = VerdictKind::Inconclusive;
    v.detail = "exploration truncated: " + rep.limit_hit;
    return v;
  }
  for (uint32_t t : rep.terminal_nodes) {
    Configuration c = rep.config_at(t);
    Count got = c.counts[crc.output];
    if (crc.output_neg >= 0) got -= c.counts[crc.output_neg];
    if (got != expected) {
      v.kind = VerdictKind::Fail;
      v.detail = "terminal configuration " + c.to_string(crc.crn) + " has output " + got.str() +
                 ", expected " + expected.str();
      v.counterexample = rep.path_to(t);
      return v;
    }
  }
  v.kind = VerdictKind::Pass;
  v.detail = std::to_string(rep.terminal_nodes.size()) + " terminal configuration(s), " +
             std::to_string(rep.reached_count()) + " reached";
  return v;
}

/// Configurations in the report whose total voter count differs from one.
/// Meaningful with full (unreduced) exploration.
inline std::vector<std::size_t> single_voting_violations(const Crd& crd,
                                                         const ExploreReport& rep) {
  std::vector<std::size_t> bad;
  std::vector<int> voters;
  for (SpeciesId s : crd.yes_voters) voters.push_back(s);
  for (SpeciesId s : crd.no_voters) voters.push_back(s);
  for (std::size_t n = 0; n < rep.reached_count(); n++) {
    const int64_t* p = rep.raw(n);
    int64_t sum = 0;
    for (int s : voters) sum += p[s];
    if (sum != 1) bad.push_back(n);
  }
  return bad;
}

}  // namespace ebc
