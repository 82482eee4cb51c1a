#pragma once

// Core data model: species, reactions, configurations, deciders (CRDs),
// computers (CRCs), and the stoichiometric linear algebra shared by the
// analysis, verification and simulation layers.
//
// All types are immutable after construction and safe to share across
// threads read-only.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ebc {

/// Molecular counts. Arbitrary precision: verification sums configurations
/// and certificates are checked by exact assertion, so overflow is not an
/// option.
using Count = boost::multiprecision::cpp_int;

/// Stoichiometric coefficients (small by construction).
using Coef = long long;

using SpeciesId = int;

class CrnError : public std::runtime_error {
 public:
  explicit CrnError(const std::string& what) : std::runtime_error(what) {}
};

class NotApplicable : public CrnError {
 public:
  explicit NotApplicable(const std::string& what) : CrnError(what) {}
};

/// Sparse multiset over species, e.g. the reactant or product side of a
/// reaction. Entries are strictly positive.
using Multiset = std::map<SpeciesId, Coef>;

struct Reaction {
  Multiset reactants;
  Multiset products;

  Reaction(Multiset r, Multiset p) : reactants(std::move(r)), products(std::move(p)) {
    for (auto& [s, c] : reactants)
      if (c <= 0) throw CrnError("reaction with nonpositive reactant count");
    for (auto& [s, c] : products)
      if (c <= 0) throw CrnError("reaction with nonpositive product count");
    if (reactants.empty() && products.empty()) throw CrnError("empty reaction");
    if (reactants == products) throw CrnError("no-op reaction (reactants equal products)");
  }

  /// Net change of species s: products minus reactants.
  Coef net(SpeciesId s) const {
    Coef p = 0, r = 0;
    if (auto it = products.find(s); it != products.end()) p = it->second;
    if (auto it = reactants.find(s); it != reactants.end()) r = it->second;
    return p - r;
  }

  Coef reactant_count(SpeciesId s) const {
    auto it = reactants.find(s);
    return it == reactants.end() ? 0 : it->second;
  }

  /// Total reactant molecules (the "order" of the reaction).
  Coef order() const {
    Coef n = 0;
    for (auto& [s, c] : reactants) n += c;
    return n;
  }

  bool operator==(const Reaction& o) const = default;
};

/// A chemical reaction network. Species and reaction order is fixed at
/// construction time (declaration order); it determines all matrix and
/// certificate indexing.
class Crn {
 public:
  Crn() = default;

  SpeciesId add_species(const std::string& name) {
    if (name.empty()) throw CrnError("empty species name");
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    SpeciesId id = static_cast<SpeciesId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  /// Lookup, -1 if absent.
  SpeciesId find_species(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  SpeciesId species_or_throw(const std::string& name) const {
    SpeciesId s = find_species(name);
    if (s < 0) throw CrnError("unknown species: " + name);
    return s;
  }

  void add_reaction(Reaction r) {
    auto check = [&](const Multiset& m) {
      for (auto& [s, c] : m)
        if (s < 0 || s >= static_cast<SpeciesId>(names_.size()))
          throw CrnError("reaction mentions unknown species id");
    };
    check(r.reactants);
    check(r.products);
    reactions_.push_back(std::move(r));
  }

  /// Convenience: build a reaction from name->count maps.
  void add_reaction(const std::map<std::string, Coef>& r, const std::map<std::string, Coef>& p) {
    Multiset rm, pm;
    for (auto& [n, c] : r) rm.emplace(species_or_throw(n), c);
    for (auto& [n, c] : p) pm.emplace(species_or_throw(n), c);
    add_reaction(Reaction(std::move(rm), std::move(pm)));
  }

  int species_count() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& species_names() const { return names_; }
  const std::string& name(SpeciesId s) const { return names_.at(s); }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  bool operator==(const Crn& o) const {
    return names_ == o.names_ && reactions_ == o.reactions_;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, SpeciesId> index_;
  std::vector<Reaction> reactions_;
};

/// Nonnegative integer count vector over the species of a CRN.
struct Configuration {
  std::vector<Count> counts;

  Configuration() = default;
  explicit Configuration(int n_species) : counts(n_species) {}

  static Configuration of(const Crn& crn, const std::map<std::string, Count>& m) {
    Configuration c(crn.species_count());
    for (auto& [name, k] : m) {
      if (k < 0) throw CrnError("negative count for " + name);
      c.counts.at(crn.species_or_throw(name)) = k;
    }
    return c;
  }

  Count operator[](SpeciesId s) const { return counts.at(s); }
  Count& operator[](SpeciesId s) { return counts.at(s); }

  bool is_zero() const {
    return std::all_of(counts.begin(), counts.end(), [](const Count& c) { return c == 0; });
  }

  Count total() const {
    Count t = 0;
    for (auto& c : counts) t += c;
    return t;
  }

  Configuration plus(const Configuration& o) const {
    if (counts.size() != o.counts.size()) throw CrnError("configuration dimension mismatch");
    Configuration r = *this;
    for (std::size_t i = 0; i < counts.size(); i++) r.counts[i] += o.counts[i];
    return r;
  }

  bool operator==(const Configuration& o) const = default;

  std::string to_string(const Crn& crn) const {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < counts.size(); i++) {
      if (counts[i] == 0) continue;
      if (!first) s += ", ";
      first = false;
      if (counts[i] != 1) s += counts[i].str() + " ";
      s += crn.name(static_cast<SpeciesId>(i));
    }
    s += "}";
    return s;
  }
};

inline bool applicable(const Configuration& c, const Reaction& rxn) {
  for (auto& [s, k] : rxn.reactants)
    if (c.counts.at(s) < k) return false;
  return true;
}

/// c' = c - r + p. Throws NotApplicable if some reactant is missing.
inline Configuration apply(const Configuration& config, const Reaction& rxn) {
  if (!applicable(config, rxn))
    throw NotApplicable("reaction not applicable: some reactant count exceeds configuration");
  Configuration out = config;
  for (auto& [s, k] : rxn.reactants) out.counts[s] -= k;
  for (auto& [s, k] : rxn.products) out.counts[s] += k;
  return out;
}

inline bool is_terminal(const Crn& crn, const Configuration& config) {
  for (auto& r : crn.reactions())
    if (applicable(config, r)) return false;
  return true;
}

/// |species| x |reactions| integer matrix, M[i][j] = net production of
/// species i by reaction j.
struct StoichMatrix {
  int rows = 0;  // species
  int cols = 0;  // reactions
  std::vector<std::vector<Coef>> entries;

  Coef at(int i, int j) const { return entries.at(i).at(j); }
};

inline StoichMatrix stoichiometric_matrix(const Crn& crn) {
  StoichMatrix m;
  m.rows = crn.species_count();
  m.cols = static_cast<int>(crn.reactions().size());
  m.entries.assign(m.rows, std::vector<Coef>(m.cols, 0));
  for (int j = 0; j < m.cols; j++) {
    const Reaction& r = crn.reactions()[j];
    for (int i = 0; i < m.rows; i++) m.entries[i][j] = r.net(i);
  }
  return m;
}

/// M*u: the net species change from executing reaction j exactly u[j] times.
inline std::vector<Count> displacement(const Crn& crn, const std::vector<Count>& u) {
  if (u.size() != crn.reactions().size()) throw CrnError("displacement: dimension mismatch");
  for (auto& x : u)
    if (x < 0) throw CrnError("displacement: negative reaction count");
  std::vector<Count> out(crn.species_count(), Count(0));
  for (std::size_t j = 0; j < u.size(); j++) {
    const Reaction& r = crn.reactions()[j];
    for (int i = 0; i < crn.species_count(); i++) {
      Coef net = r.net(i);
      if (net != 0) out[i] += u[j] * net;
    }
  }
  return out;
}

/// Chemical reaction decider: a CRN plus input species, yes/no voter sets
/// and an initial context over the non-input species.
struct Crd {
  Crn crn;
  std::vector<SpeciesId> inputs;  // ordered; order maps to predicate variables
  std::set<SpeciesId> yes_voters;
  std::set<SpeciesId> no_voters;
  Configuration context;

  void validate() const {
    for (SpeciesId s : yes_voters)
      if (no_voters.count(s)) throw CrnError("voter " + crn.name(s) + " votes both yes and no");
    if (static_cast<int>(context.counts.size()) != crn.species_count())
      throw CrnError("context dimension mismatch");
    for (SpeciesId s : inputs)
      if (context.counts.at(s) != 0)
        throw CrnError("input species " + crn.name(s) + " appears in initial context");
  }

  bool is_voter(SpeciesId s) const { return yes_voters.count(s) || no_voters.count(s); }

  Configuration initial(const std::vector<Count>& input_counts) const {
    if (input_counts.size() != inputs.size()) throw CrnError("input vector dimension mismatch");
    Configuration c = context;
    for (std::size_t i = 0; i < inputs.size(); i++) {
      if (input_counts[i] < 0) throw CrnError("negative input count");
      c.counts[inputs[i]] += input_counts[i];
    }
    return c;
  }
};

/// Chemical reaction computer: a CRN plus input species, a primary output
/// species, and optionally a negative output species (diff-representation).
struct Crc {
  Crn crn;
  std::vector<SpeciesId> inputs;
  SpeciesId output = -1;
  SpeciesId output_neg = -1;  // -1 unless diff-representation
  Configuration context;

  void validate() const {
    if (output < 0) throw CrnError("CRC without output species");
    for (SpeciesId s : inputs)
      if (s == output || s == output_neg) throw CrnError("output species is an input");
    if (static_cast<int>(context.counts.size()) != crn.species_count())
      throw CrnError("context dimension mismatch");
    for (SpeciesId s : inputs)
      if (context.counts.at(s) != 0)
        throw CrnError("input species " + crn.name(s) + " appears in initial context");
  }

  Configuration initial(const std::vector<Count>& input_counts) const {
    if (input_counts.size() != inputs.size()) throw CrnError("input vector dimension mismatch");
    Configuration c = context;
    for (std::size_t i = 0; i < inputs.size(); i++) {
      if (input_counts[i] < 0) throw CrnError("negative input count");
      c.counts[inputs[i]] += input_counts[i];
    }
    return c;
  }
};

enum class Output { No = 0, Yes = 1, Undefined = 2 };

/// Unanimous-vote global output. Undefined on the all-zero configuration,
/// when yes and no voters are simultaneously present, and when no voter at
/// all is present (absence of voters is not a unanimous vote).
inline Output global_output(const Crd& crd, const Configuration& config) {
  if (config.is_zero()) return Output::Undefined;
  bool any_yes = false, any_no = false;
  for (SpeciesId s : crd.yes_voters)
    if (config.counts.at(s) > 0) any_yes = true;
  for (SpeciesId s : crd.no_voters)
    if (config.counts.at(s) > 0) any_no = true;
  if (any_yes && any_no) return Output::Undefined;
  if (any_yes) return Output::Yes;
  if (any_no) return Output::No;
  return Output::Undefined;
}

}  // namespace ebc
