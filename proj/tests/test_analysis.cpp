#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "ebc/analysis.hpp"
#include "ebc/verify.hpp"
#include "random_crn.hpp"

using namespace ebc;

namespace {

Crn bounded_pair() {  // A+A -> B+C, B+B -> A
  Crn c;
  for (auto n : {"A", "B", "C"}) c.add_species(n);
  c.add_reaction({{"A", 2}}, {{"B", 1}, {"C", 1}});
  c.add_reaction({{"B", 2}}, {{"A", 1}});
  return c;
}

Crn flip_flop() {  // A <-> B
  Crn c;
  c.add_species("A");
  c.add_species("B");
  c.add_reaction({{"A", 1}}, {{"B", 1}});
  c.add_reaction({{"B", 1}}, {{"A", 1}});
  return c;
}

/// Independent replay oracle for Farkas witnesses: starting from the summed
/// reactant requirement of the whole multiset, the reactions can be fired
/// (in some order) to completion, ending componentwise >= the start.
bool replays_as_loop(const Crn& crn, const FarkasWitness& w) {
  Configuration x(crn.species_count());
  for (std::size_t j = 0; j < w.multiplicities.size(); j++)
    for (auto& [s, c] : crn.reactions()[j].reactants) x.counts[s] += w.multiplicities[j] * c;
  Configuration start = x;
  std::vector<Count> left = w.multiplicities;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t j = 0; j < left.size(); j++) {
      while (left[j] > 0 && applicable(x, crn.reactions()[j])) {
        x = apply(x, crn.reactions()[j]);
        left[j] -= 1;
        progress = true;
      }
    }
  }
  for (auto& l : left)
    if (l != 0) return false;
  for (int s = 0; s < crn.species_count(); s++)
    if (x.counts[s] < start.counts[s]) return false;
  return true;
}

}  // namespace

TEST_CASE("potential for the two-reaction example") {
  Crn c = bounded_pair();
  BoundednessCertificate cert = find_potential(c);
  REQUIRE(is_bounded(cert));
  CHECK(validate_potential(c, std::get<PotentialFunction>(cert)));

  // the hand-written weights v_A = v_B = 1, v_C = 0 must be accepted too
  PotentialFunction hand{{Count(1), Count(1), Count(0)}};
  CHECK(validate_potential(c, hand));
  PotentialFunction wrong{{Count(1), Count(0), Count(0)}};
  CHECK_FALSE(validate_potential(c, wrong));  // B+B -> A gains potential
}

TEST_CASE("flip-flop is unbounded") {
  Crn c = flip_flop();
  BoundednessCertificate cert = find_potential(c);
  REQUIRE_FALSE(is_bounded(cert));
  const FarkasWitness& w = std::get<FarkasWitness>(cert);
  CHECK(validate_farkas(c, w));
  CHECK(replays_as_loop(c, w));
}

TEST_CASE("validators reject malformed certificates") {
  Crn c = bounded_pair();
  CHECK_FALSE(validate_potential(c, PotentialFunction{{Count(1), Count(1)}}));  // dim
  CHECK_FALSE(validate_potential(c, PotentialFunction{{Count(-1), Count(1), Count(0)}}));
  CHECK_FALSE(validate_farkas(c, FarkasWitness{{Count(0), Count(0)}}));  // zero
  CHECK_FALSE(validate_farkas(c, FarkasWitness{{Count(1), Count(-1)}}));
  CHECK_FALSE(validate_farkas(c, FarkasWitness{{Count(1), Count(1)}}));  // M u has neg rows
  Crn f = flip_flop();
  CHECK(validate_farkas(f, FarkasWitness{{Count(1), Count(1)}}));
  CHECK(validate_farkas(f, FarkasWitness{{Count(2), Count(2)}}));
}

TEST_CASE("exactly one certificate arm on random networks") {
  std::mt19937 gen(2024);
  int unbounded_seen = 0, bounded_seen = 0;
  for (int trial = 0; trial < 200; trial++) {
    Crn c = ebc_test::random_crn(gen);
    BoundednessCertificate cert = find_potential(c);
    if (is_bounded(cert)) {
      bounded_seen++;
      CHECK(validate_potential(c, std::get<PotentialFunction>(cert)));
    } else {
      unbounded_seen++;
      const FarkasWitness& w = std::get<FarkasWitness>(cert);
      CHECK(validate_farkas(c, w));
      CHECK(replays_as_loop(c, w));
    }
  }
  // the generator produces a healthy mix; a degenerate split would make
  // this property test vacuous
  CHECK(bounded_seen > 20);
  CHECK(unbounded_seen > 20);
}

TEST_CASE("unbounded witnesses replay as self-covering paths in explore") {
  std::mt19937 gen(55);
  int found = 0;
  for (int trial = 0; trial < 120 && found < 40; trial++) {
    Crn c = ebc_test::random_crn(gen);
    BoundednessCertificate cert = find_potential(c);
    if (is_bounded(cert)) continue;
    found++;
    const FarkasWitness& w = std::get<FarkasWitness>(cert);
    Configuration x(c.species_count());
    for (std::size_t j = 0; j < w.multiplicities.size(); j++)
      for (auto& [s, k] : c.reactions()[j].reactants) x.counts[s] += w.multiplicities[j] * k;
    ExploreLimits lim;
    lim.max_configs = 200000;
    ExploreReport rep = explore(c, x, lim);
    REQUIRE(rep.witness.has_value());
    CHECK(validate_witness(c, x, *rep.witness));
  }
  CHECK(found >= 20);
}

TEST_CASE("execution length is bounded by the potential") {
  Crn c = bounded_pair();
  BoundednessCertificate cert = find_potential(c);
  const PotentialFunction& pot = std::get<PotentialFunction>(cert);
  Configuration x = Configuration::of(c, {{"A", 6}, {"B", 3}});
  Count phi = execution_length_bound(c, pot, x);
  ExploreReport rep = explore(c, x);
  REQUIRE_FALSE(rep.witness.has_value());
  REQUIRE_FALSE(rep.truncated);
  uint32_t max_depth = 0;
  for (std::size_t i = 0; i < rep.reached_count(); i++)
    max_depth = std::max(max_depth, rep.nodes[i].depth);
  CHECK(Count(max_depth) <= phi);
  CHECK(max_depth > 0);
}

TEST_CASE("reaction-feedforward orders") {
  // pipeline X -> Y, Y -> Z is feedforward
  Crn pipe;
  for (auto n : {"X", "Y", "Z"}) pipe.add_species(n);
  pipe.add_reaction({{"X", 1}}, {{"Y", 1}});
  pipe.add_reaction({{"Y", 1}}, {{"Z", 1}});
  auto order = reaction_feedforward_order(pipe);
  REQUIRE(order.has_value());
  CHECK(*order == std::vector<int>{0, 1});

  // two-reaction parity leader is not: X is a reactant of both reactions
  Crn parity;
  for (auto n : {"X", "Y", "N"}) parity.add_species(n);
  parity.add_reaction({{"Y", 1}, {"X", 1}}, {{"N", 1}});
  parity.add_reaction({{"N", 1}, {"X", 1}}, {{"Y", 1}});
  CHECK_FALSE(reaction_feedforward_order(parity).has_value());
}

TEST_CASE("greedy reaction order agrees with permutation brute force") {
  auto brute = [](const Crn& c) {
    int m = static_cast<int>(c.reactions().size());
    std::vector<int> perm(m);
    for (int i = 0; i < m; i++) perm[i] = i;
    do {
      bool ok = true;
      for (int k = 0; k < m && ok; k++)
        for (auto& [s, cnt] : c.reactions()[perm[k]].reactants)
          for (int l = k + 1; l < m && ok; l++) {
            const Reaction& later = c.reactions()[perm[l]];
            if (later.reactants.count(s) || later.products.count(s)) ok = false;
          }
      if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  };
  std::mt19937 gen(7);
  for (int trial = 0; trial < 150; trial++) {
    Crn c = ebc_test::random_crn(gen);
    auto greedy = reaction_feedforward_order(c);
    CHECK(greedy.has_value() == brute(c));
    if (greedy.has_value()) {
      // the produced order itself satisfies the condition
      const auto& ord = *greedy;
      for (std::size_t k = 0; k < ord.size(); k++)
        for (auto& [s, cnt] : c.reactions()[ord[k]].reactants)
          for (std::size_t l = k + 1; l < ord.size(); l++) {
            const Reaction& later = c.reactions()[ord[l]];
            CHECK(later.reactants.count(s) == 0);
            CHECK(later.products.count(s) == 0);
          }
    }
  }
}

TEST_CASE("greedy species order agrees with permutation brute force") {
  auto valid_order = [](const Crn& c, const std::vector<SpeciesId>& order) {
    std::vector<bool> placed(c.species_count(), false);
    for (SpeciesId s : order) {
      for (auto& r : c.reactions()) {
        if (r.net(s) <= 0) continue;
        bool ok = false;
        for (SpeciesId t = 0; t < c.species_count(); t++)
          if (placed[t] && r.net(t) < 0) ok = true;
        if (!ok) return false;
      }
      placed[s] = true;
    }
    return true;
  };
  auto brute = [&](const Crn& c) {
    std::vector<SpeciesId> perm(c.species_count());
    for (int i = 0; i < c.species_count(); i++) perm[i] = i;
    do {
      if (valid_order(c, perm)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  };
  std::mt19937 gen(13);
  for (int trial = 0; trial < 150; trial++) {
    Crn c = ebc_test::random_crn(gen);
    auto greedy = species_feedforward_order(c);
    CHECK(greedy.has_value() == brute(c));
    if (greedy) CHECK(valid_order(c, *greedy));
  }
}

TEST_CASE("species-feedforward networks get bounded certificates") {
  std::mt19937 gen(99);
  int found = 0, trials = 0;
  while (found < 60) {
    REQUIRE(++trials < 20000);
    Crn c = ebc_test::random_crn(gen);
    if (!species_feedforward_order(c).has_value()) continue;
    found++;
    CHECK(is_bounded(find_potential(c)));
  }
}

TEST_CASE("certificate text form") {
  Crn c = bounded_pair();
  std::string text = certificate_to_text(c, find_potential(c));
  CHECK(text.substr(0, 8) == "bounded\n");
  CHECK(text.find("A: ") != std::string::npos);
  Crn f = flip_flop();
  text = certificate_to_text(f, find_potential(f));
  CHECK(text.substr(0, 10) == "unbounded\n");
  CHECK(text.find("r1: ") != std::string::npos);
  CHECK(text.find("r2: ") != std::string::npos);
}
