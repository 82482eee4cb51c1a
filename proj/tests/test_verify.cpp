#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "ebc/analysis.hpp"
#include "ebc/compile.hpp"
#include "ebc/verify.hpp"
#include "random_crn.hpp"

using namespace ebc;

namespace {

CompiledCrd parity_crd() { return compile_mod(ModAtom::make({{"X", 1}}, 1, 2), {"X"}); }

PredicateSpec parity_spec() {
  return PredicateSpec{{"X"}, PredicateExpr::atom(ModAtom::make({{"X", 1}}, 1, 2))};
}

Crn flip_flop() {
  Crn c;
  c.add_species("A");
  c.add_species("B");
  c.add_reaction({{"A", 1}}, {{"B", 1}});
  c.add_reaction({{"B", 1}}, {{"A", 1}});
  return c;
}

std::vector<std::vector<std::string>> sorted_terminals(const Crn& crn, const ExploreReport& rep) {
  std::vector<std::vector<std::string>> out;
  for (auto& t : rep.terminals()) {
    std::vector<std::string> entries;
    for (int s = 0; s < crn.species_count(); s++)
      if (t.counts[s] != 0) entries.push_back(crn.name(s) + "=" + t.counts[s].str());
    out.push_back(entries);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("explore enumerates the parity decider") {
  CompiledCrd c = parity_crd();
  ExploreReport rep = explore(c.crd.crn, c.crd.initial({Count(5)}));
  CHECK_FALSE(rep.witness.has_value());
  CHECK_FALSE(rep.truncated);
  CHECK(rep.reached_count() == 6);  // X count 5..0 with the leader tracking parity
  REQUIRE(rep.terminal_nodes.size() == 1);
  Configuration t = rep.config_at(rep.terminal_nodes[0]);
  CHECK(t[c.crd.crn.species_or_throw("L1")] == 1);
  CHECK(t.total() == 1);
  CHECK(global_output(c.crd, t) == Output::Yes);
}

TEST_CASE("path reconstruction replays") {
  CompiledCrd c = parity_crd();
  Configuration init = c.crd.initial({Count(4)});
  ExploreReport rep = explore(c.crd.crn, init);
  for (uint32_t t : rep.terminal_nodes) {
    Configuration x = init;
    for (int j : rep.path_to(t)) x = apply(x, c.crd.crn.reactions()[j]);
    CHECK(x == rep.config_at(t));
  }
}

TEST_CASE("self-covering detection on the flip-flop") {
  Crn c = flip_flop();
  Configuration init = Configuration::of(c, {{"A", 1}});
  ExploreReport rep = explore(c, init);
  REQUIRE(rep.witness.has_value());
  CHECK(validate_witness(c, init, *rep.witness));
  CHECK(rep.witness->reactions.size() == 2);  // A -> B -> A

  SelfCoveringWitness bogus = *rep.witness;
  bogus.cover_i = bogus.cover_j;
  CHECK_FALSE(validate_witness(c, init, bogus));
  bogus = *rep.witness;
  bogus.reactions.pop_back();
  CHECK_FALSE(validate_witness(c, init, bogus));
}

TEST_CASE("self-covering detection on the introduction network") {
  // X1 -> Y; X2+Y -> 0; Y+X3 -> Z; Z+X2 -> X2+X3+Y
  Crn c;
  for (auto n : {"X1", "Y", "X2", "X3", "Z"}) c.add_species(n);
  c.add_reaction({{"X1", 1}}, {{"Y", 1}});
  c.add_reaction({{"X2", 1}, {"Y", 1}}, {});
  c.add_reaction({{"Y", 1}, {"X3", 1}}, {{"Z", 1}});
  c.add_reaction({{"Z", 1}, {"X2", 1}}, {{"X2", 1}, {"X3", 1}, {"Y", 1}});
  Configuration init = Configuration::of(c, {{"X1", 1}, {"X2", 1}, {"X3", 1}});
  ExploreReport rep = explore(c, init);
  REQUIRE(rep.witness.has_value());
  CHECK(validate_witness(c, init, *rep.witness));
}

TEST_CASE("truncation is reported, never silent") {
  CompiledCrd c = parity_crd();
  ExploreLimits lim;
  lim.max_configs = 3;
  ExploreReport rep = explore(c.crd.crn, c.crd.initial({Count(10)}), lim);
  CHECK(rep.truncated);
  CHECK(rep.limit_hit == "max_configs");

  lim = ExploreLimits{};
  lim.max_depth = 2;
  rep = explore(c.crd.crn, c.crd.initial({Count(10)}), lim);
  CHECK(rep.truncated);
  CHECK(rep.limit_hit == "max_depth");

  lim = ExploreLimits{};
  lim.max_configs = 0;
  CHECK_THROWS_AS(explore(c.crd.crn, c.crd.initial({Count(1)}), lim), CrnError);
}

TEST_CASE("check_stably_decides verdicts") {
  CompiledCrd c = parity_crd();
  PredicateSpec spec = parity_spec();
  for (long long x = 0; x <= 12; x++) {
    Verdict v = check_stably_decides(c.crd, spec, {Count(x)});
    INFO("x = " << x);
    CHECK(v.kind == VerdictKind::Pass);
  }

  // against the wrong predicate the checker produces a replayable
  // counterexample path
  PredicateSpec even{{"X"}, PredicateExpr::atom(ModAtom::make({{"X", 1}}, 0, 2))};
  Verdict v = check_stably_decides(c.crd, even, {Count(3)});
  REQUIRE(v.kind == VerdictKind::Fail);
  Configuration x = c.crd.initial({Count(3)});
  for (int j : v.counterexample) x = apply(x, c.crd.crn.reactions()[j]);
  CHECK(is_terminal(c.crd.crn, x));
  CHECK(global_output(c.crd, x) == Output::Yes);  // 3 is odd; `even` expected No

  // truncation surfaces as inconclusive
  ExploreLimits lim;
  lim.max_configs = 2;
  v = check_stably_decides(c.crd, spec, {Count(9)}, lim);
  CHECK(v.kind == VerdictKind::Inconclusive);

  // non-execution-bounded decider: witness, reported as failure
  Crd bad;
  bad.crn = flip_flop();
  bad.crn.add_species("X");
  bad.inputs = {bad.crn.species_or_throw("X")};
  bad.yes_voters = {bad.crn.species_or_throw("A")};
  bad.no_voters = {bad.crn.species_or_throw("B")};
  bad.context = Configuration(bad.crn.species_count());
  bad.context.counts[bad.crn.species_or_throw("A")] = 1;
  PredicateSpec anything{{"X"}, PredicateExpr::atom(ModAtom::make({{"X", 1}}, 0, 2))};
  v = check_stably_decides(bad, anything, {Count(0)});
  REQUIRE(v.kind == VerdictKind::Fail);
  REQUIRE(v.witness.has_value());
  CHECK(validate_witness(bad.crn, bad.initial({Count(0)}), *v.witness));
}

TEST_CASE("zero initial configuration passes vacuously") {
  // leaderless decider, empty input: nothing can ever fire and no vote
  // exists, so there is nothing to decide
  Crd d;
  d.crn.add_species("X1");
  d.crn.add_species("X0");
  d.crn.add_reaction({{"X1", 2}}, {{"X0", 1}});
  d.crn.add_reaction({{"X1", 1}, {"X0", 1}}, {{"X1", 1}});
  d.crn.add_reaction({{"X0", 2}}, {{"X0", 1}});
  d.inputs = {0};
  d.yes_voters = {0};
  d.no_voters = {1};
  d.context = Configuration(2);
  PredicateSpec odd{{"X1"}, PredicateExpr::atom(ModAtom::make({{"X1", 1}}, 1, 2))};
  Verdict v = check_stably_decides(d, odd, {Count(0)});
  CHECK(v.kind == VerdictKind::Pass);
  CHECK(v.detail.find("vacuous") != std::string::npos);
}

TEST_CASE("check_stably_computes on an affine computer") {
  AffinePiece dec;  // f(x) = x - 1
  dec.domain = PredicateExpr::atom(ModAtom::make({{"X", 1}}, 0, 2));
  dec.numerators = {{"X", 1}};
  dec.offsets_c = {{"X", 1}};
  CompiledCrc c = compile_affine(dec, {"X"});

  PiecewiseFn f;
  f.variables = {"X"};
  ThresholdAtom pos;  // X >= 1
  pos.weights = {{"X", 1}};
  pos.bound = 1;
  pos.sense = ThresholdSense::Ge;
  AffinePiece piece = dec;
  piece.domain = PredicateExpr::atom(pos);
  f.pieces = {piece};

  for (long long x = 1; x <= 8; x++) {
    Verdict v = check_stably_computes(c.crc, f, {Count(x)});
    INFO("x = " << x);
    CHECK(v.kind == VerdictKind::Pass);
    CHECK(*v.expected_value == Count(x - 1));
  }
  // x = 0 is outside dom f: vacuous pass
  Verdict v = check_stably_computes(c.crc, f, {Count(0)});
  CHECK(v.kind == VerdictKind::Pass);
  CHECK(v.detail.find("vacuous") != std::string::npos);

  // wrong function: fail with a counterexample
  f.pieces[0].offsets_c["X"] = 0;  // now claims f(x) = x
  v = check_stably_computes(c.crc, f, {Count(4)});
  REQUIRE(v.kind == VerdictKind::Fail);
  Configuration x = c.crc.initial({Count(4)});
  for (int j : v.counterexample) x = apply(x, c.crc.crn.reactions()[j]);
  CHECK(is_terminal(c.crc.crn, x));
}

TEST_CASE("reduced exploration preserves the terminal set") {
  std::mt19937 gen(31);
  int compared = 0;
  std::uniform_int_distribution<int> count(0, 4);
  for (int trial = 0; trial < 400 && compared < 60; trial++) {
    Crn c = ebc_test::random_crn(gen);
    if (!is_bounded(find_potential(c))) continue;  // need finite exploration
    Configuration init(c.species_count());
    for (int s = 0; s < c.species_count(); s++) init.counts[s] = count(gen);
    ExploreLimits full, reduced;
    reduced.reduce = true;
    ExploreReport a = explore(c, init, full);
    ExploreReport b = explore(c, init, reduced);
    REQUIRE_FALSE(a.truncated);
    REQUIRE_FALSE(b.truncated);
    REQUIRE_FALSE(a.witness.has_value());
    REQUIRE_FALSE(b.witness.has_value());
    CHECK(sorted_terminals(c, a) == sorted_terminals(c, b));
    CHECK(b.reached_count() <= a.reached_count());
    compared++;
  }
  CHECK(compared >= 60);
}

TEST_CASE("reduced exploration matches verdicts on a composed computer") {
  // floor(x/2) as two affine pieces split by parity
  PiecewiseFn f;
  f.variables = {"X"};
  AffinePiece even, odd;
  even.domain = PredicateExpr::atom(ModAtom::make({{"X", 1}}, 0, 2));
  even.divisor_d = 2;
  even.numerators = {{"X", 1}};
  odd.domain = PredicateExpr::atom(ModAtom::make({{"X", 1}}, 1, 2));
  odd.divisor_d = 2;
  odd.numerators = {{"X", 1}};
  odd.offsets_c = {{"X", 1}};
  f.pieces = {even, odd};
  CompiledCrc c = compile_function(f);
  ExploreLimits reduced;
  reduced.reduce = true;
  // full exploration is only tractable for small inputs here (the state
  // space passes 10^6 configurations around x = 8)
  for (long long x = 0; x <= 6; x++) {
    Verdict full_v = check_stably_computes(c.crc, f, {Count(x)});
    Verdict red_v = check_stably_computes(c.crc, f, {Count(x)}, reduced);
    CHECK(full_v.kind == red_v.kind);
    CHECK(full_v.kind == VerdictKind::Pass);
  }
  for (long long x = 7; x <= 12; x++) {
    Verdict red_v = check_stably_computes(c.crc, f, {Count(x)}, reduced);
    CHECK(red_v.kind == VerdictKind::Pass);
  }
}

TEST_CASE("single-voting invariant scanner") {
  CompiledCrd maj = compile_threshold(
      [] {
        ThresholdAtom a;
        a.weights = {{"X1", 1}, {"X2", -1}};
        a.bound = 0;
        a.sense = ThresholdSense::Ge;
        return a;
      }(),
      {"X1", "X2"});
  ExploreReport rep = explore(maj.crd.crn, maj.crd.initial({Count(3), Count(3)}));
  CHECK(single_voting_violations(maj.crd, rep).empty());

  // a decider with a reaction that mints a second leader violates the
  // invariant (still execution bounded: the reaction consumes its input)
  Crd dup = maj.crd;
  dup.crn.add_reaction({{"X1", 1}}, {{"L_Y", 1}});
  ExploreReport bad = explore(dup.crn, dup.initial({Count(1), Count(0)}));
  REQUIRE_FALSE(bad.witness.has_value());
  CHECK_FALSE(single_voting_violations(dup, bad).empty());
}
