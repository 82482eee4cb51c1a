#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "ebc/crn.hpp"

using namespace ebc;

namespace {

Crn min_crn() {
  // X1 -> Y; X2 + Y -> 0; Y + X3 -> Z; Z + X2 -> X2 + X3 + Y
  Crn c;
  for (auto n : {"X1", "Y", "X2", "X3", "Z"}) c.add_species(n);
  c.add_reaction({{"X1", 1}}, {{"Y", 1}});
  c.add_reaction({{"X2", 1}, {"Y", 1}}, {});
  c.add_reaction({{"Y", 1}, {"X3", 1}}, {{"Z", 1}});
  c.add_reaction({{"Z", 1}, {"X2", 1}}, {{"X2", 1}, {"X3", 1}, {"Y", 1}});
  return c;
}

}  // namespace

TEST_CASE("reaction validation") {
  CHECK_THROWS_AS(Reaction({{0, 0}}, {{1, 1}}), CrnError);
  CHECK_THROWS_AS(Reaction({{0, -2}}, {{1, 1}}), CrnError);
  CHECK_THROWS_AS(Reaction({}, {}), CrnError);
  // no-op reactions are rejected
  CHECK_THROWS_AS(Reaction({{0, 1}, {1, 1}}, {{0, 1}, {1, 1}}), CrnError);
  // catalytic reactions are fine
  CHECK_NOTHROW(Reaction({{0, 1}, {1, 1}}, {{0, 1}, {2, 1}}));
}

TEST_CASE("reaction net and order") {
  Reaction r({{0, 3}, {1, 1}}, {{0, 1}, {2, 2}});
  CHECK(r.net(0) == -2);
  CHECK(r.net(1) == -1);
  CHECK(r.net(2) == 2);
  CHECK(r.net(7) == 0);
  CHECK(r.order() == 4);
  CHECK(r.reactant_count(0) == 3);
  CHECK(r.reactant_count(2) == 0);
}

TEST_CASE("species registration") {
  Crn c;
  SpeciesId a = c.add_species("A");
  CHECK(c.add_species("A") == a);  // idempotent
  CHECK(c.find_species("B") == -1);
  CHECK_THROWS_AS(c.species_or_throw("B"), CrnError);
  CHECK(c.name(a) == "A");
  CHECK_THROWS_AS(c.add_species(""), CrnError);
}

TEST_CASE("reactions must reference known species") {
  Crn c;
  c.add_species("A");
  CHECK_THROWS_AS(c.add_reaction(Reaction({{5, 1}}, {})), CrnError);
}

TEST_CASE("configuration construction and application") {
  Crn c = min_crn();
  Configuration x = Configuration::of(c, {{"X1", 2}, {"X2", 1}});
  CHECK(x.total() == 3);
  CHECK_FALSE(x.is_zero());
  CHECK(Configuration(c.species_count()).is_zero());
  CHECK_THROWS_AS(Configuration::of(c, {{"X1", -1}}), CrnError);
  CHECK_THROWS_AS(Configuration::of(c, {{"W", 1}}), CrnError);

  const Reaction& r0 = c.reactions()[0];  // X1 -> Y
  CHECK(applicable(x, r0));
  Configuration y = apply(x, r0);
  CHECK(y[c.species_or_throw("X1")] == 1);
  CHECK(y[c.species_or_throw("Y")] == 1);
  CHECK(y.total() == 3);

  const Reaction& r2 = c.reactions()[2];  // Y + X3 -> Z
  CHECK_FALSE(applicable(y, r2));
  CHECK_THROWS_AS(apply(y, r2), NotApplicable);
}

TEST_CASE("terminal detection") {
  Crn c = min_crn();
  CHECK(is_terminal(c, Configuration(c.species_count())));
  Configuration x = Configuration::of(c, {{"X2", 4}});
  CHECK(is_terminal(c, x));
  x = Configuration::of(c, {{"X1", 1}});
  CHECK_FALSE(is_terminal(c, x));
}

TEST_CASE("stoichiometric matrix") {
  // S1 -> S2 + 2 S3;  3 S2 + S3 -> S1 + S2 + S3
  Crn c;
  for (auto n : {"S1", "S2", "S3"}) c.add_species(n);
  c.add_reaction({{"S1", 1}}, {{"S2", 1}, {"S3", 2}});
  c.add_reaction({{"S2", 3}, {"S3", 1}}, {{"S1", 1}, {"S2", 1}, {"S3", 1}});
  StoichMatrix m = stoichiometric_matrix(c);
  REQUIRE(m.rows == 3);
  REQUIRE(m.cols == 2);
  CHECK(m.at(0, 0) == -1);
  CHECK(m.at(0, 1) == 1);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(1, 1) == -2);
  CHECK(m.at(2, 0) == 2);
  CHECK(m.at(2, 1) == 0);
}

TEST_CASE("displacement is linear in the multiset") {
  Crn c = min_crn();
  std::mt19937 gen(11);
  std::uniform_int_distribution<int> d(0, 5);
  for (int trial = 0; trial < 50; trial++) {
    std::vector<Count> u, w, sum;
    for (std::size_t j = 0; j < c.reactions().size(); j++) {
      u.push_back(d(gen));
      w.push_back(d(gen));
      sum.push_back(u.back() + w.back());
    }
    auto du = displacement(c, u), dw = displacement(c, w), ds = displacement(c, sum);
    for (int s = 0; s < c.species_count(); s++) CHECK(ds[s] == du[s] + dw[s]);
  }
  CHECK_THROWS_AS(displacement(c, std::vector<Count>{1, 2}), CrnError);
  CHECK_THROWS_AS(displacement(c, std::vector<Count>{1, -1, 0, 0}), CrnError);
}

TEST_CASE("decider validation and initial configurations") {
  Crd d;
  d.crn.add_species("X");
  d.crn.add_species("Y");
  d.crn.add_species("N");
  d.crn.add_reaction({{"Y", 1}, {"X", 1}}, {{"N", 1}});
  d.crn.add_reaction({{"N", 1}, {"X", 1}}, {{"Y", 1}});
  d.inputs = {d.crn.species_or_throw("X")};
  d.yes_voters = {d.crn.species_or_throw("Y")};
  d.no_voters = {d.crn.species_or_throw("N")};
  d.context = Configuration(3);
  d.context.counts[d.crn.species_or_throw("Y")] = 1;
  CHECK_NOTHROW(d.validate());

  Configuration init = d.initial({Count(4)});
  CHECK(init[d.crn.species_or_throw("X")] == 4);
  CHECK(init[d.crn.species_or_throw("Y")] == 1);
  CHECK_THROWS_AS(d.initial({Count(1), Count(2)}), CrnError);
  CHECK_THROWS_AS(d.initial({Count(-1)}), CrnError);

  Crd bad = d;
  bad.no_voters.insert(d.crn.species_or_throw("Y"));
  CHECK_THROWS_AS(bad.validate(), CrnError);
  bad = d;
  bad.context.counts[d.crn.species_or_throw("X")] = 1;
  CHECK_THROWS_AS(bad.validate(), CrnError);
}

TEST_CASE("global output") {
  Crd d;
  d.crn.add_species("X");
  d.crn.add_species("Y");
  d.crn.add_species("N");
  d.yes_voters = {1};
  d.no_voters = {2};
  d.context = Configuration(3);

  Configuration c(3);
  CHECK(global_output(d, c) == Output::Undefined);  // all-zero
  c.counts[1] = 1;
  CHECK(global_output(d, c) == Output::Yes);
  c.counts[2] = 1;
  CHECK(global_output(d, c) == Output::Undefined);  // mixed votes
  c.counts[1] = 0;
  CHECK(global_output(d, c) == Output::No);
  c.counts[2] = 0;
  c.counts[0] = 5;
  CHECK(global_output(d, c) == Output::Undefined);  // no voter present
}

TEST_CASE("computer validation") {
  Crc f;
  f.crn.add_species("X");
  f.crn.add_species("Y");
  f.crn.add_reaction({{"X", 1}}, {{"Y", 1}});
  f.inputs = {0};
  f.output = 1;
  f.context = Configuration(2);
  CHECK_NOTHROW(f.validate());
  Crc bad = f;
  bad.output = 0;  // output is an input
  CHECK_THROWS_AS(bad.validate(), CrnError);
  bad = f;
  bad.output = -1;
  CHECK_THROWS_AS(bad.validate(), CrnError);
}
