#pragma once

// Gillespie direct-method stochastic simulation and the stabilization-time
// benchmark harness.
//
// RNG scheme: xoshiro256** seeded through splitmix64. Per-trial streams
// are derived deterministically as
//     trial_seed = splitmix64(splitmix64(splitmix64(master) ^ n) ^ trial)
// so trials can run in any order (or in parallel) and still reproduce
// bit-identically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ebc/crn.hpp"

namespace ebc {

class UnsupportedOrder : public CrnError {
 public:
  explicit UnsupportedOrder(const std::string& w) : CrnError(w) {}
};

class StepLimit : public CrnError {
 public:
  explicit StepLimit(const std::string& w) : CrnError(w) {}
};

namespace rng {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// xoshiro256** 1.0 (Blackman & Vigna), seeded by splitmix64 expansion.
class Xoshiro256 {
 public:
  explicit Xoshiro256(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ull;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      w = z ^ (z >> 31);
    }
  }

  uint64_t next() {
    auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    uint64_t result = rotl(s_[1] * 5, 7) * 9;
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate; uses -log1p(-u) so u = 0 is safe.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  uint64_t s_[4];
};

inline uint64_t trial_seed(uint64_t master, uint64_t n, uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(master) ^ n) ^ trial);
}

}  // namespace rng

/// Stochastic mass-action propensity, volume-scaled for bimolecular
/// reactions. All rate constants are 1.
inline double propensity(const Configuration& config, const Reaction& rxn, double volume) {
  if (volume <= 0) throw CrnError("volume must be positive");
  Coef order = rxn.order();
  if (order == 0 || order > 2)
    throw UnsupportedOrder("simulation supports reactions with 1 or 2 reactants, got " +
                           std::to_string(order));
  if (!applicable(config, rxn)) return 0.0;
  if (order == 1) {
    SpeciesId s = rxn.reactants.begin()->first;
    return config.counts[s].convert_to<double>();
  }
  if (rxn.reactants.size() == 1) {  // X + X
    SpeciesId s = rxn.reactants.begin()->first;
    double c = config.counts[s].convert_to<double>();
    return 0.5 * c * (c - 1.0) / volume;
  }
  auto it = rxn.reactants.begin();
  double a = config.counts[it->first].convert_to<double>();
  ++it;
  double b = config.counts[it->first].convert_to<double>();
  return a * b / volume;
}

struct SimState {
  const Crn* crn = nullptr;
  Configuration config;
  double volume = 1.0;
  double time = 0.0;
  uint64_t steps = 0;
  rng::Xoshiro256 rng;

  SimState(const Crn& c, Configuration init, double v, uint64_t seed)
      : crn(&c), config(std::move(init)), volume(v), rng(seed) {
    if (volume <= 0) throw CrnError("volume must be positive");
    for (const Reaction& r : c.reactions())
      if (r.order() == 0 || r.order() > 2)
        throw UnsupportedOrder("reaction with " + std::to_string(r.order()) +
                               " reactants cannot be simulated");
  }
};

/// One direct-method step. Returns false (state untouched) when no
/// reaction is applicable.
inline bool step(SimState& st) {
  const auto& rxns = st.crn->reactions();
  std::vector<double> rho(rxns.size());
  double total = 0.0;
  for (std::size_t j = 0; j < rxns.size(); j++) {
    rho[j] = propensity(st.config, rxns[j], st.volume);
    total += rho[j];
  }
  if (total <= 0.0) return false;
  st.time += st.rng.exponential(total);
  double u = st.rng.uniform() * total;
  std::size_t pick = rxns.size() - 1;
  double acc = 0.0;
  for (std::size_t j = 0; j < rxns.size(); j++) {
    acc += rho[j];
    if (u < acc) {
      pick = j;
      break;
    }
  }
  st.config = apply(st.config, rxns[pick]);
  st.steps++;
  return true;
}

struct TrialRecord {
  uint64_t n = 0;
  uint64_t seed = 0;
  double stabilization_time = 0.0;
  uint64_t steps = 0;
  Configuration terminal;
};

inline TrialRecord run_to_terminal(const Crn& crn, const Configuration& init, double volume,
                                   uint64_t seed, uint64_t max_steps = 10'000'000) {
  SimState st(crn, init, volume, seed);
  while (step(st)) {
    if (st.steps >= max_steps && !is_terminal(crn, st.config))
      throw StepLimit("no terminal configuration after " + std::to_string(st.steps) +
                      " steps (CRN is likely not execution bounded from this configuration)");
  }
  TrialRecord rec;
  rec.seed = seed;
  rec.stabilization_time = st.time;
  rec.steps = st.steps;
  rec.terminal = st.config;
  return rec;
}

/// Maps a size n to an input vector for benchmarks.
enum class InputShape { AllFirst, Balanced };

inline std::vector<Count> shape_input(InputShape shape, std::size_t arity, uint64_t n) {
  std::vector<Count> x(arity, Count(0));
  if (arity == 0) return x;
  if (shape == InputShape::AllFirst) {
    x[0] = n;
  } else {
    for (std::size_t i = 0; i < arity; i++) x[i] = n / arity;
    x[0] += n % arity;
  }
  return x;
}

struct BenchRow {
  uint64_t n;
  uint64_t seed;
  double time;
  uint64_t steps;
};

struct BenchSummary {
  uint64_t n;
  double mean_time;
  double normalized;  // mean_time / (n ln n); NaN for n <= 1
};

struct BenchTable {
  std::vector<BenchRow> rows;          // sorted by (n, seed)
  std::vector<BenchSummary> summary;   // one per size
};

/// Runs `trials` seeded trials per size. The initial configuration is
/// context + shaped input; the volume is its total molecular count.
template <typename Artifact>  // Crd or Crc
BenchTable bench_stabilization(const Artifact& artifact, const std::vector<uint64_t>& sizes,
                               uint64_t trials, uint64_t master_seed,
                               InputShape shape = InputShape::AllFirst,
                               uint64_t max_steps = 100'000'000) {
  for (std::size_t i = 1; i < sizes.size(); i++)
    if (sizes[i] <= sizes[i - 1]) throw CrnError("sizes must be strictly ascending");
  BenchTable table;
  for (uint64_t n : sizes) {
    Configuration init = artifact.initial(shape_input(shape, artifact.inputs.size(), n));
    double volume = init.total().template convert_to<double>();
    if (volume <= 0) volume = 1.0;
    double sum = 0.0;
    for (uint64_t t = 0; t < trials; t++) {
      uint64_t seed = rng::trial_seed(master_seed, n, t);
      TrialRecord rec = run_to_terminal(artifact.crn, init, volume, seed, max_steps);
      table.rows.push_back({n, seed, rec.stabilization_time, rec.steps});
      sum += rec.stabilization_time;
    }
    if (trials > 0) {
      double mean = sum / double(trials);
      double nl = double(n) * std::log(double(n));
      table.summary.push_back({n, mean, n > 1 ? mean / nl : std::nan("")});
    }
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return a.n != b.n ? a.n < b.n : a.seed < b.seed;
  });
  return table;
}

inline std::string bench_csv(const BenchTable& table) {
  std::string out = "n,seed,time,steps\n";
  char buf[128];
  for (const BenchRow& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.17g,%llu\n", (unsigned long long)r.n,
                  (unsigned long long)r.seed, r.time, (unsigned long long)r.steps);
    out += buf;
  }
  return out;
}

}  // namespace ebc
