#pragma once

// Seeded random CRNs for property tests: up to 4 species and 4 reactions
// with stoichiometric entries in {0, 1, 2}.

#include <random>

#include "ebc/crn.hpp"

namespace ebc_test {

inline ebc::Crn random_crn(std::mt19937& gen) {
  std::uniform_int_distribution<int> nspecies(1, 4), nreactions(1, 4), entry(0, 2);
  ebc::Crn crn;
  int n = nspecies(gen);
  for (int s = 0; s < n; s++) crn.add_species(std::string(1, char('A' + s)));
  int m = nreactions(gen);
  for (int j = 0; j < m; j++) {
    while (true) {
      ebc::Multiset r, p;
      for (int s = 0; s < n; s++) {
        int a = entry(gen), b = entry(gen);
        if (a) r[s] = a;
        if (b) p[s] = b;
      }
      if ((r.empty() && p.empty()) || r == p) continue;  // rejected by Reaction anyway
      crn.add_reaction(ebc::Reaction(std::move(r), std::move(p)));
      break;
    }
  }
  return crn;
}

}  // namespace ebc_test
