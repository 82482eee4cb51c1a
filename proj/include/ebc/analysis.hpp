#pragma once

// Entire-execution-boundedness analysis. A CRN is execution bounded from
// every configuration exactly when it admits a nonnegative linear potential
// function strictly decreased by every reaction; otherwise there is a
// semipositive integer reaction multiset u with M*u >= 0 (a repeatable
// loop). find_potential decides which case holds with exact rational
// arithmetic and returns a validated certificate either way.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ebc/crn.hpp"

namespace ebc {

using Rational = boost::multiprecision::cpp_rational;

/// Weights v >= 0 with M^T v <= -1 componentwise (integer form: every
/// reaction removes at least one unit of potential).
struct PotentialFunction {
  std::vector<Count> weights;  // indexed by species
};

/// Multiplicities u >= 0, u != 0, with M u >= 0 componentwise.
struct FarkasWitness {
  std::vector<Count> multiplicities;  // indexed by reaction
};

using BoundednessCertificate = std::variant<PotentialFunction, FarkasWitness>;

inline bool is_bounded(const BoundednessCertificate& c) {
  return std::holds_alternative<PotentialFunction>(c);
}

inline bool validate_potential(const Crn& crn, const PotentialFunction& pot) {
  if (pot.weights.size() != static_cast<std::size_t>(crn.species_count())) return false;
  for (auto& w : pot.weights)
    if (w < 0) return false;
  for (auto& r : crn.reactions()) {
    Count delta = 0;
    for (int s = 0; s < crn.species_count(); s++) {
      Coef net = r.net(s);
      if (net != 0) delta += Count(net) * pot.weights[s];
    }
    if (delta > -1) return false;
  }
  return true;
}

inline bool validate_farkas(const Crn& crn, const FarkasWitness& w) {
  if (w.multiplicities.size() != crn.reactions().size()) return false;
  bool nonzero = false;
  for (auto& u : w.multiplicities) {
    if (u < 0) return false;
    if (u > 0) nonzero = true;
  }
  if (!nonzero) return false;
  std::vector<Count> change = displacement(crn, w.multiplicities);
  for (auto& c : change)
    if (c < 0) return false;
  return true;
}

namespace detail {

// Dense exact-rational phase-1 simplex with Bland's rule. Decides
// feasibility of { A z = b, z >= 0 } for b >= 0 and exposes the primal
// basic solution on feasibility and the dual ray y = c_B B^-1 on
// infeasibility. Deterministic by construction.
class Phase1Simplex {
 public:
  // A is m x n, b is length m with b >= 0.
  Phase1Simplex(std::vector<std::vector<Rational>> a, std::vector<Rational> b)
      : m_(a.size()), n_(a.empty() ? 0 : a[0].size()), tab_(std::move(a)), rhs_(std::move(b)) {
    // append artificial identity columns; initial basis = artificials
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; i++) {
      for (std::size_t j = 0; j < m_; j++) tab_[i].push_back(i == j ? 1 : 0);
      basis_[i] = n_ + i;
    }
    // objective: minimize sum of artificials. Maintain reduced-cost row
    // z_j = c_j - y*A_j with y = c_B B^-1, plus objective value.
    red_.assign(n_ + m_, Rational(0));
    obj_ = 0;
    for (std::size_t j = 0; j < n_ + m_; j++) red_[j] = (j >= n_) ? 1 : 0;
    for (std::size_t i = 0; i < m_; i++) {
      // basic artificial i has cost 1: subtract row i from the cost row
      for (std::size_t j = 0; j < n_ + m_; j++) red_[j] -= tab_[i][j];
      obj_ += rhs_[i];
    }
  }

  // Runs to optimality. Returns true iff min sum(artificials) == 0.
  bool solve() {
    while (true) {
      // Bland: entering = lowest index with negative reduced cost
      std::size_t enter = n_ + m_;
      for (std::size_t j = 0; j < n_ + m_; j++) {
        if (red_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == n_ + m_) break;  // optimal
      // ratio test; Bland tie-break on lowest basis variable index
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; i++) {
        if (tab_[i][enter] > 0) {
          Rational ratio = rhs_[i] / tab_[i][enter];
          if (leave == m_ || ratio < best ||
              (ratio == best && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave == m_) break;  // unbounded below cannot happen (costs >= 0); stop defensively
      pivot(leave, enter);
    }
    return obj_ == 0;
  }

  // Primal values of the first n structural variables.
  std::vector<Rational> primal() const {
    std::vector<Rational> z(n_, Rational(0));
    for (std::size_t i = 0; i < m_; i++)
      if (basis_[i] < n_) z[basis_[i]] = rhs_[i];
    return z;
  }

  // Dual vector y = c_B B^-1, one entry per constraint row. At an
  // infeasible optimum it certifies infeasibility: y*A <= 0 on structural
  // columns, y*b > 0.
  std::vector<Rational> dual() const {
    std::vector<Rational> y(m_);
    for (std::size_t i = 0; i < m_; i++) y[i] = Rational(1) - red_[n_ + i];
    return y;
  }

 private:
  void pivot(std::size_t row, std::size_t col) {
    Rational p = tab_[row][col];
    for (auto& v : tab_[row]) v /= p;
    rhs_[row] /= p;
    for (std::size_t i = 0; i < m_; i++) {
      if (i == row) continue;
      Rational f = tab_[i][col];
      if (f == 0) continue;
      for (std::size_t j = 0; j < n_ + m_; j++) tab_[i][j] -= f * tab_[row][j];
      rhs_[i] -= f * rhs_[row];
    }
    Rational f = red_[col];
    if (f != 0) {
      for (std::size_t j = 0; j < n_ + m_; j++) red_[j] -= f * tab_[row][j];
      obj_ += f * rhs_[row];
    }
    basis_[row] = col;
  }

  std::size_t m_, n_;
  std::vector<std::vector<Rational>> tab_;
  std::vector<Rational> rhs_;
  std::vector<Rational> red_;
  Rational obj_;
  std::vector<std::size_t> basis_;
};

inline Count lcm_of_denominators(const std::vector<Rational>& v) {
  Count l = 1;
  for (auto& r : v) {
    Count d = boost::multiprecision::denominator(r);
    l = boost::multiprecision::lcm(l, d);
  }
  return l;
}

inline void divide_by_gcd(std::vector<Count>& v) {
  Count g = 0;
  for (auto& x : v) g = boost::multiprecision::gcd(g, x);
  if (g > 1)
    for (auto& x : v) x /= g;
}

}  // namespace detail

/// Decide entire execution boundedness. Total: always returns one
/// validated certificate arm.
///
/// Feasibility system: v >= 0, M^T v <= -1 per reaction. Rewritten for the
/// phase-1 tableau as (-M^T) v - s = 1, v, s >= 0. On infeasibility the
/// dual ray y satisfies y >= 0, M y >= 0, y != 0, which is exactly the
/// self-covering reaction multiset.
inline BoundednessCertificate find_potential(const Crn& crn) {
  const std::size_t m = crn.reactions().size();  // constraint rows
  const std::size_t n = crn.species_count();     // structural variables v
  StoichMatrix M = stoichiometric_matrix(crn);

  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(n + m, Rational(0)));
  std::vector<Rational> b(m, Rational(1));
  for (std::size_t i = 0; i < m; i++) {
    for (std::size_t j = 0; j < n; j++) a[i][j] = -M.at(static_cast<int>(j), static_cast<int>(i));
    a[i][n + i] = -1;  // slack column
  }
  detail::Phase1Simplex simplex(std::move(a), std::move(b));
  if (simplex.solve()) {
    std::vector<Rational> z = simplex.primal();
    std::vector<Rational> v(z.begin(), z.begin() + n);
    Count scale = detail::lcm_of_denominators(v);
    PotentialFunction pot;
    pot.weights.reserve(n);
    for (auto& r : v) {
      Rational scaled = r * scale;
      pot.weights.push_back(boost::multiprecision::numerator(scaled));
    }
    detail::divide_by_gcd(pot.weights);
    if (!validate_potential(crn, pot)) throw CrnError("internal error: potential failed validation");
    return pot;
  }
  std::vector<Rational> y = simplex.dual();
  Count scale = detail::lcm_of_denominators(y);
  FarkasWitness w;
  w.multiplicities.reserve(m);
  for (auto& r : y) {
    Rational scaled = r * scale;
    w.multiplicities.push_back(boost::multiprecision::numerator(scaled));
  }
  detail::divide_by_gcd(w.multiplicities);
  if (!validate_farkas(crn, w)) throw CrnError("internal error: Farkas witness failed validation");
  return w;
}

/// Phi(x): an upper bound on the length of every execution from x.
inline Count execution_length_bound(const Crn& crn, const PotentialFunction& pot,
                                    const Configuration& x) {
  if (!validate_potential(crn, pot)) throw CrnError("invalid potential function");
  Count phi = 0;
  for (int s = 0; s < crn.species_count(); s++) phi += pot.weights[s] * x.counts[s];
  return phi;
}

/// Reaction order r_1..r_n such that no reactant of r_k appears (as
/// reactant or product) in any later reaction. Greedy selection is
/// complete: removing a reaction only relaxes the constraint on the rest.
inline std::optional<std::vector<int>> reaction_feedforward_order(const Crn& crn) {
  const int m = static_cast<int>(crn.reactions().size());
  std::vector<bool> placed(m, false);
  std::vector<int> order;
  auto appears_in = [&](SpeciesId s, const Reaction& r) {
    return r.reactants.count(s) > 0 || r.products.count(s) > 0;
  };
  for (int step = 0; step < m; step++) {
    int pick = -1;
    for (int k = 0; k < m && pick < 0; k++) {
      if (placed[k]) continue;
      bool ok = true;
      for (auto& [s, c] : crn.reactions()[k].reactants) {
        for (int l = 0; l < m && ok; l++)
          if (l != k && !placed[l] && appears_in(s, crn.reactions()[l])) ok = false;
        if (!ok) break;
      }
      if (ok) pick = k;
    }
    if (pick < 0) return std::nullopt;
    placed[pick] = true;
    order.push_back(pick);
  }
  return order;
}

/// Species order S_1..S_n such that every reaction net-producing S_l
/// net-consumes some earlier S_k. Greedy prefix extension.
inline std::optional<std::vector<SpeciesId>> species_feedforward_order(const Crn& crn) {
  const int n = crn.species_count();
  std::vector<bool> placed(n, false);
  std::vector<SpeciesId> order;
  auto can_place = [&](SpeciesId s) {
    for (auto& r : crn.reactions()) {
      if (r.net(s) <= 0) continue;  // not a producer of s
      bool consumes_earlier = false;
      for (SpeciesId t = 0; t < n && !consumes_earlier; t++)
        if (placed[t] && r.net(t) < 0) consumes_earlier = true;
      if (!consumes_earlier) return false;
    }
    return true;
  };
  for (int step = 0; step < n; step++) {
    int pick = -1;
    for (SpeciesId s = 0; s < n && pick < 0; s++)
      if (!placed[s] && can_place(s)) pick = s;
    if (pick < 0) return std::nullopt;
    placed[pick] = true;
    order.push_back(pick);
  }
  return order;
}

/// Text form used by the CLI and golden files: one "name: value" line per
/// species or reaction index.
inline std::string certificate_to_text(const Crn& crn, const BoundednessCertificate& cert) {
  std::ostringstream os;
  if (auto* pot = std::get_if<PotentialFunction>(&cert)) {
    os << "bounded\n";
    for (int s = 0; s < crn.species_count(); s++)
      os << crn.name(s) << ": " << pot->weights[s].str() << "\n";
  } else {
    auto& w = std::get<FarkasWitness>(cert);
    os << "unbounded\n";
    for (std::size_t j = 0; j < w.multiplicities.size(); j++)
      os << "r" << (j + 1) << ": " << w.multiplicities[j].str() << "\n";
  }
  return os.str();
}

}  // namespace ebc
