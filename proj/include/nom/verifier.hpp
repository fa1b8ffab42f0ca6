#pragma once

#include <nom/core.hpp>

#include <optional>
#include <string>
#include <utility>

namespace nom {

enum class WitnessKind { BestCase, WorstCase, DominantStrategy };

inline const char* witness_kind_name(WitnessKind k) {
  switch (k) {
    case WitnessKind::BestCase: return "best-case";
    case WitnessKind::WorstCase: return "worst-case";
    default: return "dominant-strategy";
  }
}

// A strict improvement found by the brute-force checker. The attaining
// profiles are full profile ranks and can be re-checked through utility().
struct ManipulationWitness {
  int agent = 0;
  int true_type = 0;
  int misreport = 0;
  WitnessKind kind = WitnessKind::BestCase;
  Rat truthful_extreme;
  Rat dishonest_extreme;
  long truthful_profile = 0;   // rank attaining the truthful extreme
  long dishonest_profile = 0;  // rank attaining the dishonest extreme
};

struct Verdict {
  bool holds = true;
  std::optional<ManipulationWitness> witness;
  // IR/NPT violations are a plain profile, not a manipulation.
  std::optional<long> violating_profile;
  std::optional<int> violating_agent;

  explicit operator bool() const { return holds; }
};

namespace detail {

// Extreme (max when best=true) of agent's utility with the given true type
// over all opponent profiles at a fixed own bid; returns (value, arg rank)
// with the lexicographically first attaining opponent profile.
inline std::pair<Rat, long> extreme_utility(const MechanismTable& m, int agent, int true_type,
                                            int bid, bool best) {
  long n = m.num_opponent_profiles(agent);
  Rat ext;
  long arg = 0;
  for (long o = 0; o < n; ++o) {
    Rat u = m.utility(agent, true_type, m.compose(agent, bid, o));
    if (o == 0 || (best ? u > ext : u < ext)) {
      ext = u;
      arg = m.compose(agent, bid, o);
    }
  }
  return {ext, arg};
}

inline Verdict check_extreme_nom(const MechanismTable& m, bool best, int only_agent = -1) {
  for (int i = 0; i < m.num_agents(); ++i) {
    if (only_agent >= 0 && i != only_agent) continue;
    int d = m.domains[i].size();
    for (int t = 0; t < d; ++t) {
      auto [truthful, targ] = extreme_utility(m, i, t, t, best);
      for (int x = 0; x < d; ++x) {
        if (x == t) continue;
        auto [dishonest, darg] = extreme_utility(m, i, t, x, best);
        if (dishonest > truthful) {
          ManipulationWitness w;
          w.agent = i;
          w.true_type = t;
          w.misreport = x;
          w.kind = best ? WitnessKind::BestCase : WitnessKind::WorstCase;
          w.truthful_extreme = truthful;
          w.dishonest_extreme = dishonest;
          w.truthful_profile = targ;
          w.dishonest_profile = darg;
          return {false, w, std::nullopt, std::nullopt};
        }
      }
    }
  }
  return {};
}

}  // namespace detail

inline Verdict check_strategyproof(const MechanismTable& m) {
  for (int i = 0; i < m.num_agents(); ++i) {
    int d = m.domains[i].size();
    long nopp = m.num_opponent_profiles(i);
    for (int t = 0; t < d; ++t)
      for (int x = 0; x < d; ++x) {
        if (x == t) continue;
        for (long o = 0; o < nopp; ++o) {
          Rat ut = m.utility(i, t, m.compose(i, t, o));
          Rat ux = m.utility(i, t, m.compose(i, x, o));
          if (ux > ut) {
            ManipulationWitness w;
            w.agent = i;
            w.true_type = t;
            w.misreport = x;
            w.kind = WitnessKind::DominantStrategy;
            w.truthful_extreme = ut;
            w.dishonest_extreme = ux;
            w.truthful_profile = m.compose(i, t, o);
            w.dishonest_profile = m.compose(i, x, o);
            return {false, w, std::nullopt, std::nullopt};
          }
        }
      }
  }
  return {};
}

inline Verdict check_bnom(const MechanismTable& m) { return detail::check_extreme_nom(m, true); }
inline Verdict check_wnom(const MechanismTable& m) { return detail::check_extreme_nom(m, false); }

// Single-agent variants, for settings where only one agent's payments are
// under construction.
inline Verdict check_bnom_for(const MechanismTable& m, int agent) {
  return detail::check_extreme_nom(m, true, agent);
}
inline Verdict check_wnom_for(const MechanismTable& m, int agent) {
  return detail::check_extreme_nom(m, false, agent);
}

// Best-case side is checked first, so a NOM failure deterministically reports
// the BNOM witness when both sides fail.
inline Verdict check_nom(const MechanismTable& m) {
  Verdict b = check_bnom(m);
  if (!b.holds) return b;
  return check_wnom(m);
}

inline Verdict check_ir(const MechanismTable& m) {
  long p = m.num_profiles();
  for (long r = 0; r < p; ++r) {
    Profile x = m.profile_of(r);
    for (int i = 0; i < m.num_agents(); ++i)
      if (m.utility(i, x[i], r) < 0) return {false, std::nullopt, r, i};
  }
  return {};
}

inline Verdict check_npt(const MechanismTable& m) {
  long p = m.num_profiles();
  for (long r = 0; r < p; ++r)
    for (int i = 0; i < m.num_agents(); ++i)
      if (m.payment(i, r) > 0) return {false, std::nullopt, r, i};
  return {};
}

inline Verdict check_property(const MechanismTable& m, const std::string& name) {
  if (name == "sp") return check_strategyproof(m);
  if (name == "bnom") return check_bnom(m);
  if (name == "wnom") return check_wnom(m);
  if (name == "nom") return check_nom(m);
  if (name == "ir") return check_ir(m);
  if (name == "npt") return check_npt(m);
  throw InputError("unknown property: " + name);
}

// Re-verifies a witness against the table; used by tests and report emission.
inline bool reverify_witness(const MechanismTable& m, const ManipulationWitness& w) {
  Rat ut = m.utility(w.agent, w.true_type, w.truthful_profile);
  Rat ud = m.utility(w.agent, w.true_type, w.dishonest_profile);
  if (ut != w.truthful_extreme || ud != w.dishonest_extreme) return false;
  if (!(w.dishonest_extreme > w.truthful_extreme)) return false;
  if (w.kind == WitnessKind::DominantStrategy) return true;
  bool best = w.kind == WitnessKind::BestCase;
  auto tArm = detail::extreme_utility(m, w.agent, w.true_type, w.true_type, best);
  auto dArm = detail::extreme_utility(m, w.agent, w.true_type, w.misreport, best);
  return tArm.first == w.truthful_extreme && dArm.first == w.dishonest_extreme;
}

}  // namespace nom
