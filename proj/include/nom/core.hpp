#pragma once

#include <nom/rational.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nom {

// A type is either a single rational scalar (single-parameter agents) or a
// total valuation vector over the outcome set (general agents).
struct AgentDomain {
  std::string name;
  bool single_parameter = true;
  std::vector<Rat> scalar_types;                 // strictly increasing when single_parameter
  std::vector<std::vector<Rat>> valuations;      // [type][outcome] otherwise

  int size() const {
    return single_parameter ? static_cast<int>(scalar_types.size())
                            : static_cast<int>(valuations.size());
  }
};

// A profile is one type index per agent; profiles are enumerated
// lexicographically with agent 0 as the most significant digit.
using Profile = std::vector<int>;

class MechanismTable {
 public:
  std::vector<AgentDomain> domains;
  std::vector<std::string> outcomes;  // outcome identifiers for general agents

  // allocation[prank][agent]: the level f_i(x) for single-parameter agents, or
  // an outcome index (integral rational) for general agents.
  std::vector<std::vector<Rat>> allocation;
  std::optional<std::vector<std::vector<Rat>>> payments;  // added to utility

  int num_agents() const { return static_cast<int>(domains.size()); }

  long num_profiles() const {
    long p = 1;
    for (const auto& d : domains) p *= d.size();
    return p;
  }

  long rank_of(const Profile& x) const {
    long r = 0;
    for (int i = 0; i < num_agents(); ++i) r = r * domains[i].size() + x[i];
    return r;
  }

  Profile profile_of(long rank) const {
    Profile x(num_agents());
    for (int i = num_agents() - 1; i >= 0; --i) {
      x[i] = static_cast<int>(rank % domains[i].size());
      rank /= domains[i].size();
    }
    return x;
  }

  long num_opponent_profiles(int agent) const {
    long p = 1;
    for (int i = 0; i < num_agents(); ++i)
      if (i != agent) p *= domains[i].size();
    return p;
  }

  // Opponent profiles are ranked lexicographically over the agents != agent,
  // in increasing agent order.
  std::vector<int> opponent_profile_of(int agent, long orank) const {
    std::vector<int> o(num_agents() - 1);
    for (int k = num_agents() - 2, i = num_agents() - 1; i >= 0; --i) {
      if (i == agent) continue;
      o[k--] = static_cast<int>(orank % domains[i].size());
      orank /= domains[i].size();
    }
    return o;
  }

  // Rank of the full profile where `agent` bids `bid` and the others bid
  // according to the opponent profile of rank `orank`.
  long compose(int agent, int bid, long orank) const {
    auto o = opponent_profile_of(agent, orank);
    long r = 0;
    for (int i = 0, k = 0; i < num_agents(); ++i) {
      int b = (i == agent) ? bid : o[k++];
      r = r * domains[i].size() + b;
    }
    return r;
  }

  // t_i(f(x)) for true type index `type_idx` of `agent` at profile rank.
  Rat valuation(int agent, int type_idx, long prank) const {
    const AgentDomain& d = domains[agent];
    if (d.single_parameter) return d.scalar_types[type_idx] * allocation[prank][agent];
    long out = static_cast<long>(numerator(allocation[prank][agent]));
    return d.valuations[type_idx][out];
  }

  Rat payment(int agent, long prank) const {
    if (!payments) throw PaymentsRequiredError("mechanism has no payment table");
    return (*payments)[prank][agent];
  }

  // Quasi-linear utility t_i(f(x)) + p_i(x).
  Rat utility(int agent, int type_idx, long prank) const {
    return valuation(agent, type_idx, prank) + payment(agent, prank);
  }

  Rat utility(int agent, int type_idx, const Profile& x) const {
    if (agent < 0 || agent >= num_agents()) throw InputError("agent index out of range");
    if (type_idx < 0 || type_idx >= domains[agent].size())
      throw InputError("type index out of range");
    return utility(agent, type_idx, rank_of(x));
  }

  void validate() const {
    if (domains.empty()) throw InputError("mechanism needs at least one agent");
    for (const auto& d : domains) {
      if (d.size() == 0) throw InputError("empty domain for agent " + d.name);
      if (d.single_parameter) {
        for (size_t j = 1; j < d.scalar_types.size(); ++j)
          if (!(d.scalar_types[j - 1] < d.scalar_types[j]))
            throw InputError("single-parameter types must be strictly increasing");
      } else {
        std::set<std::vector<Rat>> seen;
        for (const auto& v : d.valuations) {
          if (v.size() != outcomes.size())
            throw InputError("valuation vector length must match outcome set");
          if (!seen.insert(v).second) throw InputError("duplicate type in domain");
        }
      }
    }
    long p = num_profiles();
    if (static_cast<long>(allocation.size()) != p)
      throw InputError("allocation table must cover every profile");
    for (const auto& row : allocation)
      if (static_cast<int>(row.size()) != num_agents())
        throw InputError("allocation row must have one entry per agent");
    if (payments) {
      if (static_cast<long>(payments->size()) != p)
        throw InputError("payment table must cover every profile");
      for (const auto& row : *payments)
        if (static_cast<int>(row.size()) != num_agents())
          throw InputError("payment row must have one entry per agent");
    }
    for (int i = 0; i < num_agents(); ++i) {
      if (domains[i].single_parameter) continue;
      for (long r = 0; r < p; ++r) {
        const Rat& c = allocation[r][i];
        if (denominator(c) != 1 || c < 0 || c >= static_cast<long>(outcomes.size()))
          throw InputError("allocation for general agent must be an outcome index");
      }
    }
  }
};

// Exhaustive, duplicate-free, deterministic enumeration of D_{-i}.
inline std::vector<std::vector<int>> enumerate_opponent_profiles(const MechanismTable& m,
                                                                 int agent) {
  if (agent < 0 || agent >= m.num_agents()) throw InputError("agent index out of range");
  std::vector<std::vector<int>> out;
  long n = m.num_opponent_profiles(agent);
  out.reserve(n);
  for (long o = 0; o < n; ++o) out.push_back(m.opponent_profile_of(agent, o));
  return out;
}

}  // namespace nom
