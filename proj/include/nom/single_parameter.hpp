#pragma once

#include <nom/core.hpp>
#include <nom/labelling.hpp>

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace nom {

// Per-bid outcome menu S_ij with, for each attainable value, the
// lexicographically first opponent profile attaining it.
struct OutcomeMenu {
  int agent = 0;
  // menu[j]: sorted distinct (value, witness opponent rank) pairs for bid t_j.
  std::vector<std::vector<std::pair<Rat, long>>> menu;
};

// Non-decreasing values o_1 <= ... <= o_d with o_j drawn from S_ij, plus the
// witnessing opponent profile per bid.
struct MonotoneSelection {
  std::vector<Rat> values;
  std::vector<long> witnesses;
};

inline OutcomeMenu build_outcome_menu(const MechanismTable& m, int agent) {
  if (!m.domains[agent].single_parameter)
    throw InputError("outcome menus require a single-parameter agent");
  OutcomeMenu out;
  out.agent = agent;
  int d = m.domains[agent].size();
  long nopp = m.num_opponent_profiles(agent);
  out.menu.resize(d);
  for (int j = 0; j < d; ++j) {
    std::vector<std::pair<Rat, long>> entries;
    for (long o = 0; o < nopp; ++o) {
      Rat v = m.allocation[m.compose(agent, j, o)][agent];
      bool known = false;
      for (auto& e : entries)
        if (e.first == v) { known = true; break; }
      if (!known) entries.emplace_back(v, o);  // first o wins ties
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out.menu[j] = std::move(entries);
  }
  return out;
}

// Greedy least-feasible rule: o_1 = min S_i1, then the least menu value
// >= o_{j-1}. Failure proves no non-decreasing selection exists (if any
// selection works, the pointwise-least one does).
inline std::optional<MonotoneSelection> check_overlapping(const MechanismTable& m, int agent) {
  OutcomeMenu menu = build_outcome_menu(m, agent);
  MonotoneSelection sel;
  Rat prev;
  for (size_t j = 0; j < menu.menu.size(); ++j) {
    const auto* pick = static_cast<const std::pair<Rat, long>*>(nullptr);
    for (const auto& e : menu.menu[j])
      if (j == 0 || e.first >= prev) { pick = &e; break; }
    if (!pick) return std::nullopt;
    prev = pick->first;
    sel.values.push_back(pick->first);
    sel.witnesses.push_back(pick->second);
  }
  return sel;
}

// All rows identical: for every true type, bid t_k's extreme is designated at
// the selection's witness for t_k.
inline Labelling build_single_line_labelling(const MechanismTable& m, int agent,
                                             LabellingKind kind,
                                             const MonotoneSelection& sel) {
  int d = m.domains[agent].size();
  if (static_cast<int>(sel.values.size()) != d)
    throw InputError("selection length does not match domain");
  for (int j = 0; j < d; ++j) {
    Rat attained = m.allocation[m.compose(agent, j, sel.witnesses[j])][agent];
    if (attained != sel.values[j]) throw InputError("stale selection witness");
    if (j > 0 && sel.values[j] < sel.values[j - 1])
      throw InputError("selection is not non-decreasing");
  }
  Labelling lab;
  lab.agent = agent;
  lab.kind = kind;
  lab.entries.assign(d, sel.witnesses);
  return lab;
}

// Discrete analogue of p_i(t_j, lambda_j) = h - t_j f_i(t_j, lambda_j)
//   + integral_0^{t_j} f_i(u, lambda_u) du,
// with the integral replaced by left-constant steps anchored at 0
// (f taken as 0 below t_1). Returned as (profile rank, payment) per bid.
inline std::vector<std::pair<long, Rat>> explicit_line_payments(const MechanismTable& m,
                                                                int agent, const Labelling& lab,
                                                                const Rat& h) {
  if (!lab.single_line()) throw InputError("explicit payments need a single-line labelling");
  const auto& t = m.domains[agent].scalar_types;
  int d = static_cast<int>(t.size());
  std::vector<std::pair<long, Rat>> out;
  Rat integral = 0;
  for (int j = 0; j < d; ++j) {
    long line = m.compose(agent, j, lab.entries[0][j]);
    Rat level = m.allocation[line][agent];
    out.emplace_back(line, h - t[j] * level + integral);
    if (j + 1 < d) integral += level * (t[j + 1] - t[j]);
  }
  return out;
}

// IR+NPT default for h: zero for valuation agents; for cost agents (types are
// costs, core levels non-positive) the area under the cost curve, i.e. the
// largest prefix of the summed |level| steps.
inline Rat default_h(const MechanismTable& m, int agent, const Labelling& lab, bool cost_agent) {
  if (!cost_agent) return 0;
  const auto& t = m.domains[agent].scalar_types;
  Rat area = 0, best = 0;
  for (size_t j = 0; j + 1 < t.size(); ++j) {
    Rat level = m.allocation[m.compose(agent, j, lab.entries[0][j])][agent];
    area += -level * (t[j + 1] - t[j]);
    best = std::max(best, area);
  }
  return best;
}

// Off-line profiles within each island get the tightest payment satisfying
// the single-line labelling constraint for every true type: equality with the
// line utility when the allocation levels coincide, otherwise the extreme of
// t * (level_line - level_off) over the domain.
inline std::vector<Rat> fill_remaining_payments(const MechanismTable& m, int agent,
                                                const Labelling& lab,
                                                const std::vector<std::pair<long, Rat>>& line) {
  if (!lab.single_line()) throw InputError("fill-in needs a single-line labelling");
  const auto& t = m.domains[agent].scalar_types;
  int d = static_cast<int>(t.size());
  long nopp = m.num_opponent_profiles(agent);
  std::vector<Rat> p(m.num_profiles(), Rat(0));
  for (const auto& [rank, pay] : line) p[rank] = pay;
  for (int j = 0; j < d; ++j) {
    long line_rank = line[j].first;
    Rat line_level = m.allocation[line_rank][agent];
    for (long o = 0; o < nopp; ++o) {
      long r = m.compose(agent, j, o);
      if (r == line_rank) continue;
      Rat diff = line_level - m.allocation[r][agent];
      Rat bound = t[0] * diff;
      for (int k = 1; k < d; ++k) {
        Rat candidate = t[k] * diff;
        if (lab.kind == LabellingKind::Best ? candidate < bound : candidate > bound)
          bound = candidate;
      }
      p[r] = line[j].second + bound;
    }
  }
  return p;
}

// Corollary check: a BNOM and a WNOM single-line selection can be combined
// into a NOM mechanism iff their witnesses differ at every bid, except where
// the island is constant.
inline bool check_nom_combination(const MechanismTable& m, int agent,
                                  const MonotoneSelection& beta_sel,
                                  const MonotoneSelection& omega_sel) {
  int d = m.domains[agent].size();
  long nopp = m.num_opponent_profiles(agent);
  for (int j = 0; j < d; ++j) {
    if (beta_sel.witnesses[j] != omega_sel.witnesses[j]) continue;
    Rat first = m.allocation[m.compose(agent, j, 0)][agent];
    for (long o = 1; o < nopp; ++o)
      if (m.allocation[m.compose(agent, j, o)][agent] != first) return false;
  }
  return true;
}

struct SingleLineSynthesis {
  MonotoneSelection selection;
  Labelling labelling;
  std::vector<std::pair<long, Rat>> line_payments;
  std::vector<Rat> payments;  // full column for the agent
};

// End-to-end single-line pipeline for one agent. Returns nullopt when the
// allocation is not overlapping for the agent.
inline std::optional<SingleLineSynthesis> synthesize_single_line(
    const MechanismTable& m, int agent, LabellingKind kind, bool cost_agent = false,
    std::optional<Rat> h = std::nullopt) {
  auto sel = check_overlapping(m, agent);
  if (!sel) return std::nullopt;
  SingleLineSynthesis out;
  out.selection = *sel;
  out.labelling = build_single_line_labelling(m, agent, kind, *sel);
  Rat hv = h ? *h : default_h(m, agent, out.labelling, cost_agent);
  out.line_payments = explicit_line_payments(m, agent, out.labelling, hv);
  out.payments = fill_remaining_payments(m, agent, out.labelling, out.line_payments);
  return out;
}

}  // namespace nom
