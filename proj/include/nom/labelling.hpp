#pragma once

#include <nom/core.hpp>
#include <nom/graph.hpp>

#include <optional>
#include <sstream>
#include <vector>

namespace nom {

enum class LabellingKind { Best, Worst };

// A d x d matrix of opponent-profile ranks for one agent. Row j is the true
// type, column k the report; entry (j,k) designates the opponent profile at
// which the extreme utility is attained when type t_j reports t_k.
struct Labelling {
  int agent = 0;
  LabellingKind kind = LabellingKind::Best;
  std::vector<std::vector<long>> entries;

  int d() const { return static_cast<int>(entries.size()); }

  bool single_line() const {
    for (int j = 1; j < d(); ++j)
      if (entries[j] != entries[0]) return false;
    return true;
  }
};

struct SideConstraintOptions {
  bool ir = false;
  bool npt = false;
  bool wbb = false;
  std::optional<Rat> alpha;  // only meaningful with wbb
};

namespace detail {

inline void check_labelling_dims(const MechanismTable& m, const Labelling& lab) {
  int d = m.domains[lab.agent].size();
  long nopp = m.num_opponent_profiles(lab.agent);
  if (lab.d() != d) throw InputError("labelling dimension does not match agent domain");
  for (const auto& row : lab.entries) {
    if (static_cast<int>(row.size()) != d)
      throw InputError("labelling row length does not match agent domain");
    for (long e : row)
      if (e < 0 || e >= nopp) throw InputError("labelling entry is not an opponent profile");
  }
}

inline std::string profile_name(const MechanismTable& m, long prank) {
  Profile x = m.profile_of(prank);
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace detail

// Builds G_{i,f}^lambda. Nodes are all profiles of D; labelling edges stay
// inside one island (nodes sharing agent i's bid), IC edges cross islands.
// Zero-weight self-loops arising from coinciding labels are dropped.
inline ConstraintGraph build_graph(const MechanismTable& m, const Labelling& lab) {
  detail::check_labelling_dims(m, lab);
  int i = lab.agent;
  int d = m.domains[i].size();
  long nopp = m.num_opponent_profiles(i);
  ConstraintGraph g(static_cast<int>(m.num_profiles()));
  g.node_names.resize(g.num_vars);
  for (int v = 0; v < g.num_vars; ++v) g.node_names[v] = detail::profile_name(m, v);

  auto weight = [&](int type_idx, long src, long dst) {
    return m.valuation(i, type_idx, src) - m.valuation(i, type_idx, dst);
  };

  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      long label = m.compose(i, k, lab.entries[j][k]);
      // Labelling constraints: the label attains the extreme over the whole
      // k-island for true type t_j.
      for (long o = 0; o < nopp; ++o) {
        long other = m.compose(i, k, o);
        if (other == label) continue;
        if (lab.kind == LabellingKind::Best)
          g.add_edge(static_cast<int>(label), static_cast<int>(other), weight(j, label, other),
                     EdgeKind::Labelling, j);
        else
          g.add_edge(static_cast<int>(other), static_cast<int>(label), weight(j, other, label),
                     EdgeKind::Labelling, j);
      }
      // IC constraints: truthful extreme beats the dishonest extreme.
      if (k != j) {
        long truthful = m.compose(i, j, lab.entries[j][j]);
        if (truthful != label)
          g.add_edge(static_cast<int>(truthful), static_cast<int>(label),
                     weight(j, truthful, label), EdgeKind::IncentiveCompatibility, j);
      }
    }
  return g;
}

// Encodes IR/NPT as difference constraints on the same payment variables.
// IR: p(x) >= -t_x(f(x)), an edge x -> gamma of weight t_x(f(x)).
// NPT: p(x) <= 0, an edge gamma -> x of weight 0.
// WBB couples two agents' payment variables and only applies to the joint
// trade graphs assembled by the bilateral-trade layer.
inline ConstraintGraph add_side_constraints(ConstraintGraph g, const MechanismTable& m, int agent,
                                            const SideConstraintOptions& opts) {
  if (opts.wbb)
    throw UnsupportedConstraintError(
        "wbb is a cross-agent constraint; use the bilateral-trade graph builder");
  if (opts.alpha && !opts.wbb)
    throw UnsupportedConstraintError("alpha requires wbb");
  long p = m.num_profiles();
  for (long r = 0; r < p; ++r) {
    if (opts.ir) {
      Profile x = m.profile_of(r);
      g.add_edge(static_cast<int>(r), g.source(), m.valuation(agent, x[agent], r), EdgeKind::Ir);
    }
    if (opts.npt) g.add_edge(g.source(), static_cast<int>(r), Rat(0), EdgeKind::Npt);
  }
  return g;
}

// 2p-cycle weight per the guaranteed cycle families. `types` is the chosen
// subset of type indices, in increasing order.
inline Rat guaranteed_cycle_weight(const MechanismTable& m, const Labelling& lab,
                                   const std::vector<int>& types) {
  detail::check_labelling_dims(m, lab);
  int i = lab.agent;
  int d = m.domains[i].size();
  int p = static_cast<int>(types.size());
  if (p < 2) throw InputError("guaranteed cycles need at least two types");
  for (int t : types)
    if (t < 0 || t >= d) throw InputError("type subset not within domain");
  auto val = [&](int type_idx, int bid, long orank) {
    return m.valuation(i, type_idx, m.compose(i, bid, orank));
  };
  Rat w = 0;
  for (int a = 0; a < p; ++a) {
    int cur = types[a];
    int nxt = types[(a + 1) % p];
    int prv = types[(a + p - 1) % p];
    if (lab.kind == LabellingKind::Best) {
      // (t_j, beta_jj) ->^{t_j} (t_{j+1}, beta_{(j+1)(j+1)})
      w += val(cur, cur, lab.entries[cur][cur]) - val(cur, nxt, lab.entries[nxt][nxt]);
    } else {
      // (t_j, omega_{(j-1)j}) ->^{t_j} (t_{j+1}, omega_{j(j+1)})
      w += val(cur, cur, lab.entries[prv][cur]) - val(cur, nxt, lab.entries[cur][nxt]);
    }
  }
  return w;
}

// Label monotonicity: non-negativity of the guaranteed 2-cycles, for
// single-parameter agents. Labellings failing this always induce a negative
// cycle, so they can be pruned from exhaustive search.
inline bool label_monotone(const MechanismTable& m, const Labelling& lab) {
  int i = lab.agent;
  const auto& t = m.domains[i].scalar_types;
  int d = static_cast<int>(t.size());
  auto level = [&](int bid, long orank) { return m.allocation[m.compose(i, bid, orank)][i]; };
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      if (lab.kind == LabellingKind::Best) {
        if (level(k, lab.entries[k][k]) < level(j, lab.entries[j][j])) return false;
      } else {
        if (level(k, lab.entries[j][k]) < level(j, lab.entries[k][j])) return false;
      }
    }
  // Island two-cycles: within each report column, the labelled levels must be
  // ordered with the rows (non-decreasing for beta, non-increasing for omega).
  for (int col = 0; col < d; ++col)
    for (int r1 = 0; r1 < d; ++r1)
      for (int r2 = r1 + 1; r2 < d; ++r2) {
        Rat lo = level(col, lab.entries[r1][col]);
        Rat hi = level(col, lab.entries[r2][col]);
        if (lab.kind == LabellingKind::Best ? hi < lo : hi > lo) return false;
      }
  return true;
}

// Exhaustive stream over all |D_{-i}|^(d^2) labellings in odometer order
// (row-major, last entry fastest). With prune, labellings violating label
// monotonicity are skipped.
class LabellingEnumerator {
 public:
  LabellingEnumerator(const MechanismTable& m, int agent, LabellingKind kind, bool prune,
                      long budget = 10'000'000)
      : m_(m), prune_(prune) {
    int d = m.domains[agent].size();
    nopp_ = m.num_opponent_profiles(agent);
    cells_ = d * d;
    double total = 1;
    for (int c = 0; c < cells_; ++c) total *= static_cast<double>(nopp_);
    if (total > static_cast<double>(budget))
      throw BudgetExceededError("labelling space of size " + std::to_string(total) +
                                " exceeds budget " + std::to_string(budget));
    cur_.agent = agent;
    cur_.kind = kind;
    cur_.entries.assign(d, std::vector<long>(d, 0));
  }

  std::optional<Labelling> next() {
    while (!done_) {
      Labelling out = cur_;
      advance();
      if (!prune_ || !m_.domains[out.agent].single_parameter || label_monotone(m_, out))
        return out;
    }
    return std::nullopt;
  }

 private:
  void advance() {
    int d = cur_.d();
    for (int c = cells_ - 1; c >= 0; --c) {
      long& e = cur_.entries[c / d][c % d];
      if (++e < nopp_) return;
      e = 0;
    }
    done_ = true;
  }

  const MechanismTable& m_;
  bool prune_;
  long nopp_ = 0;
  int cells_ = 0;
  bool done_ = false;
  Labelling cur_;
};

inline std::vector<Labelling> all_labellings(const MechanismTable& m, int agent,
                                             LabellingKind kind, bool prune,
                                             long budget = 10'000'000) {
  LabellingEnumerator en(m, agent, kind, prune, budget);
  std::vector<Labelling> out;
  while (auto l = en.next()) out.push_back(*l);
  return out;
}

// Extracts agent i's payment column from shortest paths and installs it into
// a copy of the table (other agents' payments default to zero).
inline std::vector<Rat> agent_payments_from_graph(const ConstraintGraph& g) {
  return payments_from_shortest_paths(g);
}

inline void install_payments(MechanismTable& m, int agent, const std::vector<Rat>& p) {
  if (!m.payments)
    m.payments.emplace(m.num_profiles(), std::vector<Rat>(m.num_agents(), Rat(0)));
  for (long r = 0; r < m.num_profiles(); ++r) (*m.payments)[r][agent] = p[r];
}

}  // namespace nom
