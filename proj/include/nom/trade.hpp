#pragma once

#include <nom/core.hpp>
#include <nom/labelling.hpp>
#include <nom/single_parameter.hpp>
#include <nom/verifier.hpp>

#include <algorithm>
#include <optional>
#include <vector>

namespace nom {

// One buyer (bids x, values the item) and one seller (asks y, incurs a
// production cost). Payments use the trade-side sign convention: the buyer
// pays p_B, the seller receives p_S, both non-negative.
struct TradeMechanism {
  std::vector<Rat> buyer_domain;   // strictly increasing
  std::vector<Rat> seller_domain;  // strictly increasing
  std::vector<std::vector<int>> trade;       // [buyer bid][seller ask] in {0,1}
  std::vector<std::vector<Rat>> pay_buyer;   // p_B
  std::vector<std::vector<Rat>> pay_seller;  // p_S

  int nb() const { return static_cast<int>(buyer_domain.size()); }
  int ns() const { return static_cast<int>(seller_domain.size()); }

  Rat buyer_utility(const Rat& v, int bx, int sy) const {
    return v * trade[bx][sy] - pay_buyer[bx][sy];
  }
  Rat seller_utility(const Rat& u, int bx, int sy) const {
    return pay_seller[bx][sy] - u * trade[bx][sy];
  }
};

enum class TradeSide { Buyer, Seller };

struct UtilityInterval {
  Rat low;
  Rat high;
};

namespace detail {

inline void check_trade_domain(const std::vector<Rat>& d, const char* who) {
  if (d.empty()) throw InputError(std::string(who) + " domain must be non-empty");
  for (size_t i = 1; i < d.size(); ++i)
    if (!(d[i - 1] < d[i]))
      throw InputError(std::string(who) + " domain must be strictly increasing");
}

inline TradeMechanism make_trade_base(std::vector<Rat> buyer, std::vector<Rat> seller) {
  check_trade_domain(buyer, "buyer");
  check_trade_domain(seller, "seller");
  TradeMechanism m;
  m.buyer_domain = std::move(buyer);
  m.seller_domain = std::move(seller);
  m.trade.assign(m.nb(), std::vector<int>(m.ns(), 0));
  m.pay_buyer.assign(m.nb(), std::vector<Rat>(m.ns(), Rat(0)));
  m.pay_seller.assign(m.nb(), std::vector<Rat>(m.ns(), Rat(0)));
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y)
      m.trade[x][y] = m.buyer_domain[x] >= m.seller_domain[y] ? 1 : 0;
  return m;
}

}  // namespace detail

// Trade at the bids: buyer pays her bid, seller receives her ask.
inline TradeMechanism make_first_price(std::vector<Rat> buyer, std::vector<Rat> seller) {
  TradeMechanism m = detail::make_trade_base(std::move(buyer), std::move(seller));
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y)
      if (m.trade[x][y]) {
        m.pay_buyer[x][y] = m.buyer_domain[x];
        m.pay_seller[x][y] = m.seller_domain[y];
      }
  return m;
}

// Trade at the midpoint price (x+y)/2 on both sides.
inline TradeMechanism make_double_auction(std::vector<Rat> buyer, std::vector<Rat> seller) {
  TradeMechanism m = detail::make_trade_base(std::move(buyer), std::move(seller));
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y)
      if (m.trade[x][y]) {
        Rat mid = (m.buyer_domain[x] + m.seller_domain[y]) / 2;
        m.pay_buyer[x][y] = mid;
        m.pay_seller[x][y] = mid;
      }
  return m;
}

// The sp_side faces the opposite side's bid (second-price flavour); the other
// side pays/receives its own bid (first-price flavour).
inline TradeMechanism make_hybrid(std::vector<Rat> buyer, std::vector<Rat> seller,
                                  TradeSide sp_side) {
  TradeMechanism m = detail::make_trade_base(std::move(buyer), std::move(seller));
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y)
      if (m.trade[x][y]) {
        if (sp_side == TradeSide::Buyer) {
          m.pay_buyer[x][y] = m.seller_domain[y];
          m.pay_seller[x][y] = m.seller_domain[y];
        } else {
          m.pay_buyer[x][y] = m.buyer_domain[x];
          m.pay_seller[x][y] = m.buyer_domain[x];
        }
      }
  return m;
}

// Core-model view: buyer is a plain valuation agent (level = trade flag,
// payment added is -p_B); the seller's level is the negated trade flag so her
// cost enters the quasi-linear utility with the right sign (payment +p_S).
inline MechanismTable to_mechanism_table(const TradeMechanism& m) {
  MechanismTable t;
  t.domains.resize(2);
  t.domains[0].name = "buyer";
  t.domains[0].scalar_types = m.buyer_domain;
  t.domains[1].name = "seller";
  t.domains[1].scalar_types = m.seller_domain;
  long p = static_cast<long>(m.nb()) * m.ns();
  t.allocation.assign(p, std::vector<Rat>(2));
  t.payments.emplace(p, std::vector<Rat>(2));
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y) {
      long r = static_cast<long>(x) * m.ns() + y;
      t.allocation[r][0] = m.trade[x][y];
      t.allocation[r][1] = -Rat(m.trade[x][y]);
      (*t.payments)[r][0] = -m.pay_buyer[x][y];
      (*t.payments)[r][1] = m.pay_seller[x][y];
    }
  t.validate();
  return t;
}

// Round trip back to trade conventions (used by the CLI and property tests).
inline TradeMechanism from_mechanism_table(const MechanismTable& t) {
  if (t.num_agents() != 2 || !t.payments) throw InputError("not a trade table");
  TradeMechanism m;
  m.buyer_domain = t.domains[0].scalar_types;
  m.seller_domain = t.domains[1].scalar_types;
  m.trade.assign(m.nb(), std::vector<int>(m.ns(), 0));
  m.pay_buyer.assign(m.nb(), std::vector<Rat>(m.ns(), Rat(0)));
  m.pay_seller.assign(m.nb(), std::vector<Rat>(m.ns(), Rat(0)));
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y) {
      long r = static_cast<long>(x) * m.ns() + y;
      m.trade[x][y] = t.allocation[r][0] == 1 ? 1 : 0;
      m.pay_buyer[x][y] = -(*t.payments)[r][0];
      m.pay_seller[x][y] = (*t.payments)[r][1];
    }
  return m;
}

inline bool check_efficiency(const TradeMechanism& m) {
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y)
      if ((m.trade[x][y] == 1) != (m.buyer_domain[x] >= m.seller_domain[y])) return false;
  return true;
}

inline bool check_wbb(const TradeMechanism& m) {
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y)
      if (m.pay_seller[x][y] > m.pay_buyer[x][y]) return false;
  return true;
}

// Least alpha >= 1 with p_S <= alpha * p_B everywhere; nullopt means no
// finite alpha works (p_S > 0 at a profile where p_B = 0).
inline std::optional<Rat> min_alpha(const TradeMechanism& m) {
  Rat best = 1;
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y) {
      const Rat& ps = m.pay_seller[x][y];
      const Rat& pb = m.pay_buyer[x][y];
      if (ps == 0) continue;
      if (pb == 0) return std::nullopt;
      best = std::max(best, Rat(ps / pb));
    }
  return best;
}

inline UtilityInterval utility_interval(const TradeMechanism& m, TradeSide side,
                                        const Rat& true_type, int bid) {
  UtilityInterval iv{};
  bool first = true;
  int n = side == TradeSide::Buyer ? m.ns() : m.nb();
  for (int o = 0; o < n; ++o) {
    Rat u = side == TradeSide::Buyer ? m.buyer_utility(true_type, bid, o)
                                     : m.seller_utility(true_type, o, bid);
    if (first || u < iv.low) iv.low = u;
    if (first || u > iv.high) iv.high = u;
    first = false;
  }
  return iv;
}

// NOM restated as componentwise dominance of truthful utility intervals.
inline bool interval_nom(const TradeMechanism& m) {
  for (int v = 0; v < m.nb(); ++v)
    for (int x = 0; x < m.nb(); ++x) {
      UtilityInterval truthful = utility_interval(m, TradeSide::Buyer, m.buyer_domain[v], v);
      UtilityInterval other = utility_interval(m, TradeSide::Buyer, m.buyer_domain[v], x);
      if (other.low > truthful.low || other.high > truthful.high) return false;
    }
  for (int u = 0; u < m.ns(); ++u)
    for (int y = 0; y < m.ns(); ++y) {
      UtilityInterval truthful = utility_interval(m, TradeSide::Seller, m.seller_domain[u], u);
      UtilityInterval other = utility_interval(m, TradeSide::Seller, m.seller_domain[u], y);
      if (other.low > truthful.low || other.high > truthful.high) return false;
    }
  return true;
}

enum class TradeRegion { Never, Mixed, Always };  // M_0, M_01, M_1

struct ThresholdTuple {
  std::optional<Rat> p_b_min, p_b_max, p_s_min, p_s_max;
  std::vector<TradeRegion> buyer_regions;
  std::vector<TradeRegion> seller_regions;
};

namespace detail {

inline std::vector<TradeRegion> buyer_regions(const TradeMechanism& m) {
  std::vector<TradeRegion> out(m.nb());
  for (int x = 0; x < m.nb(); ++x) {
    int cnt = 0;
    for (int y = 0; y < m.ns(); ++y) cnt += m.trade[x][y];
    out[x] = cnt == 0 ? TradeRegion::Never
                      : (cnt == m.ns() ? TradeRegion::Always : TradeRegion::Mixed);
  }
  return out;
}

inline std::vector<TradeRegion> seller_regions(const TradeMechanism& m) {
  std::vector<TradeRegion> out(m.ns());
  for (int y = 0; y < m.ns(); ++y) {
    int cnt = 0;
    for (int x = 0; x < m.nb(); ++x) cnt += m.trade[x][y];
    out[y] = cnt == 0 ? TradeRegion::Never
                      : (cnt == m.nb() ? TradeRegion::Always : TradeRegion::Mixed);
  }
  return out;
}

}  // namespace detail

struct CharacterizationReport {
  ThresholdTuple tuple;   // canonical candidates, meaningful when all points hold
  bool point[5] = {true, true, true, true, true};

  bool all() const {
    for (bool b : point)
      if (!b) return false;
    return true;
  }
};

// Verifies the five-point threshold characterisation of IR, WBB, NOM trade
// mechanisms against the canonical threshold candidates. Clauses whose
// threshold does not exist (empty region) are vacuously true.
inline CharacterizationReport characterize_report(const TradeMechanism& m) {
  CharacterizationReport rep;
  ThresholdTuple& t = rep.tuple;
  t.buyer_regions = detail::buyer_regions(m);
  t.seller_regions = detail::seller_regions(m);

  // Point 1: zero prices off trade; on trade IR on both sides and WBB.
  for (int x = 0; x < m.nb(); ++x)
    for (int y = 0; y < m.ns(); ++y) {
      const Rat& pb = m.pay_buyer[x][y];
      const Rat& ps = m.pay_seller[x][y];
      if (!m.trade[x][y]) {
        if (pb != 0 || ps != 0) rep.point[0] = false;
      } else {
        if (pb < 0 || ps < 0 || ps > pb) rep.point[0] = false;
        if (pb > m.buyer_domain[x] || ps < m.seller_domain[y]) rep.point[0] = false;
      }
    }

  // Canonical threshold candidates, per the characterisation proof: the
  // buyer's minimum trade price over bids that can trade, her maximum over
  // bids that always trade; mirrored for the seller.
  for (int x = 0; x < m.nb(); ++x) {
    if (t.buyer_regions[x] == TradeRegion::Never) continue;
    for (int y = 0; y < m.ns(); ++y)
      if (m.trade[x][y]) {
        if (!t.p_b_min || m.pay_buyer[x][y] < *t.p_b_min) t.p_b_min = m.pay_buyer[x][y];
        if (t.buyer_regions[x] == TradeRegion::Always)
          if (!t.p_b_max || m.pay_buyer[x][y] > *t.p_b_max) t.p_b_max = m.pay_buyer[x][y];
      }
  }
  for (int y = 0; y < m.ns(); ++y) {
    if (t.seller_regions[y] == TradeRegion::Never) continue;
    for (int x = 0; x < m.nb(); ++x)
      if (m.trade[x][y]) {
        if (!t.p_s_max || m.pay_seller[x][y] > *t.p_s_max) t.p_s_max = m.pay_seller[x][y];
        if (t.seller_regions[y] == TradeRegion::Always)
          if (!t.p_s_min || m.pay_seller[x][y] < *t.p_s_min) t.p_s_min = m.pay_seller[x][y];
      }
  }

  // Points 3 and 5: per-bid extreme trade prices hit the shared thresholds.
  for (int x = 0; x < m.nb(); ++x) {
    if (t.buyer_regions[x] == TradeRegion::Never) continue;
    std::optional<Rat> lo, hi;
    for (int y = 0; y < m.ns(); ++y)
      if (m.trade[x][y]) {
        if (!lo || m.pay_buyer[x][y] < *lo) lo = m.pay_buyer[x][y];
        if (!hi || m.pay_buyer[x][y] > *hi) hi = m.pay_buyer[x][y];
      }
    if (*lo != *t.p_b_min) rep.point[2] = false;
    if (t.buyer_regions[x] == TradeRegion::Always && *hi != *t.p_b_max) rep.point[2] = false;
  }
  for (int y = 0; y < m.ns(); ++y) {
    if (t.seller_regions[y] == TradeRegion::Never) continue;
    std::optional<Rat> lo, hi;
    for (int x = 0; x < m.nb(); ++x)
      if (m.trade[x][y]) {
        if (!lo || m.pay_seller[x][y] < *lo) lo = m.pay_seller[x][y];
        if (!hi || m.pay_seller[x][y] > *hi) hi = m.pay_seller[x][y];
      }
    if (*hi != *t.p_s_max) rep.point[4] = false;
    if (t.seller_regions[y] == TradeRegion::Always && *lo != *t.p_s_min) rep.point[4] = false;
  }

  // Points 2 and 4: the thresholds separate the regions. Each region must sit
  // inside its closed threshold interval (never-trade buyers at or below
  // p_B_min, mixed buyers between the thresholds, always-trade buyers at or
  // above p_B_max), so a type equal to a threshold may fall in either
  // adjacent region. A missing threshold leaves its side unconstrained.
  if (t.p_b_min && t.p_b_max && *t.p_b_min > *t.p_b_max) rep.point[1] = false;
  for (int x = 0; x < m.nb(); ++x) {
    const Rat& v = m.buyer_domain[x];
    switch (t.buyer_regions[x]) {
      case TradeRegion::Never:
        if (t.p_b_min && v > *t.p_b_min) rep.point[1] = false;
        break;
      case TradeRegion::Mixed:
        if (t.p_b_min && v < *t.p_b_min) rep.point[1] = false;
        if (t.p_b_max && v > *t.p_b_max) rep.point[1] = false;
        break;
      case TradeRegion::Always:
        if (t.p_b_max && v < *t.p_b_max) rep.point[1] = false;
        break;
    }
  }
  if (t.p_s_min && t.p_s_max && *t.p_s_min > *t.p_s_max) rep.point[3] = false;
  for (int y = 0; y < m.ns(); ++y) {
    const Rat& u = m.seller_domain[y];
    switch (t.seller_regions[y]) {
      case TradeRegion::Never:
        if (t.p_s_max && u < *t.p_s_max) rep.point[3] = false;
        break;
      case TradeRegion::Mixed:
        if (t.p_s_max && u > *t.p_s_max) rep.point[3] = false;
        if (t.p_s_min && u < *t.p_s_min) rep.point[3] = false;
        break;
      case TradeRegion::Always:
        if (t.p_s_min && u > *t.p_s_min) rep.point[3] = false;
        break;
    }
  }
  return rep;
}

inline std::optional<ThresholdTuple> characterize(const TradeMechanism& m) {
  CharacterizationReport rep = characterize_report(m);
  if (!rep.all()) return std::nullopt;
  return rep.tuple;
}

struct TradeSynthesis {
  TradeMechanism mechanism;
  SingleLineSynthesis buyer;
  SingleLineSynthesis seller;
};

// Single-line synthesis for the efficient trade function on the given grids:
// the buyer is a valuation agent (h = 0), the seller a cost agent
// (h = area under her labelled curve).
inline std::optional<TradeSynthesis> synthesize_single_line_trade(std::vector<Rat> buyer,
                                                                  std::vector<Rat> seller,
                                                                  LabellingKind kind) {
  TradeMechanism base = detail::make_trade_base(std::move(buyer), std::move(seller));
  MechanismTable t = to_mechanism_table(base);
  t.payments.reset();
  auto b = synthesize_single_line(t, 0, kind, /*cost_agent=*/false);
  auto s = synthesize_single_line(t, 1, kind, /*cost_agent=*/true);
  if (!b || !s) return std::nullopt;
  TradeSynthesis out{std::move(base), std::move(*b), std::move(*s)};
  for (int x = 0; x < out.mechanism.nb(); ++x)
    for (int y = 0; y < out.mechanism.ns(); ++y) {
      long r = static_cast<long>(x) * out.mechanism.ns() + y;
      out.mechanism.pay_buyer[x][y] = -out.buyer.payments[r];
      out.mechanism.pay_seller[x][y] = out.seller.payments[r];
    }
  return out;
}

// ---------------------------------------------------------------------------
// Best-case impossibility analysis.

// Classification of a buyer best-case labelling on an efficient trade
// allocation, mirroring the four-way case analysis used to rule out bounded
// subsidies under best-case non-manipulability.
enum class BnomLabellingCase {
  NegativeCycle,      // labelling constraints alone are infeasible
  Contradiction,      // feasible alone, infeasible once IR + no-positive-price added
  SingleLine,         // all rows agree; explicit-formula payments apply
  SingleLineEquivalent // feasible and payments collapse to the single-line ones
};

inline const char* bnom_case_name(BnomLabellingCase c) {
  switch (c) {
    case BnomLabellingCase::NegativeCycle: return "negative-cycle";
    case BnomLabellingCase::Contradiction: return "ir-efficiency-contradiction";
    case BnomLabellingCase::SingleLine: return "single-line";
    case BnomLabellingCase::SingleLineEquivalent: return "single-line-equivalent";
  }
  return "?";
}

struct BnomLabellingReport {
  Labelling labelling;
  BnomLabellingCase kind;
  // Pointwise-greatest feasible buyer prices (trade sign convention) for the
  // two feasible cases; empty otherwise.
  std::vector<Rat> max_buyer_prices;
};

// Pointwise-greatest buyer prices (in the buyer-pays convention) compatible
// with the labelling plus IR and non-negativity. The core model stores the
// buyer's payment negated, so every constraint edge flips direction when the
// system is rewritten in the price variable.
inline std::vector<Rat> max_feasible_buyer_prices(const MechanismTable& t,
                                                  const Labelling& lab) {
  ConstraintGraph g = build_graph(t, lab);
  SideConstraintOptions opts;
  opts.ir = true;
  opts.npt = true;
  g = add_side_constraints(std::move(g), t, lab.agent, opts);
  ConstraintGraph flipped(g.num_vars);
  flipped.node_names = g.node_names;
  for (const auto& e : g.edges)
    flipped.add_edge(ConstraintEdge{e.dst, e.src, e.annotation, e.weight, e.provenance});
  return payments_from_shortest_paths(flipped);  // throws InfeasibleError when infeasible
}

inline BnomLabellingReport classify_bnom_labelling(const MechanismTable& t,
                                                   const Labelling& lab) {
  BnomLabellingReport r{lab, BnomLabellingCase::NegativeCycle, {}};
  ConstraintGraph bare = build_graph(t, lab);
  if (find_negative_cycle(bare)) return r;
  try {
    r.max_buyer_prices = max_feasible_buyer_prices(t, lab);
  } catch (const InfeasibleError&) {
    r.kind = BnomLabellingCase::Contradiction;
    return r;
  }
  r.kind = lab.single_line() ? BnomLabellingCase::SingleLine
                             : BnomLabellingCase::SingleLineEquivalent;
  return r;
}

struct BnomTwoTypeAnalysis {
  TradeMechanism base;               // efficient allocation, payments unset
  std::vector<BnomLabellingReport> reports;
  Rat seller_best_label_price;       // forced price at the seller's best label
  bool impossibility_confirmed;      // every feasible labelling: p_B = 0 < p_S somewhere
};

// Full labelling enumeration on D_B = {0, t_k}, D_S = {0, 1}: every buyer
// best-case labelling is classified, and the feasible ones are checked to
// force a zero buyer price at a trade profile where the seller's synthesized
// best-case payments stay positive — hence no finite subsidy bound.
inline BnomTwoTypeAnalysis analyze_bnom_two_type(const Rat& t_k) {
  if (!(t_k > 0 && t_k <= 1)) throw InputError("t_k must lie in (0, 1]");
  BnomTwoTypeAnalysis out{detail::make_trade_base({Rat(0), t_k}, {Rat(0), Rat(1)}), {}, Rat(0), true};
  MechanismTable t = to_mechanism_table(out.base);
  t.payments.reset();

  auto seller = synthesize_single_line(t, 1, LabellingKind::Best, /*cost_agent=*/true);
  if (!seller) throw InputError("seller side unexpectedly not overlapping");
  // Seller's best label for ask 0 trades; her synthesized price there.
  long seller_label = seller->line_payments.front().first;
  out.seller_best_label_price = seller->payments[seller_label];

  for (const Labelling& lab : all_labellings(t, 0, LabellingKind::Best, /*prune=*/false)) {
    BnomLabellingReport r = classify_bnom_labelling(t, lab);
    if (r.kind == BnomLabellingCase::SingleLine ||
        r.kind == BnomLabellingCase::SingleLineEquivalent) {
      bool zero_trade_price = false;
      for (long p = 0; p < t.num_profiles(); ++p) {
        Profile x = t.profile_of(p);
        if (out.base.trade[x[0]][x[1]] && r.max_buyer_prices[p] == 0) zero_trade_price = true;
      }
      if (!zero_trade_price || !(out.seller_best_label_price > 0))
        out.impossibility_confirmed = false;
    }
    out.reports.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Joint buyer+seller constraint system with budget coupling.
//
// Variables are in the trade sign convention: block [0,P) holds the buyer's
// price r_B(x) (the core model stores its negation, so buyer edges flip
// direction), block [P,2P) holds the seller's price rescaled by 1/alpha, so
// the alpha-WBB coupling p_S <= alpha * p_B becomes the difference
// constraint s(x) <= r_B(x).

struct JointTradeResult {
  bool feasible = false;
  std::optional<CycleCertificate> certificate;  // when infeasible
  std::vector<Rat> buyer_prices;                // pointwise-greatest, trade sign
  std::vector<Rat> seller_prices;
};

inline ConstraintGraph build_joint_trade_graph(const MechanismTable& t,
                                               const Labelling& buyer_lab,
                                               const Labelling& seller_lab,
                                               const SideConstraintOptions& buyer_opts,
                                               const SideConstraintOptions& seller_opts,
                                               const Rat& alpha) {
  if (buyer_opts.wbb || seller_opts.wbb || buyer_opts.alpha || seller_opts.alpha)
    throw InputError("pass the subsidy factor as the alpha argument, not per side");
  if (alpha < 1) throw InputError("alpha must be at least 1");
  long P = t.num_profiles();
  ConstraintGraph bg = build_graph(t, buyer_lab);
  bg = add_side_constraints(std::move(bg), t, buyer_lab.agent, buyer_opts);
  ConstraintGraph sg = build_graph(t, seller_lab);
  sg = add_side_constraints(std::move(sg), t, seller_lab.agent, seller_opts);

  ConstraintGraph g(static_cast<int>(2 * P));
  auto buyer_node = [&](int v) { return v == bg.source() ? g.source() : v; };
  auto seller_node = [&](int v) {
    return v == sg.source() ? g.source() : static_cast<int>(P) + v;
  };
  for (const ConstraintEdge& e : bg.edges)
    g.add_edge(ConstraintEdge{buyer_node(e.dst), buyer_node(e.src), e.annotation, e.weight,
                              e.provenance});
  for (const ConstraintEdge& e : sg.edges)
    g.add_edge(ConstraintEdge{seller_node(e.src), seller_node(e.dst), e.annotation,
                              Rat(e.weight / alpha), e.provenance});
  for (long x = 0; x < P; ++x)
    g.add_edge(static_cast<int>(x), static_cast<int>(P + x), Rat(0), EdgeKind::Wbb);
  return g;
}

// Feasibility of (buyer labelling, seller labelling, side constraints,
// alpha-WBB) together, with extracted pointwise-greatest prices on success.
// Monotone in alpha: a larger subsidy factor only loosens the coupling.
inline JointTradeResult solve_joint_trade(const MechanismTable& t, const Labelling& buyer_lab,
                                          const Labelling& seller_lab,
                                          const SideConstraintOptions& buyer_opts,
                                          const SideConstraintOptions& seller_opts,
                                          const Rat& alpha) {
  ConstraintGraph g =
      build_joint_trade_graph(t, buyer_lab, seller_lab, buyer_opts, seller_opts, alpha);
  JointTradeResult out;
  try {
    std::vector<Rat> d = payments_from_shortest_paths(g);
    long P = t.num_profiles();
    out.feasible = true;
    out.buyer_prices.assign(d.begin(), d.begin() + P);
    out.seller_prices.assign(d.begin() + P, d.end());
    for (Rat& s : out.seller_prices) s *= alpha;
  } catch (const InfeasibleError& e) {
    out.certificate = e.certificate;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subsidy experiments over refining grids.

struct SubsidyPoint {
  int resolution;                       // buyer grid {0, 1/n, ..., 1}
  std::optional<Rat> alpha;             // nullopt = unbounded
};

struct SubsidyReport {
  LabellingKind kind;
  std::vector<SubsidyPoint> points;     // worst-case experiment
  std::vector<BnomTwoTypeAnalysis> bnom_instances;  // best-case experiment
  bool unbounded_trend;                 // alpha exceeds every finite bound tested
};

inline std::vector<Rat> uniform_grid(int n) {
  if (n < 1) throw InputError("grid resolution must be >= 1");
  std::vector<Rat> g;
  for (int i = 0; i <= n; ++i) g.push_back(Rat(i) / n);
  return g;
}

// Worst-case side: synthesize single-line payments on {0,1/n,...,1} x {0,1}
// for growing n and record the least feasible subsidy factor each time.
// Best-case side: run the two-type analysis across the same grid's interior
// points.
inline SubsidyReport subsidy_experiment(LabellingKind kind, int max_resolution) {
  if (max_resolution < 2) throw InputError("need at least two grid points per side");
  SubsidyReport rep{kind, {}, {}, true};
  if (kind == LabellingKind::Worst) {
    for (int n = 2; n <= max_resolution; n *= 2) {
      auto syn = synthesize_single_line_trade(uniform_grid(n), {Rat(0), Rat(1)}, kind);
      if (!syn) throw InputError("efficient trade unexpectedly not overlapping");
      std::optional<Rat> a = min_alpha(syn->mechanism);
      if (a && *a < n) rep.unbounded_trend = false;
      rep.points.push_back({n, std::move(a)});
    }
  } else {
    for (int i = 1; i <= max_resolution; ++i) {
      BnomTwoTypeAnalysis an = analyze_bnom_two_type(Rat(i) / max_resolution);
      if (!an.impossibility_confirmed) rep.unbounded_trend = false;
      rep.bnom_instances.push_back(std::move(an));
    }
  }
  return rep;
}

}  // namespace nom
