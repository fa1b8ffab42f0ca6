#pragma once

#include <nom/core.hpp>
#include <nom/graph.hpp>
#include <nom/trade.hpp>
#include <nom/verifier.hpp>

#include <json.hpp>

#include <fstream>
#include <string>

namespace nom {

using Json = nlohmann::json;

inline Rat rat_from_json(const Json& j) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long long>());
  throw InputError("expected a rational: \"p/q\" string or integer");
}

inline Json rat_to_json(const Rat& r) { return rat_str(r); }

// ---------------------------------------------------------------------------
// Mechanism-spec documents.
//
// {"agents":[{"name":str,"single_parameter":bool,
//             "types":["p/q",...] | [{"<outcome>":"p/q",...},...]}],
//  "allocation":[[per-agent "p/q"] per profile, lexicographic],
//  "payments": optional, same shape}

inline MechanismTable parse_mechanism(const Json& j) {
  if (!j.is_object() || !j.contains("agents") || !j.contains("allocation"))
    throw InputError("mechanism spec needs \"agents\" and \"allocation\"");
  MechanismTable m;
  for (const Json& a : j.at("agents")) {
    AgentDomain d;
    d.name = a.value("name", "agent" + std::to_string(m.domains.size()));
    d.single_parameter = a.value("single_parameter", true);
    const Json& types = a.at("types");
    if (!types.is_array() || types.empty())
      throw InputError("agent \"" + d.name + "\": \"types\" must be a non-empty array");
    if (d.single_parameter) {
      for (const Json& t : types) d.scalar_types.push_back(rat_from_json(t));
    } else {
      // Each type is an object keyed by outcome index.
      size_t outcomes = 0;
      for (const Json& t : types) outcomes = std::max(outcomes, t.size());
      for (const Json& t : types) {
        std::vector<Rat> row(outcomes, Rat(0));
        for (auto it = t.begin(); it != t.end(); ++it) {
          size_t o = std::stoul(it.key());
          if (o >= outcomes) throw InputError("outcome index out of range");
          row[o] = rat_from_json(it.value());
        }
        d.valuations.push_back(std::move(row));
      }
    }
    m.domains.push_back(std::move(d));
  }
  size_t num_outcomes = 0;
  for (const AgentDomain& d : m.domains)
    if (!d.single_parameter && !d.valuations.empty())
      num_outcomes = std::max(num_outcomes, d.valuations.front().size());
  for (size_t o = 0; o < num_outcomes; ++o) m.outcomes.push_back(std::to_string(o));
  // All general agents share one outcome set; pad shorter valuation rows.
  for (AgentDomain& d : m.domains)
    if (!d.single_parameter)
      for (auto& row : d.valuations) row.resize(num_outcomes, Rat(0));
  auto read_rows = [&](const Json& rows) {
    std::vector<std::vector<Rat>> out;
    for (const Json& row : rows) {
      std::vector<Rat> r;
      for (const Json& v : row) r.push_back(rat_from_json(v));
      out.push_back(std::move(r));
    }
    return out;
  };
  m.allocation = read_rows(j.at("allocation"));
  if (j.contains("payments") && !j.at("payments").is_null())
    m.payments = read_rows(j.at("payments"));
  m.validate();
  return m;
}

inline Json serialize_mechanism(const MechanismTable& m) {
  Json j;
  j["agents"] = Json::array();
  for (const AgentDomain& d : m.domains) {
    Json a;
    a["name"] = d.name;
    a["single_parameter"] = d.single_parameter;
    Json types = Json::array();
    if (d.single_parameter) {
      for (const Rat& t : d.scalar_types) types.push_back(rat_to_json(t));
    } else {
      for (const auto& row : d.valuations) {
        Json t = Json::object();
        for (size_t o = 0; o < row.size(); ++o) t[std::to_string(o)] = rat_to_json(row[o]);
        types.push_back(std::move(t));
      }
    }
    a["types"] = std::move(types);
    j["agents"].push_back(std::move(a));
  }
  auto write_rows = [&](const std::vector<std::vector<Rat>>& rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
      Json r = Json::array();
      for (const Rat& v : row) r.push_back(rat_to_json(v));
      out.push_back(std::move(r));
    }
    return out;
  };
  j["allocation"] = write_rows(m.allocation);
  if (m.payments) j["payments"] = write_rows(*m.payments);
  return j;
}

// ---------------------------------------------------------------------------
// Trade-spec documents.
//
// {"buyer":["p/q",...],"seller":["p/q",...],
//  "mechanism":"first-price"|"double-auction"|"hybrid-buyer-sp"|
//              "hybrid-seller-sp"|"table",
//  "table":{"trade":[[0|1,...]],"p_b":[[...]],"p_s":[[...]]}}

inline TradeMechanism parse_trade_spec(const Json& j) {
  if (!j.is_object() || !j.contains("buyer") || !j.contains("seller") ||
      !j.contains("mechanism"))
    throw InputError("trade spec needs \"buyer\", \"seller\", \"mechanism\"");
  std::vector<Rat> buyer, seller;
  for (const Json& v : j.at("buyer")) buyer.push_back(rat_from_json(v));
  for (const Json& v : j.at("seller")) seller.push_back(rat_from_json(v));
  std::string kind = j.at("mechanism").get<std::string>();
  if (kind == "first-price") return make_first_price(std::move(buyer), std::move(seller));
  if (kind == "double-auction") return make_double_auction(std::move(buyer), std::move(seller));
  if (kind == "hybrid-buyer-sp")
    return make_hybrid(std::move(buyer), std::move(seller), TradeSide::Buyer);
  if (kind == "hybrid-seller-sp")
    return make_hybrid(std::move(buyer), std::move(seller), TradeSide::Seller);
  if (kind != "table") throw InputError("unknown trade mechanism \"" + kind + "\"");
  if (!j.contains("table")) throw InputError("mechanism \"table\" needs a \"table\" field");
  const Json& t = j.at("table");
  TradeMechanism m;
  m.buyer_domain = std::move(buyer);
  m.seller_domain = std::move(seller);
  detail::check_trade_domain(m.buyer_domain, "buyer");
  detail::check_trade_domain(m.seller_domain, "seller");
  auto grid = [&](const char* key, auto convert) {
    const Json& rows = t.at(key);
    if (static_cast<int>(rows.size()) != m.nb())
      throw InputError(std::string(key) + ": wrong number of buyer rows");
    std::vector<std::vector<decltype(convert(Json{}))>> out;
    for (const Json& row : rows) {
      if (static_cast<int>(row.size()) != m.ns())
        throw InputError(std::string(key) + ": wrong number of seller columns");
      std::vector<decltype(convert(Json{}))> r;
      for (const Json& v : row) r.push_back(convert(v));
      out.push_back(std::move(r));
    }
    return out;
  };
  m.trade = grid("trade", [](const Json& v) {
    int f = v.get<int>();
    if (f != 0 && f != 1) throw InputError("trade entries must be 0 or 1");
    return f;
  });
  m.pay_buyer = grid("p_b", rat_from_json);
  m.pay_seller = grid("p_s", rat_from_json);
  return m;
}

inline Json serialize_trade(const TradeMechanism& m) {
  Json j;
  j["buyer"] = Json::array();
  for (const Rat& v : m.buyer_domain) j["buyer"].push_back(rat_to_json(v));
  j["seller"] = Json::array();
  for (const Rat& v : m.seller_domain) j["seller"].push_back(rat_to_json(v));
  j["mechanism"] = "table";
  Json t;
  t["trade"] = m.trade;
  auto rows = [](const std::vector<std::vector<Rat>>& g) {
    Json out = Json::array();
    for (const auto& row : g) {
      Json r = Json::array();
      for (const Rat& v : row) r.push_back(rat_to_json(v));
      out.push_back(std::move(r));
    }
    return out;
  };
  t["p_b"] = rows(m.pay_buyer);
  t["p_s"] = rows(m.pay_seller);
  j["table"] = std::move(t);
  return j;
}

// ---------------------------------------------------------------------------
// Verdict reports.

inline Json serialize_witness(const MechanismTable& m, const ManipulationWitness& w) {
  Json j;
  j["agent"] = w.agent;
  j["agent_name"] = m.domains[w.agent].name;
  j["true_type"] = w.true_type;
  j["misreport"] = w.misreport;
  j["kind"] = w.kind == WitnessKind::BestCase     ? "best-case"
              : w.kind == WitnessKind::WorstCase  ? "worst-case"
                                                  : "dominant-strategy";
  j["truthful_extreme"] = rat_to_json(w.truthful_extreme);
  j["dishonest_extreme"] = rat_to_json(w.dishonest_extreme);
  j["truthful_profile"] = m.profile_of(w.truthful_profile);
  j["dishonest_profile"] = m.profile_of(w.dishonest_profile);
  return j;
}

inline Json serialize_verdict(const MechanismTable& m, const std::string& property,
                              const Verdict& v) {
  Json j;
  j["property"] = property;
  j["holds"] = v.holds;
  if (v.witness) j["witness"] = serialize_witness(m, *v.witness);
  if (v.violating_profile) j["violating_profile"] = m.profile_of(*v.violating_profile);
  if (v.violating_agent) j["violating_agent"] = *v.violating_agent;
  return j;
}

inline Json serialize_certificate(const ConstraintGraph& g, const CycleCertificate& c) {
  Json j;
  j["total_weight"] = rat_to_json(c.total_weight);
  Json edges = Json::array();
  for (const ConstraintEdge& e : c.edges) {
    Json je;
    je["src"] = g.name_of(e.src);
    je["dst"] = g.name_of(e.dst);
    je["weight"] = rat_to_json(e.weight);
    Json kinds = Json::array();
    for (EdgeKind k : e.provenance) kinds.push_back(edge_kind_name(k));
    je["kinds"] = std::move(kinds);
    if (e.annotation) je["true_type_index"] = *e.annotation;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InputError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace nom
