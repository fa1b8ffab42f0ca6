// Command-line front end: verify mechanism properties, synthesize payments
// from labellings, analyse bilateral-trade mechanisms, check the threshold
// characterisation, and run subsidy sweeps. Exit codes: 0 = property holds /
// synthesis succeeded, 1 = violated or infeasible, 2 = input/config error.

#include <nom/io.hpp>
#include <nom/labelling.hpp>
#include <nom/single_parameter.hpp>
#include <nom/trade.hpp>
#include <nom/verifier.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace nom;

struct Output {
  std::string path;    // empty = stdout
  std::string format;  // "human" | "json"

  void emit(const Json& report) const {
    std::ostringstream os;
    if (format == "json") {
      os << report.dump(2) << "\n";
    } else {
      human(report, os, 0);
    }
    if (path.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(path);
      if (!f) throw InputError("cannot open output file: " + path);
      f << os.str();
    }
  }

  // Fixed-width key/value rendering keyed by the same field names as the
  // JSON format, in deterministic order.
  static void human(const Json& j, std::ostream& os, int indent) {
    std::string pad(indent, ' ');
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object() || (it.value().is_array() && !it.value().empty() &&
                                       (it.value().front().is_object() || it.value().front().is_array()))) {
          os << pad << it.key() << ":\n";
          human(it.value(), os, indent + 2);
        } else {
          os << pad << it.key();
          for (int n = static_cast<int>(it.key().size()); n < 24 - indent; ++n) os << ' ';
          os << " " << it.value().dump() << "\n";
        }
      }
    } else if (j.is_array()) {
      int k = 0;
      for (const Json& e : j) {
        os << pad << "- [" << k++ << "]\n";
        human(e, os, indent + 2);
      }
    } else {
      os << pad << j.dump() << "\n";
    }
  }
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_verify(const std::string& input, const std::string& properties, Output out) {
  MechanismTable m = parse_mechanism(load_json_file(input));
  Json report;
  report["command"] = "verify";
  report["verdicts"] = Json::array();
  bool all_hold = true;
  for (const std::string& p : split_csv(properties)) {
    Verdict v = check_property(m, p);
    all_hold = all_hold && v.holds;
    report["verdicts"].push_back(serialize_verdict(m, p, v));
  }
  report["holds"] = all_hold;
  out.emit(report);
  return all_hold ? 0 : 1;
}

int run_synthesize(const std::string& input, int agent, const std::string& kind_name,
                   const std::string& strategy, bool ir, bool npt, bool wbb,
                   const std::string& alpha, bool cost_agent, long budget, Output out) {
  MechanismTable m = parse_mechanism(load_json_file(input));
  if (agent < 0 || agent >= m.num_agents()) throw InputError("agent index out of range");
  LabellingKind kind = kind_name == "best" ? LabellingKind::Best : LabellingKind::Worst;
  Json report;
  report["command"] = "synthesize";
  report["agent"] = agent;
  report["kind"] = kind_name;
  report["strategy"] = strategy;

  SideConstraintOptions opts;
  opts.ir = ir;
  opts.npt = npt;
  opts.wbb = wbb;
  if (!alpha.empty()) {
    Rat a = parse_rat(alpha);
    if (a < 1) throw InputError("alpha must be at least 1");
    opts.alpha = a;
  }

  if (strategy == "single-line") {
    if (wbb || opts.alpha)
      throw UnsupportedConstraintError(
          "wbb/alpha constraints are not supported by single-line synthesis; "
          "use the trade command");
    auto menu = build_outcome_menu(m, agent);
    auto syn = synthesize_single_line(m, agent, kind, cost_agent);
    if (!syn) {
      report["holds"] = false;
      report["reason"] = "allocation is not overlapping for this agent: no "
                         "non-decreasing selection through the per-bid outcome menus";
      Json menus = Json::array();
      for (const auto& bid_menu : menu.menu) {
        Json mm = Json::array();
        for (const auto& [v, w] : bid_menu) mm.push_back(rat_to_json(v));
        menus.push_back(std::move(mm));
      }
      report["menus"] = std::move(menus);
      out.emit(report);
      return 1;
    }
    install_payments(m, agent, syn->payments);
    Verdict check = kind == LabellingKind::Best ? check_bnom(m) : check_wnom(m);
    report["holds"] = check.holds;
    Json sel = Json::array();
    for (const Rat& v : syn->selection.values) sel.push_back(rat_to_json(v));
    report["selection"] = std::move(sel);
    Json line = Json::array();
    for (const auto& [prank, p] : syn->line_payments) {
      Json e;
      e["profile"] = m.profile_of(prank);
      e["payment"] = rat_to_json(p);
      line.push_back(std::move(e));
    }
    report["line_payments"] = std::move(line);
    report["mechanism"] = serialize_mechanism(m);
    report["oracle"] = serialize_verdict(m, kind_name == "best" ? "bnom" : "wnom", check);
    out.emit(report);
    return check.holds ? 0 : 1;
  }

  if (strategy != "exhaustive" && strategy != "pruned")
    throw InputError("labelling strategy must be single-line, exhaustive, or pruned");
  LabellingEnumerator en(m, agent, kind, /*prune=*/strategy == "pruned", budget);
  long tried = 0;
  std::optional<Json> last_certificate;
  while (auto lab = en.next()) {
    ++tried;
    ConstraintGraph g = build_graph(m, *lab);
    g = add_side_constraints(std::move(g), m, agent, opts);
    try {
      std::vector<Rat> p = payments_from_shortest_paths(g);
      install_payments(m, agent, p);
      Verdict check = kind == LabellingKind::Best ? check_bnom(m) : check_wnom(m);
      report["holds"] = check.holds;
      report["labellings_tried"] = tried;
      report["labelling"] = lab->entries;
      report["mechanism"] = serialize_mechanism(m);
      report["oracle"] = serialize_verdict(m, kind_name == "best" ? "bnom" : "wnom", check);
      out.emit(report);
      return check.holds ? 0 : 1;
    } catch (const InfeasibleError& e) {
      last_certificate = serialize_certificate(g, e.certificate);
    }
  }
  report["holds"] = false;
  report["labellings_tried"] = tried;
  report["reason"] = "every enumerated labelling induces a negative cycle";
  if (last_certificate) report["certificate"] = *last_certificate;
  out.emit(report);
  return 1;
}

TradeMechanism trade_from_cli(const std::string& input, const std::string& mechanism,
                              int buyer_grid, int seller_grid) {
  if (!input.empty()) return parse_trade_spec(load_json_file(input));
  if (mechanism.empty())
    throw InputError("trade needs either --input or a mechanism name with grids");
  auto grid = [](int n) {
    if (n < 1) throw InputError("grid size must be at least 1");
    std::vector<Rat> g;
    if (n == 1) return std::vector<Rat>{Rat(0)};
    for (int i = 0; i < n; ++i) g.push_back(Rat(i) / (n - 1));
    return g;
  };
  Json j;
  j["buyer"] = Json::array();
  j["seller"] = Json::array();
  for (const Rat& v : grid(buyer_grid)) j["buyer"].push_back(rat_to_json(v));
  for (const Rat& v : grid(seller_grid)) j["seller"].push_back(rat_to_json(v));
  j["mechanism"] = mechanism;
  return parse_trade_spec(j);
}

int run_trade(const std::string& input, const std::string& mechanism, int buyer_grid,
              int seller_grid, const std::string& properties, Output out) {
  TradeMechanism tm = trade_from_cli(input, mechanism, buyer_grid, seller_grid);
  MechanismTable m = to_mechanism_table(tm);
  Json report;
  report["command"] = "trade";
  report["verdicts"] = Json::array();
  bool all_hold = true;
  for (const std::string& p : split_csv(properties)) {
    bool holds;
    if (p == "efficiency") {
      holds = check_efficiency(tm);
      Json v;
      v["property"] = p;
      v["holds"] = holds;
      report["verdicts"].push_back(std::move(v));
    } else if (p == "wbb") {
      holds = check_wbb(tm);
      Json v;
      v["property"] = p;
      v["holds"] = holds;
      report["verdicts"].push_back(std::move(v));
    } else {
      Verdict v = check_property(m, p);
      holds = v.holds;
      report["verdicts"].push_back(serialize_verdict(m, p, v));
    }
    all_hold = all_hold && holds;
  }
  auto a = min_alpha(tm);
  report["min_alpha"] = a ? Json(rat_str(*a)) : Json("unbounded");
  report["holds"] = all_hold;
  report["mechanism"] = serialize_trade(tm);
  out.emit(report);
  return all_hold ? 0 : 1;
}

const char* region_name(TradeRegion r) {
  switch (r) {
    case TradeRegion::Never: return "never";
    case TradeRegion::Mixed: return "mixed";
    case TradeRegion::Always: return "always";
  }
  return "?";
}

int run_characterize(const std::string& input, const std::string& mechanism,
                     int buyer_grid, int seller_grid, Output out) {
  TradeMechanism tm = trade_from_cli(input, mechanism, buyer_grid, seller_grid);
  CharacterizationReport rep = characterize_report(tm);
  Json report;
  report["command"] = "characterize";
  report["holds"] = rep.all();
  Json pts = Json::array();
  for (bool b : rep.point) pts.push_back(b);
  report["points"] = std::move(pts);
  Json tuple;
  auto opt = [](const std::optional<Rat>& r) {
    return r ? Json(rat_str(*r)) : Json(nullptr);
  };
  tuple["p_b_min"] = opt(rep.tuple.p_b_min);
  tuple["p_b_max"] = opt(rep.tuple.p_b_max);
  tuple["p_s_min"] = opt(rep.tuple.p_s_min);
  tuple["p_s_max"] = opt(rep.tuple.p_s_max);
  Json br = Json::array(), sr = Json::array();
  for (TradeRegion r : rep.tuple.buyer_regions) br.push_back(region_name(r));
  for (TradeRegion r : rep.tuple.seller_regions) sr.push_back(region_name(r));
  tuple["buyer_regions"] = std::move(br);
  tuple["seller_regions"] = std::move(sr);
  report["tuple"] = std::move(tuple);
  out.emit(report);
  return rep.all() ? 0 : 1;
}

int run_sweep(const std::string& kind_name, int resolution, Output out) {
  LabellingKind kind = kind_name == "bnom" ? LabellingKind::Best : LabellingKind::Worst;
  SubsidyReport rep = subsidy_experiment(kind, resolution);
  Json report;
  report["command"] = "sweep";
  report["kind"] = kind_name;
  report["unbounded_trend"] = rep.unbounded_trend;
  if (kind == LabellingKind::Worst) {
    Json pts = Json::array();
    for (const SubsidyPoint& p : rep.points) {
      Json e;
      e["resolution"] = p.resolution;
      e["min_alpha"] = p.alpha ? Json(rat_str(*p.alpha)) : Json("unbounded");
      pts.push_back(std::move(e));
    }
    report["points"] = std::move(pts);
  } else {
    Json inst = Json::array();
    for (const BnomTwoTypeAnalysis& an : rep.bnom_instances) {
      Json e;
      e["t_k"] = rat_str(an.base.buyer_domain[1]);
      e["impossibility_confirmed"] = an.impossibility_confirmed;
      e["seller_best_label_price"] = rat_str(an.seller_best_label_price);
      int counts[4] = {0, 0, 0, 0};
      for (const auto& r : an.reports) counts[static_cast<int>(r.kind)]++;
      Json c;
      c["negative-cycle"] = counts[0];
      c["ir-efficiency-contradiction"] = counts[1];
      c["single-line"] = counts[2];
      c["single-line-equivalent"] = counts[3];
      e["cases"] = std::move(c);
      inst.push_back(std::move(e));
    }
    report["instances"] = std::move(inst);
  }
  out.emit(report);
  return rep.unbounded_trend ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verifier and payment synthesizer for non-obvious "
               "manipulability of finite mechanisms"};
  app.require_subcommand(1);

  Output out;
  out.format = "human";
  app.add_option("--output", out.path, "Write the report to this file instead of stdout");
  app.add_option("--format", out.format, "Report format")
      ->check(CLI::IsMember({"human", "json"}));

  std::string input, properties = "nom", kind = "worst", strategy = "single-line";
  std::string mechanism, alpha, sweep_kind = "wnom";
  int agent = 0, buyer_grid = 2, seller_grid = 2, resolution = 8;
  long budget = 1'000'000;
  bool ir = false, npt = false, wbb = false, cost_agent = false;

  CLI::App* verify = app.add_subcommand("verify", "Check properties of a mechanism table");
  verify->add_option("input", input, "Mechanism spec (JSON)")->required();
  verify->add_option("--properties", properties, "Comma-separated: sp,nom,bnom,wnom,ir,npt");

  CLI::App* synth = app.add_subcommand("synthesize", "Synthesize payments from labellings");
  synth->add_option("input", input, "Mechanism spec (JSON), payments ignored")->required();
  synth->add_option("--agent", agent, "Agent whose payments to synthesize");
  synth->add_option("--kind", kind, "Extreme to protect")->check(CLI::IsMember({"best", "worst"}));
  synth->add_option("--labelling", strategy, "Labelling strategy")
      ->check(CLI::IsMember({"single-line", "exhaustive", "pruned"}));
  synth->add_flag("--ir", ir, "Require individual rationality");
  synth->add_flag("--npt", npt, "Require no positive transfers");
  synth->add_flag("--wbb", wbb, "Require weak budget balance (trade command only)");
  synth->add_option("--alpha", alpha, "Subsidy factor bound, p/q (trade command only)");
  synth->add_flag("--cost-agent", cost_agent, "Treat the agent's type as a cost");
  synth->add_option("--budget", budget, "Maximum number of labellings to enumerate");

  CLI::App* trade = app.add_subcommand("trade", "Build and check a bilateral-trade mechanism");
  trade->add_option("mechanism", mechanism,
                    "first-price | double-auction | hybrid-buyer-sp | hybrid-seller-sp");
  trade->add_option("--input", input, "Trade spec (JSON), overrides the mechanism name");
  trade->add_option("--buyer-grid", buyer_grid, "Uniform buyer grid points on [0,1]");
  trade->add_option("--seller-grid", seller_grid, "Uniform seller grid points on [0,1]");
  trade->add_option("--properties", properties,
                    "Comma-separated: nom,bnom,wnom,sp,ir,npt,wbb,efficiency");

  CLI::App* charac = app.add_subcommand("characterize",
                                        "Check the threshold characterisation of a trade mechanism");
  charac->add_option("mechanism", mechanism,
                     "first-price | double-auction | hybrid-buyer-sp | hybrid-seller-sp");
  charac->add_option("--input", input, "Trade spec (JSON), overrides the mechanism name");
  charac->add_option("--buyer-grid", buyer_grid, "Uniform buyer grid points on [0,1]");
  charac->add_option("--seller-grid", seller_grid, "Uniform seller grid points on [0,1]");

  CLI::App* sweep = app.add_subcommand("sweep", "Subsidy growth experiment over refining grids");
  sweep->add_option("--kind", sweep_kind, "Which side of non-manipulability to protect")
      ->check(CLI::IsMember({"bnom", "wnom"}));
  sweep->add_option("--resolution", resolution, "Finest grid resolution");

  // Let the global --output/--format appear after the subcommand as well.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
    if (verify->parsed()) return run_verify(input, properties, out);
    if (synth->parsed())
      return run_synthesize(input, agent, kind, strategy, ir, npt, wbb, alpha, cost_agent,
                            budget, out);
    if (trade->parsed()) {
      if (properties == "nom" && trade->count("--properties") == 0)
        properties = "nom,ir,efficiency,wbb";
      return run_trade(input, mechanism, buyer_grid, seller_grid, properties, out);
    }
    if (charac->parsed()) return run_characterize(input, mechanism, buyer_grid, seller_grid, out);
    if (sweep->parsed()) return run_sweep(sweep_kind, resolution, out);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0
  } catch (const UnsupportedConstraintError& e) {
    std::cerr << "error [unsupported-constraint]: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceededError& e) {
    std::cerr << "error [budget-exceeded]: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error [schema]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 2;
  }
}
