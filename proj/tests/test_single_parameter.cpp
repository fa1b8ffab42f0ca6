#include <nom/labelling.hpp>
#include <nom/single_parameter.hpp>
#include <nom/verifier.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace nom;

namespace {

MechanismTable two_agent_sp(std::vector<Rat> types, std::vector<Rat> opp_types,
                            std::vector<std::vector<Rat>> levels) {
  MechanismTable m;
  m.domains.resize(2);
  m.domains[0].name = "i";
  m.domains[0].scalar_types = std::move(types);
  m.domains[1].name = "opp";
  m.domains[1].scalar_types = std::move(opp_types);
  m.allocation.assign(m.num_profiles(), std::vector<Rat>(2, Rat(0)));
  for (long r = 0; r < m.num_profiles(); ++r) {
    Profile x = m.profile_of(r);
    m.allocation[r][0] = levels[x[0]][x[1]];
  }
  m.validate();
  return m;
}

}  // namespace

TEST_CASE("outcome menus are sorted, distinct, and witnessed") {
  MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0), Rat(1)},
                                  {{Rat(1), Rat(0)}, {Rat(0), Rat(0)}});
  OutcomeMenu menu = build_outcome_menu(m, 0);
  REQUIRE(menu.menu.size() == 2);
  CHECK(menu.menu[0].size() == 2);
  CHECK(menu.menu[0][0].first == Rat(0));
  CHECK(menu.menu[0][1].first == Rat(1));
  CHECK(menu.menu[1].size() == 1);
  CHECK(menu.menu[1][0].first == Rat(0));
  for (int bid = 0; bid < 2; ++bid)
    for (const auto& [v, witness] : menu.menu[bid])
      CHECK(m.allocation[m.compose(0, bid, witness)][0] == v);
}

TEST_CASE("greedy overlapping selection") {
  SECTION("menus {0,1} then {0} give selection (0,0)") {
    MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0), Rat(1)},
                                    {{Rat(1), Rat(0)}, {Rat(0), Rat(0)}});
    auto sel = check_overlapping(m, 0);
    REQUIRE(sel);
    CHECK(sel->values == std::vector<Rat>{Rat(0), Rat(0)});
  }
  SECTION("menus {1} then {0} admit no non-decreasing selection") {
    MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0)}, {{Rat(1)}, {Rat(0)}});
    CHECK(!check_overlapping(m, 0));
  }
  SECTION("constant allocation selects the constant") {
    MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0), Rat(1)},
                                    {{Rat(3), Rat(3)}, {Rat(3), Rat(3)}});
    auto sel = check_overlapping(m, 0);
    REQUIRE(sel);
    CHECK(sel->values == std::vector<Rat>{Rat(3), Rat(3)});
  }
  SECTION("greedy finds a selection whenever brute force does") {
    // All 0/1 allocations for d=3, two opponent bids.
    for (int mask = 0; mask < (1 << 6); ++mask) {
      std::vector<std::vector<Rat>> levels(3, std::vector<Rat>(2));
      for (int c = 0; c < 6; ++c) levels[c / 2][c % 2] = Rat((mask >> c) & 1);
      MechanismTable m =
          two_agent_sp({Rat(1), Rat(2), Rat(3)}, {Rat(0), Rat(1)}, levels);
      bool brute = false;
      for (int a = 0; a < 2 && !brute; ++a)
        for (int b = 0; b < 2 && !brute; ++b)
          for (int c = 0; c < 2 && !brute; ++c)
            brute |= levels[0][a] <= levels[1][b] && levels[1][b] <= levels[2][c];
      CHECK(bool(check_overlapping(m, 0)) == brute);
    }
  }
}

TEST_CASE("single-line labelling has constant columns and a clean graph") {
  MechanismTable m = two_agent_sp({Rat(1), Rat(2), Rat(3)}, {Rat(0), Rat(1)},
                                  {{Rat(0), Rat(1)}, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}});
  auto sel = check_overlapping(m, 0);
  REQUIRE(sel);
  for (LabellingKind kind : {LabellingKind::Best, LabellingKind::Worst}) {
    Labelling lab = build_single_line_labelling(m, 0, kind, *sel);
    CHECK(lab.single_line());
    for (int j = 1; j < 3; ++j) CHECK(lab.entries[j] == lab.entries[0]);
    CHECK(!find_negative_cycle(build_graph(m, lab)));
    CHECK(guaranteed_cycle_weight(m, lab, {0, 1}) >= 0);
    CHECK(guaranteed_cycle_weight(m, lab, {0, 2}) >= 0);
    CHECK(guaranteed_cycle_weight(m, lab, {1, 2}) >= 0);
    CHECK(guaranteed_cycle_weight(m, lab, {0, 1, 2}) >= 0);
  }
}

TEST_CASE("explicit line payments match the hand-solved constant-allocation case") {
  // f constant 1, valuation agent, h = 0, types {1,2}: payments -1 and -1.
  MechanismTable m =
      two_agent_sp({Rat(1), Rat(2)}, {Rat(0)}, {{Rat(1)}, {Rat(1)}});
  auto sel = check_overlapping(m, 0);
  REQUIRE(sel);
  Labelling lab = build_single_line_labelling(m, 0, LabellingKind::Worst, *sel);
  auto line = explicit_line_payments(m, 0, lab, Rat(0));
  REQUIRE(line.size() == 2);
  CHECK(line[0].second == Rat(-1));
  CHECK(line[1].second == Rat(-1));
  install_payments(m, 0, fill_remaining_payments(m, 0, lab, line));
  CHECK(check_strategyproof(m).holds);
}

TEST_CASE("zero allocation puts h on every line profile") {
  MechanismTable m =
      two_agent_sp({Rat(1), Rat(2)}, {Rat(0)}, {{Rat(0)}, {Rat(0)}});
  auto sel = check_overlapping(m, 0);
  REQUIRE(sel);
  Labelling lab = build_single_line_labelling(m, 0, LabellingKind::Best, *sel);
  for (auto& [prank, p] : explicit_line_payments(m, 0, lab, Rat(5, 3)))
    CHECK(p == Rat(5, 3));
}

TEST_CASE("cost-agent default h is the area under the labelled curve") {
  // Seller-style agent: levels are negated trade indicators on costs {0,1}.
  MechanismTable m =
      two_agent_sp({Rat(0), Rat(1)}, {Rat(0)}, {{Rat(-1)}, {Rat(-1)}});
  auto sel = check_overlapping(m, 0);
  REQUIRE(sel);
  Labelling lab = build_single_line_labelling(m, 0, LabellingKind::Best, *sel);
  Rat h = default_h(m, 0, lab, /*cost_agent=*/true);
  CHECK(h == Rat(1));  // area: (-level at cost 0) * (1 - 0)
  auto line = explicit_line_payments(m, 0, lab, h);
  // p(0) = 1 - 0*(-1) + 0 = 1; p(1) = 1 - 1*(-1) - 1 = 1.
  CHECK(line[0].second == Rat(1));
  CHECK(line[1].second == Rat(1));
  install_payments(m, 0, fill_remaining_payments(m, 0, lab, line));
  CHECK(check_ir(m).holds);
  Rat h0 = default_h(m, 0, lab, /*cost_agent=*/false);
  CHECK(h0 == Rat(0));
}

TEST_CASE("fill-in keeps equal-level profiles at the line payment and pushes others") {
  MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0), Rat(1)},
                                  {{Rat(0), Rat(0)}, {Rat(0), Rat(1)}});
  auto sel = check_overlapping(m, 0);
  REQUIRE(sel);
  SECTION("best kind: higher off-line level gets strictly lower payment") {
    Labelling lab = build_single_line_labelling(m, 0, LabellingKind::Best, *sel);
    auto line = explicit_line_payments(m, 0, lab, Rat(0));
    std::vector<Rat> p = fill_remaining_payments(m, 0, lab, line);
    // Bid 0 island: both profiles at level 0 -> equal payments.
    CHECK(p[m.compose(0, 0, 0)] == p[m.compose(0, 0, 1)]);
    // Bid 1 island: line label sits at level 0 (selection is (0,0)); the
    // off-line profile has level 1 and must be paid strictly less.
    long label = m.compose(0, 1, lab.entries[0][1]);
    long other = m.compose(0, 1, 1 - lab.entries[0][1]);
    CHECK(m.allocation[other][0] > m.allocation[label][0]);
    CHECK(p[other] < p[label]);
    install_payments(m, 0, p);
    CHECK(check_bnom_for(m, 0).holds);
  }
  SECTION("worst kind end-to-end passes the oracle") {
    Labelling lab = build_single_line_labelling(m, 0, LabellingKind::Worst, *sel);
    auto line = explicit_line_payments(m, 0, lab, Rat(0));
    install_payments(m, 0, fill_remaining_payments(m, 0, lab, line));
    CHECK(check_wnom_for(m, 0).holds);
  }
}

TEST_CASE("nom combination requires distinct witnesses unless islands are constant") {
  SECTION("constant allocation with shared witnesses is fine") {
    MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0), Rat(1)},
                                    {{Rat(1), Rat(1)}, {Rat(1), Rat(1)}});
    auto b = check_overlapping(m, 0);
    REQUIRE(b);
    CHECK(check_nom_combination(m, 0, *b, *b));
  }
  SECTION("shared witness on a non-constant island is rejected") {
    MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0), Rat(1)},
                                    {{Rat(0), Rat(1)}, {Rat(1), Rat(1)}});
    auto sel = check_overlapping(m, 0);
    REQUIRE(sel);
    CHECK(!check_nom_combination(m, 0, *sel, *sel));
  }
  SECTION("disjoint witnesses everywhere are accepted") {
    MechanismTable m = two_agent_sp({Rat(1), Rat(2)}, {Rat(0), Rat(1)},
                                    {{Rat(0), Rat(1)}, {Rat(0), Rat(1)}});
    MonotoneSelection beta{{Rat(1), Rat(1)}, {1, 1}};
    MonotoneSelection omega{{Rat(0), Rat(0)}, {0, 0}};
    CHECK(check_nom_combination(m, 0, beta, omega));
  }
}

TEST_CASE("overlapping criterion coincides with labelling-search implementability") {
  // Exhaustive over all 0/1 allocations, d in {2,3}, two opponent bids.
  for (int d : {2, 3}) {
    std::vector<Rat> types;
    for (int t = 0; t < d; ++t) types.push_back(Rat(t + 1));
    int cells = 2 * d;
    for (int mask = 0; mask < (1 << cells); ++mask) {
      std::vector<std::vector<Rat>> levels(d, std::vector<Rat>(2));
      for (int c = 0; c < cells; ++c) levels[c / 2][c % 2] = Rat((mask >> c) & 1);
      MechanismTable m = two_agent_sp(types, {Rat(0), Rat(1)}, levels);
      for (LabellingKind kind : {LabellingKind::Best, LabellingKind::Worst}) {
        bool implementable = false;
        for (const Labelling& lab : all_labellings(m, 0, kind, /*prune=*/true))
          if (!find_negative_cycle(build_graph(m, lab))) {
            implementable = true;
            break;
          }
        CHECK(bool(check_overlapping(m, 0)) == implementable);
      }
    }
  }
}

TEST_CASE("end-to-end synthesis passes the oracle on random overlapping allocations") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dsize(2, 3), osize(1, 3), lvl(0, 2);
  int synthesized = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int d = dsize(rng), o = osize(rng);
    std::vector<Rat> types, opp;
    for (int t = 0; t < d; ++t) types.push_back(Rat(t) + Rat(1, 2));
    for (int t = 0; t < o; ++t) opp.push_back(Rat(t));
    std::vector<std::vector<Rat>> levels(d, std::vector<Rat>(o));
    for (auto& row : levels)
      for (auto& v : row) v = Rat(lvl(rng), 2);
    MechanismTable m = two_agent_sp(types, opp, levels);
    for (LabellingKind kind : {LabellingKind::Best, LabellingKind::Worst}) {
      auto syn = synthesize_single_line(m, 0, kind);
      if (!syn) {
        CHECK(!check_overlapping(m, 0));
        continue;
      }
      ++synthesized;
      CHECK(syn->labelling.single_line());
      MechanismTable with = m;
      install_payments(with, 0, syn->payments);
      Verdict v = kind == LabellingKind::Best ? check_bnom_for(with, 0)
                                              : check_wnom_for(with, 0);
      CHECK(v.holds);
    }
  }
  CHECK(synthesized > 50);
}
