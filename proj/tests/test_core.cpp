#include <nom/core.hpp>
#include <nom/rational.hpp>
#include <nom/verifier.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace nom;

TEST_CASE("rational parsing and printing round trips") {
  CHECK(parse_rat("3/4") == Rat(3, 4));
  CHECK(parse_rat("-3/4") == Rat(-3, 4));
  CHECK(parse_rat("7") == Rat(7));
  CHECK(parse_rat("-0") == Rat(0));
  CHECK(rat_str(Rat(3, 4)) == "3/4");
  CHECK(rat_str(Rat(-8, 2)) == "-4");
  CHECK(rat_str(Rat(0)) == "0");
  for (const char* s : {"1/2", "-5/3", "0", "17", "-4"}) CHECK(rat_str(parse_rat(s)) == s);
  CHECK_THROWS_AS(parse_rat("1/0"), InputError);
  CHECK_THROWS_AS(parse_rat("a"), InputError);
  CHECK_THROWS_AS(parse_rat(""), InputError);
  CHECK_THROWS_AS(parse_rat("1/2/3"), InputError);
}

namespace {

// Two single-parameter agents with domains {1,2} and {1,2,3}; agent 0's level
// is 1 iff her bid is 2, agent 1's level mirrors her bid parity.
MechanismTable sample_table() {
  MechanismTable m;
  m.domains.resize(2);
  m.domains[0].name = "a";
  m.domains[0].scalar_types = {Rat(1), Rat(2)};
  m.domains[1].name = "b";
  m.domains[1].scalar_types = {Rat(1), Rat(2), Rat(3)};
  m.allocation.assign(6, std::vector<Rat>(2, Rat(0)));
  for (long r = 0; r < 6; ++r) {
    Profile x = m.profile_of(r);
    m.allocation[r][0] = x[0] == 1 ? 1 : 0;
    m.allocation[r][1] = x[1] % 2;
  }
  m.validate();
  return m;
}

}  // namespace

TEST_CASE("profile ranks are lexicographic with agent 0 most significant") {
  MechanismTable m = sample_table();
  REQUIRE(m.num_profiles() == 6);
  long r = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) {
      Profile x{a, b};
      CHECK(m.rank_of(x) == r);
      CHECK(m.profile_of(r) == x);
      ++r;
    }
}

TEST_CASE("opponent profiles and compose are inverse views of a profile") {
  MechanismTable m = sample_table();
  for (int i = 0; i < 2; ++i) {
    long nopp = m.num_opponent_profiles(i);
    CHECK(nopp == (i == 0 ? 3 : 2));
    for (int bid = 0; bid < m.domains[i].size(); ++bid)
      for (long o = 0; o < nopp; ++o) {
        long full = m.compose(i, bid, o);
        Profile x = m.profile_of(full);
        CHECK(x[i] == bid);
        std::vector<int> opp = m.opponent_profile_of(i, o);
        size_t k = 0;
        for (int j = 0; j < 2; ++j)
          if (j != i) CHECK(x[j] == opp[k++]);
      }
  }
}

TEST_CASE("single-parameter valuation is type times level") {
  MechanismTable m = sample_table();
  long r = m.rank_of({1, 1});  // agent 0 bids 2 (level 1), agent 1 bids 2 (level 1)
  CHECK(m.valuation(0, 1, r) == Rat(2));
  CHECK(m.valuation(0, 0, r) == Rat(1));  // true type 1, same level
  CHECK(m.valuation(1, 2, r) == Rat(3));  // true type 3 at level 1
  CHECK(m.valuation(1, 2, m.rank_of({1, 2})) == Rat(0));  // bid 3 has level 0
  long r0 = m.rank_of({0, 1});
  CHECK(m.valuation(0, 1, r0) == Rat(0));
}

TEST_CASE("utility adds payments in the core sign convention") {
  MechanismTable m = sample_table();
  m.payments.emplace(m.num_profiles(), std::vector<Rat>(2, Rat(0)));
  long r = m.rank_of({1, 0});
  (*m.payments)[r][0] = Rat(-3, 2);
  CHECK(m.utility(0, 1, r) == Rat(2) - Rat(3, 2));
  CHECK(m.utility(0, 0, r) == Rat(1) - Rat(3, 2));
}

TEST_CASE("general valuation agents index a valuation matrix") {
  MechanismTable m;
  m.domains.resize(1);
  m.domains[0].single_parameter = false;
  m.domains[0].valuations = {{Rat(5), Rat(0)}, {Rat(1), Rat(2)}};
  m.outcomes = {"left", "right"};
  // Two types, outcomes chosen by the bid: type index selects the outcome.
  m.allocation = {{Rat(0)}, {Rat(1)}};
  m.validate();
  CHECK(m.valuation(0, 0, 0) == Rat(5));
  CHECK(m.valuation(0, 0, 1) == Rat(0));
  CHECK(m.valuation(0, 1, 1) == Rat(2));
}

TEST_CASE("validate rejects malformed tables") {
  MechanismTable m = sample_table();
  SECTION("non-increasing scalar domain") {
    m.domains[0].scalar_types = {Rat(2), Rat(2)};
    CHECK_THROWS_AS(m.validate(), InputError);
  }
  SECTION("wrong allocation row count") {
    m.allocation.pop_back();
    CHECK_THROWS_AS(m.validate(), InputError);
  }
  SECTION("wrong payments shape") {
    m.payments.emplace(m.num_profiles() - 1, std::vector<Rat>(2, Rat(0)));
    CHECK_THROWS_AS(m.validate(), InputError);
  }
  SECTION("general agent outcome index out of range") {
    MechanismTable g;
    g.domains.resize(1);
    g.domains[0].single_parameter = false;
    g.domains[0].valuations = {{Rat(1)}, {Rat(2)}};
    g.outcomes = {"only"};
    g.allocation = {{Rat(0)}, {Rat(5)}};
    CHECK_THROWS_AS(g.validate(), InputError);
  }
}

TEST_CASE("payment access without payments present fails") {
  MechanismTable m = sample_table();
  CHECK_THROWS_AS(m.payment(0, 0), PaymentsRequiredError);
  CHECK_THROWS_AS(check_ir(m), PaymentsRequiredError);
  m.payments.emplace(m.num_profiles(), std::vector<Rat>(2, Rat(0)));
  CHECK(check_ir(m).holds);  // non-negative valuations, zero payments
}
