#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "cicb/constraints.hpp"
#include "cicb/errors.hpp"

using namespace cicb;

namespace {

struct ExpectRow {
  const char* tag;
  int user;
  int state;
  const char* lhs;    // rate components, e.g. "1p 1a 2b"
  const char* mi;     // "Y1b;X1,U2b|U1a" (target;subjects|given)
  const char* guard;  // rate components
};

// Expected two-state constraint table: six rows at each weak-state receiver,
// nine at each strong-state receiver. State 1 is the strong-interference
// state (suffix a), state 2 the weak one (suffix b).
const std::vector<ExpectRow> kTwoState = {
    // receiver 1, weak state
    {"g11", 1, 2, "1p", "Y1b;X1|U1a,U2b", "1p"},
    {"g12", 1, 2, "1p 2b", "Y1b;X1,U2b|U1a", "1p"},
    {"g13", 1, 2, "1p 1a", "Y1b;X1|U1b,U2b", "1p 1a"},
    {"g14", 1, 2, "1p 1a 2b", "Y1b;X1,U2b|U1b", "1p 1a"},
    {"g15", 1, 2, "1p 1a 1b", "Y1b;X1|U2b", "1p 1a 1b"},
    {"g16", 1, 2, "1p 1a 1b 2b", "Y1b;X1,U2b|", "1p 1a 1b"},
    // receiver 1, strong state
    {"d11", 1, 1, "1p", "Y1a;X1|U1a,U2a", "1p"},
    {"d12", 1, 1, "1p 2a", "Y1a;X1,U2a|U1a,U2b", "1p"},
    {"d13", 1, 1, "1p 2a 2b", "Y1a;X1,U2a|U1a", "1p"},
    {"d14", 1, 1, "1p 1a", "Y1a;X1|U1b,U2a", "1p 1a"},
    {"d15", 1, 1, "1p 1a 2a", "Y1a;X1,U2a|U1b,U2b", "1p 1a"},
    {"d16", 1, 1, "1p 1a 2a 2b", "Y1a;X1,U2a|U1b", "1p 1a"},
    {"d17", 1, 1, "1p 1a 1b", "Y1a;X1|U2a", "1p 1a 1b"},
    {"d18", 1, 1, "1p 1a 1b 2a", "Y1a;X1,U2a|U2b", "1p 1a 1b"},
    {"d19", 1, 1, "1p 1a 1b 2a 2b", "Y1a;X1,U2a|", "1p 1a 1b"},
    // receiver 2, weak state
    {"g21", 2, 2, "2p", "Y2b;X2|U2a,U1b", "2p"},
    {"g22", 2, 2, "2p 1b", "Y2b;X2,U1b|U2a", "2p"},
    {"g23", 2, 2, "2p 2a", "Y2b;X2|U2b,U1b", "2p 2a"},
    {"g24", 2, 2, "2p 2a 1b", "Y2b;X2,U1b|U2b", "2p 2a"},
    {"g25", 2, 2, "2p 2a 2b", "Y2b;X2|U1b", "2p 2a 2b"},
    {"g26", 2, 2, "2p 2a 2b 1b", "Y2b;X2,U1b|", "2p 2a 2b"},
    // receiver 2, strong state
    {"d21", 2, 1, "2p", "Y2a;X2|U2a,U1a", "2p"},
    {"d22", 2, 1, "2p 1a", "Y2a;X2,U1a|U2a,U1b", "2p"},
    {"d23", 2, 1, "2p 1a 1b", "Y2a;X2,U1a|U2a", "2p"},
    {"d24", 2, 1, "2p 2a", "Y2a;X2|U2b,U1a", "2p 2a"},
    {"d25", 2, 1, "2p 2a 1a", "Y2a;X2,U1a|U2b,U1b", "2p 2a"},
    {"d26", 2, 1, "2p 2a 1a 1b", "Y2a;X2,U1a|U2b", "2p 2a"},
    {"d27", 2, 1, "2p 2a 2b", "Y2a;X2|U1a", "2p 2a 2b"},
    {"d28", 2, 1, "2p 2a 2b 1a", "Y2a;X2,U1a|U1b", "2p 2a 2b"},
    {"d29", 2, 1, "2p 2a 2b 1a 1b", "Y2a;X2,U1a|", "2p 2a 2b"},
};

// Expected single-state table: four rows per receiver.
const std::vector<ExpectRow> kOneState = {
    {"i11", 1, 1, "1p", "Y1a;X1|U1a,U2a", "1p"},
    {"i12", 1, 1, "1p 2a", "Y1a;X1,U2a|U1a", "1p"},
    {"i13", 1, 1, "1p 1a", "Y1a;X1|U2a", "1p 1a"},
    {"i14", 1, 1, "1p 1a 2a", "Y1a;X1,U2a|", "1p 1a"},
    {"i21", 2, 1, "2p", "Y2a;X2|U2a,U1a", "2p"},
    {"i22", 2, 1, "2p 1a", "Y2a;X2,U1a|U2a", "2p"},
    {"i23", 2, 1, "2p 2a", "Y2a;X2|U1a", "2p 2a"},
    {"i24", 2, 1, "2p 2a 1a", "Y2a;X2,U1a|", "2p 2a"},
};

std::vector<RateComponent> parse_comps(const std::string& text) {
  std::vector<RateComponent> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    RateComponent c;
    c.user = tok[0] - '0';
    c.level = tok[1] == 'p' ? 0 : tok[1] - 'a' + 1;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

VarId parse_var(const std::string& tok) {
  const int state = tok.size() > 2 ? tok[2] - 'a' + 1 : 0;
  if (tok[0] == 'X') return {tok[1] == '1' ? Var::X1 : Var::X2, 0};
  if (tok[0] == 'U') return {tok[1] == '1' ? Var::U1 : Var::U2, state};
  return {tok[1] == '1' ? Var::Y1 : Var::Y2, state};
}

std::vector<VarId> parse_vars(const std::string& text) {
  std::vector<VarId> out;
  std::string tok;
  for (char c : text) {
    if (c == ',' || c == ' ') {
      if (!tok.empty()) out.push_back(parse_var(tok));
      tok.clear();
    } else {
      tok += c;
    }
  }
  if (!tok.empty()) out.push_back(parse_var(tok));
  std::sort(out.begin(), out.end());
  return out;
}

void check_rows(const ConstraintSystem& sys, const std::vector<ExpectRow>& expect) {
  REQUIRE(sys.rows.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) {
    INFO("row " << i << " expected tag " << expect[i].tag << " got " << sys.rows[i].tag);
    const auto& row = sys.rows[i];
    CHECK(row.rx_user == expect[i].user);
    CHECK(row.rx_state == expect[i].state);

    auto lhs = row.lhs;
    std::sort(lhs.begin(), lhs.end());
    CHECK(lhs == parse_comps(expect[i].lhs));

    auto guard = row.guard;
    std::sort(guard.begin(), guard.end());
    CHECK(guard == parse_comps(expect[i].guard));

    const std::string mi = expect[i].mi;
    const auto semi = mi.find(';');
    const auto bar = mi.find('|');
    auto targets = parse_vars(mi.substr(0, semi));
    auto subjects = parse_vars(mi.substr(semi + 1, bar - semi - 1));
    auto given = parse_vars(mi.substr(bar + 1));
    auto rt = row.mi.targets, rs = row.mi.subjects, rg = row.mi.given;
    std::sort(rt.begin(), rt.end());
    std::sort(rs.begin(), rs.end());
    std::sort(rg.begin(), rg.end());
    CHECK(rt == targets);
    CHECK(rs == subjects);
    CHECK(rg == given);
  }
}

}  // namespace

TEST_CASE("hand-coded two-state table matches the expected rows") {
  check_rows(gen_2state(RegionForm::projected), kTwoState);
}

TEST_CASE("general generator at two states matches the expected rows") {
  check_rows(gen_nstate(2, RegionForm::projected), kTwoState);
}

TEST_CASE("general generator equals the hand-coded table structurally") {
  CHECK(structurally_equal(gen_nstate(2), gen_2state()));
}

TEST_CASE("single-state generator produces the eight expected rows") {
  check_rows(gen_nstate(1, RegionForm::projected), kOneState);
}

TEST_CASE("row counts follow the per-receiver formula") {
  // Receiver (k, n) of an N-state system has (N+1)*(N-n+2) rows.
  CHECK(gen_nstate(1).rows.size() == 8);
  CHECK(gen_nstate(2).rows.size() == 30);
  CHECK(gen_nstate(3).rows.size() == 72);
  int count_rx13 = 0;
  for (const auto& row : gen_nstate(3).rows)
    if (row.rx_user == 1 && row.rx_state == 3) ++count_rx13;
  CHECK(count_rx13 == 8);
}

TEST_CASE("generator rejects invalid state counts") {
  CHECK_THROWS_AS(gen_nstate(0), invalid_input_error);
  CHECK_THROWS_AS(gen_nstate(-2), invalid_input_error);
}

TEST_CASE("component indexing is a bijection over both users") {
  auto sys = gen_nstate(2);
  CHECK(sys.dim() == 6);
  for (int i = 0; i < sys.dim(); ++i) {
    CHECK(sys.comp_index(sys.comp_at(i)) == i);
  }
  CHECK_THROWS_AS(sys.comp_index(RateComponent{3, 0}), invalid_input_error);
  CHECK_THROWS_AS(sys.comp_index(RateComponent{1, 5}), invalid_input_error);
}

TEST_CASE("side-information table equals the conditioning sets") {
  auto sys = gen_2state();
  auto table = genie_table(sys);
  REQUIRE(table.size() == sys.rows.size());
  for (size_t i = 0; i < table.size(); ++i) {
    auto want = sys.rows[i].mi.given;
    std::sort(want.begin(), want.end());
    auto got = table[i];
    std::sort(got.begin(), got.end());
    CHECK(got == want);
  }
  // Spot checks against the hand table.
  auto v_of = [&](const char* tag) {
    for (size_t i = 0; i < sys.rows.size(); ++i)
      if (sys.rows[i].tag == tag) return table[i];
    throw std::logic_error("tag not found");
  };
  CHECK(v_of("rx1.s2.o2.e2").empty());
  CHECK(v_of("rx1.s1.o2.e2").empty());
  auto v15 = v_of("rx1.s2.o2.e0");
  REQUIRE(v15.size() == 1);
  CHECK(v15[0] == u2(2));
  auto v11 = v_of("rx1.s1.o0.e0");
  std::sort(v11.begin(), v11.end());
  CHECK(v11 == std::vector<VarId>{u1(1), u2(1)});
}

TEST_CASE("structural equality detects differences") {
  auto a = gen_nstate(2);
  auto b = gen_nstate(2);
  b.rows[3].lhs.push_back(RateComponent{2, 1});
  CHECK_FALSE(structurally_equal(a, b));
  auto c = gen_nstate(2);
  c.rows[0].tag = "renamed";
  CHECK(structurally_equal(a, c));
  CHECK_FALSE(structurally_equal(gen_nstate(1), gen_nstate(2)));
}

TEST_CASE("guards are prefixes of the own-rate components on the left side") {
  for (int n : {1, 2, 3}) {
    auto sys = gen_nstate(n);
    for (const auto& row : sys.rows) {
      auto lhs = row.lhs;
      std::sort(lhs.begin(), lhs.end());
      for (const auto& g : row.guard) {
        CHECK(g.user == row.rx_user);
        CHECK(std::binary_search(lhs.begin(), lhs.end(), g));
      }
      // Guard holds exactly the own-user components of the left side.
      int own = 0;
      for (const auto& comp : lhs)
        if (comp.user == row.rx_user) ++own;
      CHECK(static_cast<int>(row.guard.size()) == own);
    }
  }
}
