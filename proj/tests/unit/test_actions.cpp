#include <algorithm>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "insight/actions.hpp"
#include "insight/error.hpp"
#include "insight/mining.hpp"

using namespace insight;
using namespace insight::actions;
using tabular::Dataset;

namespace {

std::vector<std::string> canonicals(const std::vector<ActionTemplate>& ts, std::size_t cap = 100000) {
  std::vector<std::string> out;
  for (const auto& t : ts)
    for (const auto& a : t.enumerate(cap)) out.push_back(a.canonical());
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

GroundAction act(std::string_view text) { return parse_action(text); }

}  // namespace

TEST_CASE("canonical forms parse back") {
  for (const char* text : {"select(Score)", "derive(Score,bins,10)", "derive(Exam Date,-,Course Duration)",
                           "where(Score,<,60)", "group(Student;max(Exam Date),avg(Score))", "tree(Score,2)",
                           "outliers(Score)", "bioutliers(A,B)", "cluster(3)", "trend(Exam Date,Score)", "rules()"}) {
    CHECK(act(text).canonical() == text);
  }
  CHECK_THROWS_AS(parse_action("select(Score"), InputError);
  CHECK_THROWS_AS(parse_action("frobnicate(x)"), InputError);
}

TEST_CASE("commutative binops share one canonical form") {
  const GroundAction ab(ActionKind::DeriveBinop, {{"operator", "+"}, {"left", "A"}, {"right", "B"}});
  const GroundAction ba(ActionKind::DeriveBinop, {{"operator", "+"}, {"left", "B"}, {"right", "A"}});
  const GroundAction amb(ActionKind::DeriveBinop, {{"operator", "-"}, {"left", "A"}, {"right", "B"}});
  const GroundAction bma(ActionKind::DeriveBinop, {{"operator", "-"}, {"left", "B"}, {"right", "A"}});
  CHECK(ab.canonical() == ba.canonical());
  CHECK(amb.canonical() != bma.canonical());
}

TEST_CASE("templates on the exam table") {
  const auto d = fixtures::exams();
  const auto all = canonicals(enumerate_templates(d));
  CHECK(contains(all, "derive(Score,bins,10)"));
  CHECK(contains(all, "derive(Exam Date,time,month)"));
  CHECK(contains(all, "derive(Exam Date,-,Course Duration)"));
}

TEST_CASE("the empty dataset only offers select") {
  const auto d = fixtures::exams().empty_view();
  const auto ts = enumerate_templates(d);
  REQUIRE_FALSE(ts.empty());
  for (const auto& t : ts) CHECK(t.kind == ActionKind::Select);
  auto all = canonicals(ts);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::string>{"select(Course Duration)", "select(Exam Date)", "select(Score)",
                                        "select(Student)"});
}

TEST_CASE("a single boolean column has no clustering or trend") {
  std::vector<std::optional<bool>> v;
  for (int i = 0; i < 30; ++i) v.push_back(i % 3 == 0);
  const auto d = Dataset::from_columns({tabular::Column::booleans("flag", v)});
  for (const auto& t : enumerate_templates(d)) {
    CHECK(t.kind != ActionKind::Clustering);
    CHECK(t.kind != ActionKind::Trend);
  }
}

TEST_CASE("precondition classes") {
  const auto d = fixtures::exams();
  CHECK(check_precondition(act("where(Score,<,60)"), d).cls == VerdictClass::Qualitative);
  CHECK(check_precondition(act("derive(Exam Date,-,Course Duration)"), d).ok());
  CHECK(check_precondition(act("select(Nope)"), d).cls == VerdictClass::Hard);
  CHECK(check_precondition(act("derive(Student,+,Score)"), d).cls == VerdictClass::Hard);

  const auto n = Dataset::from_columns({fixtures::numbers("A", {1, 2, 3, 4, 5, 6}),
                                        fixtures::numbers("B", {6, 1, 5, 2, 4, 3})});
  const std::set<std::string> taken = {act("derive(A,+,B)").canonical()};
  PreconditionContext ctx;
  ctx.taken = &taken;
  const GroundAction ba(ActionKind::DeriveBinop, {{"operator", "+"}, {"left", "B"}, {"right", "A"}});
  CHECK(check_precondition(ba, n, ctx).cls == VerdictClass::Search);
  CHECK(check_precondition(ba, n).ok());
}

TEST_CASE("uniform select instantiation is reproducible") {
  const auto e = fixtures::exams().empty_view();
  ActionTemplate t;
  t.kind = ActionKind::Select;
  t.slots = {{"column", {"Student", "Score"}, {}}};
  ParamStatsStore stats;
  std::map<std::string, int> seen;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng a(seed), b(seed);
    const auto x = instantiate(t, e, {}, stats, a);
    const auto y = instantiate(t, e, {}, stats, b);
    REQUIRE(x.has_value());
    CHECK(x->canonical() == y->canonical());
    ++seen[x->canonical()];
  }
  CHECK(seen.size() == 2);
  CHECK(seen.count("select(Student)") == 1);
}

TEST_CASE("weighted-random probabilities follow mean deltas") {
  ParamStatsStore stats;
  stats.at(ActionKind::Select, "column", "v1") = {0.3, 1};
  stats.at(ActionKind::Select, "column", "v2") = {0.2, 2};
  const std::vector<std::string> values = {"v1", "v2"};
  const auto p = weighted_probabilities(ActionKind::Select, "column", values, stats, 0.01);
  const double w1 = 0.3, w2 = 0.1;
  CHECK(p[0] == doctest::Approx(w1 / (w1 + w2)).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(w2 / (w1 + w2)).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("groupby template reaches the frequency aggregation") {
  const auto d = fixtures::exams();
  const auto all = canonicals(enumerate_templates(d), 1000000);
  CHECK(contains(all, "group(Student;max(Exam Date),avg(Score),freq(Course Duration,6 months))"));
}

TEST_CASE("data actions on the exam table") {
  const auto d = fixtures::exams();
  SUBCASE("month of exam date") {
    const auto out = apply_data_action(d, act("derive(Exam Date,time,month)"));
    const auto c = out.columns().back();
    CHECK(c->type() == tabular::ColumnType::Categorical);
    CHECK(c->origin() == tabular::Origin::Derived);
    std::vector<std::string> cells;
    for (std::size_t r = 0; r < out.row_count(); ++r) cells.push_back(c->cell_string(r));
    CHECK(cells == std::vector<std::string>{"9", "8", "1", "5"});
  }
  SUBCASE("where score above 80") {
    const auto out = apply_data_action(d, act("where(Score,>,80)"));
    REQUIRE(out.row_count() == 3);
    const auto s = out.find("Student");
    CHECK(s->cell_string(0) == "S1");
    CHECK(s->cell_string(1) == "S2");
    CHECK(s->cell_string(2) == "S4");
  }
  SUBCASE("group by a unique key") {
    const auto sel = apply_data_action(apply_data_action(d.empty_view(), act("select(Student)")), act("select(Score)"));
    const auto out = apply_data_action(sel, act("group(Student;avg(Score))"));
    CHECK(out.row_count() == 4);
    CHECK(out.column_count() == 2);
  }
  SUBCASE("lineage replays") {
    auto cur = d.empty_view();
    for (const char* a : {"select(Score)", "select(Student)", "where(Score,>,80)", "derive(Score,bins,2)"})
      cur = apply_data_action(cur, act(a));
    auto again = d.empty_view();
    for (const auto& a : cur.lineage()) again = apply_data_action(again, act(a));
    CHECK(again.same_content(cur));
  }
}

TEST_CASE("state keys ignore action order") {
  const auto d = fixtures::exams();
  const auto e = d.empty_view();
  const auto ab = apply_data_action(apply_data_action(e, act("select(Student)")), act("select(Score)"));
  const auto ba = apply_data_action(apply_data_action(e, act("select(Score)")), act("select(Student)"));
  CHECK(canonical_state_key(ab) == canonical_state_key(ba));
  CHECK(canonical_state_key(ab) != canonical_state_key(ab, "cluster(2)"));
  const auto w1 = apply_data_action(d, act("where(Score,>,80)"));
  const auto w2 = apply_data_action(d, act("where(Score,>,84.9)"));
  CHECK(canonical_state_key(w1) == canonical_state_key(w2));
  CHECK(canonical_state_key(w1) != canonical_state_key(d));
}

TEST_CASE("parameter statistics average deltas") {
  ParamStatsStore s;
  s.record(act("select(Score)"), 0.4);
  s.record(act("select(Score)"), 0.2);
  const auto* st = s.find(ActionKind::Select, "column", "Score");
  REQUIRE(st);
  CHECK(st->visits == 2);
  CHECK(*st->mean_delta() == doctest::Approx(0.3));
  CHECK(s.find(ActionKind::Select, "column", "Student") == nullptr);
}
