#include <doctest.h>

#include <algorithm>
#include <random>

#include <json.hpp>

#include "subs/error.hpp"
#include "subs/stats.hpp"
#include "support/fixtures.hpp"

using namespace subs;

namespace {

AugmentedExample aug(const std::string& id, std::vector<std::string> tokens, const std::string& program,
                     Span donor_span, std::vector<std::size_t> path) {
  Provenance p{"h", {0, 1}, "d", donor_span, "c", ProgramPath{std::move(path)}};
  return {id, std::move(tokens), parse_program(program), p, std::nullopt};
}

// Lengths counted by hand:
//   tokens 2, 2, 5; programs 7, 7, 9 tokens (3, 3, 4 symbols);
//   utterance segments 1, 1, 3; program segments g ( b ), g ( a ), f ( a ) = 4 tokens (2 symbols).
std::vector<AugmentedExample> three() {
  return {aug("x1", {"a", "d"}, "f ( g ( b ) )", {1, 2}, {0}),
          aug("x2", {"c", "b"}, "f ( g ( a ) )", {1, 2}, {0}),
          aug("x3", {"w", "u", "x", "y", "d"}, "g ( a , f ( a ) )", {1, 4}, {1})};
}

void check_stat(const LengthStat& s, std::size_t count, std::size_t sum, std::size_t max) {
  CHECK(s.count == count);
  CHECK(s.sum == sum);
  CHECK(s.max == max);
}

}  // namespace

TEST_CASE("complexity stats match hand counts") {
  auto a = three();
  StatsReport r = complexity_stats(a, 2);
  CHECK(r.n_train == 2);
  CHECK(r.n_augmented == 3);
  check_stat(r.utterance, 3, 9, 5);
  check_stat(r.program, 3, 23, 9);
  check_stat(r.program_symbols, 3, 10, 4);
  check_stat(r.utterance_segment, 3, 5, 3);
  check_stat(r.program_segment, 3, 12, 4);
  check_stat(r.program_segment_symbols, 3, 6, 2);
  check_stat(r.segment, 6, 17, 4);

  auto j = nlohmann::json::parse(stats_to_json(r));
  CHECK(j["n_augmented"] == 3);
  CHECK(j["avg_att_l"].get<double>() == doctest::Approx(3.0));
  CHECK(j["max_att_l"] == 5);
  CHECK(j["avg_prg_l"].get<double>() == doctest::Approx(7.67));
  CHECK(j["max_prg_l"] == 9);
  CHECK(j["avg_prg_l_symbols"].get<double>() == doctest::Approx(3.33));
  CHECK(j["avg_att_seg_l"].get<double>() == doctest::Approx(1.67));
  CHECK(j["avg_prg_seg_l"].get<double>() == doctest::Approx(4.0));
  CHECK(j["avg_seg_l"].get<double>() == doctest::Approx(2.83));
  CHECK(j["max_seg_l"] == 4);

  std::string table = stats_to_table(r);
  CHECK(table.find("avg_prg_l") != std::string::npos);
  CHECK(table.find("7.67") != std::string::npos);
}

TEST_CASE("single example: every average equals its maximum") {
  auto a = three();
  a.erase(a.begin() + 1, a.end());
  StatsReport r = complexity_stats(a);
  for (const LengthStat* s : {&r.utterance, &r.program, &r.program_symbols, &r.utterance_segment,
                              &r.program_segment, &r.program_segment_symbols})
    CHECK(s->average() == doctest::Approx(static_cast<double>(s->max)));
}

TEST_CASE("stats invariants") {
  auto a = three();
  std::string base = stats_to_json(complexity_stats(a));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(a.begin(), a.end(), rng);
    CHECK(stats_to_json(complexity_stats(a)) == base);
  }
  StatsReport before = complexity_stats(a);
  a.push_back(aug("x4", {"q"}, "a", {0, 1}, {}));
  StatsReport after = complexity_stats(a);
  CHECK(after.utterance.max >= before.utterance.max);
  CHECK(after.program.max >= before.program.max);
  CHECK(after.segment.max >= before.segment.max);
  for (const LengthStat* s : {&after.utterance, &after.program, &after.segment})
    CHECK(s->average() <= static_cast<double>(s->max));

  // Partial aggregation merges to the same report.
  StatsReport left = complexity_stats(std::span(a).first(2));
  StatsReport right = complexity_stats(std::span(a).subspan(2));
  left.merge(right);
  CHECK(stats_to_json(left) == stats_to_json(after));

  CHECK(complexity_stats({}).n_augmented == 0);
}

TEST_CASE("missing provenance") {
  auto a = three();
  a[1].provenance.reset();
  try {
    complexity_stats(a);
    FAIL("expected MissingProvenance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_provenance);
  }
  auto b = three();
  b[0].provenance->program_path.reset();
  CHECK_THROWS_AS(complexity_stats(b), Error);
}

TEST_CASE("test recovery") {
  auto a = three();
  std::vector<ExampleRecord> test = {
      {"t1", "a d", parse_program("f ( g ( b ) )")},
      {"t2", "a  d", parse_program("f(g(b))")},
      {"t3", "a d", parse_program("f ( g ( a ) )")},
      {"t4", "zzz", parse_program("a")},
  };
  Recovery r = test_recovery(a, test);
  CHECK(r.hits == 2);
  CHECK(r.total == 4);
  CHECK(r.fraction == doctest::Approx(0.5));
  CHECK(r.to_string() == "2/4 (50.00%)");

  Recovery none = test_recovery({}, test);
  CHECK(none.hits == 0);
  CHECK(none.fraction == 0.0);
  Recovery empty = test_recovery(a, {});
  CHECK(empty.hits == 0);
  CHECK(empty.fraction == 0.0);

  std::vector<ExampleRecord> subset = {{"t1", "a d", parse_program("f ( g ( b ) )")},
                                       {"t2", "c b", parse_program("f ( g ( a ) )")}};
  CHECK(test_recovery(a, subset).fraction == 1.0);
  CHECK(Recovery{3351, 4476, 3351.0 / 4476.0}.to_string() == "3351/4476 (74.87%)");
}

TEST_CASE("write_report emits the JSON document") {
  testing_support::TempDir tmp;
  StatsReport r = complexity_stats(three(), 5);
  write_report(r, tmp / "r.json");
  CHECK(read_text_file(tmp / "r.json") == stats_to_json(r) + "\n");
}
