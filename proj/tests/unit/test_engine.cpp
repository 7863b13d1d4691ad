#include <doctest.h>

#include <set>

#include "subs/engine.hpp"
#include "subs/error.hpp"
#include "support/bracket.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace subs;
using testing_support::bracket_tree;

namespace {

const char* kFg = R"json({
  "name": "fg", "types": ["t"], "func_mode": "outer_symbol",
  "constants": [
    {"name": "a", "kind": "entity", "arity": 0, "arg_types": [], "result_type": "t"},
    {"name": "b", "kind": "entity", "arity": 0, "arg_types": [], "result_type": "t"},
    {"name": "f", "kind": "predicate", "arity": 1, "arg_types": ["t"], "result_type": "t"},
    {"name": "g", "kind": "predicate", "arity": 1, "arg_types": ["t"], "result_type": "t"},
    {"name": "g#a", "kind": "entity", "arity": 0, "arg_types": [], "result_type": "t", "leaf_expansion": "g ( a )"},
    {"name": "g#b", "kind": "entity", "arity": 0, "arg_types": [], "result_type": "t", "leaf_expansion": "g ( b )"}
  ]})json";

Example make(const std::string& id, const std::string& bracket, const std::string& program) {
  SpanTree t = bracket_tree(bracket);
  return {id, t.tokens, parse_program(program), t};
}

std::string joined(const std::vector<std::string>& toks) { return oracle::join(toks); }

oracle::PairSet pairs_of(const std::vector<AugmentedExample>& aug) {
  oracle::PairSet s;
  for (const auto& a : aug) s.emplace(joined(a.tokens), render_program(a.program));
  return s;
}

std::string serialize(const std::vector<AugmentedExample>& aug) {
  std::string out;
  for (const auto& a : aug) {
    out += a.id + "|" + joined(a.tokens) + "|" + render_program(a.program);
    const Provenance& p = *a.provenance;
    out += "|" + p.host_id + to_string(p.host_span) + p.donor_id + to_string(p.donor_span) + p.category +
           p.program_path->to_string() + "\n";
  }
  return out;
}

Corpus random_corpus(const Domain& d, std::uint64_t seed, std::size_t n, std::size_t max_depth = 6) {
  testing_support::Rng rng(seed);
  return Corpus(testing_support::random_corpus(d, rng, n, max_depth));
}

}  // namespace

TEST_CASE("toy corpus yields exactly the two cross swaps") {
  Domain d = load_domain(kFg);
  Corpus c({make("e1", "(a:f b:g#a)", "f ( g ( a ) )"), make("e2", "(c:f d:g#b)", "f ( g ( b ) )")});
  AugmentResult r = augment(c, d);
  REQUIRE(r.examples.size() == 2);
  CHECK(pairs_of(r.examples) ==
        oracle::PairSet{{"a d", "f ( g ( b ) )"}, {"c b", "f ( g ( a ) )"}});
  CHECK(r.examples[0].id == "aug1-1");
  CHECK(r.examples[0].provenance->host_id == "e1");
  CHECK(r.examples[0].provenance->category == "g");
  CHECK(r.summary.candidate_pairs == 4);
  CHECK(r.summary.distinct == 4);
  CHECK(r.summary.distinct_not_in_train == 2);
  CHECK(r.summary.kept == 2);
  CHECK(r.summary.output == 2);

  AugmentOptions none;
  none.dedup = DedupMode::none;
  CHECK(augment(c, d, none).examples.size() == 4);
  AugmentOptions self;
  self.dedup = DedupMode::self_only;
  CHECK(augment(c, d, self).examples.size() == 4);
}

TEST_CASE("build_index") {
  Domain d = load_domain(kFg);
  Corpus c({make("e1", "(a:f b:g#a)", "f ( g ( a ) )"), make("e2", "(c:f d:g#b)", "f ( g ( b ) )")});
  CategoryIndex idx = build_index(c, d);
  REQUIRE(idx.find("g") != nullptr);
  CHECK(idx.find("g")->size() >= 2);
  for (const auto& [label, refs] : idx.buckets())
    for (std::size_t i = 0; i < refs.size(); ++i) {
      CHECK(refs[i].category.label() == label);
      if (i) CHECK(std::tie(refs[i - 1].example, refs[i - 1].span) < std::tie(refs[i].example, refs[i].span));
    }
  CHECK(build_index(Corpus{}, d).empty());

  std::vector<Example> scan;
  std::size_t directions = 0;
  int n = 0;
  for (const auto& cmd : testing_support::scan_commands()) {
    if (n++ % 97) continue;
    scan.push_back(testing_support::scan_example(cmd, "s" + std::to_string(n)));
    for (const auto& tok : scan.back().tokens) directions += tok == "left" || tok == "right";
  }
  CategoryIndex sidx = build_index(Corpus(scan), testing_support::scan_domain(), 3);
  REQUIRE(sidx.buckets().size() == 1);
  CHECK(sidx.buckets().begin()->first == "direction");
  CHECK(sidx.ref_count() == directions);
}

TEST_CASE("empty corpus") {
  Domain d = load_domain(kFg);
  AugmentResult r = augment(Corpus{}, d);
  CHECK(r.examples.empty());
  CHECK(r.summary.candidate_pairs == 0);
}

TEST_CASE("corpus invariants") {
  Example e = make("e1", "(a:f b:g#a)", "f ( g ( a ) )");
  try {
    Corpus({e, e});
    FAIL("expected DuplicateId");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::duplicate_id);
  }
  Example bad = e;
  bad.tokens[0] = "z";
  try {
    Corpus({bad});
    FAIL("expected UnknownTokenization");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::unknown_tokenization);
  }
}

TEST_CASE("dedup") {
  TrainingPair train{{"a", "b"}, parse_program("f ( a )")};
  AugmentedExample same{"x1", {"a", "b"}, parse_program("f ( a )"), std::nullopt, std::nullopt};
  AugmentedExample other{"x2", {"c"}, parse_program("a"), std::nullopt, std::nullopt};
  AugmentedExample again{"x3", {"c"}, parse_program("a"), std::nullopt, std::nullopt};
  auto out = dedup({same, other, again}, std::span<const TrainingPair>(&train, 1));
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "x2");
  CHECK(dedup({other, again}, {}).size() == 1);
  CHECK(pair_key(std::vector<std::string>{"a", "b"}, parse_program("f(a)")) == "a b\tf ( a )");
}

TEST_CASE("augment equals the brute-force oracle on small corpora") {
  for (const char* json : {testing_support::kToyOuter, testing_support::kToyMapped}) {
    Domain d = load_domain(json);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      std::size_t n = 2 + seed % 9;
      Corpus c = random_corpus(d, seed, n);
      std::vector<Example> ex(c.examples().begin(), c.examples().end());
      auto expect = oracle::brute_force(testing_support::oracle_inputs(ex), d);
      AugmentResult r = augment(c, d);
      CHECK(pairs_of(r.examples) == expect.pairs);
      CHECK(r.examples.size() == expect.pairs.size());

      AugmentOptions self;
      self.dedup = DedupMode::self_only;
      auto expect_self = oracle::brute_force(testing_support::oracle_inputs(ex), d, false);
      CHECK(pairs_of(augment(c, d, self).examples) == expect_self.pairs);

      AugmentOptions none;
      none.dedup = DedupMode::none;
      AugmentResult all = augment(c, d, none);
      CHECK(all.examples.size() == expect.matched - expect.unsound);
      CHECK(all.summary.candidate_pairs == expect.matched);
      CHECK(all.summary.skipped == expect.unsound);
    }
  }
}

TEST_CASE("properties of augmented output") {
  Domain d = load_domain(testing_support::kToyMapped);
  Corpus c = random_corpus(d, 77, 25);
  AugmentResult r = augment(c, d);
  REQUIRE(r.examples.size() > 20);
  std::set<std::string> train;
  std::map<std::string, const Example*> by_id;
  for (const Example& e : c.examples()) {
    train.insert(pair_key(e.tokens, e.program));
    by_id[e.id] = &e;
  }
  std::set<std::string> seen;
  for (const AugmentedExample& a : r.examples) {
    const Provenance& p = *a.provenance;
    const Example& host = *by_id.at(p.host_id);
    const Example& donor = *by_id.at(p.donor_id);
    CHECK(p.host_id != p.donor_id);
    std::span<const std::string> seg(donor.tokens);
    seg = seg.subspan(p.donor_span.begin, p.donor_span.size());
    // Soundness: x' and z' are reproducible from the provenance.
    CHECK(splice_utterance(host.tokens, p.host_span.begin, p.host_span.end, seg) == a.tokens);
    const Program& inserted = subprogram_at(a.program, *p.program_path);
    CHECK(replace_subprogram(host.program, *p.program_path, inserted) == a.program);
    // Category preservation.
    CHECK(semantic_category(inserted, d).to_string() == p.category);
    CHECK(semantic_category(subprogram_at(host.program, *p.program_path), d).to_string() == p.category);
    CHECK(parse_program(render_program(a.program)) == a.program);
    CHECK_FALSE(a.tokens.empty());
    std::string key = pair_key(a.tokens, a.program);
    CHECK(train.count(key) == 0);
    CHECK(seen.insert(key).second);
  }
}

TEST_CASE("determinism and worker invariance") {
  Domain d = load_domain(testing_support::kToyOuter);
  Corpus c = random_corpus(d, 3, 30);
  AugmentOptions o;
  o.seed = 7;
  o.max_output = 15;
  std::string base = serialize(augment(c, d, o).examples);
  for (std::size_t w : {1u, 2u, 4u, 8u}) {
    o.workers = w;
    CHECK(serialize(augment(c, d, o).examples) == base);
  }
}

TEST_CASE("max_output sampling") {
  Domain d = load_domain(testing_support::kToyOuter);
  Corpus c = random_corpus(d, 4, 30);
  AugmentResult full = augment(c, d);
  REQUIRE(full.examples.size() > 10);
  oracle::PairSet all = pairs_of(full.examples);
  for (std::size_t k : {0ul, 1ul, 5ul, full.examples.size() - 1, full.examples.size(),
                        full.examples.size() + 10}) {
    AugmentOptions o;
    o.max_output = k;
    o.seed = 99;
    AugmentResult s = augment(c, d, o);
    CHECK(s.examples.size() == std::min(k, full.examples.size()));
    CHECK(s.examples.size() <= full.examples.size());
    for (const auto& p : pairs_of(s.examples)) CHECK(all.count(p) == 1);
    CHECK(serialize(augment(c, d, o).examples) == serialize(s.examples));
  }
  AugmentOptions a, b;
  a.max_output = b.max_output = 5;
  a.seed = 1;
  b.seed = 2;
  CHECK(serialize(augment(c, d, a).examples) != serialize(augment(c, d, b).examples));
}

TEST_CASE("rounds and same-example swaps only add data") {
  Domain d = load_domain(testing_support::kToyOuter);
  // Shallow programs: a second round over deep ones grows past memory.
  Corpus c = random_corpus(d, 2, 6, 3);
  AugmentResult one = augment(c, d);
  AugmentOptions two;
  two.rounds = 2;
  AugmentResult r2 = augment(c, d, two);
  CHECK(r2.summary.rounds == 2);
  oracle::PairSet p2 = pairs_of(r2.examples);
  for (const auto& p : pairs_of(one.examples)) CHECK(p2.count(p) == 1);
  CHECK(p2.size() >= one.examples.size());

  AugmentOptions same;
  same.allow_same_example = true;
  oracle::PairSet ps = pairs_of(augment(c, d, same).examples);
  for (const auto& p : pairs_of(one.examples)) CHECK(ps.count(p) == 1);
  std::vector<Example> ex(c.examples().begin(), c.examples().end());
  CHECK(ps == oracle::brute_force(testing_support::oracle_inputs(ex), d, true, true).pairs);
}

TEST_CASE("kept trees evaluate to the augmented program") {
  Domain d = load_domain(testing_support::kToyMapped);
  Corpus c = random_corpus(d, 12, 12);
  AugmentOptions o;
  o.keep_trees = true;
  for (const auto& a : augment(c, d, o).examples) {
    REQUIRE(a.tree.has_value());
    CHECK(a.tree->tokens == a.tokens);
    CHECK(program_of_tree(*a.tree, d) == a.program);
  }
}

TEST_CASE("dedup mode names") {
  CHECK(parse_dedup_mode("self_only") == DedupMode::self_only);
  CHECK_FALSE(parse_dedup_mode("sometimes").has_value());
  CHECK(std::string(dedup_mode_name(DedupMode::none)) == "none");
  AugmentOptions o;
  std::string text = options_fingerprint_text(o);
  o.workers = 9;
  CHECK(options_fingerprint_text(o) == text);
  o.seed = 1;
  CHECK(options_fingerprint_text(o) != text);
}
