#include "subs/engine.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <random>
#include <thread>
#include <tuple>
#include <unordered_set>

#include "subs/error.hpp"

namespace subs {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

void shape_into(const SpanNode& n, std::size_t origin, std::string& out) {
  out += '(';
  out += std::to_string(n.span.begin - origin) + ":" + std::to_string(n.span.end - origin);
  out += n.label == NodeLabel::constant ? "=" + n.category
                                        : (n.label == NodeLabel::null ? "~" : "*");
  for (const SpanNode& c : n.children) shape_into(c, origin, out);
  out += ')';
}

// Two donors with equal signatures splice to identical results in any host.
std::string donor_signature(const Example& ex, const SubtreeRef& ref) {
  std::span<const std::string> toks(ex.tokens);
  std::string sig = join_tokens(toks.subspan(ref.span.begin, ref.span.size()));
  sig += '\x1f';
  sig += render_program(ref.program);
  sig += '\x1f';
  shape_into(node_at(ex.tree, ref.node), ref.span.begin, sig);
  return sig;
}

struct Candidate {
  std::size_t host = 0;
  Span host_span;
  std::size_t donor = 0;
  Span donor_span;
  const std::string* category = nullptr;
  const ProgramPath* program_path = nullptr;
  // Number of enumerated pairs this candidate stands for.
  std::size_t weight = 1;
  bool ok = false;
  std::vector<std::string> tokens;
  std::optional<Program> program;
  std::optional<SpanTree> tree;
};

struct BucketPlan {
  const CategoryIndex::Bucket* refs = nullptr;
  // Donor groups with identical signatures, members in bucket order.
  std::vector<std::vector<std::size_t>> groups;
};

class RoundRunner {
 public:
  RoundRunner(const Corpus& pool, const Domain& d, const AugmentOptions& opts)
      : pool_(pool), domain_(d), opts_(opts), index_(build_index(pool, d, opts.workers)) {
    for (const auto& [label, refs] : index_.buckets()) {
      BucketPlan plan;
      plan.refs = &refs;
      if (opts_.dedup != DedupMode::none) {
        std::map<std::string, std::size_t> group_of;
        for (std::size_t i = 0; i < refs.size(); ++i) {
          std::string sig = donor_signature(pool_[refs[i].example], refs[i]);
          auto [it, fresh] = group_of.emplace(std::move(sig), plan.groups.size());
          if (fresh) plan.groups.emplace_back();
          plan.groups[it->second].push_back(i);
        }
      } else {
        for (std::size_t i = 0; i < refs.size(); ++i) plan.groups.push_back({i});
      }
      plans_.emplace(label, std::move(plan));
      for (const SubtreeRef& r : refs) hosts_.push_back(&r);
    }
    std::sort(hosts_.begin(), hosts_.end(), [](const SubtreeRef* a, const SubtreeRef* b) {
      return std::tie(a->example, a->span) < std::tie(b->example, b->span);
    });
  }

  std::size_t unit_count() const noexcept { return hosts_.size(); }

  // All candidates with host ref `unit`, ordered by donor (position, span).
  std::vector<Candidate> run_unit(std::size_t unit) const {
    const SubtreeRef& host_ref = *hosts_[unit];
    const BucketPlan& plan = plans_.at(host_ref.category.label());
    const Example& host = pool_[host_ref.example];
    std::vector<Candidate> out;
    for (const auto& group : plan.groups) {
      const SubtreeRef* first = nullptr;
      std::size_t weight = 0;
      for (std::size_t i : group) {
        const SubtreeRef& r = (*plan.refs)[i];
        if (!opts_.allow_same_example && r.example == host_ref.example) continue;
        if (!first) first = &r;
        ++weight;
      }
      if (!first) continue;
      Candidate c;
      c.host = host_ref.example;
      c.host_span = host_ref.span;
      c.donor = first->example;
      c.donor_span = first->span;
      c.category = &host_ref.category.label();
      c.program_path = &host_ref.program_path;
      c.weight = weight;
      splice(host, host_ref, pool_[first->example], *first, c);
      out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.donor, a.donor_span) < std::tie(b.donor, b.donor_span);
    });
    return out;
  }

 private:
  void splice(const Example& host, const SubtreeRef& target, const Example& donor_ex,
              const SubtreeRef& donor, Candidate& c) const {
    try {
      std::span<const std::string> donor_tokens(donor_ex.tokens);
      donor_tokens = donor_tokens.subspan(donor.span.begin, donor.span.size());
      std::vector<std::string> tokens =
          splice_utterance(host.tokens, target.span.begin, target.span.end, donor_tokens);
      Program program = replace_subprogram(host.program, target.program_path, donor.program);
      SpanTree tree = splice_tree(host.tree, target, donor_ex.tree, donor);
      if (tree.tokens != tokens || program_of_tree(tree, domain_) != program) return;
      c.tokens = std::move(tokens);
      c.program = std::move(program);
      if (opts_.keep_trees || opts_.rounds > 1) c.tree = std::move(tree);
      c.ok = true;
    } catch (const Error&) {
      c.ok = false;
    }
  }

  const Corpus& pool_;
  const Domain& domain_;
  const AugmentOptions& opts_;
  CategoryIndex index_;
  std::map<std::string, BucketPlan> plans_;
  std::vector<const SubtreeRef*> hosts_;
};

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t range) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % range;
}

// Indices of a uniform sample of k out of n, ascending.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + bounded(rng, n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Corpus::Corpus(std::vector<Example> examples) : examples_(std::move(examples)) {
  std::unordered_set<std::string> ids;
  for (const Example& e : examples_) {
    if (!ids.insert(e.id).second) throw Error(ErrorCode::duplicate_id, "duplicate example id '" + e.id + "'");
    if (e.tree.tokens != e.tokens)
      throw Error(ErrorCode::unknown_tokenization,
                  "tree tokens of '" + e.id + "' differ from its utterance tokens");
  }
}

const CategoryIndex::Bucket* CategoryIndex::find(const std::string& category) const {
  auto it = buckets_.find(category);
  return it == buckets_.end() ? nullptr : &it->second;
}

std::size_t CategoryIndex::ref_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [k, v] : buckets_) n += v.size();
  return n;
}

CategoryIndex build_index(const Corpus& c, const Domain& d, std::size_t workers) {
  std::vector<std::vector<SubtreeRef>> per_example(c.size());
  parallel_for(c.size(), workers, [&](std::size_t i) {
    per_example[i] = enumerate_exchangeable_subtrees(c[i].tree, d, i, c[i].id);
  });
  std::map<std::string, CategoryIndex::Bucket> buckets;
  for (auto& refs : per_example)
    for (SubtreeRef& r : refs) {
      std::string label = r.category.label();
      buckets[label].push_back(std::move(r));
    }
  return CategoryIndex(std::move(buckets));
}

const char* dedup_mode_name(DedupMode mode) {
  switch (mode) {
    case DedupMode::train_and_self: return "train_and_self";
    case DedupMode::self_only: return "self_only";
    case DedupMode::none: return "none";
  }
  return "train_and_self";
}

std::optional<DedupMode> parse_dedup_mode(std::string_view name) {
  if (name == "train_and_self") return DedupMode::train_and_self;
  if (name == "self_only") return DedupMode::self_only;
  if (name == "none") return DedupMode::none;
  return std::nullopt;
}

std::string options_fingerprint_text(const AugmentOptions& o) {
  return "rounds=" + std::to_string(o.rounds) + ";max_output=" +
         (o.max_output ? std::to_string(*o.max_output) : std::string("none")) +
         ";seed=" + std::to_string(o.seed) + ";dedup=" + dedup_mode_name(o.dedup) +
         ";allow_same_example=" + (o.allow_same_example ? "1" : "0");
}

std::string pair_key(std::span<const std::string> tokens, const Program& program) {
  return join_tokens(tokens) + '\t' + render_program(program);
}

AugmentResult augment(const Corpus& c, const Domain& d, const AugmentOptions& opts) {
  if (opts.rounds < 1) throw Error(ErrorCode::invalid_argument, "rounds must be >= 1");

  AugmentResult result;
  std::unordered_set<std::string> train_keys;
  for (const Example& e : c.examples()) train_keys.insert(pair_key(e.tokens, e.program));
  std::unordered_set<std::string> seen;

  std::vector<Example> pool(c.examples().begin(), c.examples().end());
  std::vector<AugmentedExample> kept;

  for (std::size_t round = 1; round <= opts.rounds; ++round) {
    const Corpus pool_corpus(pool);
    RoundRunner runner(pool_corpus, d, opts);
    std::vector<AugmentedExample> fresh_round;

    const std::size_t batch = 256 * std::max<std::size_t>(1, opts.workers);
    for (std::size_t start = 0; start < runner.unit_count(); start += batch) {
      const std::size_t n = std::min(batch, runner.unit_count() - start);
      std::vector<std::vector<Candidate>> results(n);
      parallel_for(n, opts.workers, [&](std::size_t i) { results[i] = runner.run_unit(start + i); });

      for (auto& unit : results)
        for (Candidate& cand : unit) {
          result.summary.candidate_pairs += cand.weight;
          if (!cand.ok) {
            result.summary.skipped += cand.weight;
            continue;
          }
          std::string key = pair_key(cand.tokens, *cand.program);
          const bool fresh = seen.insert(key).second;
          const bool in_train = train_keys.contains(key);
          if (fresh) ++result.summary.distinct;
          if (fresh && !in_train) ++result.summary.distinct_not_in_train;
          bool keep = true;
          if (opts.dedup == DedupMode::self_only) keep = fresh;
          if (opts.dedup == DedupMode::train_and_self) keep = fresh && !in_train;
          if (!keep) continue;

          AugmentedExample a{
              "aug" + std::to_string(round) + "-" + std::to_string(fresh_round.size() + 1),
              std::move(cand.tokens),
              std::move(*cand.program),
              Provenance{pool_corpus[cand.host].id, cand.host_span, pool_corpus[cand.donor].id,
                         cand.donor_span, *cand.category, *cand.program_path},
              std::move(cand.tree)};
          fresh_round.push_back(std::move(a));
        }
    }

    result.summary.rounds = round;
    if (round < opts.rounds) {
      for (const AugmentedExample& a : fresh_round) {
        pool.push_back(Example{a.id, a.tokens, a.program, *a.tree});
        if (opts.dedup == DedupMode::train_and_self) train_keys.insert(pair_key(a.tokens, a.program));
      }
    }
    const bool done = fresh_round.empty();
    kept.insert(kept.end(), std::make_move_iterator(fresh_round.begin()),
                std::make_move_iterator(fresh_round.end()));
    if (done) break;
  }

  result.summary.kept = kept.size();
  if (opts.max_output && *opts.max_output < kept.size()) {
    std::vector<AugmentedExample> sampled;
    sampled.reserve(*opts.max_output);
    for (std::size_t i : sample_indices(kept.size(), *opts.max_output, opts.seed))
      sampled.push_back(std::move(kept[i]));
    kept = std::move(sampled);
  }
  if (!opts.keep_trees)
    for (AugmentedExample& a : kept) a.tree.reset();
  result.summary.output = kept.size();
  result.examples = std::move(kept);
  return result;
}

std::vector<AugmentedExample> dedup(std::vector<AugmentedExample> aug,
                                    std::span<const TrainingPair> against) {
  std::unordered_set<std::string> seen;
  for (const TrainingPair& p : against) seen.insert(pair_key(p.tokens, p.program));
  std::vector<AugmentedExample> out;
  out.reserve(aug.size());
  for (AugmentedExample& a : aug)
    if (seen.insert(pair_key(a.tokens, a.program)).second) out.push_back(std::move(a));
  return out;
}

}  // namespace subs
