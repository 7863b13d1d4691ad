#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subs/domain.hpp"
#include "subs/program.hpp"
#include "subs/span_tree.hpp"

namespace subs {

struct Example {
  std::string id;
  std::vector<std::string> tokens;
  Program program;
  SpanTree tree;
};

class Corpus {
 public:
  Corpus() = default;
  // Throws DuplicateId, or UnknownTokenization when a tree's tokens differ
  // from its example's.
  explicit Corpus(std::vector<Example> examples);

  std::span<const Example> examples() const noexcept { return examples_; }
  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  const Example& operator[](std::size_t i) const { return examples_[i]; }

 private:
  std::vector<Example> examples_;
};

class CategoryIndex {
 public:
  using Bucket = std::vector<SubtreeRef>;

  explicit CategoryIndex(std::map<std::string, Bucket> buckets) : buckets_(std::move(buckets)) {}

  const std::map<std::string, Bucket>& buckets() const noexcept { return buckets_; }
  const Bucket* find(const std::string& category) const;
  std::size_t ref_count() const noexcept;
  bool empty() const noexcept { return buckets_.empty(); }

 private:
  std::map<std::string, Bucket> buckets_;
};

// Refs in each bucket are ordered by (example position, span).
CategoryIndex build_index(const Corpus& c, const Domain& d, std::size_t workers = 1);

enum class DedupMode { train_and_self, self_only, none };

const char* dedup_mode_name(DedupMode mode);
std::optional<DedupMode> parse_dedup_mode(std::string_view name);

struct AugmentOptions {
  std::size_t rounds = 1;
  std::optional<std::size_t> max_output;
  std::uint64_t seed = 0;
  DedupMode dedup = DedupMode::train_and_self;
  bool allow_same_example = false;
  std::size_t workers = 1;
  // Keep the spliced span tree on every output (needed for rounds > 1).
  bool keep_trees = false;
};

std::string options_fingerprint_text(const AugmentOptions& o);

struct Provenance {
  std::string host_id;
  Span host_span;
  std::string donor_id;
  Span donor_span;
  std::string category;
  // Where the donor program sits inside the augmented program. Optional in
  // files written by other tools.
  std::optional<ProgramPath> program_path;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct AugmentedExample {
  std::string id;
  std::vector<std::string> tokens;
  Program program;
  std::optional<Provenance> provenance;
  std::optional<SpanTree> tree;
};

struct AugmentSummary {
  std::size_t rounds = 0;
  // Ordered (host, donor) ref pairs within a category, after the
  // same-example filter.
  std::size_t candidate_pairs = 0;
  // Pairs whose splice failed the soundness cross-check.
  std::size_t skipped = 0;
  // Distinct (utterance, program) results.
  std::size_t distinct = 0;
  // Distinct results that are not training pairs.
  std::size_t distinct_not_in_train = 0;
  // Results kept under the configured dedup mode.
  std::size_t kept = 0;
  // Results after max_output sampling.
  std::size_t output = 0;
};

struct AugmentResult {
  std::vector<AugmentedExample> examples;
  AugmentSummary summary;
};

AugmentResult augment(const Corpus& c, const Domain& d, const AugmentOptions& opts = {});

// Exact dedup key: space-joined utterance and canonical program.
std::string pair_key(std::span<const std::string> tokens, const Program& program);

struct TrainingPair {
  std::vector<std::string> tokens;
  Program program;
};

// Drops entries equal to a pair in `against` or to an earlier kept entry.
std::vector<AugmentedExample> dedup(std::vector<AugmentedExample> aug,
                                    std::span<const TrainingPair> against);

}  // namespace subs
