#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subs/domain.hpp"
#include "subs/engine.hpp"
#include "subs/error.hpp"
#include "subs/program.hpp"
#include "subs/span_tree.hpp"

namespace subs {

// Whitespace tokenization; the only tokenizer span indices are defined over.
std::vector<std::string> tokenize_utterance(std::string_view utterance);

struct ExampleRecord {
  std::string id;
  std::string utterance;
  Program program;
};

// One JSON object per line: {"id", "utterance", "program"}. Blank lines are
// ignored. Throws MalformedLine(n) or DuplicateId(n).
std::vector<ExampleRecord> read_examples(std::istream& in);
std::vector<ExampleRecord> load_examples(const std::filesystem::path& path);

// Released tab-separated "utterance<TAB>program" files. Ids are "line-<n>".
std::vector<ExampleRecord> read_tsv_examples(std::istream& in);
std::vector<ExampleRecord> load_tsv_examples(const std::filesystem::path& path);

std::string example_to_json(const ExampleRecord& r);

struct TreeRecord {
  std::string id;
  std::size_t line = 0;
  SpanTree tree;
};

struct TreeReadResult {
  std::vector<TreeRecord> trees;
  // Unary wrapper nodes collapsed onto their single child.
  std::size_t binarized = 0;
};

TreeReadResult read_trees(std::istream& in);
std::string tree_to_json(const std::string& id, const SpanTree& tree);
SpanTree tree_from_json(std::string_view json_text);

struct TreeFailure {
  std::string id;
  std::size_t line = 0;
  ErrorCode kind = ErrorCode::validation_failure;
  std::string reason;
};

struct LoadedCorpus {
  Corpus corpus;
  // Per-example validation outcome, in example order.
  std::vector<std::string> ids;
  std::vector<std::optional<TreeFailure>> outcomes;
  std::size_t binarized = 0;

  std::size_t failure_count() const;
};

// Pairs trees with examples and validates each. Failing examples are left out
// of the corpus; in strict mode the first failure throws ValidationFailure.
// Trees naming no example throw UnknownId.
LoadedCorpus assemble_corpus(std::span<const ExampleRecord> examples, const TreeReadResult& trees,
                             const Domain& d, bool strict);
LoadedCorpus load_trees(const std::filesystem::path& path, std::span<const ExampleRecord> examples,
                        const Domain& d, bool strict);

Domain load_domain_file(const std::filesystem::path& path);

std::string augmented_to_json(const AugmentedExample& a);
// Throws MalformedLine(n).
std::vector<AugmentedExample> read_augmented(std::istream& in);
std::vector<AugmentedExample> load_augmented(const std::filesystem::path& path);
void write_augmented(std::span<const AugmentedExample> aug, const std::filesystem::path& path);
// Companion trees file; every example must carry its spliced tree
// (InvalidArgument otherwise).
void write_augmented_trees(std::span<const AugmentedExample> aug, const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace subs
