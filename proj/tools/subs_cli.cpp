// subs: validate span-tree corpora, augment them by subtree substitution, and
// report complexity and test-set coverage of the augmented data.

#include <cinttypes>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subs/subs.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

class Failure {
 public:
  explicit Failure(int code) : code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(int rc) {
  switch (rc) {
    case SUBS_ERROR_INVALID_ARGUMENT:
    case SUBS_ERROR_NULL_POINTER:
      return kExitUsage;
    case SUBS_ERROR_PARSE:
    case SUBS_ERROR_SCHEMA:
    case SUBS_ERROR_EVALUATION:
    case SUBS_ERROR_DATA:
    case SUBS_ERROR_IO:
      return kExitData;
    default:
      return kExitInternal;
  }
}

std::string last_error() {
  std::size_t len = 0;
  subs_last_error(nullptr, &len);
  std::string buf(len, '\0');
  if (subs_last_error(buf.data(), &len) != SUBS_OK) return "(no message)";
  buf.resize(len ? len - 1 : 0);
  return buf;
}

void check(int rc) {
  if (rc == SUBS_OK) return;
  std::fprintf(stderr, "error: %s: %s\n", subs_error_description(rc), last_error().c_str());
  throw Failure(exit_code_for(rc));
}

// Calls a buffer-protocol function twice: once for the size, once to fill.
template <typename Fn>
std::string read_string(Fn&& fn) {
  std::size_t len = 0;
  int rc = fn(nullptr, &len);
  if (rc != SUBS_ERROR_INSUFFICIENT_BUFFER) check(rc);
  std::string buf(len, '\0');
  check(fn(buf.data(), &len));
  buf.resize(len - 1);
  return buf;
}

template <typename H, int (*Destroy)(H)>
class Owned {
 public:
  Owned() = default;
  Owned(Owned&& o) noexcept : h(std::exchange(o.h, nullptr)) {}
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Destroy(h); }

  H h = nullptr;
};

using DomainHandle = Owned<subs_domain_t, subs_domain_destroy>;
using CorpusHandle = Owned<subs_corpus_t, subs_corpus_destroy>;
using AugmentedHandle = Owned<subs_augmented_t, subs_augmented_destroy>;

std::string fingerprint(subs_domain_t domain, const subs_augment_options* opts, const std::string& command) {
  std::uint64_t fp = 0;
  check(subs_fingerprint(domain, opts, command.c_str(), &fp));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fp);
  return buf;
}

struct CommonFlags {
  bool json = false;
  bool strict = false;
  bool tsv = false;
  std::size_t workers = 1;
};

std::uint32_t load_flags(const CommonFlags& f) {
  return (f.strict ? SUBS_LOAD_STRICT : 0u) | (f.tsv ? SUBS_LOAD_TSV : 0u);
}

void emit(const CommonFlags& flags, const nlohmann::ordered_json& summary, const std::string& text) {
  if (flags.json) {
    std::printf("%s\n", summary.dump().c_str());
  } else {
    std::fputs(text.c_str(), stdout);
  }
}

int run_validate(const std::string& train, const std::string& trees, const std::string& domain_path,
                 const CommonFlags& flags) {
  DomainHandle domain;
  check(subs_domain_load(&domain.h, domain_path.c_str()));
  const std::string fp = fingerprint(domain.h, nullptr, "validate");
  CorpusHandle corpus;
  // Load leniently so every example gets a line; --strict only changes the exit code.
  check(subs_corpus_load(&corpus.h, domain.h, train.c_str(), trees.c_str(), flags.tsv ? SUBS_LOAD_TSV : 0u));
  std::size_t failures = 0;
  check(subs_corpus_failure_count(corpus.h, &failures));

  nlohmann::ordered_json summary;
  summary["command"] = "validate";
  summary["fingerprint"] = fp;
  summary["report"] = nlohmann::ordered_json::parse(read_string([&](char* out, std::size_t* len) {
    return subs_corpus_report(corpus.h, SUBS_FORMAT_JSON, out, len);
  }));
  std::string text = "fingerprint: " + fp + "\n";
  text += read_string([&](char* out, std::size_t* len) {
    return subs_corpus_report(corpus.h, SUBS_FORMAT_TEXT, out, len);
  });
  text += "failures: " + std::to_string(failures) + "\n";
  emit(flags, summary, text);
  return failures && flags.strict ? kExitData : 0;
}

int run_augment(const std::string& train, const std::string& trees, const std::string& domain_path,
                const std::string& out_path, const std::string& out_trees,
                const subs_augment_options& opts, const CommonFlags& flags) {
  DomainHandle domain;
  check(subs_domain_load(&domain.h, domain_path.c_str()));
  const std::string fp = fingerprint(domain.h, &opts, "augment");
  CorpusHandle corpus;
  check(subs_corpus_load(&corpus.h, domain.h, train.c_str(), trees.c_str(), load_flags(flags)));
  std::size_t n_train = 0, failures = 0;
  check(subs_corpus_size(corpus.h, &n_train));
  check(subs_corpus_failure_count(corpus.h, &failures));

  AugmentedHandle aug;
  check(subs_augment(&aug.h, corpus.h, domain.h, &opts));
  check(subs_augmented_write(aug.h, out_path.c_str()));
  if (!out_trees.empty()) check(subs_augmented_write_trees(aug.h, out_trees.c_str()));

  nlohmann::ordered_json summary;
  summary["command"] = "augment";
  summary["fingerprint"] = fp;
  summary["train_examples"] = n_train;
  summary["excluded_examples"] = failures;
  summary["summary"] = nlohmann::ordered_json::parse(read_string([&](char* out, std::size_t* len) {
    return subs_augmented_summary(aug.h, SUBS_FORMAT_JSON, out, len);
  }));
  summary["out"] = out_path;
  std::string text = "fingerprint: " + fp + "\n";
  text += "train_examples=" + std::to_string(n_train) + "\n";
  text += "excluded_examples=" + std::to_string(failures) + "\n";
  text += read_string([&](char* out, std::size_t* len) {
    return subs_augmented_summary(aug.h, SUBS_FORMAT_TEXT, out, len);
  });
  text += "wrote " + out_path + "\n";
  emit(flags, summary, text);
  return 0;
}

std::optional<DomainHandle> maybe_domain(const std::string& path) {
  std::optional<DomainHandle> d;
  if (path.empty()) return d;
  d.emplace();
  check(subs_domain_load(&d->h, path.c_str()));
  return d;
}

int run_stats(const std::string& aug_path, const std::string& train, const std::string& out_path,
              const std::string& domain_path, const CommonFlags& flags) {
  auto domain = maybe_domain(domain_path);
  const std::string fp = fingerprint(domain ? domain->h : nullptr, nullptr, "stats");
  std::size_t n_train = 0;
  if (!train.empty()) check(subs_count_examples(train.c_str(), load_flags(flags), &n_train));
  AugmentedHandle aug;
  check(subs_augmented_load(&aug.h, aug_path.c_str()));
  if (!out_path.empty()) check(subs_stats_write(aug.h, n_train, out_path.c_str()));

  nlohmann::ordered_json summary;
  summary["command"] = "stats";
  summary["fingerprint"] = fp;
  summary["report"] = nlohmann::ordered_json::parse(read_string([&](char* out, std::size_t* len) {
    return subs_stats(aug.h, n_train, SUBS_FORMAT_JSON, out, len);
  }));
  std::string text = "fingerprint: " + fp + "\n";
  text += read_string([&](char* out, std::size_t* len) {
    return subs_stats(aug.h, n_train, SUBS_FORMAT_TEXT, out, len);
  });
  emit(flags, summary, text);
  return 0;
}

int run_coverage(const std::string& aug_path, const std::string& test_path,
                 const std::string& domain_path, const CommonFlags& flags) {
  auto domain = maybe_domain(domain_path);
  const std::string fp = fingerprint(domain ? domain->h : nullptr, nullptr, "coverage");
  AugmentedHandle aug;
  check(subs_augmented_load(&aug.h, aug_path.c_str()));
  std::size_t hits = 0, total = 0;
  check(subs_coverage(aug.h, test_path.c_str(), flags.tsv ? SUBS_LOAD_TSV : 0u, &hits, &total));
  const double fraction = total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;

  char line[96];
  std::snprintf(line, sizeof line, "%zu/%zu (%.2f%%)", hits, total, fraction * 100.0);
  nlohmann::ordered_json summary;
  summary["command"] = "coverage";
  summary["fingerprint"] = fp;
  summary["hits"] = hits;
  summary["total"] = total;
  summary["fraction"] = fraction;
  summary["display"] = line;
  emit(flags, summary, "fingerprint: " + fp + "\n" + line + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subtree-substitution data augmentation for semantic parsing corpora"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", flags.json, "Print one machine-readable summary object");
  };

  std::string train, trees, domain_path, out_path, out_trees, aug_path, test_path;

  auto* validate = app.add_subcommand("validate", "Check every span tree against its program");
  validate->add_option("--train", train, "Examples file (JSONL)")->required();
  validate->add_option("--trees", trees, "Span trees file (JSONL)")->required();
  validate->add_option("--domain", domain_path, "Domain config (JSON)")->required();
  validate->add_flag("--strict", flags.strict, "Exit 2 when any tree fails");
  validate->add_flag("--tsv", flags.tsv, "Examples file is utterance<TAB>program");
  add_common(validate);

  subs_augment_options opts;
  subs_augment_options_init(&opts);
  std::string dedup = "train_and_self";
  std::size_t max_output = 0;
  bool allow_same = false;

  auto* aug = app.add_subcommand("augment", "Generate augmented examples");
  aug->add_option("--train", train, "Examples file (JSONL)")->required();
  aug->add_option("--trees", trees, "Span trees file (JSONL)")->required();
  aug->add_option("--domain", domain_path, "Domain config (JSON)")->required();
  aug->add_option("--out", out_path, "Augmented output file (JSONL)")->required();
  aug->add_option("--out-trees", out_trees, "Also write the spliced span trees");
  aug->add_option("--seed", opts.seed, "Seed for --max-output sampling");
  aug->add_option("--rounds", opts.rounds, "Augmentation rounds")->check(CLI::PositiveNumber);
  aug->add_option("--max-output", max_output, "Keep a uniform sample of this many results");
  aug->add_option("--dedup", dedup, "train_and_self | self_only | none")
      ->check(CLI::IsMember({"train_and_self", "self_only", "none"}));
  aug->add_flag("--allow-same-example", allow_same, "Also exchange subtrees within one example");
  aug->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
  aug->add_flag("--strict", flags.strict, "Fail when any tree fails validation");
  aug->add_flag("--tsv", flags.tsv, "Examples file is utterance<TAB>program");
  add_common(aug);

  auto* stats = app.add_subcommand("stats", "Complexity statistics of an augmented file");
  stats->add_option("--augmented", aug_path, "Augmented file (JSONL)")->required();
  stats->add_option("--train", train, "Training examples, for the instance count");
  stats->add_option("--out", out_path, "Write the report as JSON");
  stats->add_option("--domain", domain_path, "Domain config, included in the fingerprint");
  stats->add_flag("--tsv", flags.tsv, "Training file is utterance<TAB>program");
  add_common(stats);

  auto* coverage = app.add_subcommand("coverage", "Fraction of test pairs found in augmented data");
  coverage->add_option("--augmented", aug_path, "Augmented file (JSONL)")->required();
  coverage->add_option("--test", test_path, "Test examples")->required();
  coverage->add_option("--domain", domain_path, "Domain config, included in the fingerprint");
  coverage->add_flag("--tsv", flags.tsv, "Test file is utterance<TAB>program");
  add_common(coverage);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate) return run_validate(train, trees, domain_path, flags);
    if (*aug) {
      opts.max_output = max_output;
      opts.dedup_mode = dedup == "self_only" ? SUBS_DEDUP_SELF_ONLY
                        : dedup == "none"    ? SUBS_DEDUP_NONE
                                             : SUBS_DEDUP_TRAIN_AND_SELF;
      opts.allow_same_example = allow_same ? 1 : 0;
      opts.workers = flags.workers;
      opts.keep_trees = out_trees.empty() ? 0 : 1;
      return run_augment(train, trees, domain_path, out_path, out_trees, opts, flags);
    }
    if (*stats) return run_stats(aug_path, train, out_path, domain_path, flags);
    if (*coverage) return run_coverage(aug_path, test_path, domain_path, flags);
  } catch (const Failure& f) {
    return f.code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
