#include "subs/subs.h"

#include <cstdint>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "subs/corpus_io.hpp"
#include "subs/domain.hpp"
#include "subs/engine.hpp"
#include "subs/error.hpp"
#include "subs/stats.hpp"

namespace {

thread_local std::string last_error;

class HandleError : public std::runtime_error {
 public:
  HandleError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

template <typename T, std::uint32_t Magic>
struct handle {
  explicit handle(std::unique_ptr<T> obj) : magic(Magic), value(std::move(obj)) {}
  ~handle() { magic = 0; }

  T& get() {
    if (magic != Magic || !value)
      throw HandleError(SUBS_ERROR_INVALID_HANDLE, "handle has bad magic");
    return *value;
  }

  std::uint32_t magic;
  std::unique_ptr<T> value;
};

struct augmented_set {
  std::vector<subs::AugmentedExample> examples;
  std::optional<subs::AugmentSummary> summary;
};

}  // namespace

struct subs_domain_struct : handle<subs::Domain, 0x53444f4d> {
  using handle::handle;
};
struct subs_corpus_struct : handle<subs::LoadedCorpus, 0x53435250> {
  using handle::handle;
};
struct subs_augmented_struct : handle<augmented_set, 0x53415547> {
  using handle::handle;
};

namespace {

int map_error(subs::ErrorCode code) {
  using subs::ErrorCode;
  switch (code) {
    case ErrorCode::unbalanced_parens:
    case ErrorCode::unexpected_token:
    case ErrorCode::empty_input:
    case ErrorCode::invalid_program:
      return SUBS_ERROR_PARSE;
    case ErrorCode::schema_violation:
    case ErrorCode::dangling_type_reference:
    case ErrorCode::dangling_func_map_entry:
      return SUBS_ERROR_SCHEMA;
    case ErrorCode::unknown_constant:
    case ErrorCode::no_legal_application:
    case ErrorCode::ambiguous_application:
    case ErrorCode::type_mismatch:
    case ErrorCode::null_root:
    case ErrorCode::composition_error:
    case ErrorCode::index_out_of_range:
    case ErrorCode::category_mismatch:
    case ErrorCode::invalid_path:
      return SUBS_ERROR_EVALUATION;
    case ErrorCode::malformed_line:
    case ErrorCode::duplicate_id:
    case ErrorCode::unknown_id:
    case ErrorCode::unknown_tokenization:
    case ErrorCode::validation_failure:
    case ErrorCode::missing_provenance:
      return SUBS_ERROR_DATA;
    case ErrorCode::io_failure:
      return SUBS_ERROR_IO;
    case ErrorCode::invalid_argument:
      return SUBS_ERROR_INVALID_ARGUMENT;
  }
  return SUBS_ERROR_INTERNAL;
}

template <typename F>
int guard(const char* fn, F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const subs::Error& e) {
    last_error = e.what();
    return map_error(e.code());
  } catch (const HandleError& e) {
    last_error = std::string(fn) + ": " + e.what();
    return e.code;
  } catch (const std::bad_alloc&) {
    last_error = std::string(fn) + ": out of memory";
    return SUBS_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = std::string(fn) + ": " + e.what();
    return SUBS_ERROR_INTERNAL;
  } catch (...) {
    last_error = std::string(fn) + ": unknown exception";
    return SUBS_ERROR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (!p) throw HandleError(SUBS_ERROR_NULL_POINTER, std::string("null ") + what);
}

int write_str_output(char* out, std::size_t* out_len, const std::string& s) {
  require(out_len, "out_len");
  const std::size_t avail = *out_len;
  *out_len = s.size() + 1;
  if (!out || avail < s.size() + 1) {
    last_error = "output buffer needs " + std::to_string(s.size() + 1) + " bytes";
    return SUBS_ERROR_INSUFFICIENT_BUFFER;
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return SUBS_OK;
}

subs::AugmentOptions to_options(const subs_augment_options& o) {
  subs::AugmentOptions out;
  if (o.rounds < 1) throw subs::Error(subs::ErrorCode::invalid_argument, "rounds must be >= 1");
  out.rounds = o.rounds;
  if (o.max_output) out.max_output = o.max_output;
  out.seed = o.seed;
  switch (o.dedup_mode) {
    case SUBS_DEDUP_TRAIN_AND_SELF: out.dedup = subs::DedupMode::train_and_self; break;
    case SUBS_DEDUP_SELF_ONLY: out.dedup = subs::DedupMode::self_only; break;
    case SUBS_DEDUP_NONE: out.dedup = subs::DedupMode::none; break;
    default:
      throw subs::Error(subs::ErrorCode::invalid_argument,
                        "unknown dedup mode " + std::to_string(o.dedup_mode));
  }
  out.allow_same_example = o.allow_same_example != 0;
  out.workers = o.workers ? o.workers : 1;
  out.keep_trees = o.keep_trees != 0;
  return out;
}

std::vector<subs::ExampleRecord> load_records(const char* path, std::uint32_t flags) {
  require(path, "path");
  return (flags & SUBS_LOAD_TSV) ? subs::load_tsv_examples(path) : subs::load_examples(path);
}

std::string corpus_report(const subs::LoadedCorpus& c, int format) {
  if (format == SUBS_FORMAT_JSON) {
    nlohmann::ordered_json j;
    j["examples"] = c.ids.size();
    j["passed"] = c.ids.size() - c.failure_count();
    j["failed"] = c.failure_count();
    j["binarized_unary_nodes"] = c.binarized;
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.ids.size(); ++i) {
      nlohmann::ordered_json r;
      r["id"] = c.ids[i];
      r["ok"] = !c.outcomes[i].has_value();
      if (const auto& f = c.outcomes[i]) {
        r["line"] = f->line;
        r["error"] = subs::error_code_name(f->kind);
        r["reason"] = f->reason;
      }
      results.push_back(std::move(r));
    }
    j["results"] = std::move(results);
    return j.dump();
  }
  std::string out;
  for (std::size_t i = 0; i < c.ids.size(); ++i) {
    out += c.ids[i];
    if (const auto& f = c.outcomes[i]) {
      out += "\tFAIL\t";
      if (f->line) out += "line " + std::to_string(f->line) + ": ";
      out += std::string(subs::error_code_name(f->kind)) + ": " + f->reason;
    } else {
      out += "\tpass";
    }
    out += '\n';
  }
  return out;
}

std::string summary_text(const subs::AugmentSummary& s, std::size_t out_count, int format) {
  nlohmann::ordered_json j;
  j["rounds"] = s.rounds;
  j["candidate_pairs"] = s.candidate_pairs;
  j["skipped"] = s.skipped;
  j["distinct"] = s.distinct;
  j["distinct_not_in_train"] = s.distinct_not_in_train;
  j["kept"] = s.kept;
  j["output"] = out_count;
  if (format == SUBS_FORMAT_JSON) return j.dump();
  std::string out;
  for (const auto& [k, v] : j.items()) out += k + "=" + v.dump() + "\n";
  return out;
}

}  // namespace

extern "C" {

uint32_t subs_api_version(void) { return SUBS_API_VERSION; }

const char* subs_error_description(int code) {
  switch (code) {
    case SUBS_OK: return "OK";
    case SUBS_ERROR_INVALID_ARGUMENT: return "Invalid argument";
    case SUBS_ERROR_PARSE: return "Program parse error";
    case SUBS_ERROR_SCHEMA: return "Domain schema violation";
    case SUBS_ERROR_EVALUATION: return "Program or tree evaluation error";
    case SUBS_ERROR_DATA: return "Data error";
    case SUBS_ERROR_IO: return "I/O failure";
    case SUBS_ERROR_INSUFFICIENT_BUFFER: return "Insufficient buffer space";
    case SUBS_ERROR_NULL_POINTER: return "Null pointer";
    case SUBS_ERROR_INVALID_HANDLE: return "Invalid handle";
    case SUBS_ERROR_INTERNAL: return "Internal error";
  }
  return "Unknown error";
}

// Reads the message without replacing it, so a size query can precede the copy.
int subs_last_error(char* out, size_t* out_len) {
  if (!out_len) return SUBS_ERROR_NULL_POINTER;
  const std::size_t avail = *out_len;
  *out_len = last_error.size() + 1;
  if (!out || avail < last_error.size() + 1) return SUBS_ERROR_INSUFFICIENT_BUFFER;
  std::memcpy(out, last_error.c_str(), last_error.size() + 1);
  return SUBS_OK;
}

void subs_augment_options_init(subs_augment_options* opts) {
  if (!opts) return;
  *opts = subs_augment_options{};
  opts->rounds = 1;
  opts->dedup_mode = SUBS_DEDUP_TRAIN_AND_SELF;
  opts->workers = 1;
}

int subs_program_canonicalize(const char* text, char* out, size_t* out_len) {
  return guard("subs_program_canonicalize", [&] {
    require(text, "text");
    return write_str_output(out, out_len, subs::render_program(subs::parse_program(text)));
  });
}

int subs_program_token_length(const char* text, size_t* length) {
  return guard("subs_program_token_length", [&] {
    require(text, "text");
    require(length, "length");
    *length = subs::program_token_length(subs::parse_program(text));
    return SUBS_OK;
  });
}

int subs_domain_load(subs_domain_t* domain, const char* path) {
  return guard("subs_domain_load", [&] {
    require(domain, "domain");
    require(path, "path");
    *domain = nullptr;
    *domain = new subs_domain_struct(std::make_unique<subs::Domain>(subs::load_domain_file(path)));
    return SUBS_OK;
  });
}

int subs_domain_load_json(subs_domain_t* domain, const char* json_text) {
  return guard("subs_domain_load_json", [&] {
    require(domain, "domain");
    require(json_text, "json_text");
    *domain = nullptr;
    *domain = new subs_domain_struct(std::make_unique<subs::Domain>(subs::load_domain(json_text)));
    return SUBS_OK;
  });
}

int subs_domain_destroy(subs_domain_t domain) {
  return guard("subs_domain_destroy", [&] {
    if (domain) (void)domain->get();
    delete domain;
    return SUBS_OK;
  });
}

int subs_domain_category(subs_domain_t domain, const char* program, char* out, size_t* out_len) {
  return guard("subs_domain_category", [&] {
    require(domain, "domain");
    require(program, "program");
    subs::SemanticCategory c = subs::semantic_category(subs::parse_program(program), domain->get());
    return write_str_output(out, out_len, c.to_string());
  });
}

int subs_fingerprint(subs_domain_t domain, const subs_augment_options* opts, const char* extra,
                     uint64_t* fingerprint) {
  return guard("subs_fingerprint", [&] {
    require(fingerprint, "fingerprint");
    std::string text;
    text += domain ? subs::domain_to_json(domain->get()) : std::string("-");
    text += '\n';
    text += opts ? subs::options_fingerprint_text(to_options(*opts)) : std::string("-");
    text += '\n';
    if (extra) text += extra;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    *fingerprint = h;
    return SUBS_OK;
  });
}

int subs_corpus_load(subs_corpus_t* corpus, subs_domain_t domain, const char* examples_path,
                     const char* trees_path, uint32_t flags) {
  return guard("subs_corpus_load", [&] {
    require(corpus, "corpus");
    require(domain, "domain");
    require(trees_path, "trees_path");
    *corpus = nullptr;
    std::vector<subs::ExampleRecord> records = load_records(examples_path, flags);
    auto loaded = std::make_unique<subs::LoadedCorpus>(
        subs::load_trees(trees_path, records, domain->get(), (flags & SUBS_LOAD_STRICT) != 0));
    *corpus = new subs_corpus_struct(std::move(loaded));
    return SUBS_OK;
  });
}

int subs_corpus_destroy(subs_corpus_t corpus) {
  return guard("subs_corpus_destroy", [&] {
    if (corpus) (void)corpus->get();
    delete corpus;
    return SUBS_OK;
  });
}

int subs_corpus_size(subs_corpus_t corpus, size_t* size) {
  return guard("subs_corpus_size", [&] {
    require(corpus, "corpus");
    require(size, "size");
    *size = corpus->get().corpus.size();
    return SUBS_OK;
  });
}

int subs_corpus_failure_count(subs_corpus_t corpus, size_t* failures) {
  return guard("subs_corpus_failure_count", [&] {
    require(corpus, "corpus");
    require(failures, "failures");
    *failures = corpus->get().failure_count();
    return SUBS_OK;
  });
}

int subs_corpus_report(subs_corpus_t corpus, int format, char* out, size_t* out_len) {
  return guard("subs_corpus_report", [&] {
    require(corpus, "corpus");
    return write_str_output(out, out_len, corpus_report(corpus->get(), format));
  });
}

int subs_count_examples(const char* path, uint32_t flags, size_t* count) {
  return guard("subs_count_examples", [&] {
    require(count, "count");
    *count = load_records(path, flags).size();
    return SUBS_OK;
  });
}

int subs_augment(subs_augmented_t* aug, subs_corpus_t corpus, subs_domain_t domain,
                 const subs_augment_options* opts) {
  return guard("subs_augment", [&] {
    require(aug, "aug");
    require(corpus, "corpus");
    require(domain, "domain");
    *aug = nullptr;
    subs_augment_options defaults;
    subs_augment_options_init(&defaults);
    subs::AugmentResult r =
        subs::augment(corpus->get().corpus, domain->get(), to_options(opts ? *opts : defaults));
    auto set = std::make_unique<augmented_set>();
    set->examples = std::move(r.examples);
    set->summary = r.summary;
    *aug = new subs_augmented_struct(std::move(set));
    return SUBS_OK;
  });
}

int subs_augmented_load(subs_augmented_t* aug, const char* path) {
  return guard("subs_augmented_load", [&] {
    require(aug, "aug");
    require(path, "path");
    *aug = nullptr;
    auto set = std::make_unique<augmented_set>();
    set->examples = subs::load_augmented(path);
    *aug = new subs_augmented_struct(std::move(set));
    return SUBS_OK;
  });
}

int subs_augmented_destroy(subs_augmented_t aug) {
  return guard("subs_augmented_destroy", [&] {
    if (aug) (void)aug->get();
    delete aug;
    return SUBS_OK;
  });
}

int subs_augmented_count(subs_augmented_t aug, size_t* count) {
  return guard("subs_augmented_count", [&] {
    require(aug, "aug");
    require(count, "count");
    *count = aug->get().examples.size();
    return SUBS_OK;
  });
}

int subs_augmented_write(subs_augmented_t aug, const char* path) {
  return guard("subs_augmented_write", [&] {
    require(aug, "aug");
    require(path, "path");
    subs::write_augmented(aug->get().examples, path);
    return SUBS_OK;
  });
}

int subs_augmented_write_trees(subs_augmented_t aug, const char* path) {
  return guard("subs_augmented_write_trees", [&] {
    require(aug, "aug");
    require(path, "path");
    subs::write_augmented_trees(aug->get().examples, path);
    return SUBS_OK;
  });
}

int subs_augmented_summary(subs_augmented_t aug, int format, char* out, size_t* out_len) {
  return guard("subs_augmented_summary", [&] {
    require(aug, "aug");
    const augmented_set& set = aug->get();
    if (!set.summary)
      throw subs::Error(subs::ErrorCode::invalid_argument, "augmented set was loaded, not generated");
    return write_str_output(out, out_len, summary_text(*set.summary, set.examples.size(), format));
  });
}

int subs_stats(subs_augmented_t aug, size_t n_train, int format, char* out, size_t* out_len) {
  return guard("subs_stats", [&] {
    require(aug, "aug");
    subs::StatsReport r = subs::complexity_stats(aug->get().examples, n_train);
    return write_str_output(out, out_len,
                            format == SUBS_FORMAT_JSON ? subs::stats_to_json(r) : subs::stats_to_table(r));
  });
}

int subs_stats_write(subs_augmented_t aug, size_t n_train, const char* path) {
  return guard("subs_stats_write", [&] {
    require(aug, "aug");
    require(path, "path");
    subs::write_report(subs::complexity_stats(aug->get().examples, n_train), path);
    return SUBS_OK;
  });
}

int subs_coverage(subs_augmented_t aug, const char* test_path, uint32_t flags, size_t* hits,
                  size_t* total) {
  return guard("subs_coverage", [&] {
    require(aug, "aug");
    require(hits, "hits");
    require(total, "total");
    subs::Recovery r = subs::test_recovery(aug->get().examples, load_records(test_path, flags));
    *hits = r.hits;
    *total = r.total;
    return SUBS_OK;
  });
}

}  // extern "C"
