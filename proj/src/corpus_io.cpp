#include "subs/corpus_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace subs {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::malformed_line, what, line);
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

json parse_line(const std::string& text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) malformed(line, "record is not a JSON object");
  return j;
}

std::string string_member(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) malformed(line, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

Span span_member(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number_unsigned() ||
      !(*it)[1].is_number_unsigned())
    malformed(line, std::string("\"") + key + "\" must be a [begin, end] pair");
  return Span{(*it)[0].get<std::size_t>(), (*it)[1].get<std::size_t>()};
}

Program program_member(const json& j, std::size_t line) {
  std::string text = string_member(j, "program", line);
  try {
    return parse_program(text);
  } catch (const Error& e) {
    malformed(line, std::string("program does not parse: ") + e.what());
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "'");
  return in;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (blank(text)) continue;
    fn(text, line);
  }
  if (in.bad()) throw Error(ErrorCode::io_failure, "read error", line);
}

SpanNode node_from_json(const json& j, std::size_t line, std::size_t& binarized) {
  if (!j.is_object()) malformed(line, "tree node is not an object");
  SpanNode n;
  n.span = span_member(j, "span", line);
  std::vector<SpanNode> kids;
  if (auto it = j.find("children"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) malformed(line, "\"children\" must be an array");
    for (const json& c : *it) kids.push_back(node_from_json(c, line, binarized));
  }
  auto cat = j.find("category");
  if (cat == j.end()) malformed(line, "tree node is missing \"category\"");
  if (!cat->is_null() && !cat->is_string()) malformed(line, "\"category\" must be a string or null");

  if (kids.size() == 1) {
    if (kids.front().span != n.span)
      malformed(line, "unary node " + to_string(n.span) + " wraps child " + to_string(kids.front().span));
    ++binarized;
    return std::move(kids.front());
  }
  if (kids.empty()) {
    if (cat->is_string()) {
      n.label = NodeLabel::constant;
      n.category = cat->get<std::string>();
    }
  } else {
    if (cat->is_string() && cat->get<std::string>() == "COMPOSED") {
      n.label = NodeLabel::composed;
    } else if (cat->is_string()) {
      n.label = NodeLabel::constant;
      n.category = cat->get<std::string>();
    }
    n.children = std::move(kids);
  }
  return n;
}

ordered_json node_to_json(const SpanNode& n) {
  ordered_json j;
  j["span"] = {n.span.begin, n.span.end};
  switch (n.label) {
    case NodeLabel::constant: j["category"] = n.category; break;
    case NodeLabel::composed: j["category"] = "COMPOSED"; break;
    case NodeLabel::null: j["category"] = nullptr; break;
  }
  j["children"] = ordered_json::array();
  for (const SpanNode& c : n.children) j["children"].push_back(node_to_json(c));
  return j;
}

std::vector<std::string> tokens_member(const json& j, std::size_t line) {
  auto it = j.find("tokens");
  if (it == j.end() || !it->is_array()) malformed(line, "\"tokens\" must be an array");
  std::vector<std::string> out;
  for (const json& t : *it) {
    if (!t.is_string()) malformed(line, "\"tokens\" entries must be strings");
    out.push_back(t.get<std::string>());
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize_utterance(std::string_view utterance) {
  std::vector<std::string> out;
  std::istringstream in{std::string(utterance)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<ExampleRecord> read_examples(std::istream& in) {
  std::vector<ExampleRecord> out;
  std::unordered_set<std::string> ids;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    json j = parse_line(text, line);
    ExampleRecord r{string_member(j, "id", line), string_member(j, "utterance", line),
                    program_member(j, line)};
    if (tokenize_utterance(r.utterance).empty()) malformed(line, "empty utterance");
    if (!ids.insert(r.id).second)
      throw Error(ErrorCode::duplicate_id, "example id '" + r.id + "' repeats", line);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ExampleRecord> load_examples(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_examples(in);
}

std::vector<ExampleRecord> read_tsv_examples(std::istream& in) {
  std::vector<ExampleRecord> out;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    auto tab = text.find('\t');
    if (tab == std::string::npos) malformed(line, "expected utterance<TAB>program");
    std::string utterance = text.substr(0, tab);
    if (tokenize_utterance(utterance).empty()) malformed(line, "empty utterance");
    Program program = [&] {
      try {
        return parse_program(std::string_view(text).substr(tab + 1));
      } catch (const Error& e) {
        malformed(line, std::string("program does not parse: ") + e.what());
      }
    }();
    out.push_back(ExampleRecord{"line-" + std::to_string(line), join(tokenize_utterance(utterance)),
                                std::move(program)});
  });
  return out;
}

std::vector<ExampleRecord> load_tsv_examples(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_tsv_examples(in);
}

std::string example_to_json(const ExampleRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["utterance"] = r.utterance;
  j["program"] = render_program(r.program);
  return j.dump();
}

TreeReadResult read_trees(std::istream& in) {
  TreeReadResult out;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    json j = parse_line(text, line);
    TreeRecord r;
    r.id = string_member(j, "id", line);
    r.line = line;
    r.tree.tokens = tokens_member(j, line);
    auto root = j.find("root");
    if (root == j.end()) malformed(line, "tree record is missing \"root\"");
    r.tree.root = node_from_json(*root, line, out.binarized);
    out.trees.push_back(std::move(r));
  });
  return out;
}

std::string tree_to_json(const std::string& id, const SpanTree& tree) {
  ordered_json j;
  j["id"] = id;
  j["tokens"] = tree.tokens;
  j["root"] = node_to_json(tree.root);
  return j.dump();
}

SpanTree tree_from_json(std::string_view json_text) {
  std::istringstream in{std::string(json_text)};
  TreeReadResult r = read_trees(in);
  if (r.trees.size() != 1) throw Error(ErrorCode::malformed_line, "expected exactly one tree record", 1);
  return std::move(r.trees.front().tree);
}

std::size_t LoadedCorpus::failure_count() const {
  std::size_t n = 0;
  for (const auto& o : outcomes) n += o.has_value();
  return n;
}

LoadedCorpus assemble_corpus(std::span<const ExampleRecord> examples, const TreeReadResult& trees,
                             const Domain& d, bool strict) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < examples.size(); ++i) position.emplace(examples[i].id, i);

  std::vector<const TreeRecord*> tree_of(examples.size(), nullptr);
  for (const TreeRecord& t : trees.trees) {
    auto it = position.find(t.id);
    if (it == position.end())
      throw Error(ErrorCode::unknown_id, "tree for unknown example id '" + t.id + "'", t.line);
    if (tree_of[it->second])
      throw Error(ErrorCode::duplicate_id, "second tree for example '" + t.id + "'", t.line);
    tree_of[it->second] = &t;
  }

  LoadedCorpus out;
  out.binarized = trees.binarized;
  std::vector<Example> kept;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const ExampleRecord& ex = examples[i];
    const TreeRecord* t = tree_of[i];
    std::optional<TreeFailure> failure;
    std::vector<std::string> tokens = tokenize_utterance(ex.utterance);
    if (!t) {
      failure = TreeFailure{ex.id, 0, ErrorCode::validation_failure, "no span tree"};
    } else if (t->tree.tokens != tokens) {
      failure = TreeFailure{ex.id, t->line, ErrorCode::unknown_tokenization,
                            "tree tokens differ from the utterance tokens"};
    } else {
      ValidationReport report = validate_tree(t->tree, ex.program, d);
      if (!report.ok)
        failure = TreeFailure{ex.id, t->line, ErrorCode::validation_failure, report.summary()};
    }
    if (failure && strict)
      throw Error(failure->kind, "example '" + ex.id + "': " + failure->reason,
                  failure->line ? std::optional<std::size_t>(failure->line) : std::nullopt);
    if (!failure) kept.push_back(Example{ex.id, std::move(tokens), ex.program, t->tree});
    out.ids.push_back(ex.id);
    out.outcomes.push_back(std::move(failure));
  }
  out.corpus = Corpus(std::move(kept));
  return out;
}

LoadedCorpus load_trees(const std::filesystem::path& path, std::span<const ExampleRecord> examples,
                        const Domain& d, bool strict) {
  auto in = open_in(path);
  return assemble_corpus(examples, read_trees(in), d, strict);
}

Domain load_domain_file(const std::filesystem::path& path) { return load_domain(read_text_file(path)); }

std::string augmented_to_json(const AugmentedExample& a) {
  ordered_json j;
  j["id"] = a.id;
  j["utterance"] = join(a.tokens);
  j["program"] = render_program(a.program);
  if (a.provenance) {
    const Provenance& p = *a.provenance;
    ordered_json pj;
    pj["host_id"] = p.host_id;
    pj["host_span"] = {p.host_span.begin, p.host_span.end};
    pj["donor_id"] = p.donor_id;
    pj["donor_span"] = {p.donor_span.begin, p.donor_span.end};
    pj["category"] = p.category;
    if (p.program_path) pj["program_path"] = p.program_path->steps;
    j["provenance"] = std::move(pj);
  }
  return j.dump();
}

std::vector<AugmentedExample> read_augmented(std::istream& in) {
  std::vector<AugmentedExample> out;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    json j = parse_line(text, line);
    AugmentedExample a{string_member(j, "id", line),
                       tokenize_utterance(string_member(j, "utterance", line)),
                       program_member(j, line), std::nullopt, std::nullopt};
    if (a.tokens.empty()) malformed(line, "empty utterance");
    if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
      if (!it->is_object()) malformed(line, "\"provenance\" must be an object");
      Provenance p{string_member(*it, "host_id", line), span_member(*it, "host_span", line),
                   string_member(*it, "donor_id", line), span_member(*it, "donor_span", line),
                   string_member(*it, "category", line), std::nullopt};
      if (auto pp = it->find("program_path"); pp != it->end()) {
        if (!pp->is_array()) malformed(line, "\"program_path\" must be an array");
        ProgramPath path;
        for (const json& s : *pp) {
          if (!s.is_number_unsigned()) malformed(line, "\"program_path\" entries must be indices");
          path.steps.push_back(s.get<std::size_t>());
        }
        p.program_path = std::move(path);
      }
      a.provenance = std::move(p);
    }
    out.push_back(std::move(a));
  });
  return out;
}

std::vector<AugmentedExample> load_augmented(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_augmented(in);
}

void write_augmented(std::span<const AugmentedExample> aug, const std::filesystem::path& path) {
  std::string out;
  for (const AugmentedExample& a : aug) {
    out += augmented_to_json(a);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_augmented_trees(std::span<const AugmentedExample> aug, const std::filesystem::path& path) {
  std::string out;
  for (const AugmentedExample& a : aug) {
    if (!a.tree)
      throw Error(ErrorCode::invalid_argument, "augmented example '" + a.id + "' carries no span tree");
    out += tree_to_json(a.id, *a.tree);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::io_failure, "write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io_failure, "read error on '" + path.string() + "'");
  return buf.str();
}

}  // namespace subs
