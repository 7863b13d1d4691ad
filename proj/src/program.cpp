#include "subs/program.hpp"

#include <algorithm>
#include <cctype>

#include "subs/error.hpp"

namespace subs {

namespace {

bool is_punct(char c) { return c == '(' || c == ')' || c == ','; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
    } else if (is_punct(text[i])) {
      tokens.push_back(text.substr(i, 1));
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j]) && !is_punct(text[j])) ++j;
      tokens.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::vector<std::string_view> tokens) : tokens_(std::move(tokens)) {}

  Program parse() {
    if (tokens_.empty()) throw Error(ErrorCode::empty_input, "no tokens in program text");
    Program p = term();
    if (pos_ < tokens_.size()) {
      if (tokens_[pos_] == ")")
        throw Error(ErrorCode::unbalanced_parens, "unmatched ')'", pos_);
      throw Error(ErrorCode::unexpected_token,
                  "trailing token '" + std::string(tokens_[pos_]) + "'", pos_);
    }
    return p;
  }

 private:
  Program term() {
    if (pos_ >= tokens_.size())
      throw Error(ErrorCode::unbalanced_parens, "input ended inside an argument list", pos_);
    std::string_view tok = tokens_[pos_];
    if (is_punct(tok.front())) {
      if (tok == ")" && open_ == 0)
        throw Error(ErrorCode::unbalanced_parens, "unmatched ')'", pos_);
      throw Error(ErrorCode::unexpected_token, "expected a symbol, got '" + std::string(tok) + "'",
                  pos_);
    }
    ++pos_;
    std::string symbol(tok);
    if (pos_ >= tokens_.size() || tokens_[pos_] != "(") return Program(std::move(symbol));

    ++pos_;
    ++open_;
    std::vector<Program> args;
    args.push_back(term());
    while (true) {
      if (pos_ >= tokens_.size())
        throw Error(ErrorCode::unbalanced_parens, "missing ')'", pos_);
      std::string_view next = tokens_[pos_];
      if (next == ")") {
        ++pos_;
        --open_;
        break;
      }
      if (next != ",")
        throw Error(ErrorCode::unexpected_token, "expected ',' or ')', got '" + std::string(next) + "'",
                    pos_);
      if (args.size() == kMaxArity)
        throw Error(ErrorCode::unexpected_token,
                    "'" + symbol + "' applied to more than " + std::to_string(kMaxArity) +
                        " arguments",
                    pos_);
      ++pos_;
      args.push_back(term());
    }
    return Program(std::move(symbol), std::move(args));
  }

  std::vector<std::string_view> tokens_;
  std::size_t pos_ = 0;
  std::size_t open_ = 0;
};

void render_into(const Program& p, std::string& out) {
  out += p.symbol();
  if (p.is_leaf()) return;
  out += " ( ";
  bool first = true;
  for (const Program& c : p.children()) {
    if (!first) out += " , ";
    first = false;
    render_into(c, out);
  }
  out += " )";
}

Program replace_at(const Program& p, const ProgramPath& path, std::size_t depth,
                   const Program& donor) {
  if (depth == path.steps.size()) return donor;
  std::size_t idx = path.steps[depth];
  std::vector<Program> kids(p.children().begin(), p.children().end());
  kids[idx] = replace_at(kids[idx], path, depth + 1, donor);
  return Program(p.symbol(), std::move(kids));
}

void diverge(const Program& a, const Program& b, ProgramPath& here,
             std::optional<ProgramPath>& found) {
  if (found) return;
  if (a.symbol() != b.symbol() || a.child_count() != b.child_count()) {
    found = here;
    return;
  }
  for (std::size_t i = 0; i < a.child_count() && !found; ++i) {
    here.steps.push_back(i);
    diverge(a.children()[i], b.children()[i], here, found);
    here.steps.pop_back();
  }
}

}  // namespace

bool is_valid_symbol(std::string_view symbol) noexcept {
  if (symbol.empty()) return false;
  return std::none_of(symbol.begin(), symbol.end(),
                      [](char c) { return is_space(c) || is_punct(c); });
}

Program::Program(std::string symbol, std::vector<Program> children)
    : symbol_(std::move(symbol)), children_(std::move(children)) {
  if (!is_valid_symbol(symbol_))
    throw Error(ErrorCode::invalid_program, "invalid symbol '" + symbol_ + "'");
  if (children_.size() > kMaxArity)
    throw Error(ErrorCode::invalid_program,
                "'" + symbol_ + "' has " + std::to_string(children_.size()) + " children");
}

Program Program::with_argument(Program arg) const {
  std::vector<Program> kids = children_;
  kids.push_back(std::move(arg));
  return Program(symbol_, std::move(kids));
}

ProgramPath ProgramPath::child(std::size_t index) const {
  ProgramPath out = *this;
  out.steps.push_back(index);
  return out;
}

std::string ProgramPath::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(steps[i]);
  }
  return out + "]";
}

Program parse_program(std::string_view text) { return Parser(tokenize(text)).parse(); }

std::string render_program(const Program& p) {
  std::string out;
  render_into(p, out);
  return out;
}

std::size_t program_token_length(const Program& p) {
  std::size_t n = 1;
  if (!p.is_leaf()) n += 2 + (p.child_count() - 1);
  for (const Program& c : p.children()) n += program_token_length(c);
  return n;
}

std::size_t program_symbol_count(const Program& p) {
  std::size_t n = 1;
  for (const Program& c : p.children()) n += program_symbol_count(c);
  return n;
}

std::size_t program_depth(const Program& p) {
  std::size_t d = 0;
  for (const Program& c : p.children()) d = std::max(d, program_depth(c));
  return d + 1;
}

const Program& subprogram_at(const Program& p, const ProgramPath& path) {
  const Program* cur = &p;
  for (std::size_t step : path.steps) {
    if (step >= cur->child_count())
      throw Error(ErrorCode::invalid_path,
                  "path " + path.to_string() + " leaves program '" + render_program(p) + "'");
    cur = &cur->children()[step];
  }
  return *cur;
}

Program replace_subprogram(const Program& p, const ProgramPath& path, const Program& donor) {
  (void)subprogram_at(p, path);
  return replace_at(p, path, 0, donor);
}

std::optional<ProgramPath> first_divergence(const Program& a, const Program& b) {
  ProgramPath here;
  std::optional<ProgramPath> found;
  diverge(a, b, here, found);
  return found;
}

}  // namespace subs
