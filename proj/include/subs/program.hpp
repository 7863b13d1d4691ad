#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace subs {

inline constexpr std::size_t kMaxArity = 2;

// A variable-free functional program: a constant symbol applied to at most
// two argument programs. Values are immutable once constructed.
class Program {
 public:
  explicit Program(std::string symbol, std::vector<Program> children = {});

  const std::string& symbol() const noexcept { return symbol_; }
  std::span<const Program> children() const noexcept { return children_; }
  std::size_t child_count() const noexcept { return children_.size(); }
  bool is_leaf() const noexcept { return children_.empty(); }

  // Copy of this program with `arg` appended as the last argument.
  Program with_argument(Program arg) const;

  friend bool operator==(const Program&, const Program&) = default;

 private:
  std::string symbol_;
  std::vector<Program> children_;
};

// Child-index steps from the root. An empty path addresses the root.
struct ProgramPath {
  std::vector<std::size_t> steps;

  ProgramPath child(std::size_t index) const;
  std::string to_string() const;

  friend bool operator==(const ProgramPath&, const ProgramPath&) = default;
  friend auto operator<=>(const ProgramPath&, const ProgramPath&) = default;
};

bool is_valid_symbol(std::string_view symbol) noexcept;

Program parse_program(std::string_view text);
std::string render_program(const Program& p);

// Tokens of the canonical rendering, counting "(", ")" and "," as tokens.
std::size_t program_token_length(const Program& p);
// Number of constant symbols only (no brackets or commas).
std::size_t program_symbol_count(const Program& p);
std::size_t program_depth(const Program& p);

const Program& subprogram_at(const Program& p, const ProgramPath& path);
Program replace_subprogram(const Program& p, const ProgramPath& path,
                           const Program& donor);

// Path of the first node, in preorder, where the two programs differ in symbol
// or child count. nullopt when they are structurally equal.
std::optional<ProgramPath> first_divergence(const Program& a, const Program& b);

}  // namespace subs
