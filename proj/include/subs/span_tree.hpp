#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subs/domain.hpp"
#include "subs/program.hpp"

namespace subs {

// Half-open, 0-indexed token interval [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

std::string to_string(const Span& s);

enum class NodeLabel { constant, null, composed };

struct SpanNode {
  Span span;
  NodeLabel label = NodeLabel::null;
  // Constant name; only meaningful when label == constant.
  std::string category;
  // Empty for leaves, exactly two for internal nodes.
  std::vector<SpanNode> children;

  bool is_leaf() const noexcept { return children.empty(); }

  static SpanNode leaf(Span span, std::optional<std::string> category);
  static SpanNode internal(SpanNode left, SpanNode right, NodeLabel label = NodeLabel::composed);

  friend bool operator==(const SpanNode&, const SpanNode&) = default;
};

struct SpanTree {
  std::vector<std::string> tokens;
  SpanNode root;

  friend bool operator==(const SpanTree&, const SpanTree&) = default;
};

// Child steps (0 = left, 1 = right) from the root of a span tree.
struct NodePath {
  std::vector<std::size_t> steps;

  friend bool operator==(const NodePath&, const NodePath&) = default;
  friend auto operator<=>(const NodePath&, const NodePath&) = default;
};

const SpanNode& node_at(const SpanTree& t, const NodePath& path);

// Partition and bounds violations, empty when the tree is well formed.
std::vector<std::string> structural_violations(const SpanTree& t);

struct NodeEvaluation {
  NodePath node;
  Span span;
  // nullopt for nodes that cover only NULL tokens.
  std::optional<Program> program;
  std::optional<TypeInfo> type;
  // Where this node's program sits inside the root program.
  std::optional<ProgramPath> program_path;
  // The node's program equals the root program's subprogram at program_path,
  // i.e. no ancestor later extended it as a function.
  bool complete = false;
  // The program came unchanged from the only non-NULL child.
  bool passthrough = false;
};

struct TreeEvaluation {
  Program program;
  // Preorder.
  std::vector<NodeEvaluation> nodes;
  std::size_t tie_breaks = 0;
};

// Bottom-up evaluation. Throws NullRoot, CompositionError, UnknownConstant, or
// InvalidArgument for a structurally malformed tree.
TreeEvaluation evaluate_tree(const SpanTree& t, const Domain& d, ApplyOptions options = {});
Program program_of_tree(const SpanTree& t, const Domain& d);

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> structural;
  std::optional<std::string> evaluation_error;
  std::optional<Program> evaluated;
  // First preorder path where the evaluated program differs from the expected.
  std::optional<ProgramPath> divergence;

  std::string summary() const;
};

ValidationReport validate_tree(const SpanTree& t, const Program& expected, const Domain& d);

struct SubtreeRef {
  std::size_t example = 0;
  std::string tree_id;
  NodePath node;
  Span span;
  Program program;
  SemanticCategory category;
  ProgramPath program_path;
};

// Nodes whose program is non-NULL, saturated, complete and has a defined
// category, ordered by span. A node that only passes a child's program past
// NULL siblings is represented by that child.
std::vector<SubtreeRef> enumerate_exchangeable_subtrees(const SpanTree& t, const Domain& d,
                                                        std::size_t example = 0,
                                                        const std::string& tree_id = {});

// x1[:begin] + donor + x1[end:]. Throws IndexOutOfRange.
std::vector<std::string> splice_utterance(std::span<const std::string> host, std::size_t begin,
                                          std::size_t end, std::span<const std::string> donor);

// Replaces the target node of `host` with the donor subtree of `donor_tree`,
// re-indexing every span. Throws CategoryMismatch or IndexOutOfRange.
SpanTree splice_tree(const SpanTree& host, const SubtreeRef& target, const SpanTree& donor_tree,
                     const SubtreeRef& donor);

}  // namespace subs
