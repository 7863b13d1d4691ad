#include "subs/span_tree.hpp"

#include <algorithm>

#include "subs/error.hpp"

namespace subs {

std::string to_string(const Span& s) {
  return "[" + std::to_string(s.begin) + "," + std::to_string(s.end) + ")";
}

SpanNode SpanNode::leaf(Span span, std::optional<std::string> category) {
  SpanNode n;
  n.span = span;
  if (category) {
    n.label = NodeLabel::constant;
    n.category = std::move(*category);
  }
  return n;
}

SpanNode SpanNode::internal(SpanNode left, SpanNode right, NodeLabel label) {
  SpanNode n;
  n.span = Span{left.span.begin, right.span.end};
  n.label = label;
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}

const SpanNode& node_at(const SpanTree& t, const NodePath& path) {
  const SpanNode* cur = &t.root;
  for (std::size_t step : path.steps) {
    if (step >= cur->children.size())
      throw Error(ErrorCode::index_out_of_range, "node path leaves the span tree");
    cur = &cur->children[step];
  }
  return *cur;
}

namespace {

void check_node(const SpanNode& n, std::size_t length, std::vector<std::string>& out) {
  const std::string where = "node " + to_string(n.span);
  if (n.span.begin >= n.span.end) out.push_back(where + ": empty or inverted span");
  if (n.span.end > length)
    out.push_back(where + ": extends past utterance length " + std::to_string(length));
  if (n.children.size() == 1 || n.children.size() > 2) {
    out.push_back(where + ": has " + std::to_string(n.children.size()) + " children");
    return;
  }
  if (n.is_leaf()) {
    if (n.label == NodeLabel::composed) out.push_back(where + ": leaf labelled COMPOSED");
    return;
  }
  if (n.label == NodeLabel::constant)
    out.push_back(where + ": internal node carries constant '" + n.category + "'");
  const Span& l = n.children[0].span;
  const Span& r = n.children[1].span;
  if (l.begin != n.span.begin)
    out.push_back(where + ": left child starts at " + std::to_string(l.begin));
  if (l.end < r.begin) out.push_back(where + ": gap at split " + to_string(l) + " " + to_string(r));
  if (l.end > r.begin)
    out.push_back(where + ": overlap at split " + to_string(l) + " " + to_string(r));
  if (r.end != n.span.end) out.push_back(where + ": right child ends at " + std::to_string(r.end));
  for (const SpanNode& c : n.children) check_node(c, length, out);
}

struct Slot {
  NodeEvaluation eval;
  // Indices into the preorder vector, -1 for leaves.
  long left = -1;
  long right = -1;
  // For composed nodes: which child was the function and the argument slot.
  // For NULL-skipping nodes: which child passed its program through.
  int function_child = -1;
  int inherit_child = -1;
  std::size_t slot = 0;
};

class Evaluator {
 public:
  Evaluator(const Domain& d, ApplyOptions options) : domain_(d), options_(options) {}

  TreeEvaluation run(const SpanTree& t) {
    if (auto v = structural_violations(t); !v.empty())
      throw Error(ErrorCode::invalid_argument, "malformed span tree: " + v.front());
    NodePath path;
    bottom_up(t.root, path);
    Slot& root = slots_.front();
    if (!root.eval.program)
      throw Error(ErrorCode::null_root, "every token of the utterance is NULL");
    if (!root.eval.type->saturated)
      throw Error(ErrorCode::composition_error,
                  "root program '" + render_program(*root.eval.program) + "' is unsaturated");
    root.eval.program_path = ProgramPath{};
    top_down(0);
    const Program result = *root.eval.program;
    TreeEvaluation out{result, {}, tie_breaks_};
    out.nodes.reserve(slots_.size());
    for (Slot& s : slots_) {
      if (s.eval.program_path)
        s.eval.complete = subprogram_at(result, *s.eval.program_path) == *s.eval.program;
      out.nodes.push_back(std::move(s.eval));
    }
    return out;
  }

 private:
  long bottom_up(const SpanNode& n, NodePath& path) {
    const long index = static_cast<long>(slots_.size());
    slots_.emplace_back();
    slots_[index].eval.node = path;
    slots_[index].eval.span = n.span;

    if (n.is_leaf()) {
      if (n.label == NodeLabel::constant) {
        Program p = domain_.leaf_program(n.category);
        slots_[index].eval.type = type_of(p, domain_);
        slots_[index].eval.program = std::move(p);
      }
      return index;
    }

    path.steps.push_back(0);
    const long l = bottom_up(n.children[0], path);
    path.steps.back() = 1;
    const long r = bottom_up(n.children[1], path);
    path.steps.pop_back();

    Slot& s = slots_[index];
    s.left = l;
    s.right = r;
    const auto& lp = slots_[l].eval.program;
    const auto& rp = slots_[r].eval.program;
    if (!lp && !rp) return index;
    if (!lp || !rp) {
      s.inherit_child = lp ? 0 : 1;
      s.eval.passthrough = true;
      const Slot& from = slots_[lp ? l : r];
      s.eval.program = from.eval.program;
      s.eval.type = from.eval.type;
      return index;
    }
    try {
      Application a = apply(*lp, *rp, domain_, options_);
      if (a.tie_break) ++tie_breaks_;
      s.function_child = a.left_is_function ? 0 : 1;
      s.slot = a.slot;
      s.eval.type = type_of(a.program, domain_);
      s.eval.program = std::move(a.program);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::unknown_constant) throw;
      throw Error(ErrorCode::composition_error, "at node " + to_string(n.span) + ": " + e.what());
    }
    return index;
  }

  void top_down(long index) {
    Slot& s = slots_[index];
    if (s.left < 0) return;
    const ProgramPath& here = *s.eval.program_path;
    if (s.inherit_child >= 0) {
      slots_[s.inherit_child == 0 ? s.left : s.right].eval.program_path = here;
    } else if (s.function_child >= 0) {
      const long fn = s.function_child == 0 ? s.left : s.right;
      const long arg = s.function_child == 0 ? s.right : s.left;
      slots_[fn].eval.program_path = here;
      slots_[arg].eval.program_path = here.child(s.slot);
    }
    for (long c : {s.left, s.right})
      if (slots_[c].eval.program_path) top_down(c);
  }

  const Domain& domain_;
  ApplyOptions options_;
  std::vector<Slot> slots_;
  std::size_t tie_breaks_ = 0;
};

SpanNode shifted(const SpanNode& n, std::ptrdiff_t offset) {
  SpanNode out = n;
  out.span.begin = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.span.begin) + offset);
  out.span.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.span.end) + offset);
  for (SpanNode& c : out.children) c = shifted(c, offset);
  return out;
}

SpanNode rebuild(const SpanNode& n, const NodePath& path, std::size_t depth,
                 const SpanNode& donor, std::ptrdiff_t donor_offset, std::ptrdiff_t delta) {
  if (depth == path.steps.size()) return shifted(donor, donor_offset);
  SpanNode out;
  out.span = Span{n.span.begin,
                  static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.span.end) + delta)};
  out.label = n.label;
  out.category = n.category;
  const std::size_t step = path.steps[depth];
  SpanNode replaced = rebuild(n.children[step], path, depth + 1, donor, donor_offset, delta);
  if (step == 0) {
    out.children.push_back(std::move(replaced));
    out.children.push_back(shifted(n.children[1], delta));
  } else {
    out.children.push_back(n.children[0]);
    out.children.push_back(std::move(replaced));
  }
  return out;
}

}  // namespace

std::vector<std::string> structural_violations(const SpanTree& t) {
  std::vector<std::string> out;
  if (t.tokens.empty()) {
    out.push_back("empty token list");
    return out;
  }
  if (t.root.span != Span{0, t.tokens.size()})
    out.push_back("root span " + to_string(t.root.span) + " does not cover " +
                  to_string(Span{0, t.tokens.size()}));
  check_node(t.root, t.tokens.size(), out);
  return out;
}

TreeEvaluation evaluate_tree(const SpanTree& t, const Domain& d, ApplyOptions options) {
  return Evaluator(d, options).run(t);
}

Program program_of_tree(const SpanTree& t, const Domain& d) { return evaluate_tree(t, d).program; }

std::string ValidationReport::summary() const {
  if (ok) return "pass";
  if (!structural.empty()) return "structural: " + structural.front();
  if (evaluation_error) return "evaluation: " + *evaluation_error;
  std::string out = "program differs at " + (divergence ? divergence->to_string() : "?");
  if (evaluated) out += " (tree yields '" + render_program(*evaluated) + "')";
  return out;
}

ValidationReport validate_tree(const SpanTree& t, const Program& expected, const Domain& d) {
  ValidationReport r;
  r.structural = structural_violations(t);
  if (!r.structural.empty()) return r;
  try {
    r.evaluated = program_of_tree(t, d);
  } catch (const Error& e) {
    r.evaluation_error = e.what();
    return r;
  }
  r.divergence = first_divergence(*r.evaluated, expected);
  r.ok = !r.divergence.has_value();
  return r;
}

std::vector<SubtreeRef> enumerate_exchangeable_subtrees(const SpanTree& t, const Domain& d,
                                                        std::size_t example,
                                                        const std::string& tree_id) {
  TreeEvaluation ev = evaluate_tree(t, d);
  std::vector<SubtreeRef> out;
  for (NodeEvaluation& n : ev.nodes) {
    if (!n.program || n.passthrough || !n.type->saturated || !n.complete) continue;
    SemanticCategory cat = semantic_category(*n.program, d);
    if (!cat.defined()) continue;
    out.push_back(SubtreeRef{example, tree_id, std::move(n.node), n.span, std::move(*n.program),
                             std::move(cat), std::move(*n.program_path)});
  }
  std::sort(out.begin(), out.end(),
            [](const SubtreeRef& a, const SubtreeRef& b) { return a.span < b.span; });
  return out;
}

std::vector<std::string> splice_utterance(std::span<const std::string> host, std::size_t begin,
                                          std::size_t end, std::span<const std::string> donor) {
  if (begin >= end || end > host.size())
    throw Error(ErrorCode::index_out_of_range,
                "span " + to_string(Span{begin, end}) + " is not inside an utterance of " +
                    std::to_string(host.size()) + " tokens");
  std::vector<std::string> out;
  out.reserve(host.size() - (end - begin) + donor.size());
  out.insert(out.end(), host.begin(), host.begin() + static_cast<std::ptrdiff_t>(begin));
  out.insert(out.end(), donor.begin(), donor.end());
  out.insert(out.end(), host.begin() + static_cast<std::ptrdiff_t>(end), host.end());
  return out;
}

SpanTree splice_tree(const SpanTree& host, const SubtreeRef& target, const SpanTree& donor_tree,
                     const SubtreeRef& donor) {
  const SpanNode& tnode = node_at(host, target.node);
  if (tnode.span != target.span)
    throw Error(ErrorCode::index_out_of_range,
                "target span " + to_string(target.span) + " does not match its node");
  const SpanNode& dnode = node_at(donor_tree, donor.node);
  if (dnode.span != donor.span)
    throw Error(ErrorCode::index_out_of_range,
                "donor span " + to_string(donor.span) + " does not match its node");
  if (!(target.category == donor.category))
    throw Error(ErrorCode::category_mismatch, "target category " + target.category.to_string() +
                                                  " vs donor category " + donor.category.to_string());

  std::span<const std::string> donor_tokens(donor_tree.tokens);
  donor_tokens = donor_tokens.subspan(donor.span.begin, donor.span.size());
  SpanTree out;
  out.tokens = splice_utterance(host.tokens, target.span.begin, target.span.end, donor_tokens);
  const auto delta = static_cast<std::ptrdiff_t>(donor.span.size()) -
                     static_cast<std::ptrdiff_t>(target.span.size());
  const auto offset = static_cast<std::ptrdiff_t>(target.span.begin) -
                      static_cast<std::ptrdiff_t>(donor.span.begin);
  out.root = rebuild(host.root, target.node, 0, dnode, offset, delta);
  return out;
}

}  // namespace subs
