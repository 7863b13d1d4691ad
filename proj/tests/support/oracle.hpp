#pragma once

// Brute-force reference implementation used to cross-check the library. It
// shares only the data types (Program, SpanTree, Domain declarations) and
// re-derives typing, composition, evaluation, splicing and the augmented set.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subs/domain.hpp"
#include "subs/program.hpp"
#include "subs/span_tree.hpp"

namespace oracle {

using subs::Domain;
using subs::Program;
using subs::SpanNode;
using subs::SpanTree;

inline std::string render(const Program& p) {
  std::string s = p.symbol();
  if (p.child_count() == 0) return s;
  s += " (";
  for (std::size_t i = 0; i < p.child_count(); ++i) {
    if (i) s += " ,";
    s += " " + render(p.children()[i]);
  }
  return s + " )";
}

struct Typed {
  std::string type;
  bool saturated = false;
  bool open = false;
  // Declared type of the next free slot when open.
  std::string next;
};

inline std::optional<Typed> type_check(const Program& p, const Domain& d) {
  auto it = d.constants().find(p.symbol());
  if (it == d.constants().end()) return std::nullopt;
  const subs::ConstantDef& c = it->second;
  std::size_t n = p.child_count();
  if (n > c.arity) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    auto t = type_check(p.children()[i], d);
    if (!t || !t->saturated || t->type != c.arg_types[i]) return std::nullopt;
  }
  Typed out;
  out.type = c.result_type;
  out.saturated = n + c.optional_args >= c.arity;
  out.open = n < c.arity;
  if (out.open) out.next = c.arg_types[n];
  return out;
}

inline bool takes(const Program& f, const Program& a, const Domain& d) {
  auto tf = type_check(f, d);
  auto ta = type_check(a, d);
  return tf && ta && tf->open && ta->saturated && tf->next == ta->type;
}

struct Applied {
  Program program;
  bool left_fn;
  std::size_t slot;
};

inline std::optional<Applied> compose(const Program& l, const Program& r, const Domain& d) {
  auto tl = type_check(l, d);
  auto tr = type_check(r, d);
  if (!tl || !tr) return std::nullopt;
  bool left_fn;
  if (!tl->saturated && tr->saturated) {
    if (!takes(l, r, d)) return std::nullopt;
    left_fn = true;
  } else if (tl->saturated && !tr->saturated) {
    if (!takes(r, l, d)) return std::nullopt;
    left_fn = false;
  } else if (takes(l, r, d)) {
    left_fn = true;
  } else if (takes(r, l, d)) {
    left_fn = false;
  } else {
    return std::nullopt;
  }
  const Program& f = left_fn ? l : r;
  const Program& a = left_fn ? r : l;
  std::vector<Program> kids(f.children().begin(), f.children().end());
  std::size_t slot = kids.size();
  kids.push_back(a);
  return Applied{Program(f.symbol(), std::move(kids)), left_fn, slot};
}

inline Program leaf_of(const std::string& category, const Domain& d) {
  const subs::ConstantDef& c = d.constants().at(category);
  return c.leaf_expansion ? *c.leaf_expansion : Program(category);
}

struct Node {
  const SpanNode* node = nullptr;
  std::optional<Program> program;
  // Position of this node's program in the root program.
  std::optional<std::vector<std::size_t>> path;
  int fn_child = -1;
  int pass_child = -1;
  std::size_t slot = 0;
  std::vector<std::size_t> kids;
};

struct Evaluated {
  Program root;
  // Preorder.
  std::vector<Node> nodes;
};

namespace detail {

inline bool eval_node(const SpanNode& n, const Domain& d, std::vector<Node>& out) {
  std::size_t me = out.size();
  out.push_back({});
  out[me].node = &n;
  if (n.children.empty()) {
    if (n.label == subs::NodeLabel::constant) {
      if (!d.constants().count(n.category)) return false;
      out[me].program = leaf_of(n.category, d);
    }
    return true;
  }
  std::size_t l = out.size();
  if (!eval_node(n.children[0], d, out)) return false;
  std::size_t r = out.size();
  if (!eval_node(n.children[1], d, out)) return false;
  out[me].kids = {l, r};
  const auto& lp = out[l].program;
  const auto& rp = out[r].program;
  if (lp && rp) {
    auto a = compose(*lp, *rp, d);
    if (!a) return false;
    out[me].program = a->program;
    out[me].fn_child = a->left_fn ? 0 : 1;
    out[me].slot = a->slot;
  } else if (lp || rp) {
    out[me].program = lp ? lp : rp;
    out[me].pass_child = lp ? 0 : 1;
  }
  return true;
}

inline void assign_paths(std::vector<Node>& nodes, std::size_t i) {
  Node& n = nodes[i];
  if (n.kids.empty() || !n.path) return;
  if (n.pass_child >= 0) {
    nodes[n.kids[n.pass_child]].path = n.path;
  } else if (n.fn_child >= 0) {
    std::size_t f = n.kids[n.fn_child];
    std::size_t a = n.kids[1 - n.fn_child];
    nodes[f].path = n.path;
    auto ap = *n.path;
    ap.push_back(n.slot);
    nodes[a].path = ap;
  }
  for (std::size_t k : n.kids) assign_paths(nodes, k);
}

}  // namespace detail

inline const Program* at_path(const Program& p, const std::vector<std::size_t>& path) {
  const Program* cur = &p;
  for (std::size_t s : path) {
    if (s >= cur->child_count()) return nullptr;
    cur = &cur->children()[s];
  }
  return cur;
}

inline Program replace_at(const Program& p, const std::vector<std::size_t>& path, std::size_t depth,
                          const Program& donor) {
  if (depth == path.size()) return donor;
  std::vector<Program> kids(p.children().begin(), p.children().end());
  kids[path[depth]] = replace_at(kids[path[depth]], path, depth + 1, donor);
  return Program(p.symbol(), std::move(kids));
}

// nullopt when the tree does not evaluate to a saturated program.
inline std::optional<Evaluated> evaluate(const SpanTree& t, const Domain& d) {
  std::vector<Node> nodes;
  if (!detail::eval_node(t.root, d, nodes)) return std::nullopt;
  if (!nodes[0].program) return std::nullopt;
  auto tt = type_check(*nodes[0].program, d);
  if (!tt || !tt->saturated) return std::nullopt;
  nodes[0].path = std::vector<std::size_t>{};
  detail::assign_paths(nodes, 0);
  Program root = *nodes[0].program;
  return Evaluated{root, std::move(nodes)};
}

inline std::optional<std::string> category(const Program& p, const Domain& d) {
  if (d.func_mode() == subs::FuncMode::outer_symbol) return p.symbol();
  auto it = d.func_map().find(p.symbol());
  if (it == d.func_map().end()) return std::nullopt;
  return it->second;
}

// Nodes that may be exchanged: program present, saturated, defined category,
// equal to the root's subprogram at the node's position, and not merely
// forwarded from a child past a NULL sibling.
inline bool exchangeable(const Node& n, const Program& root, const Domain& d) {
  if (!n.program || !n.path || n.pass_child >= 0) return false;
  auto t = type_check(*n.program, d);
  if (!t || !t->saturated) return false;
  if (!category(*n.program, d)) return false;
  const Program* sub = at_path(root, *n.path);
  return sub && *sub == *n.program;
}

inline SpanNode shift(const SpanNode& n, long delta) {
  SpanNode out = n;
  out.span.begin = static_cast<std::size_t>(static_cast<long>(n.span.begin) + delta);
  out.span.end = static_cast<std::size_t>(static_cast<long>(n.span.end) + delta);
  for (auto& c : out.children) c = shift(c, delta);
  return out;
}

// Copies `host` with the node `target` (compared by address) replaced.
inline SpanNode graft(const SpanNode& host, const SpanNode* target, const SpanNode& donor,
                      long& cursor) {
  if (&host == target) {
    SpanNode moved = shift(donor, cursor - static_cast<long>(donor.span.begin));
    cursor += static_cast<long>(donor.span.end - donor.span.begin);
    return moved;
  }
  SpanNode out;
  out.label = host.label;
  out.category = host.category;
  long begin = cursor;
  if (host.children.empty()) {
    cursor += static_cast<long>(host.span.end - host.span.begin);
  } else {
    for (const auto& c : host.children) out.children.push_back(graft(c, target, donor, cursor));
  }
  out.span = {static_cast<std::size_t>(begin), static_cast<std::size_t>(cursor)};
  return out;
}

struct Input {
  std::vector<std::string> tokens;
  Program program;
  SpanTree tree;
};

using PairSet = std::set<std::pair<std::string, std::string>>;

inline std::string join(const std::vector<std::string>& toks) {
  std::string s;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) s += ' ';
    s += toks[i];
  }
  return s;
}

struct Counts {
  PairSet pairs;
  // Category-matched node pairs, and those whose splice failed the check.
  std::size_t matched = 0;
  std::size_t unsound = 0;
};

// Every ordered pair of exchangeable nodes from distinct examples with equal
// categories is spliced; results that re-evaluate to the substituted program
// are collected, and training pairs are filtered out when `minus_train`.
inline Counts brute_force(const std::vector<Input>& corpus, const Domain& d, bool minus_train = true,
                          bool same_example = false) {
  std::vector<std::optional<Evaluated>> ev;
  for (const Input& in : corpus) ev.push_back(evaluate(in.tree, d));
  Counts out;
  for (std::size_t h = 0; h < corpus.size(); ++h) {
    if (!ev[h]) continue;
    for (const Node& hn : ev[h]->nodes) {
      if (!exchangeable(hn, ev[h]->root, d)) continue;
      const std::string hc = *category(*hn.program, d);
      for (std::size_t g = 0; g < corpus.size(); ++g) {
        if ((g == h && !same_example) || !ev[g]) continue;
        for (const Node& dn : ev[g]->nodes) {
          if (!exchangeable(dn, ev[g]->root, d) || *category(*dn.program, d) != hc) continue;
          ++out.matched;
          const auto& ht = corpus[h].tokens;
          const auto& dt = corpus[g].tokens;
          std::vector<std::string> x(ht.begin(), ht.begin() + hn.node->span.begin);
          x.insert(x.end(), dt.begin() + dn.node->span.begin, dt.begin() + dn.node->span.end);
          x.insert(x.end(), ht.begin() + hn.node->span.end, ht.end());
          Program z = replace_at(ev[h]->root, *hn.path, 0, *dn.program);
          long cursor = 0;
          SpanTree spliced{x, graft(corpus[h].tree.root, hn.node, *dn.node, cursor)};
          auto re = evaluate(spliced, d);
          if (!re || re->root != z) {
            ++out.unsound;
            continue;
          }
          out.pairs.emplace(join(x), render(z));
        }
      }
    }
  }
  if (minus_train)
    for (const Input& in : corpus) out.pairs.erase({join(in.tokens), render(in.program)});
  return out;
}

// First preorder position where the programs differ in symbol or arity.
inline std::optional<std::vector<std::size_t>> divergence(const Program& a, const Program& b,
                                                          std::vector<std::size_t> here = {}) {
  if (a.symbol() != b.symbol() || a.child_count() != b.child_count()) return here;
  for (std::size_t i = 0; i < a.child_count(); ++i) {
    here.push_back(i);
    if (auto p = divergence(a.children()[i], b.children()[i], here)) return p;
    here.pop_back();
  }
  return std::nullopt;
}

}  // namespace oracle
