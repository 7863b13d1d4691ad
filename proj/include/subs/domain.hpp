#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "subs/program.hpp"

namespace subs {

enum class ConstantKind { entity, predicate };

struct ConstantDef {
  std::string name;
  ConstantKind kind = ConstantKind::entity;
  // Number of argument slots. The last `optional_args` slots may stay empty
  // without the program counting as unsaturated (SCAN's i_jump vs
  // i_jump ( i_right )).
  std::size_t arity = 0;
  std::size_t optional_args = 0;
  std::vector<std::string> arg_types;
  std::string result_type;
  // Program a span-tree leaf labelled with this constant evaluates to, e.g.
  // countryid#usa -> countryid ( usa ). Leaves without one evaluate to the
  // bare constant.
  std::optional<Program> leaf_expansion;

  std::size_t required_args() const noexcept { return arity - optional_args; }
};

enum class FuncMode { outer_symbol, explicit_map };

// Result of func(.) on a subprogram. Undefined categories never index
// anything in the substitution engine.
class SemanticCategory {
 public:
  SemanticCategory() = default;
  explicit SemanticCategory(std::string label) : label_(std::move(label)) {}

  static SemanticCategory undefined() { return {}; }

  bool defined() const noexcept { return label_.has_value(); }
  const std::string& label() const;
  std::string to_string() const { return label_.value_or("UNDEFINED"); }

  friend bool operator==(const SemanticCategory&, const SemanticCategory&) = default;

 private:
  std::optional<std::string> label_;
};

class Domain {
 public:
  Domain(std::string name, std::set<std::string> types, std::vector<ConstantDef> constants,
         FuncMode func_mode, std::map<std::string, std::string> func_map = {});

  const std::string& name() const noexcept { return name_; }
  const std::set<std::string>& types() const noexcept { return types_; }
  const std::map<std::string, ConstantDef>& constants() const noexcept { return constants_; }
  FuncMode func_mode() const noexcept { return func_mode_; }
  const std::map<std::string, std::string>& func_map() const noexcept { return func_map_; }

  // Throws UnknownConstant.
  const ConstantDef& constant(const std::string& name) const;
  const ConstantDef* find(const std::string& name) const noexcept;

  // Program denoted by a span-tree leaf carrying `category`.
  Program leaf_program(const std::string& category) const;

 private:
  std::string name_;
  std::set<std::string> types_;
  std::map<std::string, ConstantDef> constants_;
  FuncMode func_mode_;
  std::map<std::string, std::string> func_map_;
};

// Builds and validates a domain from its JSON config document (see README for
// the schema). Throws SchemaViolation, DanglingTypeReference or
// DanglingFuncMapEntry.
Domain load_domain(std::string_view config_json);
// Canonical JSON text of the domain: sorted keys, no insignificant whitespace.
std::string domain_to_json(const Domain& d);

struct TypeInfo {
  std::string type;
  // No required slot is empty.
  bool saturated = true;
  // At least one slot (required or optional) can still take an argument.
  bool open = false;

  friend bool operator==(const TypeInfo&, const TypeInfo&) = default;
};

// Result type and saturation of `p`. Arguments must be saturated and match the
// declared slot type; violations throw TypeMismatch with the preorder index of
// the offending node as position.
TypeInfo type_of(const Program& p, const Domain& d);

SemanticCategory semantic_category(const Program& p, const Domain& d);

struct ApplyOptions {
  bool allow_tie_break = true;
};

struct Application {
  Program program;
  // True when the left child is the function.
  bool left_is_function = true;
  // Number of arguments the function held before this application; the
  // argument lands at child index `slot`.
  std::size_t slot = 0;
  // Both orderings were legal and the left-function tie-break decided.
  bool tie_break = false;
};

// Composes two sibling programs by function application. An unsaturated child
// is the function when exactly one child is unsaturated; otherwise the type
// system decides, and a remaining ambiguity prefers the left child.
Application apply(const Program& left, const Program& right, const Domain& d,
                  ApplyOptions options = {});

}  // namespace subs
