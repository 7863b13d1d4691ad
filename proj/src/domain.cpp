#include "subs/domain.hpp"

#include <json.hpp>

#include "subs/error.hpp"

namespace subs {

using nlohmann::json;

const std::string& SemanticCategory::label() const {
  if (!label_) throw Error(ErrorCode::invalid_argument, "label of an UNDEFINED category");
  return *label_;
}

Domain::Domain(std::string name, std::set<std::string> types, std::vector<ConstantDef> constants,
               FuncMode func_mode, std::map<std::string, std::string> func_map)
    : name_(std::move(name)),
      types_(std::move(types)),
      func_mode_(func_mode),
      func_map_(std::move(func_map)) {
  if (constants.empty()) throw Error(ErrorCode::schema_violation, "domain has no constants");
  for (ConstantDef& c : constants) {
    if (!is_valid_symbol(c.name))
      throw Error(ErrorCode::schema_violation, "invalid constant name '" + c.name + "'");
    if (c.arity > kMaxArity)
      throw Error(ErrorCode::schema_violation, "constant '" + c.name + "' has arity above 2");
    if (c.kind == ConstantKind::entity && c.arity != 0)
      throw Error(ErrorCode::schema_violation, "entity '" + c.name + "' must have arity 0");
    if (c.kind == ConstantKind::predicate && c.arity == 0)
      throw Error(ErrorCode::schema_violation, "predicate '" + c.name + "' must have arity >= 1");
    if (c.optional_args > c.arity)
      throw Error(ErrorCode::schema_violation,
                  "constant '" + c.name + "' has more optional slots than slots");
    if (c.arg_types.size() != c.arity)
      throw Error(ErrorCode::schema_violation,
                  "constant '" + c.name + "' lists " + std::to_string(c.arg_types.size()) +
                      " argument types for arity " + std::to_string(c.arity));
    for (const std::string& t : c.arg_types)
      if (!types_.contains(t))
        throw Error(ErrorCode::dangling_type_reference,
                    "constant '" + c.name + "' references undeclared type '" + t + "'");
    if (!types_.contains(c.result_type))
      throw Error(ErrorCode::dangling_type_reference,
                  "constant '" + c.name + "' has undeclared result type '" + c.result_type + "'");
    std::string key = c.name;
    if (!constants_.emplace(key, std::move(c)).second)
      throw Error(ErrorCode::schema_violation, "duplicate constant '" + key + "'");
  }
  for (const auto& [symbol, label] : func_map_) {
    if (!constants_.contains(symbol))
      throw Error(ErrorCode::dangling_func_map_entry,
                  "func_map names unknown constant '" + symbol + "'");
    if (label.empty())
      throw Error(ErrorCode::schema_violation, "func_map entry '" + symbol + "' has empty label");
  }
  for (const auto& [name, c] : constants_) {
    if (!c.leaf_expansion) continue;
    TypeInfo t;
    try {
      t = type_of(*c.leaf_expansion, *this);
    } catch (const Error& e) {
      throw Error(ErrorCode::schema_violation,
                  "leaf_expansion of '" + name + "' does not type-check: " + e.what());
    }
    if (t.type != c.result_type)
      throw Error(ErrorCode::schema_violation, "leaf_expansion of '" + name + "' has type '" +
                                                   t.type + "', declared '" + c.result_type + "'");
  }
}

const ConstantDef* Domain::find(const std::string& name) const noexcept {
  auto it = constants_.find(name);
  return it == constants_.end() ? nullptr : &it->second;
}

const ConstantDef& Domain::constant(const std::string& name) const {
  if (const ConstantDef* c = find(name)) return *c;
  throw Error(ErrorCode::unknown_constant, "'" + name + "' is not a constant of domain '" + name_ + "'");
}

Program Domain::leaf_program(const std::string& category) const {
  const ConstantDef& c = constant(category);
  return c.leaf_expansion ? *c.leaf_expansion : Program(c.name);
}

namespace {

[[noreturn]] void schema(const std::string& what) {
  throw Error(ErrorCode::schema_violation, what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema(where + " is missing \"" + key + "\"");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) schema(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

ConstantDef parse_constant(const json& c, std::size_t index) {
  std::string where = "constants[" + std::to_string(index) + "]";
  if (!c.is_object()) schema(where + " must be an object");
  ConstantDef def;
  def.name = string_field(c, "name", where);
  where += " ('" + def.name + "')";
  std::string kind = string_field(c, "kind", where);
  if (kind == "entity") {
    def.kind = ConstantKind::entity;
  } else if (kind == "predicate") {
    def.kind = ConstantKind::predicate;
  } else {
    schema(where + ": kind must be \"entity\" or \"predicate\"");
  }
  const json& arity = field(c, "arity", where);
  if (!arity.is_number_unsigned()) schema(where + ": arity must be a non-negative integer");
  def.arity = arity.get<std::size_t>();
  if (auto it = c.find("optional_args"); it != c.end()) {
    if (!it->is_number_unsigned()) schema(where + ": optional_args must be a non-negative integer");
    def.optional_args = it->get<std::size_t>();
  }
  const json& args = field(c, "arg_types", where);
  if (!args.is_array()) schema(where + ": arg_types must be an array");
  for (const json& a : args) {
    if (!a.is_string()) schema(where + ": arg_types entries must be strings");
    def.arg_types.push_back(a.get<std::string>());
  }
  def.result_type = string_field(c, "result_type", where);
  if (auto it = c.find("leaf_expansion"); it != c.end() && !it->is_null()) {
    if (!it->is_string()) schema(where + ": leaf_expansion must be a string");
    try {
      def.leaf_expansion = parse_program(it->get<std::string>());
    } catch (const Error& e) {
      schema(where + ": leaf_expansion does not parse: " + e.what());
    }
  }
  return def;
}

}  // namespace

Domain load_domain(std::string_view config_json) {
  json doc;
  try {
    doc = json::parse(config_json);
  } catch (const json::parse_error& e) {
    schema(std::string("domain config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("domain config must be a JSON object");

  std::string name = string_field(doc, "name", "domain config");
  const json& types_json = field(doc, "types", "domain config");
  if (!types_json.is_array()) schema("\"types\" must be an array");
  std::set<std::string> types;
  for (const json& t : types_json) {
    if (!t.is_string() || t.get<std::string>().empty()) schema("\"types\" entries must be non-empty strings");
    if (!types.insert(t.get<std::string>()).second)
      schema("type '" + t.get<std::string>() + "' declared twice");
  }

  const json& consts = field(doc, "constants", "domain config");
  if (!consts.is_array()) schema("\"constants\" must be an array");
  std::vector<ConstantDef> constants;
  for (std::size_t i = 0; i < consts.size(); ++i) constants.push_back(parse_constant(consts[i], i));

  std::string mode = string_field(doc, "func_mode", "domain config");
  FuncMode func_mode;
  if (mode == "outer_symbol") {
    func_mode = FuncMode::outer_symbol;
  } else if (mode == "explicit_map") {
    func_mode = FuncMode::explicit_map;
  } else {
    schema("func_mode must be \"outer_symbol\" or \"explicit_map\"");
  }

  std::map<std::string, std::string> func_map;
  if (auto it = doc.find("func_map"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) schema("\"func_map\" must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) schema("func_map['" + k + "'] must be a string");
      func_map.emplace(k, v.get<std::string>());
    }
  }
  if (func_mode == FuncMode::explicit_map && func_map.empty())
    schema("explicit_map mode requires a non-empty func_map");

  return Domain(std::move(name), std::move(types), std::move(constants), func_mode,
                std::move(func_map));
}

std::string domain_to_json(const Domain& d) {
  json doc;
  doc["name"] = d.name();
  doc["types"] = json(std::vector<std::string>(d.types().begin(), d.types().end()));
  json consts = json::array();
  for (const auto& [name, c] : d.constants()) {
    json j;
    j["name"] = name;
    j["kind"] = c.kind == ConstantKind::entity ? "entity" : "predicate";
    j["arity"] = c.arity;
    j["optional_args"] = c.optional_args;
    j["arg_types"] = c.arg_types;
    j["result_type"] = c.result_type;
    if (c.leaf_expansion) j["leaf_expansion"] = render_program(*c.leaf_expansion);
    consts.push_back(std::move(j));
  }
  doc["constants"] = std::move(consts);
  doc["func_mode"] = d.func_mode() == FuncMode::outer_symbol ? "outer_symbol" : "explicit_map";
  doc["func_map"] = json(d.func_map());
  return doc.dump();
}

namespace {

TypeInfo type_rec(const Program& p, const Domain& d, std::size_t& next_index) {
  const std::size_t here = next_index++;
  const ConstantDef& def = d.constant(p.symbol());
  if (p.child_count() > def.arity)
    throw Error(ErrorCode::type_mismatch,
                "'" + p.symbol() + "' takes at most " + std::to_string(def.arity) + " arguments",
                here);
  for (std::size_t i = 0; i < p.child_count(); ++i) {
    const Program& child = p.children()[i];
    const std::size_t child_index = next_index;
    TypeInfo t = type_rec(child, d, next_index);
    if (!t.saturated)
      throw Error(ErrorCode::type_mismatch,
                  "argument '" + child.symbol() + "' of '" + p.symbol() + "' is unsaturated",
                  child_index);
    if (t.type != def.arg_types[i])
      throw Error(ErrorCode::type_mismatch,
                  "argument " + std::to_string(i) + " of '" + p.symbol() + "' expects " +
                      def.arg_types[i] + ", got " + t.type + " ('" + child.symbol() + "')",
                  child_index);
  }
  return TypeInfo{def.result_type, p.child_count() >= def.required_args(),
                  p.child_count() < def.arity};
}

void check_symbols(const Program& p, const Domain& d) {
  (void)d.constant(p.symbol());
  for (const Program& c : p.children()) check_symbols(c, d);
}

bool can_take(const Program& fn, const TypeInfo& fn_type, const TypeInfo& arg_type,
              const Domain& d) {
  if (!fn_type.open || !arg_type.saturated) return false;
  const ConstantDef& def = d.constant(fn.symbol());
  return def.arg_types[fn.child_count()] == arg_type.type;
}

}  // namespace

TypeInfo type_of(const Program& p, const Domain& d) {
  std::size_t next = 0;
  return type_rec(p, d, next);
}

SemanticCategory semantic_category(const Program& p, const Domain& d) {
  check_symbols(p, d);
  if (d.func_mode() == FuncMode::outer_symbol) return SemanticCategory(p.symbol());
  auto it = d.func_map().find(p.symbol());
  if (it == d.func_map().end()) return SemanticCategory::undefined();
  return SemanticCategory(it->second);
}

Application apply(const Program& left, const Program& right, const Domain& d,
                  ApplyOptions options) {
  const TypeInfo lt = type_of(left, d);
  const TypeInfo rt = type_of(right, d);

  auto make = [](const Program& fn, const Program& arg, bool left_fn, bool tie) {
    return Application{fn.with_argument(arg), left_fn, fn.child_count(), tie};
  };
  auto describe = [&] {
    return "'" + render_program(left) + "' and '" + render_program(right) + "'";
  };

  if (lt.saturated != rt.saturated) {
    const bool left_fn = !lt.saturated;
    const Program& fn = left_fn ? left : right;
    const Program& arg = left_fn ? right : left;
    if (!can_take(fn, left_fn ? lt : rt, left_fn ? rt : lt, d))
      throw Error(ErrorCode::no_legal_application,
                  "unsaturated '" + fn.symbol() + "' cannot take '" + render_program(arg) + "'");
    return make(fn, arg, left_fn, false);
  }

  const bool left_ok = can_take(left, lt, rt, d);
  const bool right_ok = can_take(right, rt, lt, d);
  if (left_ok && right_ok) {
    if (!options.allow_tie_break)
      throw Error(ErrorCode::ambiguous_application, "either of " + describe() + " can be the function");
    return make(left, right, true, true);
  }
  if (left_ok) return make(left, right, true, false);
  if (right_ok) return make(right, left, false, false);
  throw Error(ErrorCode::no_legal_application, "neither of " + describe() + " can take the other");
}

}  // namespace subs
