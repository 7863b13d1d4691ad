#include "subs/error.hpp"

namespace subs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::unbalanced_parens: return "UnbalancedParens";
    case ErrorCode::unexpected_token: return "UnexpectedToken";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::invalid_program: return "InvalidProgram";
    case ErrorCode::invalid_path: return "InvalidPath";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::dangling_type_reference: return "DanglingTypeReference";
    case ErrorCode::dangling_func_map_entry: return "DanglingFuncMapEntry";
    case ErrorCode::unknown_constant: return "UnknownConstant";
    case ErrorCode::no_legal_application: return "NoLegalApplication";
    case ErrorCode::ambiguous_application: return "AmbiguousApplication";
    case ErrorCode::type_mismatch: return "TypeMismatch";
    case ErrorCode::null_root: return "NullRoot";
    case ErrorCode::composition_error: return "CompositionError";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::category_mismatch: return "CategoryMismatch";
    case ErrorCode::malformed_line: return "MalformedLine";
    case ErrorCode::duplicate_id: return "DuplicateId";
    case ErrorCode::unknown_id: return "UnknownId";
    case ErrorCode::unknown_tokenization: return "UnknownTokenization";
    case ErrorCode::validation_failure: return "ValidationFailure";
    case ErrorCode::missing_provenance: return "MissingProvenance";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> position) {
  std::string out = error_code_name(code);
  if (position) out += "(" + std::to_string(*position) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> position)
    : std::runtime_error(decorate(code, message, position)),
      code_(code),
      position_(position) {}

}  // namespace subs
