#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace subs {

enum class ErrorCode {
  unbalanced_parens,
  unexpected_token,
  empty_input,
  invalid_program,
  invalid_path,
  schema_violation,
  dangling_type_reference,
  dangling_func_map_entry,
  unknown_constant,
  no_legal_application,
  ambiguous_application,
  type_mismatch,
  null_root,
  composition_error,
  index_out_of_range,
  category_mismatch,
  malformed_line,
  duplicate_id,
  unknown_id,
  unknown_tokenization,
  validation_failure,
  missing_provenance,
  io_failure,
  invalid_argument,
};

const char* error_code_name(ErrorCode code);

// Every library failure is reported through this type. `position` is a token
// index for parse errors, a 1-based line number for loaders, and a preorder
// node index for type errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace subs
