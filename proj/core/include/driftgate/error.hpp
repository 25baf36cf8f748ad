#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace driftgate {

// Every failure the library raises deliberately carries one of these tags so
// callers (and the CLI) can distinguish usage errors from data errors.
enum class ErrorKind {
  missing_column,
  bad_field,
  non_finite,
  unsorted_timestamps,
  fix_before_commit,
  duplicate_id,
  label_fix_mismatch,
  empty_stream,
  duplicate_commit,
  clock_regression,
  unknown_commit,
  trace_mismatch,
  non_randomized_learner,
  empty_result,
  domain_error,
  bad_config,
  io_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::int64_t row = -1);

  ErrorKind kind() const { return kind_; }
  // 1-based data row for dataset errors, -1 when not applicable.
  std::int64_t row() const { return row_; }

 private:
  ErrorKind kind_;
  std::int64_t row_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message,
                        std::int64_t row = -1);

}  // namespace driftgate
