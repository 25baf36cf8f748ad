#include "driftgate/error.hpp"

namespace driftgate {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::missing_column: return "missing_column";
    case ErrorKind::bad_field: return "bad_field";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::unsorted_timestamps: return "unsorted_timestamps";
    case ErrorKind::fix_before_commit: return "fix_before_commit";
    case ErrorKind::duplicate_id: return "duplicate_id";
    case ErrorKind::label_fix_mismatch: return "label_fix_mismatch";
    case ErrorKind::empty_stream: return "empty_stream";
    case ErrorKind::duplicate_commit: return "duplicate_commit";
    case ErrorKind::clock_regression: return "clock_regression";
    case ErrorKind::unknown_commit: return "unknown_commit";
    case ErrorKind::trace_mismatch: return "trace_mismatch";
    case ErrorKind::non_randomized_learner: return "non_randomized_learner";
    case ErrorKind::empty_result: return "empty_result";
    case ErrorKind::domain_error: return "domain_error";
    case ErrorKind::bad_config: return "bad_config";
    case ErrorKind::io_error: return "io_error";
  }
  return "unknown";
}

namespace {
std::string decorate(ErrorKind kind, const std::string& message,
                     std::int64_t row) {
  std::string out = std::string(to_string(kind)) + ": " + message;
  if (row >= 0) out += " (row " + std::to_string(row) + ")";
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::int64_t row)
    : std::runtime_error(decorate(kind, message, row)),
      kind_(kind),
      row_(row) {}

void raise(ErrorKind kind, const std::string& message, std::int64_t row) {
  throw Error(kind, message, row);
}

}  // namespace driftgate
