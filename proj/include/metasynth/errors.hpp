#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace metasynth {

/// Stable error codes. Each maps to a fixed textual code (errc_name) and a
/// fixed process exit code (errc_exit_code) so batch tooling can parse them.
enum class Errc {
  invalid_argument,
  not_found,
  build_failed,
  load_failed,
  expansion_empty,
  no_coverage,
  generation_format,
  transport,
  client_parse,
  config_invalid,
  library_not_found,
  io_error,
  metrics_invalid,
};

const char* errc_name(Errc code);
int errc_exit_code(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// Raised when agentic expansion yields no query that demonstrably retrieves
/// the target URL. Carries the queries that were tried so the caller can log
/// them before falling back to zero-shot generation.
class NoCoverageError : public Error {
 public:
  NoCoverageError(const std::string& message, std::vector<std::string> attempted)
      : Error(Errc::no_coverage, message), attempted_(std::move(attempted)) {}

  const std::vector<std::string>& attempted_queries() const { return attempted_; }

 private:
  std::vector<std::string> attempted_;
};

}  // namespace metasynth
