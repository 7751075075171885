#include "metasynth/errors.hpp"

namespace metasynth {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::not_found: return "not-found";
    case Errc::build_failed: return "build-failed";
    case Errc::load_failed: return "load-failed";
    case Errc::expansion_empty: return "expansion-empty";
    case Errc::no_coverage: return "no-coverage";
    case Errc::generation_format: return "generation-format";
    case Errc::transport: return "transport";
    case Errc::client_parse: return "client-parse";
    case Errc::config_invalid: return "config-invalid";
    case Errc::library_not_found: return "library-not-found";
    case Errc::io_error: return "io-error";
    case Errc::metrics_invalid: return "metrics-invalid";
  }
  return "unknown";
}

int errc_exit_code(Errc code) {
  // 0 = success, 1 = total batch failure, 2 = partial batch failure;
  // module errors start at 10 and never shift between releases.
  switch (code) {
    case Errc::invalid_argument: return 10;
    case Errc::not_found: return 11;
    case Errc::build_failed: return 12;
    case Errc::load_failed: return 13;
    case Errc::expansion_empty: return 14;
    case Errc::no_coverage: return 15;
    case Errc::generation_format: return 16;
    case Errc::transport: return 17;
    case Errc::client_parse: return 18;
    case Errc::config_invalid: return 19;
    case Errc::library_not_found: return 20;
    case Errc::io_error: return 21;
    case Errc::metrics_invalid: return 22;
  }
  return 1;
}

}  // namespace metasynth
