#include "ail/error.hpp"

namespace ail {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::inadmissible_parameters: return "inadmissible-parameters";
    case Errc::inadmissible_recursion: return "inadmissible-recursion";
    case Errc::unsupported_family: return "unsupported-family";
    case Errc::unsupported_problem: return "unsupported-problem";
    case Errc::missing_series: return "missing-series";
    case Errc::missing_solution: return "missing-solution";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::invalid_parameters: return "invalid-parameters";
    case Errc::invalid_gamma: return "invalid-gamma";
    case Errc::invalid_h: return "invalid-h";
    case Errc::degenerate_run: return "degenerate-run";
    case Errc::partition_mismatch: return "partition-mismatch";
    case Errc::parse_error: return "parse-error";
    case Errc::semantic_error: return "semantic-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

}  // namespace ail
