#pragma once

#include <stdexcept>
#include <string>

namespace ail {

enum class Errc {
  inadmissible_parameters,
  inadmissible_recursion,
  unsupported_family,
  unsupported_problem,
  missing_series,
  missing_solution,
  index_out_of_range,
  dimension_mismatch,
  invalid_parameters,
  invalid_gamma,
  invalid_h,
  degenerate_run,
  partition_mismatch,
  parse_error,
  semantic_error,
  io_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace ail
