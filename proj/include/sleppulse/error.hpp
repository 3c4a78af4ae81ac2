#pragma once

#include <stdexcept>
#include <string>

namespace sleppulse {

enum class Errc {
  non_positive_parameter,
  existence_violation,
  config,
  no_convergence,
  domain_mismatch,
  domain_error,
  grid_too_coarse,
  branch_violation,
  bracket_failure,
  degenerate_bracket,
  continuation_stall,
  positive_bound,
  resolution_error,
  blow_up,
  no_crossing,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Parameter rejections carry the offending key.
class ParamError : public Error {
 public:
  ParamError(Errc code, std::string name, const std::string& what)
      : Error(code, what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Process exit code for a library error: 2 config, 3 numerical, 4 inconsistency.
int exit_code(Errc code);

}  // namespace sleppulse
