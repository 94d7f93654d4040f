#pragma once

#include <stdexcept>
#include <string>

namespace specnorm {

// Ambient dimensions disagree, or a dimension is out of range.
struct dim_mismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A documented precondition does not hold for the given input.
struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A pipeline stage failed; `stage` names it, `what()` carries the diagnostic.
struct stage_error : std::runtime_error {
  stage_error(std::string stage_name, const std::string& detail)
      : std::runtime_error(stage_name + ": " + detail), stage(std::move(stage_name)) {}
  std::string stage;
};

// A quantity the underlying theorems guarantee failed an exact runtime check.
struct invariant_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace specnorm
