#pragma once

#include <stdexcept>
#include <string>

namespace trussopt {

// Malformed input file.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid problem definition (dangling ids, bad catalog, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mechanism / singular stiffness detected during analysis.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace trussopt
