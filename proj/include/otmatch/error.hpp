#pragma once

#include <stdexcept>
#include <string>

namespace otmatch {

// Malformed input file (word vectors, ontology documents, candidate or
// reference files). Messages carry the offending path/line where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical solver failure (non-finite state, size guard, pivot cap).
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace otmatch
