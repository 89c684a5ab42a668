#pragma once

#include <stdexcept>
#include <string>

namespace sphcusum {

// Bad argument values or violated preconditions; maps to usage errors (exit
// code 2) at the CLI boundary.
class invalid_argument_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Model or data failures discovered while computing (degenerate multipole,
// malformed input file, non-decaying spectrum); CLI exit code 1.
class runtime_model_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace sphcusum
