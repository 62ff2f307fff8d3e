#pragma once

#include <stdexcept>
#include <string>

namespace depthkit {

/// Bad arguments, flags, or shapes: the caller asked for something the API
/// does not offer.  The CLI maps this to exit code 2.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input data lies outside the mathematical domain of an estimator
/// (e.g. a nonpositive tail threshold under a log).  Exit code 3.
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Data that is formally in-domain but makes the procedure collapse
/// (all-tied tails, singular covariance, all-zero depths).  Exit code 3.
struct degenerate_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iteration failed to converge or overflowed its search bracket.
/// Exit code 3.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace depthkit
