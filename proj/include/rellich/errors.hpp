#pragma once

#include <stdexcept>
#include <string>

namespace rellich {

/// Evaluation failure (log of non-positive value, division by zero, ...).
/// The message names the offending expression node.
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scenario / expression text could not be parsed or validated.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A case precondition failed (non-Killing field, Navier data violated, ...).
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Resource guard tripped (expression node-count cap).
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace rellich
