#pragma once

#include <stdexcept>
#include <string>

namespace sqap {

// Input text does not match the instance file format (bad token, wrong count).
class MalformedFileError : public std::runtime_error {
public:
  explicit MalformedFileError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that this solver does not handle
// (asymmetric matrices, nonzero diagonal, cost-bound overflow).
class UnsupportedInstanceError : public std::runtime_error {
public:
  explicit UnsupportedInstanceError(const std::string& what) : std::runtime_error(what) {}
};

// Bad generator or solver configuration.
class InvalidConfigError : public std::runtime_error {
public:
  explicit InvalidConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Priority-queue contract violation (duplicate insert, non-member remove/update).
class QueueError : public std::logic_error {
public:
  explicit QueueError(const std::string& what) : std::logic_error(what) {}
};

// Raised by the runtime self-check mode when an engine invariant breaks.
class DebugCheckError : public std::logic_error {
public:
  explicit DebugCheckError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sqap
