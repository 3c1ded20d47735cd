#pragma once

#include <stdexcept>
#include <string>

namespace spincorr {

/// Input outside the documented domain of an operation, or a broken type invariant.
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Too few events to form the requested estimate.
class insufficient_data_error : public std::runtime_error {
public:
  explicit insufficient_data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent persisted data, or an I/O failure.
class data_error : public std::runtime_error {
public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// A user-supplied correlation function returned a non-finite value.
class evaluation_error : public std::runtime_error {
public:
  explicit evaluation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spincorr
