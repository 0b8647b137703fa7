#pragma once

#include <stdexcept>
#include <string>

namespace weapo {

/// Bad input data or an operation that cannot be carried out on it.
/// The CLI maps this family to exit code 1.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed invocation (missing required option, invalid flag value).
/// The CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A ranking metric was requested on input where it is not defined
/// (e.g. only one class present).
class UndefinedMetricError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace weapo
