#pragma once

#include <stdexcept>
#include <string>

namespace osgmm {

/// Broad failure category. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
    validation = 1,
    data = 2,
    numerical = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// A caller broke a documented precondition (bad dimension, label out of range, bad parameter).
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Input data is malformed or insufficient for the requested operation.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// EM could not produce a model (e.g. fewer samples than components).
class FitError : public DataError {
public:
    explicit FitError(const std::string& what) : DataError(what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

}  // namespace osgmm
