#pragma once

#include <stdexcept>
#include <string>

namespace transrev {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (N, M, or vector lengths).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside its documented domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A fractional shift or time step exceeds the unit Courant bound.
class CflError : public Error {
public:
    using Error::Error;
};

/// Operation needs a vector that is not parallel to the constant vector.
class ConstantVectorError : public Error {
public:
    explicit ConstantVectorError(const std::string& what, long column = -1)
        : Error(what), column_(column) {}

    /// Column index of the offending snapshot, or -1 when not applicable.
    long column() const noexcept { return column_; }

private:
    long column_;
};

/// Non-finite data, singular systems and similar breakdowns.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// File or parse failures.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace transrev
