#pragma once

#include <stdexcept>
#include <string>

namespace lossless {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (shape, sign, range, grid ordering).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The generator handed to make_lossless is not skew-symmetric.
class NotSkewSymmetric : public InvalidArgument {
public:
    NotSkewSymmetric(const std::string& what, double asymmetry)
        : InvalidArgument(what), asymmetry_(asymmetry) {}

    /// max |J + J^T| over all entries.
    double asymmetry() const noexcept { return asymmetry_; }

private:
    double asymmetry_;
};

/// A configured resource cap (harmonic count, horizon, iteration budget) was hit.
class ResourceExhausted : public Error {
public:
    using Error::Error;
};

} // namespace lossless
