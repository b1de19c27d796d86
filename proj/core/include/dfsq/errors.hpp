// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dfsq {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument, malformed configuration, or violated precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File/stream error with a machine-checkable kind.
class IoError : public Error {
public:
    enum class Kind {
        OpenFailed,
        WriteFailed,
        BadMagic,
        UnsupportedVersion,
        UnsupportedDtype,
        UnsupportedRank,
        Truncated,
        MalformedHeader,
        UnsupportedMaxval,
        NonFinite,
    };

    IoError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace dfsq
