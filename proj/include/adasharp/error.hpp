#pragma once

#include <stdexcept>
#include <string>

namespace adasharp {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes, so new error kinds should derive from the closest category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (empty sequence, bad parameter).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Two operands disagree on geometry.
class DimensionError : public Error {
public:
    using Error::Error;
};

// File and stream problems. Everything below IoError maps to exit code 3.
class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public IoError {
public:
    using IoError::IoError;
};

class TruncationError : public IoError {
public:
    using IoError::IoError;
};

class UnsupportedFormatError : public IoError {
public:
    using IoError::IoError;
};

class InvalidMaskError : public IoError {
public:
    using IoError::IoError;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// BD-Rate and curve problems.
class ArityError : public Error {
public:
    using Error::Error;
};

class OverlapError : public Error {
public:
    using Error::Error;
};

class ImportError : public Error {
public:
    using Error::Error;
};

// External process problems.
class EnvironmentError : public Error {
public:
    using Error::Error;
};

class EncoderError : public Error {
public:
    EncoderError(const std::string& what, std::string stderr_text)
        : Error(what), stderr_text_(std::move(stderr_text)) {}

    const std::string& stderr_text() const noexcept { return stderr_text_; }

private:
    std::string stderr_text_;
};

class OutputError : public Error {
public:
    using Error::Error;
};

/// A rung of an RD sweep failed; the sweep directory holds partial results.
class SweepError : public Error {
public:
    SweepError(const std::string& what, int crf) : Error(what), crf_(crf) {}

    int crf() const noexcept { return crf_; }

private:
    int crf_;
};

}  // namespace adasharp
