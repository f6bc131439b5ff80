// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mfmgcn {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied something invalid; the CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class StructuralError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Failures discovered while running; the CLI maps these to exit code 2.
class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

class UnfillableError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class NotFittedError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace mfmgcn
