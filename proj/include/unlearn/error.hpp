// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace unlearn {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-provided values: specs, configs, hyperparameters, flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two arrays or a model and a batch disagree on shape or layout.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered during forward, backward, or FIM accumulation.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class FormatFault {
  bad_magic,
  bad_version,
  truncated,
  count_mismatch,
  missing_fingerprint,
  invalid_value,
};

/// A binary file was readable but its contents are not a valid encoding.
class FormatError : public IoError {
 public:
  FormatError(FormatFault fault, const std::string& what)
      : IoError(what), fault_(fault) {}

  [[nodiscard]] FormatFault fault() const noexcept { return fault_; }

 private:
  FormatFault fault_;
};

}  // namespace unlearn
