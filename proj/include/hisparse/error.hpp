// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hisparse {

enum class ErrorKind {
  dimension,      // shape or length mismatch, index out of range
  capacity,       // enumeration or size guard exceeded
  configuration,  // infeasible or invalid parameters
  domain,         // argument outside a function's mathematical domain
  io,             // file system failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace hisparse
