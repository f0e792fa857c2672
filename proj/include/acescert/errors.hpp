// Copyright 2026 The acescert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACESCERT_ERRORS_HPP_
#define ACESCERT_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acescert {

// Base of every error the library throws. The C API maps each subclass to a
// distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed a value outside an operation's documented preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A mathematically undefined request, e.g. a quantile at p = 1 or a radius
// for a probability that does not exceed 1/2.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed on-disk input. Carries the file and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Well-formed input that violates a dataset invariant. `field()` names the
// offending field.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error("invalid " + field + ": " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed. Indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace acescert

#endif  // ACESCERT_ERRORS_HPP_
