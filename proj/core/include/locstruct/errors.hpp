/*
 * Copyright 2026 The locstruct Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LOCSTRUCT_ERRORS_HPP
#define LOCSTRUCT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace locstruct {

// Every error raised by the library derives from Error and carries a short
// machine-readable kind tag next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error("shape_error", m) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& m) : Error("index_error", m) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& m, double condition_estimate)
      : Error("numerical_error", m), condition_(condition_estimate) {}
  explicit NumericalError(const std::string& m) : NumericalError(m, 0.0) {}
  // Reciprocal-condition based estimate of cond(A); 0 when not available.
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& m) : Error("capacity_error", m) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& m)
      : Error("insufficient_data", m) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& m)
      : Error("unsupported_configuration", m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error("domain_error", m) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& m, std::size_t line)
      : Error("parse_error", m), line_(line) {}
  // 1-based line of the offending input, 0 when unknown.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error("io_error", m) {}
};

class VersionError : public Error {
 public:
  explicit VersionError(const std::string& m)
      : Error("unsupported_version", m) {}
};

}  // namespace locstruct

#endif  // LOCSTRUCT_ERRORS_HPP
