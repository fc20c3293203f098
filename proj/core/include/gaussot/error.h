// Copyright 2026 The gaussot Authors. All Rights Reserved.
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

#ifndef GAUSSOT_ERROR_H_
#define GAUSSOT_ERROR_H_

#include <stdexcept>
#include <string>

namespace gaussot {

// Base of every error thrown by the library. The CLI maps these to exit
// code 2 (data or numeric failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree (matrix dims, weight counts, feature widths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Arguments outside their documented domain (t outside [0,1], bad weights).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Rank loss, indefiniteness, eigen-solver failure.
class NumericError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorCode {
  kIo,
  kBadMagic,
  kBadVersion,
  kBadDtype,
  kTruncated,
  kNonFinite,
  kBadShape,
  kBadManifest,
  kUnsupportedImage,
};

// File format violations. Each failure class carries a distinct code so
// callers can tell a truncated file from a foreign one.
class FormatError : public Error {
 public:
  FormatError(FormatErrorCode code, const std::string& what)
      : Error(what), code_(code) {}

  FormatErrorCode code() const { return code_; }

 private:
  FormatErrorCode code_;
};

}  // namespace gaussot

#endif  // GAUSSOT_ERROR_H_
