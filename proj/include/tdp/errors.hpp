/* Copyright 2026 The TDP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TDP_ERRORS_HPP_
#define TDP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace tdp {

// Root of every error thrown by the library. Callers that only need to report
// failures can catch this; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape and extent violations (channel mismatch, empty tensors, wrong column
// counts handed to the streaming engine).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Weights missing or inconsistent with the network they are used with.
class WeightError : public Error {
 public:
  using Error::Error;
};

// Malformed files: bad magic, truncated payloads, corrupt code bytes.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Arguments outside their documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Numeric domain violations, e.g. log of a negative energy.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation invoked in the wrong lifecycle state.
class StateError : public Error {
 public:
  using Error::Error;
};

// Network topologies the streaming planner cannot schedule.
class UnsupportedArchitecture : public Error {
 public:
  using Error::Error;
};

// Statistics that need more samples than were supplied.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Metrics or quantities with no defined value for the given input.
class UndefinedValue : public Error {
 public:
  using Error::Error;
};

}  // namespace tdp

#endif  // TDP_ERRORS_HPP_
