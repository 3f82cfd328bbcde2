/* Copyright 2026 The mvov3d Authors. All Rights Reserved.

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

#ifndef MVOV3D_ERRORS_H_
#define MVOV3D_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mvov3d {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions, out-of-range parameters, inconsistent arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data violates a type invariant (empty mask, out-of-range label, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Mathematically degenerate input, e.g. a zero vector passed to cosine.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Unknown key, e.g. an instance id that does not occur in the cloud.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Failure while reading or validating files on disk.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised inside one pipeline stage.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace mvov3d

#endif  // MVOV3D_ERRORS_H_
