// Copyright 2026 The eood Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EOOD_ERRORS_H_
#define EOOD_ERRORS_H_

#include <stdexcept>
#include <string>

namespace eood {

// Base of every error raised by the library. `kind()` is a short stable tag
// ("argument", "load", ...) used in the CLI's machine-readable error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define EOOD_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(tag, message) {} \
  };

EOOD_DEFINE_ERROR(ArgumentError, "argument")
EOOD_DEFINE_ERROR(LoadError, "load")
EOOD_DEFINE_ERROR(NumericError, "numeric")
EOOD_DEFINE_ERROR(ConfigError, "config")
EOOD_DEFINE_ERROR(TrainingError, "training")
EOOD_DEFINE_ERROR(FitError, "fit")
EOOD_DEFINE_ERROR(CalibrationError, "calibration")
EOOD_DEFINE_ERROR(StateError, "state")
EOOD_DEFINE_ERROR(IoError, "io")
EOOD_DEFINE_ERROR(VersionError, "version")

#undef EOOD_DEFINE_ERROR

}  // namespace eood

#endif  // EOOD_ERRORS_H_
