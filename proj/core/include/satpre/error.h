// Copyright (c) the satpre authors
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

#ifndef SATPRE_ERROR_H_
#define SATPRE_ERROR_H_

#include <stdexcept>
#include <string>

namespace satpre {

// Bad or truncated input data (files, streams, mismatched geometry).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration: bad flag values, malformed templates, empty
// calibration tables, out-of-grid parameters.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A spawned external encoder command exited with a nonzero status.
class EncoderError : public std::runtime_error {
 public:
  EncoderError(const std::string& msg, int gop_index)
      : std::runtime_error(msg), gop_index_(gop_index) {}
  int gop_index() const { return gop_index_; }

 private:
  int gop_index_;
};

}  // namespace satpre

#endif  // SATPRE_ERROR_H_
