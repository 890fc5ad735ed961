// Copyright 2026 The attrib-sanity Authors.
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

#ifndef ATTRIB_ERROR_H_
#define ATTRIB_ERROR_H_

#include <stdexcept>
#include <string>

namespace attrib {

// Every failure raised by the library carries one of these kinds. The CLI
// maps them onto process exit codes.
enum class ErrorKind {
  kFormat,      // bad magic, malformed header, unparsable file
  kLength,      // truncated payload
  kShape,       // unsupported or mismatched tensor shape
  kData,        // payload value out of range
  kPairing,     // images and labels disagree in count
  kDomain,      // input outside the operation's domain (e.g. empty set)
  kContract,    // caller violated a precondition
  kNumeric,     // non-finite value produced during computation
  kTraining,    // optimisation diverged
  kVersion,     // checkpoint version not understood
  kDigest,      // integrity check failed
  kIo,          // file system failure
  kGate,        // acceptance gate refused to proceed
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + " error: " +
                           message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const { return kind_; }
  // The message without the kind prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorKind::kContract, message);
}

}  // namespace attrib

#endif  // ATTRIB_ERROR_H_
