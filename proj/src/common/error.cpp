// Copyright 2026 The lodbridge Authors
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

#include "lodbridge/common/error.hpp"

namespace lodbridge {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::not_found: return "not-found";
    case Errc::conflict: return "conflict";
    case Errc::type_mismatch: return "type-mismatch";
    case Errc::immutable_field: return "immutable-field";
    case Errc::syntax: return "syntax";
    case Errc::unsupported: return "unsupported-construct";
    case Errc::io: return "io";
    case Errc::unavailable: return "unavailable";
    case Errc::unknown_device: return "unknown-device";
    case Errc::unknown_station: return "unknown-station";
    case Errc::malformed: return "malformed";
    case Errc::validation: return "validation";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : Error(Errc::syntax,
            message + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line),
      column_(column) {}

}  // namespace lodbridge
