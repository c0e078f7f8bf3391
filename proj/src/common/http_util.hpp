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

#pragma once

#include <httplib.h>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/json.hpp"

namespace lodbridge::http {

inline void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump_compact(body), "application/json");
}

inline int status_for(Errc code) {
  switch (code) {
    case Errc::not_found:
    case Errc::unknown_station:
    case Errc::unknown_device: return 404;
    case Errc::conflict: return 409;
    case Errc::unavailable: return 503;
    case Errc::io: return 500;
    default: return 400;
  }
}

}  // namespace lodbridge::http
