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

#include <filesystem>
#include <memory>
#include <string>

#include "lodbridge/common/error.hpp"
#include "lodbridge/dataflow/pipeline.hpp"

namespace lodbridge::dataflow::detail {

std::unique_ptr<Processor> make_http_poll(const Json& params);
std::unique_ptr<Processor> make_http_listen(const Json& params);
std::unique_ptr<Processor> make_device_gateway(const Json& params, const std::filesystem::path& base_dir);
std::unique_ptr<Processor> make_update_catalog_metadata(const Json& params);
std::unique_ptr<Processor> make_ngsi_to_catalog(const Json& params);

inline std::string require_string(const Json& params, const char* key) {
  if (!params.contains(key) || !params.at(key).is_string() || params.at(key).get<std::string>().empty()) {
    throw Error(Errc::validation, std::string("missing string param '") + key + "'");
  }
  return params.at(key).get<std::string>();
}

inline std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

}  // namespace lodbridge::dataflow::detail
