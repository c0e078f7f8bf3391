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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"
#include "lodbridge/entity/entity.hpp"

namespace lodbridge::dataflow {

struct DeviceEntry {
  std::string device_id;
  std::string entity_type;
  std::string entity_id;
  std::map<std::string, std::string> attributes;  // measure key -> attribute name
  std::optional<std::string> timestamp_key;
};

class DeviceRegistry {
 public:
  DeviceRegistry() = default;
  explicit DeviceRegistry(std::vector<DeviceEntry> entries);

  const DeviceEntry* find(const std::string& device_id) const;
  const std::vector<DeviceEntry>& entries() const { return entries_; }

  /// `{"devices": [{deviceId, entityType, entityId, attributes, timestampKey?}]}`
  static DeviceRegistry from_json(const Json& doc);
  static DeviceRegistry load(const std::string& path);

 private:
  std::vector<DeviceEntry> entries_;
};

/// Mapped measure keys become Properties observed at the measure timestamp
/// (or clock time), plus a `dateObserved` Property. Unmapped keys are
/// ignored. Throws Error(malformed) when the measure is not an object or
/// carries no mapped key.
entity::Entity ingest_device_measure(const Json& measure, const DeviceEntry& entry, const Clock& clock);

/// Looks the device up by `device_id`, else by the measure's `dev` member.
/// Throws Error(unknown_device) for unregistered ids.
entity::Entity ingest_device_measure(const Json& measure, const DeviceRegistry& registry, const Clock& clock,
                                     std::optional<std::string> device_id = std::nullopt);

}  // namespace lodbridge::dataflow
