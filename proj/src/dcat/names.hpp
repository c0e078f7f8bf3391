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
#include <string>

#include "lodbridge/dcat/graph.hpp"

namespace lodbridge::dcat {

/// Fixed table plus the graph's own bindings (the fixed ones win).
std::map<std::string, std::string> prologue_namespaces(const Graph& g);

void append_utf8(std::string& out, unsigned long code_point);

}  // namespace lodbridge::dcat
