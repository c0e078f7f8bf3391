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

#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>

#include <spdlog/spdlog.h>

#include "../support/criteria.hpp"

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::off);
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failed = 0;
  for (const auto& c : lodbridge::testing::acceptance_criteria()) {
    if (only && c.number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    auto result = c.run();
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    if (result.passed && elapsed > c.budget) {
      result.passed = false;
      result.detail += " (over the " + std::to_string(c.budget.count()) + " ms budget)";
    }
    if (!result.passed) ++failed;
    std::cout << (result.passed ? "PASS" : "FAIL") << " " << c.number << " " << c.title << " [" << elapsed.count()
              << " ms]: " << result.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
