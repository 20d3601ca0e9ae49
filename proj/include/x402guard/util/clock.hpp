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

#include <chrono>
#include <functional>
#include <string>

namespace x402guard {

// Wall-clock instants flow through the controls as explicit parameters so
// tests can drive time deterministically.
using TimePoint = std::chrono::system_clock::time_point;
using ClockFn = std::function<TimePoint()>;

inline ClockFn system_clock_fn() {
  return [] { return std::chrono::system_clock::now(); };
}

// UTC, millisecond precision: 2026-01-02T03:04:05.006Z
std::string rfc3339_ms(TimePoint tp);

}  // namespace x402guard
