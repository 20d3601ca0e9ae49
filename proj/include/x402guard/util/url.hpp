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

#include <string>
#include <string_view>

namespace x402guard {

// Normalised endpoint identity for per-endpoint spend accounting: lowercase
// host with port and trailing dot stripped. Throws std::invalid_argument when
// no host can be extracted (fail-safe: the caller must not guess).
std::string endpoint_host(std::string_view url);

}  // namespace x402guard
