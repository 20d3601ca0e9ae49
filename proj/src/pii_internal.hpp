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

#include <string_view>

namespace x402guard::detail {

// SSA issuance rules for a 9-digit candidate: area not 000/666 and below
// 900, group not 00, serial not 0000. Input must be exactly 9 digits.
bool ssn_plausible(std::string_view nine_digits);

}  // namespace x402guard::detail
