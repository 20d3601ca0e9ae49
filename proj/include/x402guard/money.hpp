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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace x402guard {

// USD amount as integer cents. Spend-limit comparisons must be exact: a
// hundred 10-cent payments have to sum to exactly 10.00, never 9.99...8.
class Usd {
 public:
  constexpr Usd() = default;

  static constexpr Usd from_cents(std::int64_t cents) { return Usd(cents); }

  // "3", "0.5", "1.50". Rejects signs, more than two decimals, empties.
  static std::optional<Usd> parse(std::string_view text);

  // Accepts doubles that are within rounding noise of a whole cent; anything
  // sub-cent is rejected rather than silently rounded.
  static std::optional<Usd> from_double(double value);

  constexpr std::int64_t cents() const { return cents_; }

  // Canonical form with two decimals: "1.00", "0.05".
  std::string str() const;

  constexpr Usd operator+(Usd o) const { return Usd(cents_ + o.cents_); }
  constexpr Usd operator-(Usd o) const { return Usd(cents_ - o.cents_); }
  constexpr Usd& operator+=(Usd o) {
    cents_ += o.cents_;
    return *this;
  }
  constexpr auto operator<=>(const Usd&) const = default;

 private:
  explicit constexpr Usd(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

}  // namespace x402guard
