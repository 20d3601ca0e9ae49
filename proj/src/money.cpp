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

#include "x402guard/money.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace x402guard {

std::optional<Usd> Usd::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t dot = text.find('.');
  std::string_view whole = dot == std::string_view::npos ? text : text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? "" : text.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && (frac.empty() || frac.size() > 2)))
    return std::nullopt;

  std::int64_t cents = 0;
  for (char c : whole) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    if (cents > (INT64_MAX - 9) / 10) return std::nullopt;
    cents = cents * 10 + (c - '0');
  }
  cents *= 100;
  std::int64_t scale = 10;
  for (char c : frac) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    cents += (c - '0') * scale;
    scale /= 10;
  }
  return Usd::from_cents(cents);
}

std::optional<Usd> Usd::from_double(double value) {
  if (!std::isfinite(value) || value < 0 || value > 9.0e15) return std::nullopt;
  double scaled = value * 100.0;
  double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-6) return std::nullopt;
  return Usd::from_cents(static_cast<std::int64_t>(rounded));
}

std::string Usd::str() const {
  char buf[32];
  std::int64_t c = cents_;
  const char* sign = "";
  if (c < 0) {
    sign = "-";
    c = -c;
  }
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", sign, static_cast<long long>(c / 100),
                static_cast<long long>(c % 100));
  return buf;
}

}  // namespace x402guard
