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

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace x402guard {

// Closed vocabulary. Names double as wire strings (corpus labels, reports)
// and as redaction placeholders (<EMAIL_ADDRESS>).
enum class EntityType : std::uint8_t {
  EMAIL_ADDRESS = 0,
  PERSON,
  PHONE_NUMBER,
  US_SSN,
  CREDIT_CARD,
  IBAN_CODE,
};

inline constexpr std::size_t kEntityTypeCount = 6;

std::string_view entity_type_name(EntityType t);
std::optional<EntityType> parse_entity_type(std::string_view name);
const std::array<EntityType, kEntityTypeCount>& all_entity_types();

// "<PERSON>" etc.
std::string placeholder_for(EntityType t);

class EntitySet {
 public:
  constexpr EntitySet() = default;
  constexpr EntitySet(std::initializer_list<EntityType> types) {
    for (EntityType t : types) add(t);
  }

  static constexpr EntitySet all() {
    EntitySet s;
    s.bits_ = (1u << kEntityTypeCount) - 1;
    return s;
  }
  static constexpr EntitySet single(EntityType t) { return EntitySet{t}; }

  constexpr EntitySet& add(EntityType t) {
    bits_ |= static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(t));
    return *this;
  }
  constexpr bool contains(EntityType t) const {
    return bits_ & (1u << static_cast<std::uint8_t>(t));
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(__builtin_popcount(bits_)); }

  std::vector<EntityType> to_vector() const;

  constexpr bool operator==(const EntitySet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

struct Detection {
  EntityType entity_type;
  std::size_t start = 0;  // character offsets into the analysed text, [start, end)
  std::size_t end = 0;
  double score = 0.0;
  std::string recognizer;
};

}  // namespace x402guard
