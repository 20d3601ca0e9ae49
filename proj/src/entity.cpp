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

#include "x402guard/entity.hpp"

namespace x402guard {

namespace {
constexpr std::array<std::string_view, kEntityTypeCount> kNames = {
    "EMAIL_ADDRESS", "PERSON", "PHONE_NUMBER", "US_SSN", "CREDIT_CARD", "IBAN_CODE",
};
}

std::string_view entity_type_name(EntityType t) { return kNames[static_cast<std::uint8_t>(t)]; }

std::optional<EntityType> parse_entity_type(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<EntityType>(i);
  return std::nullopt;
}

const std::array<EntityType, kEntityTypeCount>& all_entity_types() {
  static const std::array<EntityType, kEntityTypeCount> kAll = {
      EntityType::EMAIL_ADDRESS, EntityType::PERSON,      EntityType::PHONE_NUMBER,
      EntityType::US_SSN,        EntityType::CREDIT_CARD, EntityType::IBAN_CODE,
  };
  return kAll;
}

std::string placeholder_for(EntityType t) {
  std::string out;
  std::string_view name = entity_type_name(t);
  out.reserve(name.size() + 2);
  out.push_back('<');
  out.append(name);
  out.push_back('>');
  return out;
}

std::vector<EntityType> EntitySet::to_vector() const {
  std::vector<EntityType> out;
  for (EntityType t : all_entity_types())
    if (contains(t)) out.push_back(t);
  return out;
}

}  // namespace x402guard
