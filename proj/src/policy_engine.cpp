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

#include "x402guard/policy_engine.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include <json.hpp>

namespace x402guard {

namespace {

constexpr std::chrono::hours kWindow{24};

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

Usd parse_limit(const nlohmann::json& value, const char* key) {
  std::optional<Usd> parsed;
  if (value.is_string()) {
    parsed = Usd::parse(value.get<std::string>());
  } else if (value.is_number()) {
    parsed = Usd::from_double(value.get<double>());
  }
  if (!parsed)
    throw std::invalid_argument(std::string("policy config: ") + key +
                                " must be a decimal USD amount");
  if (parsed->cents() < 0)
    throw std::invalid_argument(std::string("policy config: ") + key + " must be >= 0");
  return *parsed;
}

}  // namespace

PolicyConfig policy_config_from_json(std::string_view json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw std::invalid_argument("policy config: not a JSON object");
  static constexpr const char* kKeys[] = {"max_per_call_usd", "daily_limit_usd",
                                          "max_per_endpoint_usd"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (std::find_if(std::begin(kKeys), std::end(kKeys),
                     [&](const char* k) { return key == k; }) == std::end(kKeys))
      throw std::invalid_argument("policy config: unknown key " + key);
  }
  for (const char* key : kKeys)
    if (!doc.contains(key))
      throw std::invalid_argument(std::string("policy config: missing key ") + key);
  return PolicyConfig{
      parse_limit(doc["max_per_call_usd"], "max_per_call_usd"),
      parse_limit(doc["daily_limit_usd"], "daily_limit_usd"),
      parse_limit(doc["max_per_endpoint_usd"], "max_per_endpoint_usd"),
  };
}

std::string_view policy_dimension_name(PolicyDimension d) {
  switch (d) {
    case PolicyDimension::PER_CALL:
      return "PER_CALL";
    case PolicyDimension::DAILY:
      return "DAILY";
    case PolicyDimension::PER_ENDPOINT:
      return "PER_ENDPOINT";
  }
  throw std::logic_error("unreachable policy dimension");
}

void SpendLedger::add(SpendRecord record) {
  if (record.amount_usd.cents() <= 0)
    throw std::invalid_argument("spend record amount must be positive");
  records_.push_back(std::move(record));
}

Usd SpendLedger::total_in_window(TimePoint now) const {
  TimePoint cutoff = now - kWindow;
  Usd total = Usd::from_cents(0);
  for (const SpendRecord& r : records_)
    if (r.timestamp > cutoff && r.timestamp <= now) total += r.amount_usd;
  return total;
}

Usd SpendLedger::total_for_host(std::string_view host, TimePoint now) const {
  TimePoint cutoff = now - kWindow;
  Usd total = Usd::from_cents(0);
  for (const SpendRecord& r : records_)
    if (r.host == host && r.timestamp > cutoff && r.timestamp <= now) total += r.amount_usd;
  return total;
}

void SpendLedger::prune() {
  if (records_.empty()) return;
  TimePoint newest = records_.front().timestamp;
  for (const SpendRecord& r : records_) newest = std::max(newest, r.timestamp);
  TimePoint cutoff = newest - kWindow;
  std::erase_if(records_, [&](const SpendRecord& r) { return r.timestamp <= cutoff; });
}

PolicyDecision check(Usd amount, std::string_view host, TimePoint now, const PolicyConfig& config,
                     const SpendLedger& ledger) {
  if (amount.cents() <= 0) throw std::invalid_argument("policy check: amount must be positive");
  if (amount > config.max_per_call_usd)
    return {false, PolicyDimension::PER_CALL, amount};
  Usd daily = ledger.total_in_window(now) + amount;
  if (daily > config.daily_limit_usd) return {false, PolicyDimension::DAILY, daily};
  Usd endpoint = ledger.total_for_host(host, now) + amount;
  if (endpoint > config.max_per_endpoint_usd)
    return {false, PolicyDimension::PER_ENDPOINT, endpoint};
  return {true, std::nullopt, daily};
}

PolicyEngine::PolicyEngine(PolicyConfig config) : config_(config) {
  if (config_.max_per_call_usd.cents() < 0 || config_.daily_limit_usd.cents() < 0 ||
      config_.max_per_endpoint_usd.cents() < 0)
    throw std::invalid_argument("policy limits must be >= 0");
}

PolicyDecision PolicyEngine::check_and_record(Usd amount, std::string_view host, TimePoint now) {
  std::string normalised = lowercase_ascii(host);
  std::lock_guard<std::mutex> lock(mutex_);
  PolicyDecision decision = check(amount, normalised, now, config_, ledger_);
  if (decision.allowed) {
    ledger_.add({now, std::move(normalised), amount});
    ledger_.prune();
  }
  return decision;
}

Usd PolicyEngine::daily_total(TimePoint now) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return ledger_.total_in_window(now);
}

Usd PolicyEngine::endpoint_total(std::string_view host, TimePoint now) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return ledger_.total_for_host(lowercase_ascii(host), now);
}

std::size_t PolicyEngine::ledger_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return ledger_.size();
}

}  // namespace x402guard
