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

#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "x402guard/money.hpp"
#include "x402guard/util/clock.hpp"

namespace x402guard {

// Spending ceilings. A limit of 0 blocks all spending on that dimension.
struct PolicyConfig {
  Usd max_per_call_usd;
  Usd daily_limit_usd;
  Usd max_per_endpoint_usd;
};

// Parses a JSON object with exactly the keys max_per_call_usd,
// daily_limit_usd, max_per_endpoint_usd. Values may be decimal strings or
// JSON numbers. Missing, unknown or negative entries throw
// std::invalid_argument.
PolicyConfig policy_config_from_json(std::string_view json_text);

enum class PolicyDimension { PER_CALL, DAILY, PER_ENDPOINT };

std::string_view policy_dimension_name(PolicyDimension d);

struct SpendRecord {
  TimePoint timestamp;
  std::string host;  // lowercase, port and trailing dot stripped
  Usd amount_usd;    // > 0
};

struct PolicyDecision {
  bool allowed = false;
  std::optional<PolicyDimension> violated_dimension;
  // The aggregate the decision turned on, including the attempted amount:
  // PER_CALL the amount itself, DAILY the 24h total, PER_ENDPOINT the 24h
  // host total. For an allowed payment this is the new 24h total.
  Usd current_aggregate_usd;
};

// Plain record container, not synchronised. PolicyEngine serialises access;
// use the engine unless you are writing window-arithmetic tests.
class SpendLedger {
 public:
  // amount_usd must be positive; throws std::invalid_argument otherwise.
  void add(SpendRecord record);

  // Sum over the half-open trailing window (now - 24h, now]: a record
  // exactly 24h old is excluded, now itself is included.
  Usd total_in_window(TimePoint now) const;
  Usd total_for_host(std::string_view host, TimePoint now) const;

  // Drops records that can no longer enter any window anchored at or after
  // the newest record's timestamp.
  void prune();

  std::size_t size() const { return records_.size(); }

 private:
  std::vector<SpendRecord> records_;
};

// Stateless limit check against a ledger snapshot. Denial reports the first
// violated dimension in the order PER_CALL, DAILY, PER_ENDPOINT and records
// nothing. Throws std::invalid_argument on amount <= 0.
PolicyDecision check(Usd amount, std::string_view host, TimePoint now, const PolicyConfig& config,
                     const SpendLedger& ledger);

// Owns the ledger and runs check + record as one atomic step, so concurrent
// payments can never jointly exceed a limit by interleaving.
class PolicyEngine {
 public:
  explicit PolicyEngine(PolicyConfig config);

  const PolicyConfig& config() const { return config_; }

  // Host is lowercased defensively; callers should already pass the
  // normalised authority (see endpoint_host).
  PolicyDecision check_and_record(Usd amount, std::string_view host, TimePoint now);

  Usd daily_total(TimePoint now) const;
  Usd endpoint_total(std::string_view host, TimePoint now) const;
  std::size_t ledger_size() const;

 private:
  PolicyConfig config_;
  mutable std::mutex mutex_;
  SpendLedger ledger_;
};

}  // namespace x402guard
