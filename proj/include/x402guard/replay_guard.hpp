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
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "x402guard/errors.hpp"
#include "x402guard/util/clock.hpp"
#include "x402guard/util/hash.hpp"

namespace x402guard {

using Fingerprint = std::array<std::uint8_t, 32>;

// Order-sensitive, unambiguous canonical form: for each (name, value) pair in
// the given order, u32-be(len(name)) || name || u32-be(len(value)) || value.
// Length prefixes keep {a:"b", c:""} and {a:"", c:"b"} distinct.
Bytes canonical_token_bytes(std::span<const std::pair<std::string, std::string>> fields);

// HMAC-SHA256 over the canonical form. Empty key is a deployment error.
Fingerprint token_fingerprint(std::span<const std::pair<std::string, std::string>> fields,
                              std::span<const std::uint8_t> key);

enum class ReplayCheck { FRESH, DUPLICATE };

// Set-if-absent with expiry. check_and_record must be atomic: concurrent
// submitters of one fingerprint see exactly one FRESH.
class DedupStore {
 public:
  virtual ~DedupStore() = default;
  virtual ReplayCheck check_and_record(const Fingerprint& fp, TimePoint now) = 0;
};

class InMemoryDedupStore : public DedupStore {
 public:
  explicit InMemoryDedupStore(std::chrono::seconds ttl = std::chrono::hours{24});

  ReplayCheck check_and_record(const Fingerprint& fp, TimePoint now) override;

  std::size_t size() const;

 private:
  void evict_expired(TimePoint now);

  std::chrono::seconds ttl_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, TimePoint> entries_;  // hex fp -> inserted_at
  std::size_t checks_since_sweep_ = 0;
};

// Tries the primary store; on any store failure falls back to the local
// in-memory store. Degraded mode still dedups -- never a bypass.
class FallbackDedupStore : public DedupStore {
 public:
  FallbackDedupStore(std::shared_ptr<DedupStore> primary,
                     std::shared_ptr<InMemoryDedupStore> fallback);

  ReplayCheck check_and_record(const Fingerprint& fp, TimePoint now) override;

  std::size_t fallback_uses() const;

 private:
  std::shared_ptr<DedupStore> primary_;
  std::shared_ptr<InMemoryDedupStore> fallback_;
  mutable std::mutex mutex_;
  std::size_t fallback_uses_ = 0;
};

// Client for an external set-if-absent service (see testbed::KvStoreServer
// for the in-repo server). Expiry is enforced server-side; `now` is unused.
// Connection errors and timeouts surface as exceptions so FallbackDedupStore
// can catch them.
class HttpKvDedupStore : public DedupStore {
 public:
  HttpKvDedupStore(std::string host, int port, std::chrono::seconds ttl = std::chrono::hours{24},
                   std::chrono::milliseconds timeout = std::chrono::milliseconds{500});
  ~HttpKvDedupStore() override;

  ReplayCheck check_and_record(const Fingerprint& fp, TimePoint now) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Fingerprint + store in one control. Field order is fixed by the caller
// (the client uses resource_url, description, reason, amount, payer_id,
// network, post-redaction).
class ReplayGuard {
 public:
  ReplayGuard(Bytes key, std::shared_ptr<DedupStore> store);

  Fingerprint fingerprint(std::span<const std::pair<std::string, std::string>> fields) const;
  ReplayCheck check_and_record(std::span<const std::pair<std::string, std::string>> fields,
                               TimePoint now);

 private:
  Bytes key_;
  std::shared_ptr<DedupStore> store_;
};

}  // namespace x402guard
