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

#include "x402guard/replay_guard.hpp"

#include <httplib.h>

#include "x402guard/util/hex.hpp"

namespace x402guard {

namespace {

void append_u32_be(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_field(Bytes& out, const std::string& s) {
  if (s.size() > 0xFFFFFFFFull) throw std::length_error("token field too long");
  append_u32_be(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

}  // namespace

Bytes canonical_token_bytes(std::span<const std::pair<std::string, std::string>> fields) {
  Bytes out;
  for (const auto& [name, value] : fields) {
    append_field(out, name);
    append_field(out, value);
  }
  return out;
}

Fingerprint token_fingerprint(std::span<const std::pair<std::string, std::string>> fields,
                              std::span<const std::uint8_t> key) {
  if (key.empty()) throw ConfigError("replay fingerprint key must not be empty");
  Bytes canonical = canonical_token_bytes(fields);
  return hmac_sha256(key, std::span<const std::uint8_t>(canonical.data(), canonical.size()));
}

InMemoryDedupStore::InMemoryDedupStore(std::chrono::seconds ttl) : ttl_(ttl) {
  if (ttl_ <= std::chrono::seconds{0}) throw ConfigError("dedup TTL must be positive");
}

void InMemoryDedupStore::evict_expired(TimePoint now) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (now >= it->second + ttl_)
      it = entries_.erase(it);
    else
      ++it;
  }
}

ReplayCheck InMemoryDedupStore::check_and_record(const Fingerprint& fp, TimePoint now) {
  std::string key = to_hex(std::span<const std::uint8_t>(fp.data(), fp.size()));
  std::lock_guard<std::mutex> lock(mutex_);
  if (++checks_since_sweep_ >= 1024) {
    checks_since_sweep_ = 0;
    evict_expired(now);
  }
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    if (now < it->second + ttl_) return ReplayCheck::DUPLICATE;
    entries_.erase(it);  // expired entries count as absent
  }
  entries_.emplace(std::move(key), now);
  return ReplayCheck::FRESH;
}

std::size_t InMemoryDedupStore::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

FallbackDedupStore::FallbackDedupStore(std::shared_ptr<DedupStore> primary,
                                       std::shared_ptr<InMemoryDedupStore> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {
  if (!primary_ || !fallback_) throw ConfigError("fallback store needs both stores");
}

ReplayCheck FallbackDedupStore::check_and_record(const Fingerprint& fp, TimePoint now) {
  try {
    return primary_->check_and_record(fp, now);
  } catch (const std::exception&) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      ++fallback_uses_;
    }
    return fallback_->check_and_record(fp, now);
  }
}

std::size_t FallbackDedupStore::fallback_uses() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return fallback_uses_;
}

struct HttpKvDedupStore::Impl {
  httplib::Client client;
  std::chrono::seconds ttl;

  Impl(const std::string& host, int port, std::chrono::seconds ttl_in,
       std::chrono::milliseconds timeout)
      : client(host, port), ttl(ttl_in) {
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
  }
};

HttpKvDedupStore::HttpKvDedupStore(std::string host, int port, std::chrono::seconds ttl,
                                   std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(host, port, ttl, timeout)) {
  if (ttl <= std::chrono::seconds{0}) throw ConfigError("dedup TTL must be positive");
}

HttpKvDedupStore::~HttpKvDedupStore() = default;

ReplayCheck HttpKvDedupStore::check_and_record(const Fingerprint& fp, TimePoint /*now*/) {
  std::string path = "/keys/" + to_hex(std::span<const std::uint8_t>(fp.data(), fp.size())) +
                     "?ttl_seconds=" + std::to_string(impl_->ttl.count());
  auto res = impl_->client.Put(path, "", "text/plain");
  if (!res) throw std::runtime_error("dedup store unreachable");
  if (res->status == 201) return ReplayCheck::FRESH;
  if (res->status == 409) return ReplayCheck::DUPLICATE;
  throw std::runtime_error("dedup store error status " + std::to_string(res->status));
}

ReplayGuard::ReplayGuard(Bytes key, std::shared_ptr<DedupStore> store)
    : key_(std::move(key)), store_(std::move(store)) {
  if (key_.empty()) throw ConfigError("replay guard key must not be empty");
  if (!store_) throw ConfigError("replay guard needs a dedup store");
}

Fingerprint ReplayGuard::fingerprint(
    std::span<const std::pair<std::string, std::string>> fields) const {
  return token_fingerprint(fields, std::span<const std::uint8_t>(key_.data(), key_.size()));
}

ReplayCheck ReplayGuard::check_and_record(
    std::span<const std::pair<std::string, std::string>> fields, TimePoint now) {
  return store_->check_and_record(fingerprint(fields), now);
}

}  // namespace x402guard
