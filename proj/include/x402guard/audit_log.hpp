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

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "x402guard/errors.hpp"
#include "x402guard/util/clock.hpp"
#include "x402guard/util/hash.hpp"

namespace x402guard {

// Closed vocabulary; verification treats anything else as tampering.
enum class AuditOutcome { ALLOWED, PII_REDACTED, POLICY_BLOCKED, REPLAY_BLOCKED, ERROR };

std::string_view audit_outcome_name(AuditOutcome o);
std::optional<AuditOutcome> parse_audit_outcome(std::string_view name);

struct AuditEvent {
  std::string ts;  // RFC 3339, millisecond precision, UTC
  std::string agent_id;
  std::string resource_url;  // post-redaction, never raw
  AuditOutcome outcome = AuditOutcome::ERROR;
  std::string detail;
  std::uint64_t seq = 0;
  std::string chain_mac;  // lowercase hex of 32 bytes
};

struct ChainState {
  Digest last_mac{};  // 32 zero bytes at genesis
  std::uint64_t next_seq = 0;
};

// MAC input for one event: the preceding MAC bytes followed by this
// canonical form (every field except chain_mac, fixed order, compact).
std::string canonical_event_json(const AuditEvent& event);

// The full JSON-L line: canonical fields plus chain_mac, compact.
std::string event_line_json(const AuditEvent& event);

class AuditSink {
 public:
  virtual ~AuditSink() = default;
  // Receives one complete JSON line, no trailing newline. Must throw on
  // write failure so the pipeline can block the payment.
  virtual void write_line(const std::string& line) = 0;
};

class MemoryAuditSink : public AuditSink {
 public:
  void write_line(const std::string& line) override;
  std::vector<std::string> lines() const;
  std::string joined() const;  // LF-terminated stream, as a file would hold

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> lines_;
};

class FileAuditSink : public AuditSink {
 public:
  // Appends to the file, creating it if needed. Each line is flushed.
  explicit FileAuditSink(const std::string& path);
  ~FileAuditSink() override;
  void write_line(const std::string& line) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Appends HMAC-chained events. Appends are totally ordered; the internal
// lock is the serialisation point the chain requires.
class AuditLog {
 public:
  AuditLog(Bytes key, std::shared_ptr<AuditSink> sink, std::string agent_id,
           ClockFn clock = system_clock_fn());

  // Builds the event (timestamp from the injected clock), chains, writes.
  // Sink exceptions propagate; the caller must treat that as a block.
  AuditEvent append(std::string resource_url, AuditOutcome outcome, std::string detail);

  std::uint64_t next_seq() const;

 private:
  Bytes key_;
  std::shared_ptr<AuditSink> sink_;
  std::string agent_id_;
  ClockFn clock_;
  mutable std::mutex mutex_;
  ChainState state_;
};

struct VerifyResult {
  std::optional<std::uint64_t> tampered_at;  // line position == expected seq
  bool ok() const { return !tampered_at.has_value(); }
};

// Recomputes the chain from genesis over an LF-separated JSON-L stream.
// Strict: a line must byte-match its canonical re-serialisation, carry the
// expected seq and a valid outcome, and its MAC must verify. First failing
// position is reported.
VerifyResult verify_chain(std::string_view log_text, std::span<const std::uint8_t> key);

}  // namespace x402guard
