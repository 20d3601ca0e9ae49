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

#include "x402guard/audit_log.hpp"

#include <cstdio>
#include <utility>

#include <json.hpp>

#include "x402guard/util/hex.hpp"

namespace x402guard {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json canonical_fields(const AuditEvent& e) {
  ordered_json j;
  j["ts"] = e.ts;
  j["agent_id"] = e.agent_id;
  j["resource_url"] = e.resource_url;
  j["outcome"] = std::string(audit_outcome_name(e.outcome));
  j["detail"] = e.detail;
  j["seq"] = e.seq;
  return j;
}

Digest chain_mac_bytes(std::span<const std::uint8_t> key, const Digest& last_mac,
                       const std::string& canonical) {
  Bytes input;
  input.reserve(last_mac.size() + canonical.size());
  input.insert(input.end(), last_mac.begin(), last_mac.end());
  input.insert(input.end(), canonical.begin(), canonical.end());
  return hmac_sha256(key, std::span<const std::uint8_t>(input.data(), input.size()));
}

}  // namespace

std::string_view audit_outcome_name(AuditOutcome o) {
  switch (o) {
    case AuditOutcome::ALLOWED:
      return "ALLOWED";
    case AuditOutcome::PII_REDACTED:
      return "PII_REDACTED";
    case AuditOutcome::POLICY_BLOCKED:
      return "POLICY_BLOCKED";
    case AuditOutcome::REPLAY_BLOCKED:
      return "REPLAY_BLOCKED";
    case AuditOutcome::ERROR:
      return "ERROR";
  }
  throw std::logic_error("unreachable audit outcome");
}

std::optional<AuditOutcome> parse_audit_outcome(std::string_view name) {
  for (AuditOutcome o : {AuditOutcome::ALLOWED, AuditOutcome::PII_REDACTED,
                         AuditOutcome::POLICY_BLOCKED, AuditOutcome::REPLAY_BLOCKED,
                         AuditOutcome::ERROR})
    if (audit_outcome_name(o) == name) return o;
  return std::nullopt;
}

std::string canonical_event_json(const AuditEvent& event) {
  return canonical_fields(event).dump();
}

std::string event_line_json(const AuditEvent& event) {
  ordered_json j = canonical_fields(event);
  j["chain_mac"] = event.chain_mac;
  return j.dump();
}

void MemoryAuditSink::write_line(const std::string& line) {
  std::lock_guard<std::mutex> lock(mutex_);
  lines_.push_back(line);
}

std::vector<std::string> MemoryAuditSink::lines() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return lines_;
}

std::string MemoryAuditSink::joined() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string out;
  for (const std::string& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

struct FileAuditSink::Impl {
  std::FILE* file = nullptr;
};

FileAuditSink::FileAuditSink(const std::string& path) : impl_(std::make_unique<Impl>()) {
  impl_->file = std::fopen(path.c_str(), "ab");
  if (!impl_->file) throw std::runtime_error("audit sink: cannot open " + path);
}

FileAuditSink::~FileAuditSink() {
  if (impl_->file) std::fclose(impl_->file);
}

void FileAuditSink::write_line(const std::string& line) {
  if (std::fwrite(line.data(), 1, line.size(), impl_->file) != line.size() ||
      std::fputc('\n', impl_->file) == EOF || std::fflush(impl_->file) != 0)
    throw std::runtime_error("audit sink: write failed");
}

AuditLog::AuditLog(Bytes key, std::shared_ptr<AuditSink> sink, std::string agent_id, ClockFn clock)
    : key_(std::move(key)),
      sink_(std::move(sink)),
      agent_id_(std::move(agent_id)),
      clock_(std::move(clock)) {
  if (key_.empty()) throw ConfigError("audit key must not be empty");
  if (!sink_) throw ConfigError("audit log needs a sink");
  if (!clock_) throw ConfigError("audit log needs a clock");
}

AuditEvent AuditLog::append(std::string resource_url, AuditOutcome outcome, std::string detail) {
  std::lock_guard<std::mutex> lock(mutex_);
  AuditEvent event;
  event.ts = rfc3339_ms(clock_());
  event.agent_id = agent_id_;
  event.resource_url = std::move(resource_url);
  event.outcome = outcome;
  event.detail = std::move(detail);
  event.seq = state_.next_seq;

  std::string canonical = canonical_event_json(event);
  Digest mac = chain_mac_bytes(std::span<const std::uint8_t>(key_.data(), key_.size()),
                               state_.last_mac, canonical);
  event.chain_mac = to_hex(std::span<const std::uint8_t>(mac.data(), mac.size()));

  sink_->write_line(event_line_json(event));  // throws -> chain state unchanged

  state_.last_mac = mac;
  ++state_.next_seq;
  return event;
}

std::uint64_t AuditLog::next_seq() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return state_.next_seq;
}

VerifyResult verify_chain(std::string_view log_text, std::span<const std::uint8_t> key) {
  Digest last_mac{};
  std::uint64_t expected_seq = 0;
  std::size_t pos = 0;
  while (pos < log_text.size()) {
    std::size_t nl = log_text.find('\n', pos);
    std::string_view line =
        nl == std::string_view::npos ? log_text.substr(pos) : log_text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? log_text.size() : nl + 1;
    if (line.empty() && pos >= log_text.size()) break;  // trailing newline

    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return {expected_seq};

    AuditEvent event;
    if (!j.contains("ts") || !j["ts"].is_string() || !j.contains("agent_id") ||
        !j["agent_id"].is_string() || !j.contains("resource_url") ||
        !j["resource_url"].is_string() || !j.contains("outcome") || !j["outcome"].is_string() ||
        !j.contains("detail") || !j["detail"].is_string() || !j.contains("seq") ||
        !j["seq"].is_number_unsigned() || !j.contains("chain_mac") || !j["chain_mac"].is_string())
      return {expected_seq};
    auto outcome = parse_audit_outcome(j["outcome"].get<std::string>());
    if (!outcome) return {expected_seq};

    event.ts = j["ts"].get<std::string>();
    event.agent_id = j["agent_id"].get<std::string>();
    event.resource_url = j["resource_url"].get<std::string>();
    event.outcome = *outcome;
    event.detail = j["detail"].get<std::string>();
    event.seq = j["seq"].get<std::uint64_t>();
    event.chain_mac = j["chain_mac"].get<std::string>();

    if (event.seq != expected_seq) return {expected_seq};
    // Strict canonical form: the stored line must byte-match what the
    // writer would emit for these fields.
    if (event_line_json(event) != line) return {expected_seq};

    Digest mac = chain_mac_bytes(key, last_mac, canonical_event_json(event));
    if (to_hex(std::span<const std::uint8_t>(mac.data(), mac.size())) != event.chain_mac)
      return {expected_seq};

    last_mac = mac;
    ++expected_seq;
  }
  return {std::nullopt};
}

}  // namespace x402guard
