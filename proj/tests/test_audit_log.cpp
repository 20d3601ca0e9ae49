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

#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "x402guard/audit_log.hpp"
#include "x402guard/util/hex.hpp"

using namespace x402guard;
using namespace std::chrono;

namespace {

Bytes audit_key() {
  auto view = as_bytes("audit-test-key");
  return Bytes(view.begin(), view.end());
}

std::span<const uint8_t> key_span(const Bytes& k) { return {k.data(), k.size()}; }

ClockFn fixed_clock() {
  return [] { return TimePoint(sys_days{January / 2 / 2026} + hours{3} + minutes{4} + seconds{5} +
                               milliseconds{6}); };
}

// Clock that advances 1ms per call so timestamps differ across events.
ClockFn ticking_clock() {
  auto counter = std::make_shared<int>(0);
  return [counter] {
    return TimePoint(sys_days{January / 2 / 2026}) + milliseconds{(*counter)++};
  };
}

struct Fixture {
  std::shared_ptr<MemoryAuditSink> sink = std::make_shared<MemoryAuditSink>();
  AuditLog log{audit_key(), sink, "agent-1", ticking_clock()};
};

std::string hundred_event_log(std::shared_ptr<MemoryAuditSink>& sink_out) {
  auto sink = std::make_shared<MemoryAuditSink>();
  AuditLog log(audit_key(), sink, "agent-1", ticking_clock());
  for (int i = 0; i < 100; ++i)
    log.append("https://api.x.io/r/" + std::to_string(i), AuditOutcome::ALLOWED,
               "call-" + std::to_string(i));
  sink_out = sink;
  return sink->joined();
}

struct ThrowOnceSink : AuditSink {
  bool armed = true;
  MemoryAuditSink inner;
  void write_line(const std::string& line) override {
    if (armed) {
      armed = false;
      throw std::runtime_error("disk full");
    }
    inner.write_line(line);
  }
};

}  // namespace

TEST_CASE("canonical serialization has fixed field order and no whitespace") {
  AuditEvent e;
  e.ts = "2026-01-02T03:04:05.006Z";
  e.agent_id = "agent-1";
  e.resource_url = "https://api.x.io/r";
  e.outcome = AuditOutcome::ALLOWED;
  e.detail = "ok";
  e.seq = 0;
  CHECK(canonical_event_json(e) ==
        R"({"ts":"2026-01-02T03:04:05.006Z","agent_id":"agent-1",)"
        R"("resource_url":"https://api.x.io/r","outcome":"ALLOWED","detail":"ok","seq":0})");
  e.chain_mac = "ab";
  CHECK(event_line_json(e) ==
        R"({"ts":"2026-01-02T03:04:05.006Z","agent_id":"agent-1",)"
        R"("resource_url":"https://api.x.io/r","outcome":"ALLOWED","detail":"ok","seq":0,)"
        R"("chain_mac":"ab"})");
}

TEST_CASE("genesis event chains over 32 zero bytes") {
  auto sink = std::make_shared<MemoryAuditSink>();
  AuditLog log(audit_key(), sink, "agent-1", fixed_clock());
  AuditEvent e = log.append("https://api.x.io/r", AuditOutcome::ALLOWED, "ok");

  CHECK(e.seq == 0);
  CHECK(e.ts == "2026-01-02T03:04:05.006Z");

  Bytes key = audit_key();
  Digest zeros{};
  std::string canonical = canonical_event_json(e);
  Bytes input(zeros.begin(), zeros.end());
  input.insert(input.end(), canonical.begin(), canonical.end());
  Digest expected = hmac_sha256(key_span(key), {input.data(), input.size()});
  CHECK(e.chain_mac == to_hex({expected.data(), expected.size()}));
  CHECK(e.chain_mac.size() == 64);
}

TEST_CASE("identical payloads at different positions get different macs") {
  auto sink = std::make_shared<MemoryAuditSink>();
  AuditLog log(audit_key(), sink, "agent-1", fixed_clock());
  AuditEvent a = log.append("https://api.x.io/r", AuditOutcome::ALLOWED, "same");
  AuditEvent b = log.append("https://api.x.io/r", AuditOutcome::ALLOWED, "same");
  CHECK(a.seq == 0);
  CHECK(b.seq == 1);
  CHECK(a.chain_mac != b.chain_mac);  // prev-mac and seq both differ
}

TEST_CASE("outcome names round-trip and the vocabulary is closed") {
  for (AuditOutcome o : {AuditOutcome::ALLOWED, AuditOutcome::PII_REDACTED,
                         AuditOutcome::POLICY_BLOCKED, AuditOutcome::REPLAY_BLOCKED,
                         AuditOutcome::ERROR})
    CHECK(parse_audit_outcome(audit_outcome_name(o)) == o);
  CHECK_FALSE(parse_audit_outcome("allowed").has_value());
  CHECK_FALSE(parse_audit_outcome("").has_value());
  CHECK_FALSE(parse_audit_outcome("DENIED").has_value());
}

TEST_CASE("an untampered log verifies clean") {
  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  Bytes key = audit_key();
  CHECK(verify_chain(text, key_span(key)).ok());

  // Also without the final newline.
  std::string no_final = text.substr(0, text.size() - 1);
  CHECK(verify_chain(no_final, key_span(key)).ok());

  CHECK(verify_chain("", key_span(key)).ok());
}

TEST_CASE("flipping one byte in an event is pinned to that position") {
  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  auto lines = sink->lines();
  Bytes key = audit_key();

  std::string target = lines[42];
  std::size_t at = target.find("call-42");
  REQUIRE(at != std::string::npos);
  target[at] = 'x';
  std::string tampered;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    tampered += (i == 42 ? target : lines[i]);
    tampered += '\n';
  }
  auto result = verify_chain(tampered, key_span(key));
  REQUIRE_FALSE(result.ok());
  CHECK(*result.tampered_at == 42);
}

TEST_CASE("deleting an event is detected at its position") {
  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  auto lines = sink->lines();
  Bytes key = audit_key();

  std::string spliced;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 10) continue;
    spliced += lines[i];
    spliced += '\n';
  }
  auto result = verify_chain(spliced, key_span(key));
  REQUIRE_FALSE(result.ok());
  CHECK(*result.tampered_at == 10);
}

TEST_CASE("swapping adjacent events is detected at the earlier position") {
  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  auto lines = sink->lines();
  Bytes key = audit_key();

  std::swap(lines[7], lines[8]);
  std::string swapped;
  for (const auto& l : lines) {
    swapped += l;
    swapped += '\n';
  }
  auto result = verify_chain(swapped, key_span(key));
  REQUIRE_FALSE(result.ok());
  CHECK(*result.tampered_at == 7);
}

TEST_CASE("inserting a crafted line is detected there") {
  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  auto lines = sink->lines();
  Bytes key = audit_key();

  // An attacker without the key can at best copy an existing line.
  std::string forged;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    forged += lines[i];
    forged += '\n';
    if (i == 19) {
      forged += lines[19];
      forged += '\n';
    }
  }
  auto result = verify_chain(forged, key_span(key));
  REQUIRE_FALSE(result.ok());
  CHECK(*result.tampered_at == 20);
}

TEST_CASE("non-canonical whitespace fails strict verification") {
  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  auto lines = sink->lines();
  Bytes key = audit_key();

  // Insert a space after the first colon: same parsed values, different bytes.
  std::string loose = lines[3];
  std::size_t colon = loose.find(':');
  loose.insert(colon + 1, " ");
  std::string doc;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    doc += (i == 3 ? loose : lines[i]);
    doc += '\n';
  }
  auto result = verify_chain(doc, key_span(key));
  REQUIRE_FALSE(result.ok());
  CHECK(*result.tampered_at == 3);
}

TEST_CASE("malformed lines and unknown outcomes are tampering") {
  Bytes key = audit_key();
  auto r1 = verify_chain("this is not json\n", key_span(key));
  REQUIRE_FALSE(r1.ok());
  CHECK(*r1.tampered_at == 0);

  auto r2 = verify_chain(R"({"ts":"t","agent_id":"a","resource_url":"u",)"
                         R"("outcome":"DENIED","detail":"","seq":0,"chain_mac":"00"})"
                         "\n",
                         key_span(key));
  REQUIRE_FALSE(r2.ok());
  CHECK(*r2.tampered_at == 0);

  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  auto lines = sink->lines();
  std::string with_blank;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 5) with_blank += "\n";  // stray empty line mid-stream
    with_blank += lines[i];
    with_blank += '\n';
  }
  auto r3 = verify_chain(with_blank, key_span(key));
  REQUIRE_FALSE(r3.ok());
  CHECK(*r3.tampered_at == 5);
}

TEST_CASE("verification with the wrong key fails at genesis") {
  std::shared_ptr<MemoryAuditSink> sink;
  std::string text = hundred_event_log(sink);
  auto wrong_view = as_bytes("not-the-key");
  Bytes wrong(wrong_view.begin(), wrong_view.end());
  auto result = verify_chain(text, key_span(wrong));
  REQUIRE_FALSE(result.ok());
  CHECK(*result.tampered_at == 0);
}

TEST_CASE("file sink round-trips through the filesystem") {
  std::string path = "audit_roundtrip_test.jsonl";
  std::remove(path.c_str());
  {
    auto sink = std::make_shared<FileAuditSink>(path);
    AuditLog log(audit_key(), sink, "agent-1", ticking_clock());
    for (int i = 0; i < 10; ++i)
      log.append("https://api.x.io/r", AuditOutcome::ALLOWED, std::to_string(i));
  }
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Bytes key = audit_key();
  CHECK(verify_chain(buffer.str(), key_span(key)).ok());
  std::remove(path.c_str());
}

TEST_CASE("a sink failure leaves the chain state unchanged") {
  auto sink = std::make_shared<ThrowOnceSink>();
  AuditLog log(audit_key(), sink, "agent-1", ticking_clock());
  CHECK_THROWS_AS(log.append("https://api.x.io/r", AuditOutcome::ALLOWED, "first"),
                  std::runtime_error);
  CHECK(log.next_seq() == 0);
  AuditEvent e = log.append("https://api.x.io/r", AuditOutcome::ALLOWED, "second");
  CHECK(e.seq == 0);  // the failed write consumed nothing
  Bytes key = audit_key();
  CHECK(verify_chain(sink->inner.joined(), key_span(key)).ok());
}

TEST_CASE("audit log construction is validated") {
  auto sink = std::make_shared<MemoryAuditSink>();
  CHECK_THROWS_AS(AuditLog(Bytes{}, sink, "agent-1"), ConfigError);
  CHECK_THROWS_AS(AuditLog(audit_key(), nullptr, "agent-1"), ConfigError);
  CHECK_THROWS_AS(AuditLog(audit_key(), sink, "agent-1", ClockFn{}), ConfigError);
}

TEST_CASE("detail strings with quotes and unicode survive the round trip") {
  auto sink = std::make_shared<MemoryAuditSink>();
  AuditLog log(audit_key(), sink, "agent-\"1\"", ticking_clock());
  log.append("https://api.x.io/r?q=\"x\"", AuditOutcome::ERROR, "line\nbreak\tand \"quotes\"");
  Bytes key = audit_key();
  CHECK(verify_chain(sink->joined(), key_span(key)).ok());
}
