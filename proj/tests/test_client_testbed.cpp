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

#include <atomic>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "x402guard/client.hpp"
#include "x402guard/testbed.hpp"
#include "x402guard/util/base64.hpp"

namespace x402guard {
namespace {

using testbed::Behaviour;
using testbed::MockFacilitator;
using testbed::MockResourceServer;

Bytes key_bytes(std::string_view s) {
  auto view = as_bytes(s);
  return Bytes(view.begin(), view.end());
}

ClientConfig base_config() {
  ClientConfig c;
  c.agent_id = "agent-1";
  c.payer_id = "payer-7";
  c.detector = {DetectionMode::CONTEXTUAL, EntitySet::all(), 0.4};
  c.policy = {Usd::from_cents(100), Usd::from_cents(100000), Usd::from_cents(50000)};
  c.replay_key = key_bytes("replay-key");
  c.audit_key = key_bytes("audit-key");
  c.signing_key = key_bytes("signing-key");
  return c;
}

struct Fixture {
  std::shared_ptr<MockFacilitator> facilitator = std::make_shared<MockFacilitator>();
  std::shared_ptr<MockResourceServer> server;
  std::shared_ptr<MemoryAuditSink> sink = std::make_shared<MemoryAuditSink>();
  ClientConfig config = base_config();

  explicit Fixture(Behaviour behaviour)
      : server(std::make_shared<MockResourceServer>(std::move(behaviour), facilitator)) {}

  HardenedClient make_client() {
    ClientDeps deps;
    deps.resource = server;
    deps.facilitator = facilitator;
    deps.audit_sink = sink;
    return HardenedClient(config, deps);
  }

  bool chain_ok() const {
    return verify_chain(sink->joined(), {config.audit_key.data(), config.audit_key.size()}).ok();
  }
};

// A fixed scripted response, for paths the mock server cannot produce.
struct ScriptedTransport : ResourceTransport {
  HttpResponse response;
  explicit ScriptedTransport(HttpResponse r) : response(std::move(r)) {}
  HttpResponse get(const std::string&, const std::optional<std::string>&) override {
    return response;
  }
};

struct ThrowingTransport : ResourceTransport {
  HttpResponse get(const std::string&, const std::optional<std::string>&) override {
    throw std::runtime_error("connection refused");
  }
};

nlohmann::json event_at(const MemoryAuditSink& sink, std::size_t i) {
  return nlohmann::json::parse(sink.lines().at(i));
}

TEST_CASE("payment spec parses the 402 wire body") {
  auto spec = parse_payment_spec(
      R"({"price_usd":"0.05","network":"base","facilitator":"mock://f","schemes":["exact"]})");
  REQUIRE(spec.has_value());
  CHECK(spec->price_usd == Usd::from_cents(5));
  CHECK(spec->network == "base");
  CHECK(spec->facilitator_address == "mock://f");
  CHECK(spec->accepted_schemes == std::vector<std::string>{"exact"});
  CHECK_FALSE(spec->description.has_value());
  CHECK_FALSE(spec->reason.has_value());

  SUBCASE("numeric price accepted") {
    auto num = parse_payment_spec(
        R"({"price_usd":0.05,"network":"base","facilitator":"f","schemes":["exact"]})");
    REQUIRE(num.has_value());
    CHECK(num->price_usd == Usd::from_cents(5));
  }
  SUBCASE("server-suggested metadata is carried through") {
    auto meta = parse_payment_spec(
        R"({"price_usd":"0.01","network":"base","facilitator":"f","schemes":["exact"],)"
        R"("description":"d","reason":"r"})");
    REQUIRE(meta.has_value());
    CHECK(meta->description == "d");
    CHECK(meta->reason == "r");
  }
  SUBCASE("unknown keys are tolerated") {
    CHECK(parse_payment_spec(
              R"({"price_usd":"0.01","network":"base","facilitator":"f","schemes":["exact"],)"
              R"("extra":42})")
              .has_value());
  }
}

TEST_CASE("payment spec rejects malformed bodies") {
  CHECK_FALSE(parse_payment_spec("not json").has_value());
  CHECK_FALSE(parse_payment_spec("[]").has_value());
  CHECK_FALSE(parse_payment_spec(
                  R"({"network":"base","facilitator":"f","schemes":["exact"]})")
                  .has_value());
  CHECK_FALSE(parse_payment_spec(
                  R"({"price_usd":"0.00","network":"base","facilitator":"f","schemes":["exact"]})")
                  .has_value());
  CHECK_FALSE(parse_payment_spec(
                  R"({"price_usd":"-1.00","network":"base","facilitator":"f","schemes":["exact"]})")
                  .has_value());
  CHECK_FALSE(parse_payment_spec(
                  R"({"price_usd":"0.01","network":"base","facilitator":"f","schemes":[]})")
                  .has_value());
  CHECK_FALSE(parse_payment_spec(
                  R"({"price_usd":"0.01","network":"base","facilitator":"f","schemes":[1]})")
                  .has_value());
  CHECK_FALSE(parse_payment_spec(
                  R"({"price_usd":"0.01","network":7,"facilitator":"f","schemes":["exact"]})")
                  .has_value());
}

TEST_CASE("honest server, clean metadata: paid with one ALLOWED event") {
  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  HardenedClient client = fx.make_client();

  RequestResult r = client.request("https://api.data.example/reports",
                                   {"Quarterly usage export", "scheduled batch"});

  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::PAID);
  REQUIRE(r.payment->receipt.has_value());
  CHECK(r.payment->redactions == 0);
  CHECK(r.http_status == 200);
  CHECK(r.body == "resource-content");
  CHECK(fx.facilitator->settlement_count() == 1);
  CHECK(fx.facilitator->is_valid_receipt(*r.payment->receipt));
  CHECK(fx.server->resource_deliveries() == 1);

  REQUIRE(fx.sink->lines().size() == 1);
  auto ev = event_at(*fx.sink, 0);
  CHECK(ev["outcome"] == "ALLOWED");
  CHECK(ev["detail"] == "clean");
  CHECK(ev["resource_url"] == "https://api.data.example/reports");
  CHECK(ev["agent_id"] == "agent-1");
  CHECK(fx.chain_ok());
}

TEST_CASE("non-402 responses pass straight through") {
  ClientDeps deps;
  deps.resource = std::make_shared<ScriptedTransport>(HttpResponse{200, "free"});
  deps.facilitator = std::make_shared<MockFacilitator>();
  auto sink = std::make_shared<MemoryAuditSink>();
  deps.audit_sink = sink;
  HardenedClient client(base_config(), deps);

  RequestResult r = client.request("https://api.data.example/free");
  CHECK_FALSE(r.payment.has_value());
  CHECK(r.body == "free");
  CHECK(r.http_status == 200);
  CHECK(sink->lines().empty());
}

TEST_CASE("transport failure before any payment leaves no trace") {
  ClientDeps deps;
  deps.resource = std::make_shared<ThrowingTransport>();
  deps.facilitator = std::make_shared<MockFacilitator>();
  auto sink = std::make_shared<MemoryAuditSink>();
  deps.audit_sink = sink;
  HardenedClient client(base_config(), deps);

  RequestResult r = client.request("https://api.data.example/x");
  CHECK_FALSE(r.payment.has_value());
  CHECK_FALSE(r.body.has_value());
  CHECK(r.http_status == 0);
  CHECK(sink->lines().empty());
}

TEST_CASE("price inflation is hard-blocked before any byte is transmitted") {
  // Advertises 1 cent inflated x1000 = 10.00 against a 1.00 per-call cap.
  Fixture fx(Behaviour::price_inflation(Usd::from_cents(1), 1000));
  HardenedClient client = fx.make_client();

  RequestResult r = client.request("https://api.data.example/reports");

  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::BLOCKED_POLICY);
  CHECK_FALSE(r.payment->receipt.has_value());
  CHECK(r.http_status == 402);
  CHECK_FALSE(r.body.has_value());
  CHECK(fx.facilitator->recorded_tokens().empty());
  CHECK(fx.facilitator->settlement_count() == 0);

  REQUIRE(fx.sink->lines().size() == 1);
  auto ev = event_at(*fx.sink, 0);
  CHECK(ev["outcome"] == "POLICY_BLOCKED");
  CHECK(ev["detail"] == "PER_CALL exceeded at 10.00");
  CHECK(fx.chain_ok());
}

TEST_CASE("pii in all three fields: paid, redacted, placeholders on the wire") {
  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  HardenedClient client = fx.make_client();

  RequestResult r = client.request("https://api.medrecords.example/patient/alice.martin",
                                   {"Export medical records for Alice Martin",
                                    "user=alice.martin@corp.io; ref=312-45-6789"});

  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::PAID);
  CHECK(r.payment->redactions == 3);

  auto tokens = fx.facilitator->recorded_tokens();
  REQUIRE(tokens.size() == 1);
  const std::string& token = tokens[0];
  CHECK(token.find("<PERSON>") != std::string::npos);
  CHECK(token.find("<EMAIL_ADDRESS>") != std::string::npos);
  CHECK(token.find("<US_SSN>") != std::string::npos);
  CHECK(token.find("alice.martin") == std::string::npos);
  CHECK(token.find("Alice Martin") == std::string::npos);
  CHECK(token.find("312-45-6789") == std::string::npos);

  auto parsed = nlohmann::json::parse(token);
  CHECK(parsed["resource_url"] == "https://api.medrecords.example/patient/<PERSON>");
  CHECK(parsed["description"] == "Export medical records for <PERSON>");
  CHECK(parsed["reason"] == "user=<EMAIL_ADDRESS>; ref=<US_SSN>");
  CHECK(parsed["amount_usd"] == "0.01");
  CHECK(parsed["payer_id"] == "payer-7");
  CHECK(parsed["network"] == "base");
  CHECK(base64_decode(parsed["signature"].get<std::string>()).has_value());

  REQUIRE(fx.sink->lines().size() == 1);
  auto ev = event_at(*fx.sink, 0);
  CHECK(ev["outcome"] == "PII_REDACTED");
  CHECK(ev["detail"] == "redacted: EMAIL_ADDRESS,PERSON,US_SSN");
  CHECK(ev["resource_url"] == "https://api.medrecords.example/patient/<PERSON>");
  CHECK(fx.chain_ok());
}

TEST_CASE("the same payment submitted twice blocks on the replay guard") {
  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  HardenedClient client = fx.make_client();

  RequestResult first = client.request("https://api.data.example/reports", {"export", "batch"});
  REQUIRE(first.payment.has_value());
  CHECK(first.payment->status == PipelineStatus::PAID);

  RequestResult second = client.request("https://api.data.example/reports", {"export", "batch"});
  REQUIRE(second.payment.has_value());
  CHECK(second.payment->status == PipelineStatus::BLOCKED_REPLAY);
  CHECK(fx.facilitator->settlement_count() == 1);

  REQUIRE(fx.sink->lines().size() == 2);
  auto ev = event_at(*fx.sink, 1);
  CHECK(ev["outcome"] == "REPLAY_BLOCKED");
  CHECK(ev["detail"] == "duplicate fingerprint");
  CHECK(fx.chain_ok());
}

TEST_CASE("a filter exception blocks the payment instead of passing text through") {
  struct SentinelFilter : MetadataFilter {
    RedactionResult scrub(std::string_view text) override {
      if (text.find("detonate") != std::string_view::npos)
        throw std::runtime_error("detector fault");
      return {std::string(text), {}, 0};
    }
  };

  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  ClientDeps deps;
  deps.resource = fx.server;
  deps.facilitator = fx.facilitator;
  deps.audit_sink = fx.sink;
  deps.filter = std::make_shared<SentinelFilter>();
  HardenedClient client(fx.config, deps);

  RequestResult r = client.request("https://api.data.example/reports", {"detonate now", ""});

  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::BLOCKED_PII_ERROR);
  CHECK(fx.facilitator->recorded_tokens().empty());
  CHECK(fx.facilitator->settlement_count() == 0);

  REQUIRE(fx.sink->lines().size() == 1);
  auto ev = event_at(*fx.sink, 0);
  CHECK(ev["outcome"] == "ERROR");
  CHECK(std::string(ev["detail"]).find("pii filter failure") == 0);
  CHECK(fx.chain_ok());
}

TEST_CASE("malformed 402 body fails safe: no payment attempted") {
  auto facilitator = std::make_shared<MockFacilitator>();
  auto sink = std::make_shared<MemoryAuditSink>();
  ClientDeps deps;
  deps.resource = std::make_shared<ScriptedTransport>(HttpResponse{402, "pay me whatever"});
  deps.facilitator = facilitator;
  deps.audit_sink = sink;
  HardenedClient client(base_config(), deps);

  RequestResult r = client.request("https://api.data.example/reports");

  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::ERROR);
  CHECK(r.http_status == 402);
  CHECK(facilitator->recorded_tokens().empty());

  REQUIRE(sink->lines().size() == 1);
  auto ev = event_at(*sink, 0);
  CHECK(ev["outcome"] == "ERROR");
  CHECK(ev["detail"] == "malformed 402 body");
}

TEST_CASE("replay echo settles once with the guard, twice without") {
  SUBCASE("guard enabled") {
    Fixture fx(Behaviour::replay_echo(Usd::from_cents(2)));
    HardenedClient client = fx.make_client();
    RequestResult r = client.request("https://api.data.example/feed");

    REQUIRE(r.payment.has_value());
    CHECK(r.payment->status == PipelineStatus::BLOCKED_REPLAY);
    CHECK(fx.facilitator->settlement_count() == 1);
    CHECK(fx.server->resource_deliveries() == 0);
    REQUIRE(fx.sink->lines().size() == 2);
    CHECK(event_at(*fx.sink, 0)["outcome"] == "ALLOWED");
    CHECK(event_at(*fx.sink, 1)["outcome"] == "REPLAY_BLOCKED");
    CHECK(fx.chain_ok());
  }
  SUBCASE("guard disabled: the double charge the guard exists to stop") {
    Fixture fx(Behaviour::replay_echo(Usd::from_cents(2)));
    fx.config.replay_guard_enabled = false;
    HardenedClient client = fx.make_client();
    RequestResult r = client.request("https://api.data.example/feed");

    REQUIRE(r.payment.has_value());
    CHECK(r.payment->status == PipelineStatus::PAID);
    CHECK(fx.facilitator->settlement_count() == 2);
    CHECK(fx.server->resource_deliveries() == 1);
    CHECK(r.http_status == 200);
  }
}

TEST_CASE("leak oracle: injected surfaces never reach the facilitator") {
  for (EntityType entity : all_entity_types()) {
    CAPTURE(entity_type_name(entity));
    Fixture fx(Behaviour::pii_instructing(Usd::from_cents(1), entity));
    HardenedClient client = fx.make_client();

    RequestResult r = client.request("https://api.data.example/reports", {"export", "batch"});
    REQUIRE(r.payment.has_value());
    CHECK(r.payment->status == PipelineStatus::PAID);
    CHECK(r.payment->redactions >= 1);

    REQUIRE_FALSE(fx.server->behaviour().injected_surfaces.empty());
    for (const std::string& surface : fx.server->behaviour().injected_surfaces) {
      for (const std::string& token : fx.facilitator->recorded_tokens()) {
        CHECK(token.find(surface) == std::string::npos);
      }
    }
    CHECK(fx.chain_ok());
  }
}

TEST_CASE("positive control: with the filter disabled the surface does leak") {
  Fixture fx(Behaviour::pii_instructing(Usd::from_cents(1), EntityType::EMAIL_ADDRESS));
  fx.config.pii_filter_enabled = false;
  HardenedClient client = fx.make_client();

  RequestResult r = client.request("https://api.data.example/reports");
  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::PAID);
  CHECK(r.payment->redactions == 0);

  auto tokens = fx.facilitator->recorded_tokens();
  REQUIRE(tokens.size() == 1);
  CHECK(tokens[0].find("alice.martin@corp.io") != std::string::npos);
}

TEST_CASE("control order is observable: a policy block still redacts first") {
  Fixture fx(Behaviour::price_inflation(Usd::from_cents(1), 1000));
  HardenedClient client = fx.make_client();

  RequestResult r = client.request("https://api.medrecords.example/patient/alice.martin",
                                   {"Export medical records for Alice Martin", ""});

  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::BLOCKED_POLICY);
  CHECK(r.payment->redactions == 2);

  REQUIRE(fx.sink->lines().size() == 1);
  auto ev = event_at(*fx.sink, 0);
  CHECK(ev["outcome"] == "POLICY_BLOCKED");
  CHECK(ev["resource_url"] == "https://api.medrecords.example/patient/<PERSON>");
  CHECK(ev["detail"] == "PER_CALL exceeded at 10.00; redacted_fields=2");
}

TEST_CASE("facilitator failure after controls emits a second, ERROR event") {
  struct RefusingFacilitator : FacilitatorTransport {
    std::string settle(const std::string&) override {
      throw std::runtime_error("facilitator down");
    }
  };

  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  ClientDeps deps;
  deps.resource = fx.server;
  deps.facilitator = std::make_shared<RefusingFacilitator>();
  deps.audit_sink = fx.sink;
  HardenedClient client(fx.config, deps);

  RequestResult r = client.request("https://api.data.example/reports");
  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::ERROR);

  REQUIRE(fx.sink->lines().size() == 2);
  CHECK(event_at(*fx.sink, 0)["outcome"] == "ALLOWED");
  auto ev = event_at(*fx.sink, 1);
  CHECK(ev["outcome"] == "ERROR");
  CHECK(std::string(ev["detail"]).find("facilitator failure") == 0);
  CHECK(fx.chain_ok());
}

TEST_CASE("an unwritable audit log blocks the payment") {
  struct DeadSink : AuditSink {
    void write_line(const std::string&) override { throw std::runtime_error("disk full"); }
  };

  auto facilitator = std::make_shared<MockFacilitator>();
  auto server = std::make_shared<MockResourceServer>(Behaviour::honest(Usd::from_cents(1)),
                                                     facilitator);
  ClientDeps deps;
  deps.resource = server;
  deps.facilitator = facilitator;
  deps.audit_sink = std::make_shared<DeadSink>();
  HardenedClient client(base_config(), deps);

  RequestResult r = client.request("https://api.data.example/reports");
  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::ERROR);
  CHECK(facilitator->recorded_tokens().empty());
  CHECK(facilitator->settlement_count() == 0);
}

TEST_CASE("a failing dedup store fails safe instead of waving payments through") {
  struct DeadStore : DedupStore {
    ReplayCheck check_and_record(const Fingerprint&, TimePoint) override {
      throw std::runtime_error("store offline");
    }
  };

  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  ClientDeps deps;
  deps.resource = fx.server;
  deps.facilitator = fx.facilitator;
  deps.audit_sink = fx.sink;
  deps.dedup_store = std::make_shared<DeadStore>();
  HardenedClient client(fx.config, deps);

  RequestResult r = client.request("https://api.data.example/reports");
  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::ERROR);
  CHECK(fx.facilitator->settlement_count() == 0);

  REQUIRE(fx.sink->lines().size() == 1);
  CHECK(std::string(event_at(*fx.sink, 0)["detail"]).find("replay store failure") == 0);
}

TEST_CASE("settlements equal PAID outcomes across a mixed scenario run") {
  Fixture fx(Behaviour::honest(Usd::from_cents(10)));
  HardenedClient client = fx.make_client();

  int paid = 0;
  for (int i = 0; i < 12; ++i) {
    std::string url = "https://api.data.example/item/" + std::to_string(i % 8);
    RequestResult r = client.request(url, {"fetch", "run"});
    REQUIRE(r.payment.has_value());
    if (r.payment->status == PipelineStatus::PAID) ++paid;
  }
  // Items 0..7 paid once; the 4 repeats hit the replay guard.
  CHECK(paid == 8);
  CHECK(fx.facilitator->settlement_count() == paid);
  CHECK(fx.sink->lines().size() == 12);
  CHECK(fx.chain_ok());
}

TEST_CASE("one client instance survives concurrent identical requests") {
  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  HardenedClient client = fx.make_client();

  constexpr int kThreads = 8;
  std::atomic<int> paid{0};
  std::atomic<int> replay_blocked{0};
  std::vector<std::thread> threads;
  threads.reserve(kThreads);
  for (int i = 0; i < kThreads; ++i) {
    threads.emplace_back([&] {
      RequestResult r = client.request("https://api.data.example/shared", {"export", "batch"});
      REQUIRE(r.payment.has_value());
      if (r.payment->status == PipelineStatus::PAID) ++paid;
      if (r.payment->status == PipelineStatus::BLOCKED_REPLAY) ++replay_blocked;
    });
  }
  for (auto& t : threads) t.join();

  CHECK(paid.load() == 1);
  CHECK(replay_blocked.load() == kThreads - 1);
  CHECK(fx.facilitator->settlement_count() == 1);
  CHECK(fx.sink->lines().size() == kThreads);
  CHECK(fx.chain_ok());
}

TEST_CASE("mock server refuses receipts it never issued") {
  auto facilitator = std::make_shared<MockFacilitator>();
  MockResourceServer server(Behaviour::honest(Usd::from_cents(1)), facilitator);

  CHECK(server.get("https://x.example/r", std::nullopt).status == 402);
  CHECK(server.get("https://x.example/r", "not-base64!").status == 402);
  CHECK(server.get("https://x.example/r", base64_encode(as_bytes("forged"))).status == 402);

  std::string receipt = facilitator->settle(
      R"({"resource_url":"u","description":"d","reason":"r","amount_usd":"0.01",)"
      R"("payer_id":"p","network":"base","signature":"c2ln"})");
  auto ok = server.get("https://x.example/r", base64_encode(as_bytes(receipt)));
  CHECK(ok.status == 200);
  CHECK(ok.body == "resource-content");
}

TEST_CASE("mock facilitator rejects unparseable tokens but still records them") {
  MockFacilitator facilitator;
  CHECK_THROWS_AS(facilitator.settle("junk"), std::runtime_error);
  CHECK_THROWS_AS(facilitator.settle(R"({"resource_url":"u"})"), std::runtime_error);
  CHECK(facilitator.settlement_count() == 0);
  CHECK(facilitator.recorded_tokens().size() == 2);

  std::string token =
      R"({"resource_url":"u","description":"d","reason":"r","amount_usd":"0.01",)"
      R"("payer_id":"p","network":"base","signature":"c2ln"})";
  std::string r1 = facilitator.settle(token);
  std::string r2 = facilitator.settle(token);
  CHECK(r1 == r2);  // deterministic receipt, same bytes in
  CHECK(facilitator.settlement_count() == 2);

  std::string other = facilitator.settle(
      R"({"resource_url":"v","description":"d","reason":"r","amount_usd":"0.01",)"
      R"("payer_id":"p","network":"base","signature":"c2ln"})");
  CHECK(other != r1);
}

TEST_CASE("client constructor rejects broken wiring") {
  Fixture fx(Behaviour::honest(Usd::from_cents(1)));
  ClientDeps good;
  good.resource = fx.server;
  good.facilitator = fx.facilitator;
  good.audit_sink = fx.sink;

  ClientConfig no_agent = fx.config;
  no_agent.agent_id.clear();
  CHECK_THROWS_AS(HardenedClient(no_agent, good), ConfigError);

  ClientConfig no_attempts = fx.config;
  no_attempts.max_payment_attempts = 0;
  CHECK_THROWS_AS(HardenedClient(no_attempts, good), ConfigError);

  ClientDeps no_resource = good;
  no_resource.resource = nullptr;
  CHECK_THROWS_AS(HardenedClient(fx.config, no_resource), ConfigError);

  ClientDeps no_sink = good;
  no_sink.audit_sink = nullptr;
  CHECK_THROWS_AS(HardenedClient(fx.config, no_sink), ConfigError);

  ClientConfig no_signing_key = fx.config;
  no_signing_key.signing_key.clear();
  CHECK_THROWS_AS(HardenedClient(no_signing_key, good), ConfigError);
}

TEST_CASE("loopback http mode matches the in-process flow end to end") {
  auto facilitator = std::make_shared<MockFacilitator>();
  auto core = std::make_shared<MockResourceServer>(
      Behaviour::pii_instructing(Usd::from_cents(3), EntityType::US_SSN), facilitator);
  testbed::ResourceHttpServer resource_server(core);
  testbed::FacilitatorHttpServer facilitator_server(facilitator);

  auto sink = std::make_shared<MemoryAuditSink>();
  ClientDeps deps;
  deps.resource =
      std::make_shared<testbed::HttpResourceTransport>("127.0.0.1", resource_server.port());
  deps.facilitator =
      std::make_shared<testbed::HttpFacilitatorTransport>("127.0.0.1", facilitator_server.port());
  deps.audit_sink = sink;
  ClientConfig config = base_config();
  HardenedClient client(config, deps);

  RequestResult r = client.request(resource_server.base_url() + "/records");
  REQUIRE(r.payment.has_value());
  CHECK(r.payment->status == PipelineStatus::PAID);
  CHECK(r.payment->redactions == 1);
  CHECK(r.body == "resource-content");
  for (const std::string& token : facilitator->recorded_tokens())
    CHECK(token.find("312-45-6789") == std::string::npos);

  auto verify = verify_chain(sink->joined(), {config.audit_key.data(), config.audit_key.size()});
  CHECK(verify.ok());
}

TEST_CASE("http kv store backs the replay guard across client instances") {
  testbed::KvStoreServer kv;

  auto make_store = [&] {
    return std::make_shared<HttpKvDedupStore>("127.0.0.1", kv.port());
  };

  SUBCASE("two clients sharing the store cannot double-pay") {
    auto facilitator = std::make_shared<MockFacilitator>();
    auto server =
        std::make_shared<MockResourceServer>(Behaviour::honest(Usd::from_cents(1)), facilitator);

    auto run_one = [&](std::shared_ptr<DedupStore> store) {
      ClientDeps deps;
      deps.resource = server;
      deps.facilitator = facilitator;
      deps.audit_sink = std::make_shared<MemoryAuditSink>();
      deps.dedup_store = std::move(store);
      HardenedClient client(base_config(), deps);
      return client.request("https://api.data.example/reports", {"export", "batch"});
    };

    RequestResult first = run_one(make_store());
    REQUIRE(first.payment.has_value());
    CHECK(first.payment->status == PipelineStatus::PAID);

    RequestResult second = run_one(make_store());
    REQUIRE(second.payment.has_value());
    CHECK(second.payment->status == PipelineStatus::BLOCKED_REPLAY);
    CHECK(facilitator->settlement_count() == 1);
  }

  SUBCASE("a stopped store degrades to the local fallback, still deduping") {
    auto primary = make_store();
    auto local = std::make_shared<InMemoryDedupStore>();
    auto fallback = std::make_shared<FallbackDedupStore>(primary, local);
    kv.stop();

    Fingerprint fp{};
    fp[0] = 7;
    TimePoint now = system_clock_fn()();
    CHECK(fallback->check_and_record(fp, now) == ReplayCheck::FRESH);
    CHECK(fallback->check_and_record(fp, now) == ReplayCheck::DUPLICATE);
    CHECK(fallback->fallback_uses() == 2);
  }
}

}  // namespace
}  // namespace x402guard
