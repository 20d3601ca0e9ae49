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

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "x402guard/audit_log.hpp"
#include "x402guard/errors.hpp"
#include "x402guard/money.hpp"
#include "x402guard/pii_engine.hpp"
#include "x402guard/policy_engine.hpp"
#include "x402guard/replay_guard.hpp"
#include "x402guard/util/clock.hpp"

namespace x402guard {

// The three request-metadata fields. These are the only surfaces the PII
// filter scans; nothing else the client sends carries free text.
struct MetadataTriple {
  std::string resource_url;
  std::string description;
  std::string reason;
};

// Parsed 402 body. Wire keys: price_usd, network, facilitator, schemes,
// plus optional description/reason (server-suggested payment metadata --
// exactly the injection surface a hostile server abuses).
struct PaymentSpec {
  Usd price_usd;
  std::string network;
  std::string facilitator_address;
  std::vector<std::string> accepted_schemes;
  std::optional<std::string> description;
  std::optional<std::string> reason;
};

// nullopt on malformed body: bad JSON, missing key, nonpositive price,
// empty scheme list.
std::optional<PaymentSpec> parse_payment_spec(std::string_view body);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Resource-server transport. Throws on connection-level failure.
class ResourceTransport {
 public:
  virtual ~ResourceTransport() = default;
  virtual HttpResponse get(const std::string& url,
                           const std::optional<std::string>& x_payment) = 0;
};

// Facilitator transport: submits the serialized signed token, returns an
// opaque printable receipt. Throws on rejection or connection failure.
class FacilitatorTransport {
 public:
  virtual ~FacilitatorTransport() = default;
  virtual std::string settle(const std::string& token_json) = 0;
};

// Signs the canonical token bytes. The reference implementation is an HMAC
// under a local key; the pipeline property under test is that only
// redacted bytes ever reach sign().
class Signer {
 public:
  virtual ~Signer() = default;
  virtual Bytes sign(std::span<const std::uint8_t> canonical_token) = 0;
};

class HmacSigner : public Signer {
 public:
  explicit HmacSigner(Bytes key);
  Bytes sign(std::span<const std::uint8_t> canonical_token) override;

 private:
  Bytes key_;
};

// Scrub hook so tests can inject a filter that throws on a sentinel input.
class MetadataFilter {
 public:
  virtual ~MetadataFilter() = default;
  virtual RedactionResult scrub(std::string_view text) = 0;
};

class PiiMetadataFilter : public MetadataFilter {
 public:
  explicit PiiMetadataFilter(DetectorConfig config);
  RedactionResult scrub(std::string_view text) override;

 private:
  PiiEngine engine_;
};

enum class PipelineStatus { PAID, BLOCKED_PII_ERROR, BLOCKED_POLICY, BLOCKED_REPLAY, ERROR };

std::string_view pipeline_status_name(PipelineStatus s);

struct PipelineOutcome {
  PipelineStatus status = PipelineStatus::ERROR;
  std::optional<std::string> receipt;  // present iff status == PAID
  int redactions = 0;                  // metadata fields that had spans redacted, 0..3
};

// payment is empty when no 402 was hit (plain success or initial transport
// failure, distinguished by http_status 0).
struct RequestResult {
  std::optional<PipelineOutcome> payment;
  std::optional<std::string> body;
  int http_status = 0;
};

struct ClientConfig {
  std::string agent_id;  // audit stream identity
  std::string payer_id;  // token payer field
  DetectorConfig detector;
  PolicyConfig policy;
  Bytes replay_key;
  Bytes audit_key;
  Bytes signing_key;
  // Positive-control switches for experiments; production keeps both on.
  bool pii_filter_enabled = true;
  bool replay_guard_enabled = true;
  // Bound on 402 rounds per request; 2 lets a replay-echoing server route
  // its duplicate back through the pipeline exactly once.
  int max_payment_attempts = 2;
  std::chrono::seconds dedup_ttl = std::chrono::hours{24};
};

struct ClientDeps {
  std::shared_ptr<ResourceTransport> resource;
  std::shared_ptr<FacilitatorTransport> facilitator;
  std::shared_ptr<AuditSink> audit_sink;
  std::shared_ptr<DedupStore> dedup_store;  // defaults to a fresh in-memory store
  std::shared_ptr<Signer> signer;           // defaults to HmacSigner(config.signing_key)
  std::shared_ptr<MetadataFilter> filter;   // defaults to PiiMetadataFilter(config.detector)
  ClockFn clock;                            // defaults to the system clock
};

// Drop-in hardened 402 client. Controls run in fixed order on every
// outbound payment: PII filter, policy, replay guard, audit. Any control
// failure blocks the payment; nothing unredacted reaches a transport.
class HardenedClient {
 public:
  // Agent-supplied call context; a hostile server can override these via
  // its 402 body, which is why they are filtered, not trusted.
  struct Context {
    std::string description;
    std::string reason;
  };

  HardenedClient(ClientConfig config, ClientDeps deps);

  RequestResult request(const std::string& url, const Context& context = {});

  const PolicyEngine& policy() const { return *policy_; }

 private:
  struct PipelineRun {
    bool proceed = false;
    PipelineOutcome blocked;  // meaningful only when !proceed
    int redactions = 0;
    std::string redacted_url;  // safe for audit lines
    std::string token_json;    // meaningful only when proceed
  };

  PipelineRun run_pipeline(MetadataTriple triple, Usd amount, const std::string& network,
                           TimePoint now);
  bool try_append(std::string resource_url, AuditOutcome outcome, std::string detail);

  ClientConfig config_;
  std::shared_ptr<ResourceTransport> resource_;
  std::shared_ptr<FacilitatorTransport> facilitator_;
  std::shared_ptr<MetadataFilter> filter_;
  std::unique_ptr<PolicyEngine> policy_;
  std::unique_ptr<ReplayGuard> replay_;
  std::unique_ptr<AuditLog> audit_;
  std::shared_ptr<Signer> signer_;
  ClockFn clock_;
};

}  // namespace x402guard
