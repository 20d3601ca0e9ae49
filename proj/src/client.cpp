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

#include "x402guard/client.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "x402guard/util/base64.hpp"
#include "x402guard/util/url.hpp"

namespace x402guard {

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<Usd> read_price(const nlohmann::json& v) {
  if (v.is_string()) return Usd::parse(v.get<std::string>());
  if (v.is_number()) return Usd::from_double(v.get<double>());
  return std::nullopt;
}

// Canonical (name, value) sequence shared by the replay fingerprint and the
// signer input. The wire token serialises the same values under amount_usd.
std::vector<std::pair<std::string, std::string>> token_fields(const MetadataTriple& triple,
                                                              Usd amount,
                                                              const std::string& payer_id,
                                                              const std::string& network) {
  return {
      {"resource_url", triple.resource_url},
      {"description", triple.description},
      {"reason", triple.reason},
      {"amount", amount.str()},
      {"payer_id", payer_id},
      {"network", network},
  };
}

std::string wire_token_json(const MetadataTriple& triple, Usd amount,
                            const std::string& payer_id, const std::string& network,
                            const Bytes& signature) {
  ordered_json j;
  j["resource_url"] = triple.resource_url;
  j["description"] = triple.description;
  j["reason"] = triple.reason;
  j["amount_usd"] = amount.str();
  j["payer_id"] = payer_id;
  j["network"] = network;
  j["signature"] = base64_encode({signature.data(), signature.size()});
  return j.dump();
}

std::string redacted_types_detail(const std::vector<EntityType>& types) {
  std::string out = "redacted:";
  for (std::size_t i = 0; i < types.size(); ++i) {
    out += i == 0 ? ' ' : ',';
    out += entity_type_name(types[i]);
  }
  return out;
}

}  // namespace

std::optional<PaymentSpec> parse_payment_spec(std::string_view body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (!j.contains("price_usd") || !j.contains("network") || !j.contains("facilitator") ||
      !j.contains("schemes"))
    return std::nullopt;
  auto price = read_price(j["price_usd"]);
  if (!price || price->cents() <= 0) return std::nullopt;
  if (!j["network"].is_string() || !j["facilitator"].is_string() || !j["schemes"].is_array() ||
      j["schemes"].empty())
    return std::nullopt;

  PaymentSpec spec;
  spec.price_usd = *price;
  spec.network = j["network"].get<std::string>();
  spec.facilitator_address = j["facilitator"].get<std::string>();
  for (const auto& s : j["schemes"]) {
    if (!s.is_string()) return std::nullopt;
    spec.accepted_schemes.push_back(s.get<std::string>());
  }
  if (j.contains("description")) {
    if (!j["description"].is_string()) return std::nullopt;
    spec.description = j["description"].get<std::string>();
  }
  if (j.contains("reason")) {
    if (!j["reason"].is_string()) return std::nullopt;
    spec.reason = j["reason"].get<std::string>();
  }
  return spec;
}

std::string_view pipeline_status_name(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::PAID:
      return "PAID";
    case PipelineStatus::BLOCKED_PII_ERROR:
      return "BLOCKED_PII_ERROR";
    case PipelineStatus::BLOCKED_POLICY:
      return "BLOCKED_POLICY";
    case PipelineStatus::BLOCKED_REPLAY:
      return "BLOCKED_REPLAY";
    case PipelineStatus::ERROR:
      return "ERROR";
  }
  throw std::logic_error("unknown pipeline status");
}

HmacSigner::HmacSigner(Bytes key) : key_(std::move(key)) {
  if (key_.empty()) throw ConfigError("signer key must not be empty");
}

Bytes HmacSigner::sign(std::span<const std::uint8_t> canonical_token) {
  Digest mac = hmac_sha256({key_.data(), key_.size()}, canonical_token);
  return Bytes(mac.begin(), mac.end());
}

PiiMetadataFilter::PiiMetadataFilter(DetectorConfig config) : engine_(config) {}

RedactionResult PiiMetadataFilter::scrub(std::string_view text) { return engine_.scrub(text); }

HardenedClient::HardenedClient(ClientConfig config, ClientDeps deps)
    : config_(std::move(config)),
      resource_(std::move(deps.resource)),
      facilitator_(std::move(deps.facilitator)),
      filter_(std::move(deps.filter)),
      signer_(std::move(deps.signer)),
      clock_(std::move(deps.clock)) {
  if (config_.agent_id.empty() || config_.payer_id.empty())
    throw ConfigError("client needs agent_id and payer_id");
  if (config_.max_payment_attempts < 1) throw ConfigError("max_payment_attempts must be >= 1");
  if (!resource_ || !facilitator_) throw ConfigError("client needs both transports");
  if (!deps.audit_sink) throw ConfigError("client needs an audit sink");
  if (!clock_) clock_ = system_clock_fn();
  if (!filter_) filter_ = std::make_shared<PiiMetadataFilter>(config_.detector);
  if (!signer_) signer_ = std::make_shared<HmacSigner>(config_.signing_key);

  policy_ = std::make_unique<PolicyEngine>(config_.policy);
  auto store = deps.dedup_store ? std::move(deps.dedup_store)
                                : std::make_shared<InMemoryDedupStore>(config_.dedup_ttl);
  replay_ = std::make_unique<ReplayGuard>(config_.replay_key, std::move(store));
  audit_ = std::make_unique<AuditLog>(config_.audit_key, std::move(deps.audit_sink),
                                      config_.agent_id, clock_);
}

bool HardenedClient::try_append(std::string resource_url, AuditOutcome outcome,
                                std::string detail) {
  try {
    audit_->append(std::move(resource_url), outcome, std::move(detail));
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

HardenedClient::PipelineRun HardenedClient::run_pipeline(MetadataTriple triple, Usd amount,
                                                         const std::string& network,
                                                         TimePoint now) {
  PipelineRun run;

  // Control 1: PII filter, each field independently. A filter exception
  // blocks; text never passes through unscanned.
  std::vector<EntityType> redacted_types;
  if (config_.pii_filter_enabled) {
    std::string scrubbed_url;  // best effort for the audit line on failure
    try {
      RedactionResult url_r = filter_->scrub(triple.resource_url);
      scrubbed_url = url_r.text;
      RedactionResult desc_r = filter_->scrub(triple.description);
      RedactionResult reason_r = filter_->scrub(triple.reason);

      for (const RedactionResult* r : {&url_r, &desc_r, &reason_r}) {
        if (r->redaction_count > 0) ++run.redactions;
        for (const Detection& d : r->applied)
          if (std::find(redacted_types.begin(), redacted_types.end(), d.entity_type) ==
              redacted_types.end())
            redacted_types.push_back(d.entity_type);
      }
      triple.resource_url = std::move(url_r.text);
      triple.description = std::move(desc_r.text);
      triple.reason = std::move(reason_r.text);
    } catch (const std::exception& e) {
      try_append(std::move(scrubbed_url), AuditOutcome::ERROR,
                 std::string("pii filter failure: ") + e.what());
      run.blocked = {PipelineStatus::BLOCKED_PII_ERROR, std::nullopt, run.redactions};
      return run;
    }
    std::sort(redacted_types.begin(), redacted_types.end());
  }

  run.redacted_url = triple.resource_url;

  // Control 2: spending policy against the redacted URL's endpoint host.
  std::string host;
  try {
    host = endpoint_host(triple.resource_url);
  } catch (const std::exception&) {
    try_append(triple.resource_url, AuditOutcome::ERROR, "invalid resource url");
    run.blocked = {PipelineStatus::ERROR, std::nullopt, run.redactions};
    return run;
  }
  PolicyDecision decision = policy_->check_and_record(amount, host, now);
  if (!decision.allowed) {
    std::string detail = std::string(policy_dimension_name(*decision.violated_dimension)) +
                         " exceeded at " + decision.current_aggregate_usd.str();
    if (run.redactions > 0) detail += "; redacted_fields=" + std::to_string(run.redactions);
    try_append(triple.resource_url, AuditOutcome::POLICY_BLOCKED, std::move(detail));
    run.blocked = {PipelineStatus::BLOCKED_POLICY, std::nullopt, run.redactions};
    return run;
  }

  // Control 3: replay guard over the post-redaction token fields.
  auto fields = token_fields(triple, amount, config_.payer_id, network);
  if (config_.replay_guard_enabled) {
    ReplayCheck check;
    try {
      check = replay_->check_and_record(fields, now);
    } catch (const std::exception& e) {
      // A store that cannot answer is a failed control, not a pass.
      try_append(triple.resource_url, AuditOutcome::ERROR,
                 std::string("replay store failure: ") + e.what());
      run.blocked = {PipelineStatus::ERROR, std::nullopt, run.redactions};
      return run;
    }
    if (check == ReplayCheck::DUPLICATE) {
      try_append(triple.resource_url, AuditOutcome::REPLAY_BLOCKED, "duplicate fingerprint");
      run.blocked = {PipelineStatus::BLOCKED_REPLAY, std::nullopt, run.redactions};
      return run;
    }
  }

  // Control 4: audit. The event must be durable before any byte is
  // transmitted; a failed append blocks the payment.
  AuditOutcome outcome =
      run.redactions > 0 ? AuditOutcome::PII_REDACTED : AuditOutcome::ALLOWED;
  std::string detail = run.redactions > 0 ? redacted_types_detail(redacted_types) : "clean";
  if (!try_append(triple.resource_url, outcome, std::move(detail))) {
    run.blocked = {PipelineStatus::ERROR, std::nullopt, run.redactions};
    return run;
  }

  Bytes signature = signer_->sign(canonical_token_bytes(fields));
  run.token_json = wire_token_json(triple, amount, config_.payer_id, network, signature);
  run.proceed = true;
  return run;
}

RequestResult HardenedClient::request(const std::string& url, const Context& context) {
  RequestResult result;
  HttpResponse response;
  try {
    response = resource_->get(url, std::nullopt);
  } catch (const std::exception&) {
    return result;  // no payment in flight, nothing to audit
  }

  int attempts = 0;
  while (response.status == 402 && attempts < config_.max_payment_attempts) {
    ++attempts;
    result.http_status = 402;

    std::optional<PaymentSpec> spec = parse_payment_spec(response.body);
    if (!spec) {
      // Fail-safe: an unparseable demand never triggers a payment. The
      // audit line carries the scrubbed URL only.
      std::string safe_url;
      try {
        safe_url = filter_->scrub(url).text;
      } catch (const std::exception&) {
      }
      try_append(std::move(safe_url), AuditOutcome::ERROR, "malformed 402 body");
      result.payment = PipelineOutcome{PipelineStatus::ERROR, std::nullopt, 0};
      return result;
    }

    MetadataTriple triple;
    triple.resource_url = url;
    // Server-suggested metadata overrides the agent context: it is exactly
    // the injection surface, so it must flow through the filter.
    triple.description = spec->description ? *spec->description : context.description;
    triple.reason = spec->reason ? *spec->reason : context.reason;

    PipelineRun run = run_pipeline(std::move(triple), spec->price_usd, spec->network, clock_());
    if (!run.proceed) {
      result.payment = run.blocked;
      return result;
    }

    std::string receipt;
    try {
      receipt = facilitator_->settle(run.token_json);
    } catch (const std::exception& e) {
      try_append(run.redacted_url, AuditOutcome::ERROR,
                 std::string("facilitator failure: ") + e.what());
      result.payment = PipelineOutcome{PipelineStatus::ERROR, std::nullopt, run.redactions};
      return result;
    }

    std::string x_payment = base64_encode(as_bytes(receipt));
    try {
      response = resource_->get(url, x_payment);
    } catch (const std::exception& e) {
      try_append(run.redacted_url, AuditOutcome::ERROR,
                 std::string("resource retry failure: ") + e.what());
      result.payment = PipelineOutcome{PipelineStatus::ERROR, std::nullopt, run.redactions};
      result.http_status = 0;
      return result;
    }
    result.payment = PipelineOutcome{PipelineStatus::PAID, std::move(receipt), run.redactions};
  }

  result.http_status = response.status;
  if (response.status != 402) result.body = std::move(response.body);
  return result;
}

}  // namespace x402guard
