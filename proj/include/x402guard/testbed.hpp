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
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "x402guard/client.hpp"
#include "x402guard/entity.hpp"
#include "x402guard/money.hpp"

namespace x402guard::testbed {

// In-process settlement endpoint. Records every token verbatim so tests can
// grep for leaked entity surfaces; counts settlements so replay tests can
// assert how many charges actually landed.
class MockFacilitator : public FacilitatorTransport {
 public:
  std::string settle(const std::string& token_json) override;

  std::vector<std::string> recorded_tokens() const;
  int settlement_count() const;
  bool is_valid_receipt(const std::string& receipt) const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> tokens_;
  int settlements_ = 0;
  std::set<std::string> valid_receipts_;
};

// One scripted server behaviour per scenario run.
struct Behaviour {
  enum class Kind { HONEST, PRICE_INFLATION, PII_INSTRUCTING, REPLAY_ECHO };

  Kind kind = Kind::HONEST;
  Usd advertised_price;
  std::optional<std::string> description;  // server-suggested metadata
  std::optional<std::string> reason;
  // Ground-truth entity strings the scenario plants, for the leak oracle.
  std::vector<std::string> injected_surfaces;

  static Behaviour honest(Usd price);
  static Behaviour price_inflation(Usd base_price, int factor);
  static Behaviour pii_instructing(Usd price, EntityType entity);
  static Behaviour replay_echo(Usd price);
};

std::string_view behaviour_kind_name(Behaviour::Kind kind);

// Mock resource endpoint behind the client's own transport interface.
// Replies 402 until it sees a receipt the paired facilitator issued, then
// serves a fixed body. The REPLAY_ECHO behaviour answers the first valid
// receipt with one more 402 carrying the same demand, routing a duplicate
// payment attempt back through the client pipeline.
class MockResourceServer : public ResourceTransport {
 public:
  MockResourceServer(Behaviour behaviour, std::shared_ptr<MockFacilitator> facilitator);

  HttpResponse get(const std::string& url, const std::optional<std::string>& x_payment) override;

  const Behaviour& behaviour() const { return behaviour_; }
  std::string payment_spec_body() const;
  int resource_deliveries() const;

 private:
  Behaviour behaviour_;
  std::shared_ptr<MockFacilitator> facilitator_;
  mutable std::mutex mutex_;
  int valid_receipts_seen_ = 0;
  int deliveries_ = 0;
};

// Loopback-socket wrappers, for integration realism only; the core suite
// runs the mocks in-process. Each server binds an ephemeral 127.0.0.1 port.

// Set-if-absent key service speaking the HttpKvDedupStore protocol:
// PUT /keys/{hex}?ttl_seconds=N answers 201 on first sight, 409 within TTL.
class KvStoreServer {
 public:
  KvStoreServer();
  ~KvStoreServer();

  int port() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP facade over a MockFacilitator: POST /settle with the token body.
class FacilitatorHttpServer {
 public:
  explicit FacilitatorHttpServer(std::shared_ptr<MockFacilitator> core);
  ~FacilitatorHttpServer();

  int port() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP facade over a MockResourceServer.
class ResourceHttpServer {
 public:
  explicit ResourceHttpServer(std::shared_ptr<MockResourceServer> core);
  ~ResourceHttpServer();

  int port() const;
  std::string base_url() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Client-side transports for the loopback servers.
class HttpResourceTransport : public ResourceTransport {
 public:
  HttpResourceTransport(std::string host, int port,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds{2000});
  ~HttpResourceTransport() override;

  HttpResponse get(const std::string& url, const std::optional<std::string>& x_payment) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpFacilitatorTransport : public FacilitatorTransport {
 public:
  HttpFacilitatorTransport(std::string host, int port,
                           std::chrono::milliseconds timeout = std::chrono::milliseconds{2000});
  ~HttpFacilitatorTransport() override;

  std::string settle(const std::string& token_json) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace x402guard::testbed
