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

#include <chrono>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>

#include <httplib.h>

#include "x402guard/testbed.hpp"

namespace x402guard::testbed {

namespace {

// Base for a server that owns an httplib instance on an ephemeral port.
struct ServerCore {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) throw std::runtime_error("could not bind loopback port");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  void stop() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  ~ServerCore() { stop(); }
};

// Path plus query, as a request line wants it.
std::string request_target(const std::string& url) {
  auto scheme = url.find("://");
  std::size_t from = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', from);
  if (slash == std::string::npos) return "/";
  return url.substr(slash);
}

}  // namespace

struct KvStoreServer::Impl : ServerCore {
  std::mutex mutex;
  std::unordered_map<std::string, std::chrono::steady_clock::time_point> expiry;
};

KvStoreServer::KvStoreServer() : impl_(std::make_unique<Impl>()) {
  Impl* impl = impl_.get();
  impl->server.Put(R"(/keys/([0-9a-f]+))", [impl](const httplib::Request& req,
                                                  httplib::Response& res) {
    long long ttl_seconds = 86400;
    if (req.has_param("ttl_seconds")) {
      try {
        ttl_seconds = std::stoll(req.get_param_value("ttl_seconds"));
      } catch (const std::exception&) {
        res.status = 400;
        return;
      }
    }
    std::string key = req.matches[1].str();
    auto now = std::chrono::steady_clock::now();

    std::lock_guard<std::mutex> lock(impl->mutex);
    auto it = impl->expiry.find(key);
    if (it != impl->expiry.end() && it->second > now) {
      res.status = 409;
      return;
    }
    impl->expiry[key] = now + std::chrono::seconds(ttl_seconds);
    res.status = 201;
  });
  impl->start();
}

KvStoreServer::~KvStoreServer() = default;

int KvStoreServer::port() const { return impl_->port; }

void KvStoreServer::stop() { impl_->stop(); }

struct FacilitatorHttpServer::Impl : ServerCore {
  std::shared_ptr<MockFacilitator> core;
};

FacilitatorHttpServer::FacilitatorHttpServer(std::shared_ptr<MockFacilitator> core)
    : impl_(std::make_unique<Impl>()) {
  if (!core) throw std::invalid_argument("facilitator server needs a core");
  impl_->core = std::move(core);
  Impl* impl = impl_.get();
  impl->server.Post("/settle",
                    [impl](const httplib::Request& req, httplib::Response& res) {
                      try {
                        res.set_content(impl->core->settle(req.body), "text/plain");
                      } catch (const std::exception& e) {
                        res.status = 400;
                        res.set_content(e.what(), "text/plain");
                      }
                    });
  impl->start();
}

FacilitatorHttpServer::~FacilitatorHttpServer() = default;

int FacilitatorHttpServer::port() const { return impl_->port; }

void FacilitatorHttpServer::stop() { impl_->stop(); }

struct ResourceHttpServer::Impl : ServerCore {
  std::shared_ptr<MockResourceServer> core;
};

ResourceHttpServer::ResourceHttpServer(std::shared_ptr<MockResourceServer> core)
    : impl_(std::make_unique<Impl>()) {
  if (!core) throw std::invalid_argument("resource server needs a core");
  impl_->core = std::move(core);
  Impl* impl = impl_.get();
  impl->server.Get(".*", [impl](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> x_payment;
    if (req.has_header("X-Payment")) x_payment = req.get_header_value("X-Payment");
    std::string url = "http://127.0.0.1:" + std::to_string(impl->port) + req.target;
    HttpResponse r = impl->core->get(url, x_payment);
    res.status = r.status;
    res.set_content(r.body, r.status == 402 ? "application/json" : "text/plain");
  });
  impl->start();
}

ResourceHttpServer::~ResourceHttpServer() = default;

int ResourceHttpServer::port() const { return impl_->port; }

std::string ResourceHttpServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void ResourceHttpServer::stop() { impl_->stop(); }

struct HttpResourceTransport::Impl {
  httplib::Client client;
  Impl(const std::string& host, int port) : client(host, port) {}
};

HttpResourceTransport::HttpResourceTransport(std::string host, int port,
                                             std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(host, port)) {
  impl_->client.set_connection_timeout(timeout);
  impl_->client.set_read_timeout(timeout);
  impl_->client.set_write_timeout(timeout);
}

HttpResourceTransport::~HttpResourceTransport() = default;

HttpResponse HttpResourceTransport::get(const std::string& url,
                                        const std::optional<std::string>& x_payment) {
  httplib::Headers headers;
  if (x_payment) headers.emplace("X-Payment", *x_payment);
  auto res = impl_->client.Get(request_target(url), headers);
  if (!res) throw std::runtime_error("resource server unreachable");
  return {res->status, res->body};
}

struct HttpFacilitatorTransport::Impl {
  httplib::Client client;
  Impl(const std::string& host, int port) : client(host, port) {}
};

HttpFacilitatorTransport::HttpFacilitatorTransport(std::string host, int port,
                                                   std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(host, port)) {
  impl_->client.set_connection_timeout(timeout);
  impl_->client.set_read_timeout(timeout);
  impl_->client.set_write_timeout(timeout);
}

HttpFacilitatorTransport::~HttpFacilitatorTransport() = default;

std::string HttpFacilitatorTransport::settle(const std::string& token_json) {
  auto res = impl_->client.Post("/settle", token_json, "application/json");
  if (!res) throw std::runtime_error("facilitator unreachable");
  if (res->status != 200) throw std::runtime_error("settlement rejected: " + res->body);
  return res->body;
}

}  // namespace x402guard::testbed
