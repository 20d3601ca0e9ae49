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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "x402guard/audit_log.hpp"
#include "x402guard/client.hpp"
#include "x402guard/corpus_gen.hpp"
#include "x402guard/eval.hpp"
#include "x402guard/testbed.hpp"

namespace {

using namespace x402guard;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Bytes key_from_file(const std::string& path) {
  std::string raw = read_file(path);
  // Editors love trailing newlines; one is stripped for convenience.
  if (!raw.empty() && raw.back() == '\n') raw.pop_back();
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  if (raw.empty()) throw std::runtime_error("key file is empty: " + path);
  return Bytes(raw.begin(), raw.end());
}

int cmd_gen_corpus(std::uint64_t seed, std::size_t n, double pii_rate,
                   const std::string& out_dir) {
  corpus::GeneratorConfig config = corpus::GeneratorConfig::defaults();
  config.seed = seed;
  config.n = n;
  config.pii_rate = pii_rate;
  auto samples = corpus::generate(config);

  std::size_t labels = 0, positives = 0;
  for (const auto& sample : samples) {
    labels += sample.labels.size();
    if (!sample.labels.empty()) ++positives;
  }
  corpus::write_corpus(config, samples, out_dir);
  std::cout << "wrote " << samples.size() << " samples (" << positives << " with labels, "
            << labels << " labels) to " << out_dir << "/corpus.jsonl\n";
  std::cout << "manifest: " << out_dir << "/corpus_meta.json\n";
  return 0;
}

int cmd_sweep(const std::string& corpus_path, const std::string& out_dir) {
  auto samples = corpus::load_corpus(corpus_path);
  if (samples.empty()) throw std::runtime_error("empty corpus: " + corpus_path);
  eval::SweepReport report = eval::run_sweep(samples);
  eval::write_sweep_report(report, out_dir);

  std::cout << "evaluated " << report.rows.size() << " configurations over "
            << report.corpus_samples << " samples\n";
  for (const eval::ConfigReport& row : report.rows) {
    if (!(row.config.entities == EntitySet::all())) continue;
    std::printf("%-10s min_score %.2f  precision %.3f  recall %.3f  f1 %.3f\n",
                std::string(detection_mode_name(row.config.mode)).c_str(),
                row.config.min_score, row.micro.precision(), row.micro.recall(),
                row.micro.f1());
  }
  std::printf("latency p99: pattern %.3f ms, contextual %.3f ms\n",
              report.pattern_latency.p99_ms, report.contextual_latency.p99_ms);
  std::printf("top-3 recall concentration: %.3f\n", report.top3_recall_ratio);
  std::cout << "report: " << out_dir << "/sweep_report.json, " << out_dir
            << "/sweep_report.md\n";
  return 0;
}

int cmd_verify_audit(const std::string& log_path, const std::string& key_path) {
  std::string log_text = read_file(log_path);
  Bytes key = key_from_file(key_path);
  VerifyResult result = verify_chain(log_text, key);
  if (result.ok()) {
    std::cout << "OK\n";
    return 0;
  }
  std::cout << "TAMPERED at seq " << *result.tampered_at << "\n";
  return 1;
}

testbed::Behaviour behaviour_for(const std::string& scenario) {
  Usd price = *Usd::parse("0.10");
  if (scenario == "honest") return testbed::Behaviour::honest(price);
  if (scenario == "price-inflation")
    return testbed::Behaviour::price_inflation(*Usd::parse("0.01"), 1000);
  if (scenario == "pii-instructing")
    return testbed::Behaviour::pii_instructing(price, EntityType::US_SSN);
  if (scenario == "replay-echo") return testbed::Behaviour::replay_echo(price);
  throw std::runtime_error("unknown scenario: " + scenario);
}

int cmd_demo(const std::string& scenario, const std::string& policy_file,
             const std::string& audit_log_path, const std::string& key_out_path) {
  const std::string audit_key = "demo-audit-key";

  ClientConfig config;
  config.agent_id = "demo-agent";
  config.payer_id = "payer-demo";
  config.detector = {DetectionMode::CONTEXTUAL, EntitySet::all(), 0.4};
  config.policy = policy_file.empty()
                      ? PolicyConfig{*Usd::parse("1.00"), *Usd::parse("100.00"),
                                     *Usd::parse("50.00")}
                      : policy_config_from_json(read_file(policy_file));
  config.replay_key = Bytes{'d', 'e', 'm', 'o', '-', 'r', 'k'};
  config.audit_key = Bytes(audit_key.begin(), audit_key.end());
  config.signing_key = Bytes{'d', 'e', 'm', 'o', '-', 's', 'k'};

  auto facilitator = std::make_shared<testbed::MockFacilitator>();
  auto server =
      std::make_shared<testbed::MockResourceServer>(behaviour_for(scenario), facilitator);

  ClientDeps deps;
  deps.resource = server;
  deps.facilitator = facilitator;
  auto memory_sink = std::make_shared<MemoryAuditSink>();
  if (audit_log_path.empty()) {
    deps.audit_sink = memory_sink;
  } else {
    deps.audit_sink = std::make_shared<FileAuditSink>(audit_log_path);
  }

  HardenedClient client(config, deps);
  std::cout << "scenario: " << scenario << "\n";
  std::cout << "advertised price: " << server->behaviour().advertised_price.str() << " usd\n";

  RequestResult result = client.request("https://api.demo.example/v1/reports/7",
                                        {"Scheduled export of report 7", "routine demo call"});

  std::cout << "http status: " << result.http_status << "\n";
  if (result.payment.has_value()) {
    std::cout << "payment: " << pipeline_status_name(result.payment->status)
              << " (redacted fields: " << result.payment->redactions << ")\n";
    if (result.payment->receipt.has_value())
      std::cout << "receipt: " << *result.payment->receipt << "\n";
  } else {
    std::cout << "payment: none required\n";
  }
  std::cout << "settlements: " << facilitator->settlement_count() << "\n";

  // Leak oracle: the mock facilitator records every byte it was sent, so
  // counting planted surfaces needs no access to raw metadata.
  std::size_t leaks = 0;
  for (const std::string& token : facilitator->recorded_tokens())
    for (const std::string& surface : server->behaviour().injected_surfaces)
      if (token.find(surface) != std::string::npos) ++leaks;
  std::cout << "injected surfaces leaked to facilitator: " << leaks << "\n";

  std::string log_text = audit_log_path.empty() ? memory_sink->joined()
                                                : read_file(audit_log_path);
  std::cout << "audit events:\n";
  std::istringstream lines(log_text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    auto event = nlohmann::json::parse(line);
    std::cout << "  seq " << event["seq"] << " " << event["outcome"].get<std::string>()
              << "  url=" << event["resource_url"].get<std::string>()
              << "  detail=" << event["detail"].get<std::string>() << "\n";
  }
  VerifyResult chain = verify_chain(log_text, config.audit_key);
  std::cout << "audit chain: " << (chain.ok() ? "OK" : "TAMPERED") << "\n";

  if (!key_out_path.empty()) {
    std::ofstream key_file(key_out_path, std::ios::binary | std::ios::trunc);
    if (!key_file) throw std::runtime_error("cannot open " + key_out_path);
    key_file << audit_key;
  }
  return chain.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Client-side payment hardening toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  std::size_t n = 2000;
  double pii_rate = 0.36;
  std::string out_dir;
  auto* gen = app.add_subcommand("gen-corpus", "Generate the labeled request corpus");
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--n", n, "Sample count")->capture_default_str();
  gen->add_option("--pii-rate", pii_rate, "Share of samples carrying labeled entities")
      ->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();

  std::string corpus_path, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Score every detector configuration on a corpus");
  sweep->add_option("--corpus", corpus_path, "Path to corpus.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "Output directory for the reports")->required();

  std::string log_path, key_path;
  auto* verify = app.add_subcommand("verify-audit", "Verify an audit log's MAC chain");
  verify->add_option("--log", log_path, "Audit log (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--key-file", key_path, "File holding the raw MAC key bytes")
      ->required()
      ->check(CLI::ExistingFile);

  std::string scenario, policy_file, demo_audit_log, demo_key_out;
  auto* demo = app.add_subcommand("demo", "Run one scripted server scenario in-process");
  demo->add_option("--scenario", scenario, "honest, price-inflation, pii-instructing or replay-echo")
      ->required()
      ->check(CLI::IsMember({"honest", "price-inflation", "pii-instructing", "replay-echo"}));
  demo->add_option("--policy-file", policy_file, "Spending policy JSON")
      ->check(CLI::ExistingFile);
  demo->add_option("--audit-log", demo_audit_log, "Write the audit log to this file");
  demo->add_option("--key-out", demo_key_out, "Write the audit MAC key to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_corpus(seed, n, pii_rate, out_dir);
    if (sweep->parsed()) return cmd_sweep(corpus_path, sweep_out);
    if (verify->parsed()) return cmd_verify_audit(log_path, key_path);
    if (demo->parsed()) return cmd_demo(scenario, policy_file, demo_audit_log, demo_key_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
