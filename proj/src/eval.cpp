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

#include "x402guard/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace x402guard::eval {

double EvalMetrics::precision() const {
  std::size_t den = true_positives + false_positives;
  return den == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(den);
}

double EvalMetrics::recall() const {
  std::size_t den = true_positives + false_negatives;
  return den == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(den);
}

double EvalMetrics::f1() const {
  double p = precision();
  double r = recall();
  return p + r == 0 ? 0.0 : 2.0 * p * r / (p + r);
}

EvalMetrics& EvalMetrics::operator+=(const EvalMetrics& other) {
  true_positives += other.true_positives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  return *this;
}

namespace {

using Span = std::pair<std::size_t, std::size_t>;

std::size_t overlap_size(Span a, Span b) {
  std::size_t lo = std::max(a.first, b.first);
  std::size_t hi = std::min(a.second, b.second);
  return hi > lo ? hi - lo : 0;
}

bool try_assign(std::size_t pred, const std::vector<std::vector<std::size_t>>& candidates,
                std::vector<char>& visited, std::vector<std::ptrdiff_t>& owner) {
  for (std::size_t gold : candidates[pred]) {
    if (visited[gold]) continue;
    visited[gold] = 1;
    if (owner[gold] < 0 ||
        try_assign(static_cast<std::size_t>(owner[gold]), candidates, visited, owner)) {
      owner[gold] = static_cast<std::ptrdiff_t>(pred);
      return true;
    }
  }
  return false;
}

}  // namespace

std::size_t match_spans(std::span<const Span> predictions, std::span<const Span> golds) {
  std::vector<std::vector<std::size_t>> candidates(predictions.size());
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    for (std::size_t g = 0; g < golds.size(); ++g)
      if (overlap_size(predictions[p], golds[g]) > 0) candidates[p].push_back(g);
    std::sort(candidates[p].begin(), candidates[p].end(), [&](std::size_t a, std::size_t b) {
      std::size_t oa = overlap_size(predictions[p], golds[a]);
      std::size_t ob = overlap_size(predictions[p], golds[b]);
      if (oa != ob) return oa > ob;
      if (golds[a].first != golds[b].first) return golds[a].first < golds[b].first;
      return a < b;
    });
  }

  std::vector<std::ptrdiff_t> owner(golds.size(), -1);
  std::size_t matched = 0;
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    std::vector<char> visited(golds.size(), 0);
    if (try_assign(p, candidates, visited, owner)) ++matched;
  }
  return matched;
}

ConfigReport evaluate(const DetectorConfig& config,
                      std::span<const corpus::CorpusSample> samples) {
  PiiEngine engine(config);
  ConfigReport report;
  report.config = config;

  constexpr std::array<corpus::Field, 3> kFields{
      corpus::Field::RESOURCE_URL, corpus::Field::DESCRIPTION, corpus::Field::REASON};

  for (const corpus::CorpusSample& sample : samples) {
    for (corpus::Field field : kFields) {
      const std::string* text = &sample.triple.resource_url;
      if (field == corpus::Field::DESCRIPTION) text = &sample.triple.description;
      if (field == corpus::Field::REASON) text = &sample.triple.reason;

      std::array<std::vector<Span>, kEntityTypeCount> preds;
      for (const Detection& d : engine.analyze(*text))
        preds[static_cast<std::size_t>(d.entity_type)].emplace_back(d.start, d.end);

      std::array<std::vector<Span>, kEntityTypeCount> golds;
      for (const corpus::GoldLabel& label : sample.labels) {
        if (label.field != field) continue;
        if (!config.entities.contains(label.entity_type)) continue;
        golds[static_cast<std::size_t>(label.entity_type)].emplace_back(label.start, label.end);
      }

      for (EntityType type : all_entity_types()) {
        std::size_t ti = static_cast<std::size_t>(type);
        if (preds[ti].empty() && golds[ti].empty()) continue;
        std::size_t matched = match_spans(preds[ti], golds[ti]);
        report.per_type[ti].true_positives += matched;
        report.per_type[ti].false_positives += preds[ti].size() - matched;
        report.per_type[ti].false_negatives += golds[ti].size() - matched;
      }
    }
  }

  for (EntityType type : config.entities.to_vector())
    report.micro += report.per_type[static_cast<std::size_t>(type)];
  return report;
}

std::vector<DetectorConfig> sweep_grid() {
  std::vector<DetectorConfig> grid;
  auto add_views = [&](DetectionMode mode, double score) {
    for (EntityType type : all_entity_types())
      grid.push_back({mode, EntitySet::single(type), score});
    grid.push_back({mode, EntitySet::all(), score});
  };
  add_views(DetectionMode::PATTERN, kPatternRowScore);
  for (double score : kContextualScores) add_views(DetectionMode::CONTEXTUAL, score);
  return grid;
}

double LatencyStats::percentile(double p) const {
  if (samples_ms.empty()) throw std::invalid_argument("percentile of empty latency series");
  if (!(p > 0 && p <= 100)) throw std::invalid_argument("percentile outside (0, 100]");
  std::vector<double> sorted = samples_ms;
  std::sort(sorted.begin(), sorted.end());
  auto rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
  if (rank == 0) rank = 1;
  return sorted[rank - 1];
}

LatencyStats measure_latency(const DetectorConfig& config,
                             std::span<const corpus::CorpusSample> samples, std::size_t warmup,
                             std::size_t timed, ClockFn clock) {
  if (samples.empty()) throw std::invalid_argument("measure_latency: empty corpus");
  if (!clock) clock = [] { return std::chrono::steady_clock::now(); };

  PiiEngine engine(config);
  LatencyStats stats;
  stats.samples_ms.reserve(timed);
  for (std::size_t i = 0; i < warmup + timed; ++i) {
    const corpus::CorpusSample& sample = samples[i % samples.size()];
    auto begin = clock();
    engine.analyze(sample.triple.resource_url);
    engine.analyze(sample.triple.description);
    engine.analyze(sample.triple.reason);
    auto end = clock();
    if (i >= warmup)
      stats.samples_ms.push_back(
          std::chrono::duration<double, std::milli>(end - begin).count());
  }
  return stats;
}

SweepReport run_sweep(std::span<const corpus::CorpusSample> samples) {
  SweepReport report;
  report.corpus_samples = samples.size();
  for (const corpus::CorpusSample& sample : samples)
    report.corpus_labels += sample.labels.size();

  for (const DetectorConfig& config : sweep_grid())
    report.rows.push_back(evaluate(config, samples));

  // Top three types by gold volume, contextual at the default threshold.
  std::array<std::size_t, kEntityTypeCount> volume{};
  for (const corpus::CorpusSample& sample : samples)
    for (const corpus::GoldLabel& label : sample.labels)
      volume[static_cast<std::size_t>(label.entity_type)] += 1;
  std::array<std::size_t, kEntityTypeCount> order{};
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (volume[a] != volume[b]) return volume[a] > volume[b];
    return a < b;
  });
  EntitySet top3;
  for (std::size_t k = 0; k < 3 && k < order.size(); ++k)
    if (volume[order[k]] > 0) top3.add(static_cast<EntityType>(order[k]));
  report.top3_entities = top3;

  if (!top3.empty()) {
    ConfigReport subset = evaluate({DetectionMode::CONTEXTUAL, top3, 0.4}, samples);
    ConfigReport full = evaluate({DetectionMode::CONTEXTUAL, EntitySet::all(), 0.4}, samples);
    report.top3_recall = subset.micro.recall();
    report.full_recall = full.micro.recall();
    report.top3_recall_ratio =
        report.full_recall == 0 ? 0.0 : report.top3_recall / report.full_recall;
  }

  report.latency_warmup = 50;
  report.latency_timed = 200;
  auto summarize = [](const LatencyStats& stats) {
    return ModeLatency{stats.percentile(50), stats.percentile(95), stats.percentile(99)};
  };
  report.pattern_latency = summarize(measure_latency(
      {DetectionMode::PATTERN, EntitySet::all(), 0.4}, samples, 50, 200));
  report.contextual_latency = summarize(measure_latency(
      {DetectionMode::CONTEXTUAL, EntitySet::all(), 0.4}, samples, 50, 200));
  return report;
}

namespace {

std::string entities_label(const EntitySet& set) {
  if (set == EntitySet::all()) return "all";
  std::string out;
  for (EntityType type : set.to_vector()) {
    if (!out.empty()) out += ",";
    out += std::string(entity_type_name(type));
  }
  return out;
}

nlohmann::ordered_json metrics_json(const EvalMetrics& m) {
  nlohmann::ordered_json j;
  j["tp"] = m.true_positives;
  j["fp"] = m.false_positives;
  j["fn"] = m.false_negatives;
  j["precision"] = m.precision();
  j["recall"] = m.recall();
  j["f1"] = m.f1();
  return j;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

nlohmann::ordered_json sweep_report_json(const SweepReport& report) {
  nlohmann::ordered_json j;
  j["corpus"] = {{"samples", report.corpus_samples}, {"labels", report.corpus_labels}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ConfigReport& row : report.rows) {
    nlohmann::ordered_json entry;
    entry["mode"] = std::string(detection_mode_name(row.config.mode));
    entry["entities"] = entities_label(row.config.entities);
    entry["min_score"] = row.config.min_score;
    entry["micro"] = metrics_json(row.micro);
    nlohmann::ordered_json per_entity = nlohmann::ordered_json::object();
    for (EntityType type : row.config.entities.to_vector())
      per_entity[std::string(entity_type_name(type))] =
          metrics_json(row.per_type[static_cast<std::size_t>(type)]);
    entry["per_entity"] = per_entity;
    rows.push_back(entry);
  }
  j["rows"] = rows;
  nlohmann::ordered_json top3;
  top3["entities"] = entities_label(report.top3_entities);
  top3["min_score"] = 0.4;
  top3["top3_recall"] = report.top3_recall;
  top3["full_recall"] = report.full_recall;
  top3["ratio"] = report.top3_recall_ratio;
  j["top3_recall_ratio"] = top3;
  auto latency_json = [](const ModeLatency& l) {
    return nlohmann::ordered_json{{"p50", l.p50_ms}, {"p95", l.p95_ms}, {"p99", l.p99_ms}};
  };
  j["latency_ms"] = {{"warmup", report.latency_warmup},
                     {"timed", report.latency_timed},
                     {"pattern", latency_json(report.pattern_latency)},
                     {"contextual", latency_json(report.contextual_latency)}};
  return j;
}

std::string sweep_report_markdown(const SweepReport& report) {
  std::ostringstream out;
  out << "# Detection sweep\n\n";
  out << "Corpus: " << report.corpus_samples << " samples, " << report.corpus_labels
      << " gold labels.\n\n";
  out << "| mode | entities | min_score | precision | recall | f1 |\n";
  out << "|------|----------|-----------|-----------|--------|----|\n";
  for (const ConfigReport& row : report.rows) {
    out << "| " << detection_mode_name(row.config.mode) << " | "
        << entities_label(row.config.entities) << " | " << fixed3(row.config.min_score) << " | "
        << fixed3(row.micro.precision()) << " | " << fixed3(row.micro.recall()) << " | "
        << fixed3(row.micro.f1()) << " |\n";
  }
  out << "\nRecall concentration (contextual, min_score 0.4): "
      << entities_label(report.top3_entities) << " recall " << fixed3(report.top3_recall)
      << " vs full-set recall " << fixed3(report.full_recall) << ", ratio "
      << fixed3(report.top3_recall_ratio) << ".\n";
  out << "\n| mode | p50 ms | p95 ms | p99 ms |\n";
  out << "|------|--------|--------|--------|\n";
  out << "| pattern | " << fixed3(report.pattern_latency.p50_ms) << " | "
      << fixed3(report.pattern_latency.p95_ms) << " | " << fixed3(report.pattern_latency.p99_ms)
      << " |\n";
  out << "| contextual | " << fixed3(report.contextual_latency.p50_ms) << " | "
      << fixed3(report.contextual_latency.p95_ms) << " | "
      << fixed3(report.contextual_latency.p99_ms) << " |\n";
  return out.str();
}

void write_sweep_report(const SweepReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path dir(out_dir);

  std::ofstream json_file(dir / "sweep_report.json", std::ios::binary | std::ios::trunc);
  if (!json_file)
    throw std::runtime_error("cannot open " + (dir / "sweep_report.json").string());
  json_file << sweep_report_json(report).dump(2) << '\n';
  json_file.flush();
  if (!json_file)
    throw std::runtime_error("write failed: " + (dir / "sweep_report.json").string());

  std::ofstream md_file(dir / "sweep_report.md", std::ios::binary | std::ios::trunc);
  if (!md_file) throw std::runtime_error("cannot open " + (dir / "sweep_report.md").string());
  md_file << sweep_report_markdown(report);
  md_file.flush();
  if (!md_file)
    throw std::runtime_error("write failed: " + (dir / "sweep_report.md").string());
}

}  // namespace x402guard::eval
