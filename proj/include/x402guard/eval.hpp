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

#include <array>
#include <chrono>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "x402guard/corpus_gen.hpp"
#include "x402guard/entity.hpp"
#include "x402guard/pii_engine.hpp"

namespace x402guard::eval {

struct EvalMetrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  // Degenerate denominators score 0, not NaN: an engine that finds nothing
  // earns nothing.
  double precision() const;
  double recall() const;
  double f1() const;

  EvalMetrics& operator+=(const EvalMetrics& other);
};

// Maximum matching between prediction and gold spans (half-open, same
// field, same type; the caller pre-filters). A prediction pairs with a gold
// it overlaps; candidates are probed by larger overlap, then earlier gold
// start, and assignments are re-routed when that frees a better pairing, so
// the result is a true maximum, not a first-come greedy.
std::size_t match_spans(std::span<const std::pair<std::size_t, std::size_t>> predictions,
                        std::span<const std::pair<std::size_t, std::size_t>> golds);

struct ConfigReport {
  DetectorConfig config;
  std::array<EvalMetrics, kEntityTypeCount> per_type{};  // subset types only
  EvalMetrics micro;  // pooled counts over the configured subset
};

// Scores one detector configuration over the corpus, per (sample, field).
// Gold labels outside config.entities are ignored.
ConfigReport evaluate(const DetectorConfig& config,
                      std::span<const corpus::CorpusSample> samples);

// The fixed threshold the shape-only rows run at. Shape scores sit at 0.85
// and 1.0, so any threshold at or below 0.85 measures the same detector.
inline constexpr double kPatternRowScore = 0.4;

inline constexpr std::array<double, 5> kContextualScores{0.3, 0.4, 0.5, 0.6, 0.7};

// 42 rows: each mode covers the six single-entity views plus "all";
// contextual rows repeat across the threshold ladder.
std::vector<DetectorConfig> sweep_grid();

struct LatencyStats {
  std::vector<double> samples_ms;

  // Nearest-rank percentile over the sorted samples. Throws
  // std::invalid_argument when empty or p is outside (0, 100].
  double percentile(double p) const;
};

using ClockFn = std::function<std::chrono::steady_clock::time_point()>;

// Analyzes one sample's three fields per iteration, cycling through the
// corpus: warmup iterations are discarded, timed iterations are kept.
// The clock is injectable so the statistics stay testable.
LatencyStats measure_latency(const DetectorConfig& config,
                             std::span<const corpus::CorpusSample> samples,
                             std::size_t warmup = 50, std::size_t timed = 200,
                             ClockFn clock = {});

struct ModeLatency {
  double p50_ms = 0;
  double p95_ms = 0;
  double p99_ms = 0;
};

struct SweepReport {
  std::vector<ConfigReport> rows;
  // Recall concentration: micro recall over the three highest-volume types
  // against micro recall over everything, both contextual at 0.4.
  EntitySet top3_entities;
  double top3_recall = 0;
  double full_recall = 0;
  double top3_recall_ratio = 0;
  ModeLatency pattern_latency;
  ModeLatency contextual_latency;
  std::size_t latency_warmup = 0;
  std::size_t latency_timed = 0;
  std::size_t corpus_samples = 0;
  std::size_t corpus_labels = 0;
};

SweepReport run_sweep(std::span<const corpus::CorpusSample> samples);

nlohmann::ordered_json sweep_report_json(const SweepReport& report);
std::string sweep_report_markdown(const SweepReport& report);

// Writes sweep_report.json and sweep_report.md under out_dir.
void write_sweep_report(const SweepReport& report, const std::string& out_dir);

}  // namespace x402guard::eval
