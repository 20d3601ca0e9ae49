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

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "x402guard/entity.hpp"

namespace x402guard {

// PATTERN runs the shape recognisers only. CONTEXTUAL runs those plus the
// heuristics (name bigrams, dotted handles, compact international phones).
enum class DetectionMode { PATTERN, CONTEXTUAL };

std::string_view detection_mode_name(DetectionMode m);  // "pattern" / "contextual"

struct DetectorConfig {
  DetectionMode mode = DetectionMode::PATTERN;
  EntitySet entities = EntitySet::all();
  double min_score = 0.4;
};

// Recogniser scores. Shape matches sit at 0.85 and are promoted to 1.0 only
// by a passing checksum (Luhn, IBAN mod-97) or the dashed SSN form. The
// heuristics sit below the shape band so thresholds can separate them.
inline constexpr double kShapeScore = 0.85;
inline constexpr double kChecksumScore = 1.0;
inline constexpr double kNameHeuristicScore = 0.6;
inline constexpr double kCompactPhoneScore = 0.45;

struct SpanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RedactionResult {
  std::string text;
  std::vector<Detection> applied;  // offsets refer to the original text
  int redaction_count = 0;
};

// Luhn checksum over 13..19 digits. Non-digit input or a length outside that
// range is a caller bug, not a "false": throws std::invalid_argument.
bool luhn_valid(std::string_view digits);

// Coarse IBAN shape ([A-Z]{2}[0-9]{2}[A-Z0-9]{11,30}) plus ISO 7064 mod-97.
// Malformed candidates return false.
bool iban_valid(std::string_view candidate);

// Same-type overlap merge: widest span wins, ties by higher score then
// earlier start; the survivor carries the cluster's max score.
std::vector<Detection> merge_same_type(std::vector<Detection> detections);

// Cross-type conflict resolution for redaction: keep widest, then higher
// score, then earlier start; drop anything overlapping a kept span.
std::vector<Detection> resolve_overlaps(std::vector<Detection> detections);

class PiiEngine {
 public:
  // Throws std::invalid_argument on an empty entity set or min_score
  // outside [0, 1].
  explicit PiiEngine(DetectorConfig config);

  const DetectorConfig& config() const { return config_; }

  // Detections of the configured types with score >= min_score, same-type
  // overlaps merged, sorted by start offset. Stateless and thread-safe.
  std::vector<Detection> analyze(std::string_view text) const;

  // Replaces each span with "<TYPE>". Detections must be sorted,
  // non-overlapping and in-bounds; anything else throws SpanError.
  static RedactionResult redact(std::string_view text, std::span<const Detection> detections);

  // analyze + cross-type resolution + redact in one step.
  RedactionResult scrub(std::string_view text) const;

 private:
  DetectorConfig config_;
};

namespace lexicon {
// Lowercase given-name lexicon gating the PERSON heuristics.
bool is_first_name(std::string_view lowercase_token);
}  // namespace lexicon

}  // namespace x402guard
