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

#include "x402guard/pii_engine.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pii_internal.hpp"

// All recognisers are single-pass character scanners. std::regex is avoided
// deliberately: the scrub path sits on the payment hot path and has a
// sub-millisecond tail budget.

namespace x402guard {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_alpha(char c) { return is_lower(c) || is_upper(c); }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }
bool is_word(char c) { return is_alnum(c) || c == '_'; }

char to_lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_email_local_char(char c) {
  return is_alnum(c) || c == '.' || c == '_' || c == '+' || c == '-';
}

bool is_email_domain_char(char c) { return is_alnum(c) || c == '.' || c == '-'; }

// View of the text with every "%40" shown as '@'. Spans found in the view
// are mapped back to original byte offsets through obeg/oend.
struct DecodedView {
  std::string text;
  std::vector<std::size_t> obeg;
  std::vector<std::size_t> oend;
};

DecodedView decode_pct40(std::string_view text) {
  DecodedView v;
  v.text.reserve(text.size());
  v.obeg.reserve(text.size());
  v.oend.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '%' && i + 2 < text.size() && text[i + 1] == '4' && text[i + 2] == '0') {
      v.text.push_back('@');
      v.obeg.push_back(i);
      v.oend.push_back(i + 3);
      i += 3;
    } else {
      v.text.push_back(text[i]);
      v.obeg.push_back(i);
      v.oend.push_back(i + 1);
      ++i;
    }
  }
  return v;
}

bool valid_email_domain(std::string_view d) {
  if (d.empty() || !is_alnum(d.front())) return false;
  std::size_t last_dot = d.rfind('.');
  if (last_dot == std::string_view::npos || last_dot == 0) return false;
  std::string_view tld = d.substr(last_dot + 1);
  if (tld.size() < 2) return false;
  for (char c : tld)
    if (!is_alpha(c)) return false;
  return true;
}

void scan_email(std::string_view original, std::vector<Detection>& out) {
  DecodedView v = decode_pct40(original);
  const std::string& t = v.text;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != '@') continue;
    std::size_t ls = i;
    while (ls > 0 && is_email_local_char(t[ls - 1])) --ls;
    while (ls < i && t[ls] == '.') ++ls;
    if (ls == i || t[i - 1] == '.') continue;
    std::size_t de = i + 1;
    while (de < t.size() && is_email_domain_char(t[de])) ++de;
    while (de > i + 1 && (t[de - 1] == '.' || t[de - 1] == '-')) --de;
    if (de == i + 1) continue;
    std::string_view domain(t.data() + i + 1, de - i - 1);
    if (!valid_email_domain(domain)) continue;
    out.push_back({EntityType::EMAIL_ADDRESS, v.obeg[ls], v.oend[de - 1], kShapeScore, "email"});
    i = de;
  }
}

void scan_digit_runs(std::string_view t, bool want_ssn, bool want_card,
                     std::vector<Detection>& out) {
  for (std::size_t i = 0; i < t.size();) {
    if (!is_digit(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && is_digit(t[j])) ++j;
    std::size_t len = j - i;
    if (want_card && len == 16) {
      double score = luhn_valid(t.substr(i, 16)) ? kChecksumScore : kShapeScore;
      out.push_back({EntityType::CREDIT_CARD, i, j, score, "card16"});
    } else if (want_ssn && len == 9) {
      bool phone_prefixed = i > 0 && t[i - 1] == '+';
      if (!phone_prefixed && detail::ssn_plausible(t.substr(i, 9)))
        out.push_back({EntityType::US_SSN, i, j, kShapeScore, "ssn_compact"});
    }
    i = j;
  }
}

bool digits_at(std::string_view t, std::size_t pos, std::size_t count) {
  if (pos + count > t.size()) return false;
  for (std::size_t k = 0; k < count; ++k)
    if (!is_digit(t[pos + k])) return false;
  return true;
}

void scan_ssn_dashed(std::string_view t, std::vector<Detection>& out) {
  for (std::size_t i = 0; i + 11 <= t.size(); ++i) {
    if (!digits_at(t, i, 3) || t[i + 3] != '-' || !digits_at(t, i + 4, 2) || t[i + 6] != '-' ||
        !digits_at(t, i + 7, 4))
      continue;
    if (i > 0 && (is_digit(t[i - 1]) || t[i - 1] == '-')) continue;
    if (i + 11 < t.size() && (is_digit(t[i + 11]) || t[i + 11] == '-')) continue;
    std::string nine;
    nine.reserve(9);
    for (char c : t.substr(i, 11))
      if (c != '-') nine.push_back(c);
    if (!detail::ssn_plausible(nine)) continue;
    out.push_back({EntityType::US_SSN, i, i + 11, kChecksumScore, "ssn_dashed"});
    i += 10;
  }
}

void scan_iban(std::string_view t, std::vector<Detection>& out) {
  for (std::size_t i = 0; i < t.size();) {
    if (!is_word(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && is_word(t[j])) ++j;
    std::string_view run = t.substr(i, j - i);
    bool shape = run.size() >= 15 && run.size() <= 34 && is_upper(run[0]) && is_upper(run[1]) &&
                 is_digit(run[2]) && is_digit(run[3]);
    if (shape) {
      for (char c : run)
        if (!is_upper(c) && !is_digit(c)) shape = false;
    }
    if (shape) {
      double score = iban_valid(run) ? kChecksumScore : kShapeScore;
      out.push_back({EntityType::IBAN_CODE, i, j, score, "iban"});
    }
    i = j;
  }
}

void scan_phone_dashed(std::string_view t, std::vector<Detection>& out) {
  for (std::size_t i = 0; i + 12 <= t.size(); ++i) {
    if (!digits_at(t, i, 3) || t[i + 3] != '-' || !digits_at(t, i + 4, 3) || t[i + 7] != '-' ||
        !digits_at(t, i + 8, 4))
      continue;
    if (i > 0 && (is_digit(t[i - 1]) || t[i - 1] == '-')) continue;
    if (i + 12 < t.size() && (is_digit(t[i + 12]) || t[i + 12] == '-')) continue;
    out.push_back({EntityType::PHONE_NUMBER, i, i + 12, kShapeScore, "phone_dashed"});
    i += 11;
  }
}

void scan_phone_dotted(std::string_view t, std::vector<Detection>& out) {
  for (std::size_t i = 0; i + 12 <= t.size(); ++i) {
    if (!digits_at(t, i, 3) || t[i + 3] != '.' || !digits_at(t, i + 4, 3) || t[i + 7] != '.' ||
        !digits_at(t, i + 8, 4))
      continue;
    if (i > 0 && (is_digit(t[i - 1]) || t[i - 1] == '.')) continue;
    if (i + 12 < t.size() && is_digit(t[i + 12])) continue;
    out.push_back({EntityType::PHONE_NUMBER, i, i + 12, kShapeScore, "phone_dotted"});
    i += 11;
  }
}

void scan_phone_paren(std::string_view t, std::vector<Detection>& out) {
  for (std::size_t i = 0; i + 13 <= t.size(); ++i) {
    if (t[i] != '(' || !digits_at(t, i + 1, 3) || t[i + 4] != ')') continue;
    std::size_t j = i + 5;
    if (j < t.size() && t[j] == ' ') ++j;
    if (!digits_at(t, j, 3) || j + 3 >= t.size() || t[j + 3] != '-' || !digits_at(t, j + 4, 4))
      continue;
    std::size_t end = j + 8;
    if (end < t.size() && (is_digit(t[end]) || t[end] == '-')) continue;
    out.push_back({EntityType::PHONE_NUMBER, i, end, kShapeScore, "phone_paren"});
    i = end - 1;
  }
}

void scan_phone_compact_intl(std::string_view t, std::vector<Detection>& out) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != '+') continue;
    if (i > 0 && is_digit(t[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < t.size() && is_digit(t[j])) ++j;
    std::size_t len = j - i - 1;
    if (len < 10 || len > 14) continue;
    out.push_back({EntityType::PHONE_NUMBER, i, j, kCompactPhoneScore, "phone_compact"});
    i = j - 1;
  }
}

// Authority ranges of every "scheme://" URL in the text; dotted handles
// inside them are hostname labels, not people.
std::vector<std::pair<std::size_t, std::size_t>> url_authority_ranges(std::string_view t) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t pos = t.find("://"); pos != std::string_view::npos;
       pos = t.find("://", pos + 3)) {
    std::size_t s = pos + 3;
    std::size_t e = s;
    while (e < t.size() && t[e] != '/' && t[e] != '?' && t[e] != '#' && t[e] != ' ') ++e;
    out.emplace_back(s, e);
  }
  return out;
}

void scan_person_bigram(std::string_view t, std::vector<Detection>& out) {
  std::size_t i = 0;
  while (i < t.size()) {
    if (!is_upper(t[i]) || (i > 0 && is_word(t[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < t.size() && is_lower(t[j])) ++j;
    if (j - i < 2 || (j < t.size() && is_word(t[j])) || j >= t.size() || t[j] != ' ') {
      i = j;
      continue;
    }
    std::size_t s2 = j + 1;
    if (s2 >= t.size() || !is_upper(t[s2])) {
      i = j;
      continue;
    }
    std::size_t k = s2 + 1;
    while (k < t.size() && is_lower(t[k])) ++k;
    if (k - s2 < 2 || (k < t.size() && is_word(t[k]))) {
      i = j;
      continue;
    }
    std::string first;
    for (std::size_t p = i; p < j; ++p) first.push_back(to_lower(t[p]));
    if (lexicon::is_first_name(first)) {
      out.push_back({EntityType::PERSON, i, k, kNameHeuristicScore, "person_bigram"});
      i = k;
    } else {
      i = j;
    }
  }
}

void scan_person_dotted(std::string_view t, std::vector<Detection>& out) {
  auto authorities = url_authority_ranges(t);
  auto in_authority = [&](std::size_t s, std::size_t e) {
    for (auto [as, ae] : authorities)
      if (s < ae && as < e) return true;
    return false;
  };
  for (std::size_t i = 0; i < t.size();) {
    if (!is_lower(t[i]) || (i > 0 && (is_word(t[i - 1]) || t[i - 1] == '.'))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && is_lower(t[j])) ++j;
    if (j - i < 2 || j >= t.size() || t[j] != '.') {
      i = j + 1;
      continue;
    }
    std::size_t s2 = j + 1;
    std::size_t k = s2;
    while (k < t.size() && is_lower(t[k])) ++k;
    bool shape = k - s2 >= 2 && (k == t.size() || (!is_word(t[k]) && t[k] != '.'));
    bool email_like =
        k < t.size() && (t[k] == '@' || (t.substr(k).size() >= 3 && t.substr(k, 3) == "%40"));
    if (shape && !email_like && !in_authority(i, k) &&
        lexicon::is_first_name(t.substr(i, j - i))) {
      out.push_back({EntityType::PERSON, i, k, kNameHeuristicScore, "person_dotted"});
    }
    i = k + 1;
  }
}

bool spans_overlap(const Detection& a, const Detection& b) {
  return a.start < b.end && b.start < a.end;
}

void sort_by_position(std::vector<Detection>& dets) {
  std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return static_cast<int>(a.entity_type) < static_cast<int>(b.entity_type);
  });
}

// Winner preference shared by both overlap resolvers.
bool prefer(const Detection& a, const Detection& b) {
  std::size_t wa = a.end - a.start, wb = b.end - b.start;
  if (wa != wb) return wa > wb;
  if (a.score != b.score) return a.score > b.score;
  if (a.start != b.start) return a.start < b.start;
  return static_cast<int>(a.entity_type) < static_cast<int>(b.entity_type);
}

}  // namespace

std::string_view detection_mode_name(DetectionMode m) {
  return m == DetectionMode::PATTERN ? "pattern" : "contextual";
}

std::vector<Detection> merge_same_type(std::vector<Detection> detections) {
  std::sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
    if (a.entity_type != b.entity_type)
      return static_cast<int>(a.entity_type) < static_cast<int>(b.entity_type);
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });
  std::vector<Detection> out;
  std::size_t i = 0;
  while (i < detections.size()) {
    // Sweep the transitive overlap cluster for this entity type.
    Detection winner = detections[i];
    double max_score = winner.score;
    std::size_t cluster_end = winner.end;
    std::size_t j = i + 1;
    while (j < detections.size() && detections[j].entity_type == winner.entity_type &&
           detections[j].start < cluster_end) {
      cluster_end = std::max(cluster_end, detections[j].end);
      max_score = std::max(max_score, detections[j].score);
      if (prefer(detections[j], winner)) winner = detections[j];
      ++j;
    }
    winner.score = max_score;
    out.push_back(winner);
    i = j;
  }
  sort_by_position(out);
  return out;
}

std::vector<Detection> resolve_overlaps(std::vector<Detection> detections) {
  std::stable_sort(detections.begin(), detections.end(), prefer);
  std::vector<Detection> kept;
  for (const Detection& d : detections) {
    bool conflict = false;
    for (const Detection& k : kept)
      if (spans_overlap(d, k)) {
        conflict = true;
        break;
      }
    if (!conflict) kept.push_back(d);
  }
  sort_by_position(kept);
  return kept;
}

PiiEngine::PiiEngine(DetectorConfig config) : config_(config) {
  if (config_.entities.empty())
    throw std::invalid_argument("PiiEngine: entity set must not be empty");
  if (!(config_.min_score >= 0.0 && config_.min_score <= 1.0))
    throw std::invalid_argument("PiiEngine: min_score must be within [0, 1]");
}

std::vector<Detection> PiiEngine::analyze(std::string_view text) const {
  std::vector<Detection> raw;
  const EntitySet& want = config_.entities;
  bool contextual = config_.mode == DetectionMode::CONTEXTUAL;

  if (want.contains(EntityType::EMAIL_ADDRESS)) scan_email(text, raw);
  if (want.contains(EntityType::US_SSN) || want.contains(EntityType::CREDIT_CARD))
    scan_digit_runs(text, want.contains(EntityType::US_SSN),
                    want.contains(EntityType::CREDIT_CARD), raw);
  if (want.contains(EntityType::US_SSN)) scan_ssn_dashed(text, raw);
  if (want.contains(EntityType::IBAN_CODE)) scan_iban(text, raw);
  if (want.contains(EntityType::PHONE_NUMBER)) {
    scan_phone_dashed(text, raw);
    scan_phone_dotted(text, raw);
    scan_phone_paren(text, raw);
    if (contextual) scan_phone_compact_intl(text, raw);
  }
  if (contextual && want.contains(EntityType::PERSON)) {
    scan_person_bigram(text, raw);
    scan_person_dotted(text, raw);
  }

  // Merge before thresholding so a low threshold can never see a span that
  // a higher threshold keeps in a different shape.
  std::vector<Detection> merged = merge_same_type(std::move(raw));
  std::vector<Detection> filtered;
  for (Detection& d : merged)
    if (d.score >= config_.min_score) filtered.push_back(std::move(d));
  std::vector<Detection> resolved = resolve_overlaps(std::move(filtered));
  sort_by_position(resolved);
  return resolved;
}

RedactionResult PiiEngine::redact(std::string_view text, std::span<const Detection> detections) {
  std::size_t prev_end = 0;
  for (const Detection& d : detections) {
    if (d.start >= d.end) throw SpanError("redact: empty or inverted span");
    if (d.end > text.size()) throw SpanError("redact: span out of bounds");
    if (d.start < prev_end) throw SpanError("redact: spans must be sorted and disjoint");
    prev_end = d.end;
  }
  RedactionResult result;
  result.text.reserve(text.size());
  std::size_t cursor = 0;
  for (const Detection& d : detections) {
    result.text.append(text.substr(cursor, d.start - cursor));
    result.text.append(placeholder_for(d.entity_type));
    result.applied.push_back(d);
    ++result.redaction_count;
    cursor = d.end;
  }
  result.text.append(text.substr(cursor));
  return result;
}

RedactionResult PiiEngine::scrub(std::string_view text) const {
  std::vector<Detection> dets = analyze(text);
  return redact(text, dets);
}

}  // namespace x402guard
