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

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "x402guard/corpus_gen.hpp"
#include "x402guard/pii_engine.hpp"

using namespace x402guard;
using namespace x402guard::corpus;

namespace {

const std::vector<CorpusSample>& default_corpus() {
  static const std::vector<CorpusSample> samples = generate(GeneratorConfig::defaults());
  return samples;
}

std::map<std::string, std::size_t> count_by(
    const std::vector<CorpusSample>& samples,
    const std::function<std::string(const CorpusSample&)>& key) {
  std::map<std::string, std::size_t> counts;
  for (const CorpusSample& s : samples) counts[key(s)] += 1;
  return counts;
}

const std::string& field_text(const CorpusSample& s, Field f) {
  if (f == Field::RESOURCE_URL) return s.triple.resource_url;
  if (f == Field::DESCRIPTION) return s.triple.description;
  return s.triple.reason;
}

std::map<std::string, std::size_t> form_counts(const std::vector<CorpusSample>& samples) {
  std::map<std::string, std::size_t> counts;
  for (const CorpusSample& s : samples)
    for (const GoldLabel& l : s.labels) counts[l.surface_form_id] += 1;
  return counts;
}

std::size_t entity_total(const std::vector<CorpusSample>& samples, EntityType t) {
  std::size_t n = 0;
  for (const CorpusSample& s : samples)
    for (const GoldLabel& l : s.labels)
      if (l.entity_type == t) ++n;
  return n;
}

bool overlaps(std::size_t a1, std::size_t a2, std::size_t b1, std::size_t b2) {
  return a1 < b2 && b1 < a2;
}

}  // namespace

TEST_CASE("category and positive counts hit the configured quotas") {
  const auto& samples = default_corpus();
  REQUIRE(samples.size() == 2000);

  auto categories = count_by(samples, [](const CorpusSample& s) { return s.category; });
  CHECK(categories["ai_inference"] == 360);
  CHECK(categories["data_access"] == 360);
  CHECK(categories["medical"] == 300);
  CHECK(categories["compute"] == 260);
  CHECK(categories["media"] == 260);
  CHECK(categories["financial"] == 260);
  CHECK(categories["generic"] == 200);

  std::map<std::string, std::size_t> positives;
  std::size_t total_positive = 0, total_labels = 0;
  for (const CorpusSample& s : samples) {
    if (!s.labels.empty()) {
      positives[s.category] += 1;
      ++total_positive;
    }
    total_labels += s.labels.size();
  }
  CHECK(positives["ai_inference"] == 130);
  CHECK(positives["data_access"] == 130);
  CHECK(positives["medical"] == 108);
  CHECK(positives["compute"] == 94);
  CHECK(positives["media"] == 94);
  CHECK(positives["financial"] == 94);
  CHECK(positives["generic"] == 72);
  CHECK(total_positive == 722);
  CHECK(total_labels == 876);
}

TEST_CASE("entity mix stays inside the published tolerances") {
  const auto& samples = default_corpus();
  const double total = 876.0;

  std::size_t email = entity_total(samples, EntityType::EMAIL_ADDRESS);
  std::size_t person = entity_total(samples, EntityType::PERSON);
  std::size_t phone = entity_total(samples, EntityType::PHONE_NUMBER);
  std::size_t ssn = entity_total(samples, EntityType::US_SSN);
  std::size_t card = entity_total(samples, EntityType::CREDIT_CARD);
  std::size_t iban = entity_total(samples, EntityType::IBAN_CODE);

  CHECK(email == 311);
  CHECK(person == 317);
  CHECK(phone == 35);
  CHECK(ssn == 86);
  CHECK(card == 29);
  CHECK(iban == 98);

  // Target shares with +/- 1.5pp headroom.
  CHECK(std::abs(100.0 * email / total - 35.8) < 1.5);
  CHECK(std::abs(100.0 * person / total - 36.7) < 1.5);
  CHECK(std::abs(100.0 * phone / total - 3.7) < 1.5);
  CHECK(std::abs(100.0 * ssn / total - 9.7) < 1.5);
  CHECK(std::abs(100.0 * card / total - 3.2) < 1.5);
  CHECK(std::abs(100.0 * iban / total - 11.0) < 1.5);

  double email_person_share = 100.0 * (email + person) / total;
  CHECK(email_person_share > 70.5);
  CHECK(email_person_share < 74.5);

  std::size_t url_labels = 0;
  for (const CorpusSample& s : samples)
    for (const GoldLabel& l : s.labels)
      if (l.field == Field::RESOURCE_URL) ++url_labels;
  CHECK(url_labels == 397);
  double url_share = 100.0 * url_labels / total;
  CHECK(url_share > 43.3);
  CHECK(url_share < 47.3);
}

TEST_CASE("surface form quotas follow the configured weights") {
  auto counts = form_counts(default_corpus());

  CHECK(counts["email_bare"] == 155);
  CHECK(counts["email_pct40"] == 78);
  CHECK(counts["email_query"] == 78);

  CHECK(counts["full_john_smith"] == 35);
  CHECK(counts["full_maria_garcia"] == 35);
  CHECK(counts["full_wei_chen"] == 35);
  CHECK(counts["full_aisha_patel"] == 35);
  CHECK(counts["full_lars_eriksson"] == 35);
  CHECK(counts["slug_hyphen_john_smith"] == 29);
  CHECK(counts["slug_hyphen_maria_garcia"] == 28);
  CHECK(counts["slug_underscore_john_smith"] == 25);
  CHECK(counts["abbrev_j_smith"] == 22);
  CHECK(counts["last_first_garcia_maria"] == 19);
  CHECK(counts["first_only_aisha"] == 19);

  CHECK(counts["phone_dashed"] == 10);
  CHECK(counts["phone_paren"] == 9);
  CHECK(counts["phone_dotted"] == 8);
  CHECK(counts["phone_compact_intl"] == 8);

  CHECK(counts["ssn_dashed"] == 60);
  CHECK(counts["ssn_compact"] == 26);
  CHECK(counts["cc_bare16"] == 29);
  CHECK(counts["iban_de"] == 49);
  CHECK(counts["iban_gb"] == 49);
}

TEST_CASE("labels point at the exact injected surface") {
  GeneratorConfig config = GeneratorConfig::defaults();
  const auto& samples = default_corpus();

  std::map<std::string, const SurfaceForm*> forms;
  for (const SurfaceForm& f : config.surface_forms) forms[f.id] = &f;
  std::map<std::string, EntitySet> allowed;
  for (const CategoryConfig& cat : config.categories) {
    EntitySet set;
    for (const auto& [type, weight] : cat.entity_weights) set.add(type);
    allowed[cat.name] = set;
  }

  for (const CorpusSample& s : samples) {
    REQUIRE(s.labels.size() <= 2);
    std::set<Field> fields;
    for (const GoldLabel& l : s.labels) {
      CHECK(fields.insert(l.field).second);  // one label per field
      CHECK(allowed[s.category].contains(l.entity_type));

      const std::string& text = field_text(s, l.field);
      REQUIRE(l.end <= text.size());
      REQUIRE(l.start < l.end);
      std::string slice = text.substr(l.start, l.end - l.start);

      REQUIRE(forms.count(l.surface_form_id) == 1);
      const SurfaceForm* form = forms[l.surface_form_id];
      CHECK(form->entity_type == l.entity_type);
      bool known_value = std::find(form->values.begin(), form->values.end(), slice) !=
                         form->values.end();
      CHECK(known_value);

      if (form->placement == Placement::URL_PATH ||
          form->placement == Placement::URL_EMAIL_QUERY)
        CHECK(l.field == Field::RESOURCE_URL);
      if (form->placement == Placement::TEXT) CHECK(l.field != Field::RESOURCE_URL);
    }
  }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  GeneratorConfig config = GeneratorConfig::defaults();
  auto first = generate(config);
  auto second = generate(config);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i)
    CHECK(sample_json_line(first[i]) == sample_json_line(second[i]));

  config.seed = 43;
  auto other = generate(config);
  bool any_diff = false;
  for (std::size_t i = 0; i < first.size(); ++i)
    if (sample_json_line(first[i]) != sample_json_line(other[i])) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("manifest matches the corpus and flags tampering") {
  GeneratorConfig config = GeneratorConfig::defaults();
  const auto& samples = default_corpus();
  auto meta = build_meta(config, samples);

  CHECK(meta["pii_positive_total"] == 722);
  CHECK(meta["total_labels"] == 876);
  CHECK(meta["entity_counts"]["EMAIL_ADDRESS"] == 311);
  CHECK(meta["field_counts"]["resource_url"] == 397);
  double noncompact = meta["phone_noncompact_fraction"].get<double>();
  CHECK(noncompact == doctest::Approx(27.0 / 35.0).epsilon(1e-12));

  CHECK_NOTHROW(check_meta(meta, config, samples));

  auto tampered = meta;
  tampered["total_labels"] = 875;
  CHECK_THROWS_AS(check_meta(tampered, config, samples), std::runtime_error);
  auto missing = meta;
  missing.erase("entity_counts");
  CHECK_THROWS_AS(check_meta(missing, config, samples), std::runtime_error);
}

TEST_CASE("jsonl round-trip preserves every sample") {
  GeneratorConfig config = GeneratorConfig::defaults();
  const auto& samples = default_corpus();

  auto dir = std::filesystem::temp_directory_path() / "corpus_gen_roundtrip";
  std::filesystem::remove_all(dir);
  write_corpus(config, samples, dir.string());

  auto loaded = load_corpus((dir / "corpus.jsonl").string());
  REQUIRE(loaded.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(loaded[i].id == samples[i].id);
    CHECK(loaded[i].category == samples[i].category);
    CHECK(loaded[i].triple.resource_url == samples[i].triple.resource_url);
    CHECK(loaded[i].triple.description == samples[i].triple.description);
    CHECK(loaded[i].triple.reason == samples[i].triple.reason);
    REQUIRE(loaded[i].labels.size() == samples[i].labels.size());
    for (std::size_t k = 0; k < samples[i].labels.size(); ++k)
      CHECK(loaded[i].labels[k] == samples[i].labels[k]);
  }
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(sample_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(sample_from_json(R"({"id": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), std::runtime_error);
}

// Every detection, in both modes at the lowest threshold, must sit on a gold
// label of its own type. Template text contributing even one stray hit would
// poison precision measurements downstream, so this is pinned to zero.
TEST_CASE("template text produces no stray detections in either mode") {
  const auto& samples = default_corpus();
  PiiEngine pattern({DetectionMode::PATTERN, EntitySet::all(), 0.0});
  PiiEngine contextual({DetectionMode::CONTEXTUAL, EntitySet::all(), 0.0});

  for (const PiiEngine* engine : {&pattern, &contextual}) {
    for (const CorpusSample& s : samples) {
      for (Field f : {Field::RESOURCE_URL, Field::DESCRIPTION, Field::REASON}) {
        const std::string& text = field_text(s, f);
        for (const Detection& d : engine->analyze(text)) {
          bool on_gold = false;
          for (const GoldLabel& l : s.labels)
            if (l.field == f && l.entity_type == d.entity_type &&
                overlaps(d.start, d.end, l.start, l.end))
              on_gold = true;
          if (!on_gold) {
            CAPTURE(text);
            CAPTURE(d.start);
            CAPTURE(static_cast<int>(d.entity_type));
          }
          REQUIRE(on_gold);
        }
      }
    }
  }
}

TEST_CASE("shape recognisers recover every shape-visible gold exactly") {
  const auto& samples = default_corpus();
  PiiEngine pattern({DetectionMode::PATTERN, EntitySet::all(), 0.4});

  std::size_t matched_phone = 0;
  for (const CorpusSample& s : samples) {
    for (const GoldLabel& l : s.labels) {
      const std::string& text = field_text(s, l.field);
      bool exact = false;
      for (const Detection& d : pattern.analyze(text))
        if (d.entity_type == l.entity_type && d.start == l.start && d.end == l.end) exact = true;

      if (l.entity_type == EntityType::PERSON) {
        CHECK_FALSE(exact);  // shapes never claim names
      } else if (l.surface_form_id == "phone_compact_intl") {
        CHECK_FALSE(exact);  // compact intl needs the contextual pass
      } else if (l.entity_type == EntityType::PHONE_NUMBER) {
        if (exact) ++matched_phone;
        CHECK(exact);
      } else {
        CHECK(exact);  // email, ssn, card, iban
      }
    }
  }
  CHECK(matched_phone == 27);
}

TEST_CASE("contextual pass sees full names in text but not url slugs") {
  const auto& samples = default_corpus();
  PiiEngine contextual({DetectionMode::CONTEXTUAL, EntitySet::all(), 0.4});

  std::size_t full_matched = 0, full_total = 0;
  std::size_t slug_matched = 0, slug_total = 0;
  std::size_t desc_reason_matched = 0;
  for (const CorpusSample& s : samples) {
    for (const GoldLabel& l : s.labels) {
      if (l.entity_type != EntityType::PERSON) continue;
      const std::string& text = field_text(s, l.field);
      bool hit = false;
      for (const Detection& d : contextual.analyze(text))
        if (d.entity_type == EntityType::PERSON && overlaps(d.start, d.end, l.start, l.end))
          hit = true;

      bool full_name = l.surface_form_id.rfind("full_", 0) == 0;
      if (full_name) {
        ++full_total;
        if (hit) ++full_matched;
        if (hit && l.field != Field::RESOURCE_URL) ++desc_reason_matched;
      } else {
        ++slug_total;
        if (hit) ++slug_matched;
      }
    }
  }
  CHECK(full_total == 175);
  CHECK(full_matched == 175);
  CHECK(desc_reason_matched == 175);  // every full name lives in free text
  CHECK(slug_total == 142);
  CHECK(slug_matched == 0);
}

TEST_CASE("compact phones ride the score ladder across thresholds") {
  const auto& samples = default_corpus();
  PiiEngine at_03({DetectionMode::CONTEXTUAL, EntitySet::all(), 0.3});
  PiiEngine at_05({DetectionMode::CONTEXTUAL, EntitySet::all(), 0.5});

  std::size_t hits_03 = 0, hits_05 = 0, phones = 0;
  for (const CorpusSample& s : samples) {
    for (const GoldLabel& l : s.labels) {
      if (l.entity_type != EntityType::PHONE_NUMBER) continue;
      ++phones;
      const std::string& text = field_text(s, l.field);
      for (const Detection& d : at_03.analyze(text))
        if (d.entity_type == l.entity_type && d.start == l.start && d.end == l.end) ++hits_03;
      for (const Detection& d : at_05.analyze(text))
        if (d.entity_type == l.entity_type && d.start == l.start && d.end == l.end) ++hits_05;
    }
  }
  CHECK(phones == 35);
  CHECK(hits_03 == 35);  // compact intl scores 0.45, above 0.3
  CHECK(hits_05 == 27);  // and below 0.5
}

TEST_CASE("largest remainder honours floors, remainders and tie-breaks") {
  std::vector<double> even{1.0, 1.0, 1.0};
  auto counts = largest_remainder(10, even);
  CHECK(counts == std::vector<std::size_t>{4, 3, 3});

  // Equal remainders fall to the smaller floor first.
  std::vector<double> financial{0.75, 0.25};
  CHECK(largest_remainder(114, financial) == std::vector<std::size_t>{85, 29});

  std::vector<double> exact{0.5, 0.5};
  CHECK(largest_remainder(98, exact) == std::vector<std::size_t>{49, 49});

  CHECK_THROWS_AS(largest_remainder(5, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(largest_remainder(5, std::vector<double>{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(largest_remainder(5, std::vector<double>{-1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("config validation rejects broken inputs") {
  GeneratorConfig config = GeneratorConfig::defaults();
  config.n = 0;
  CHECK_THROWS_AS(generate(config), std::invalid_argument);

  config = GeneratorConfig::defaults();
  config.pii_rate = 1.5;
  CHECK_THROWS_AS(generate(config), std::invalid_argument);

  config = GeneratorConfig::defaults();
  config.categories[0].entity_weights = {{EntityType::CREDIT_CARD, -1.0}};
  CHECK_THROWS_AS(generate(config), std::invalid_argument);

  config = GeneratorConfig::defaults();
  config.surface_forms.clear();
  CHECK_THROWS_AS(generate(config), std::invalid_argument);

  config = GeneratorConfig::defaults();
  config.categories[0].templates.url_clean.clear();
  CHECK_THROWS_AS(generate(config), std::invalid_argument);
}

TEST_CASE("small corpora still generate cleanly") {
  GeneratorConfig config = GeneratorConfig::defaults();
  config.n = 25;
  auto samples = generate(config);
  REQUIRE(samples.size() == 25);
  std::size_t labels = 0;
  for (const CorpusSample& s : samples) labels += s.labels.size();
  CHECK(labels > 0);
  auto meta = build_meta(config, samples);
  CHECK_NOTHROW(check_meta(meta, config, samples));
}

TEST_CASE("default corpus generates inside the time budget") {
  auto begin = std::chrono::steady_clock::now();
  auto samples = generate(GeneratorConfig::defaults());
  auto elapsed = std::chrono::steady_clock::now() - begin;
  CHECK(samples.size() == 2000);
  CHECK(std::chrono::duration_cast<std::chrono::seconds>(elapsed).count() < 10);
}
