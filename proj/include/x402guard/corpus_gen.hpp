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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "x402guard/client.hpp"
#include "x402guard/entity.hpp"

namespace x402guard::corpus {

enum class Field { RESOURCE_URL, DESCRIPTION, REASON };

std::string_view field_name(Field f);
std::optional<Field> parse_field(std::string_view name);

// Where a surface form can be injected. URL_PATH and URL_EMAIL_QUERY forms
// only make sense inside a resource_url; TEXT forms only in free text;
// EITHER forms fill whichever side the url-share target needs.
enum class Placement { URL_PATH, URL_EMAIL_QUERY, TEXT, EITHER };

struct SurfaceForm {
  std::string id;
  EntityType entity_type;
  Placement placement = Placement::TEXT;
  double weight = 0.0;
  std::vector<std::string> values;  // rendered surface strings, drawn per label
};

// Parameterised template strings. "{id}" takes the sample id; slot pools
// carry exactly one "{}" for the injected surface, clean pools carry none.
struct CategoryTemplates {
  std::vector<std::string> url_clean;
  std::vector<std::string> url_path_slot;
  std::vector<std::string> url_query_slot;
  std::vector<std::string> url_email_query_slot;
  std::vector<std::string> desc_clean;
  std::vector<std::string> desc_slot;
  std::vector<std::string> reason_clean;
  std::vector<std::string> reason_slot;
};

struct CategoryConfig {
  std::string name;
  double weight = 0.0;
  // Allowed entity types and their within-category label shares.
  std::vector<std::pair<EntityType, double>> entity_weights;
  CategoryTemplates templates;
};

struct GeneratorConfig {
  std::uint64_t seed = 42;
  std::size_t n = 2000;
  double pii_rate = 0.36;
  // Share of PII-positive samples that carry a second labeled entity.
  // The default reconciles the 722 positive samples with ~875 labels.
  double extra_entity_rate = 875.0 / 722.0 - 1.0;
  // Target share of labels injected into resource_url.
  double url_share = 0.453;
  std::vector<CategoryConfig> categories;
  std::vector<SurfaceForm> surface_forms;

  static GeneratorConfig defaults();
};

// Authored building blocks behind GeneratorConfig::defaults().
std::vector<CategoryConfig> default_categories();
std::vector<SurfaceForm> default_surface_forms();

struct GoldLabel {
  Field field = Field::RESOURCE_URL;
  EntityType entity_type = EntityType::EMAIL_ADDRESS;
  std::size_t start = 0;  // character offsets into the named field, [start, end)
  std::size_t end = 0;
  std::string surface_form_id;

  bool operator==(const GoldLabel&) const = default;
};

struct CorpusSample {
  std::uint64_t id = 0;
  std::string category;
  MetadataTriple triple;
  std::vector<GoldLabel> labels;
};

// Deterministic: one seeded generator drives every draw in a fixed order,
// so identical configs give byte-identical corpora.
// Throws std::invalid_argument on inconsistent config.
std::vector<CorpusSample> generate(const GeneratorConfig& config);

// Per-type counts by largest remainder: floors first, then one extra per
// largest fractional part (ties to the smaller floor, then lower index).
std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights);

// Manifest over the generated corpus: counts per category/entity/field/form
// plus the config knobs the counts came from.
nlohmann::ordered_json build_meta(const GeneratorConfig& config,
                                  std::span<const CorpusSample> samples);

// Recomputes the manifest from the samples and compares. Throws
// std::runtime_error naming the first mismatching key.
void check_meta(const nlohmann::json& meta, const GeneratorConfig& config,
                std::span<const CorpusSample> samples);

std::string sample_json_line(const CorpusSample& sample);
CorpusSample sample_from_json(std::string_view line);

// Writes corpus.jsonl and corpus_meta.json under out_dir (created if absent).
void write_corpus(const GeneratorConfig& config, std::span<const CorpusSample> samples,
                  const std::string& out_dir);

std::vector<CorpusSample> load_corpus(const std::string& jsonl_path);

}  // namespace x402guard::corpus
