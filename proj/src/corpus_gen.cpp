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

#include "x402guard/corpus_gen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "x402guard/util/rng.hpp"

namespace x402guard::corpus {

std::string_view field_name(Field f) {
  switch (f) {
    case Field::RESOURCE_URL: return "resource_url";
    case Field::DESCRIPTION: return "description";
    case Field::REASON: return "reason";
  }
  return "resource_url";
}

std::optional<Field> parse_field(std::string_view name) {
  if (name == "resource_url") return Field::RESOURCE_URL;
  if (name == "description") return Field::DESCRIPTION;
  if (name == "reason") return Field::REASON;
  return std::nullopt;
}

std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("largest_remainder: no weights");
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw std::invalid_argument("largest_remainder: negative weight");
    sum += w;
  }
  if (!(sum > 0)) throw std::invalid_argument("largest_remainder: zero total weight");

  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(exact);
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    if (counts[a] != counts[b]) return counts[a] < counts[b];
    return a < b;
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) counts[order[k % order.size()]] += 1;
  return counts;
}

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig config;
  config.categories = default_categories();
  config.surface_forms = default_surface_forms();
  return config;
}

namespace {

bool url_mandatory(Placement p) {
  return p == Placement::URL_PATH || p == Placement::URL_EMAIL_QUERY;
}

// One planned injection: which form goes into which field of a sample.
struct Slot {
  std::size_t form_ix = 0;
  std::optional<Field> field;
};

void validate(const GeneratorConfig& config) {
  if (config.n == 0) throw std::invalid_argument("corpus config: n must be positive");
  if (!(config.pii_rate >= 0 && config.pii_rate <= 1))
    throw std::invalid_argument("corpus config: pii_rate outside [0, 1]");
  if (!(config.extra_entity_rate >= 0 && config.extra_entity_rate <= 1))
    throw std::invalid_argument("corpus config: extra_entity_rate outside [0, 1]");
  if (!(config.url_share >= 0 && config.url_share <= 1))
    throw std::invalid_argument("corpus config: url_share outside [0, 1]");
  if (config.categories.empty()) throw std::invalid_argument("corpus config: no categories");

  std::vector<std::string_view> ids;
  for (const SurfaceForm& form : config.surface_forms) {
    if (form.id.empty()) throw std::invalid_argument("corpus config: surface form without id");
    if (form.values.empty())
      throw std::invalid_argument("corpus config: surface form '" + form.id + "' has no values");
    if (!(form.weight >= 0))
      throw std::invalid_argument("corpus config: surface form '" + form.id +
                                  "' has negative weight");
    ids.push_back(form.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw std::invalid_argument("corpus config: duplicate surface form id");

  std::vector<std::string_view> names;
  for (const CategoryConfig& cat : config.categories) {
    if (cat.name.empty()) throw std::invalid_argument("corpus config: category without name");
    names.push_back(cat.name);
    if (!(cat.weight >= 0))
      throw std::invalid_argument("corpus config: category '" + cat.name + "' negative weight");
    if (cat.entity_weights.empty())
      throw std::invalid_argument("corpus config: category '" + cat.name + "' has no entities");
    if (cat.templates.url_clean.empty() || cat.templates.desc_clean.empty() ||
        cat.templates.reason_clean.empty())
      throw std::invalid_argument("corpus config: category '" + cat.name +
                                  "' is missing clean templates");
    for (const auto& [type, weight] : cat.entity_weights) {
      if (!(weight >= 0))
        throw std::invalid_argument("corpus config: category '" + cat.name +
                                    "' negative entity weight");
      bool has_form = false;
      for (const SurfaceForm& form : config.surface_forms)
        if (form.entity_type == type && form.weight > 0) has_form = true;
      if (!has_form)
        throw std::invalid_argument("corpus config: no surface form for " +
                                    std::string(entity_type_name(type)) + " used by category '" +
                                    cat.name + "'");
    }
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end())
    throw std::invalid_argument("corpus config: duplicate category name");
}

std::string substitute_id(std::string_view tmpl, std::uint64_t id) {
  std::string out;
  out.reserve(tmpl.size());
  std::string id_str = std::to_string(id);
  std::size_t pos = 0;
  for (;;) {
    std::size_t hit = tmpl.find("{id}", pos);
    if (hit == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      return out;
    }
    out.append(tmpl.substr(pos, hit - pos));
    out.append(id_str);
    pos = hit + 4;
  }
}

std::string render_clean(std::string_view tmpl, std::uint64_t id) {
  std::string text = substitute_id(tmpl, id);
  if (text.find("{}") != std::string::npos)
    throw std::logic_error("corpus template: clean template carries a slot: " + text);
  return text;
}

// Returns the rendered text and the slot offset of the injected value.
std::pair<std::string, std::size_t> render_slot(std::string_view tmpl, std::uint64_t id,
                                                std::string_view value) {
  std::string text = substitute_id(tmpl, id);
  std::size_t slot = text.find("{}");
  if (slot == std::string::npos || text.find("{}", slot + 2) != std::string::npos)
    throw std::logic_error("corpus template: slot template needs exactly one slot: " + text);
  text.replace(slot, 2, value);
  return {text, slot};
}

const std::vector<std::string>& slot_pool_for(const CategoryTemplates& templates, Placement p,
                                              const std::string& category) {
  const std::vector<std::string>* pool = nullptr;
  switch (p) {
    case Placement::URL_PATH: pool = &templates.url_path_slot; break;
    case Placement::URL_EMAIL_QUERY: pool = &templates.url_email_query_slot; break;
    case Placement::EITHER: pool = &templates.url_query_slot; break;
    case Placement::TEXT: pool = nullptr; break;
  }
  if (pool == nullptr || pool->empty())
    throw std::runtime_error("corpus config: category '" + category +
                             "' has no url slot templates for the drawn form");
  return *pool;
}

}  // namespace

std::vector<CorpusSample> generate(const GeneratorConfig& config) {
  validate(config);
  SeededRng rng(config.seed);
  const std::size_t cat_count = config.categories.size();

  // Category per sample.
  std::vector<double> cat_weights;
  cat_weights.reserve(cat_count);
  for (const CategoryConfig& cat : config.categories) cat_weights.push_back(cat.weight);
  std::vector<std::size_t> cat_counts = largest_remainder(config.n, cat_weights);
  std::vector<std::size_t> cat_of;
  cat_of.reserve(config.n);
  for (std::size_t ci = 0; ci < cat_count; ++ci)
    cat_of.insert(cat_of.end(), cat_counts[ci], ci);
  rng.shuffle(cat_of);

  // Per category: which samples carry labels and which entity types they get.
  std::vector<std::vector<std::size_t>> members(cat_count);
  for (std::size_t s = 0; s < config.n; ++s) members[cat_of[s]].push_back(s);

  std::vector<std::vector<std::size_t>> positives(cat_count);
  std::vector<std::size_t> extra_counts(cat_count);
  std::vector<std::vector<EntityType>> type_pools(cat_count);
  std::array<std::size_t, kEntityTypeCount> type_totals{};
  for (std::size_t ci = 0; ci < cat_count; ++ci) {
    const CategoryConfig& cat = config.categories[ci];
    std::vector<std::size_t> shuffled = members[ci];
    rng.shuffle(shuffled);
    auto pii_count = static_cast<std::size_t>(
        std::llround(static_cast<double>(shuffled.size()) * config.pii_rate));
    auto extra_count = static_cast<std::size_t>(
        std::llround(static_cast<double>(pii_count) * config.extra_entity_rate));
    positives[ci].assign(shuffled.begin(),
                         shuffled.begin() + static_cast<std::ptrdiff_t>(pii_count));
    extra_counts[ci] = extra_count;

    std::vector<double> weights;
    weights.reserve(cat.entity_weights.size());
    for (const auto& [type, weight] : cat.entity_weights) weights.push_back(weight);
    std::vector<std::size_t> quotas = largest_remainder(pii_count + extra_count, weights);
    for (std::size_t k = 0; k < quotas.size(); ++k) {
      type_pools[ci].insert(type_pools[ci].end(), quotas[k], cat.entity_weights[k].first);
      type_totals[static_cast<std::size_t>(cat.entity_weights[k].first)] += quotas[k];
    }
    rng.shuffle(type_pools[ci]);
  }

  // Global per-type form pools.
  std::array<std::vector<std::size_t>, kEntityTypeCount> form_pools;
  for (EntityType type : all_entity_types()) {
    std::size_t ti = static_cast<std::size_t>(type);
    if (type_totals[ti] == 0) continue;
    std::vector<std::size_t> form_ix;
    std::vector<double> weights;
    for (std::size_t fi = 0; fi < config.surface_forms.size(); ++fi) {
      if (config.surface_forms[fi].entity_type != type) continue;
      form_ix.push_back(fi);
      weights.push_back(config.surface_forms[fi].weight);
    }
    std::vector<std::size_t> quotas = largest_remainder(type_totals[ti], weights);
    for (std::size_t k = 0; k < quotas.size(); ++k)
      form_pools[ti].insert(form_pools[ti].end(), quotas[k], form_ix[k]);
    rng.shuffle(form_pools[ti]);
  }

  // Draw forms per slot. A sample never takes two url-bound forms: the
  // second draw swaps with a later pool entry of the same type, which keeps
  // global form totals intact while moving the conflict to another sample.
  auto mandatory = [&](std::size_t form_ix) {
    return url_mandatory(config.surface_forms[form_ix].placement);
  };
  auto pop_form = [&](EntityType type) {
    auto& pool = form_pools[static_cast<std::size_t>(type)];
    std::size_t ix = pool.back();
    pool.pop_back();
    return ix;
  };
  auto swap_nonmandatory = [&](EntityType type, std::size_t& drawn) {
    auto& pool = form_pools[static_cast<std::size_t>(type)];
    for (std::size_t k = pool.size(); k > 0; --k) {
      if (!mandatory(pool[k - 1])) {
        std::swap(drawn, pool[k - 1]);
        return true;
      }
    }
    return false;
  };

  std::vector<std::vector<Slot>> plan(config.n);
  for (std::size_t ci = 0; ci < cat_count; ++ci) {
    auto& types = type_pools[ci];
    for (std::size_t k = 0; k < positives[ci].size(); ++k) {
      std::size_t s = positives[ci][k];
      EntityType t1 = types.back();
      types.pop_back();
      std::size_t f1 = pop_form(t1);
      if (k < extra_counts[ci]) {
        EntityType t2 = types.back();
        types.pop_back();
        std::size_t f2 = pop_form(t2);
        if (mandatory(f1) && mandatory(f2)) {
          if (!swap_nonmandatory(t2, f2) && !swap_nonmandatory(t1, f1))
            throw std::runtime_error("corpus generation: cannot keep labels in distinct fields");
        }
        plan[s] = {Slot{f1, std::nullopt}, Slot{f2, std::nullopt}};
      } else {
        plan[s] = {Slot{f1, std::nullopt}};
      }
    }
  }

  // Field assignment: url-bound forms first, then fill toward the url-share
  // target from EITHER slots, leaving the rest for the text fields.
  std::size_t total_labels = 0;
  std::size_t url_assigned = 0;
  std::vector<std::pair<std::size_t, std::size_t>> either_slots;
  for (std::size_t s = 0; s < config.n; ++s) {
    for (std::size_t k = 0; k < plan[s].size(); ++k) {
      ++total_labels;
      Placement p = config.surface_forms[plan[s][k].form_ix].placement;
      if (url_mandatory(p)) {
        plan[s][k].field = Field::RESOURCE_URL;
        ++url_assigned;
      } else if (p == Placement::EITHER) {
        either_slots.emplace_back(s, k);
      }
    }
  }
  auto url_target = static_cast<std::size_t>(
      std::llround(static_cast<double>(total_labels) * config.url_share));
  rng.shuffle(either_slots);
  auto sample_has_url = [&](std::size_t s) {
    for (const Slot& slot : plan[s])
      if (slot.field == Field::RESOURCE_URL) return true;
    return false;
  };
  for (const auto& [s, k] : either_slots) {
    if (url_assigned >= url_target) break;
    if (sample_has_url(s)) continue;
    plan[s][k].field = Field::RESOURCE_URL;
    ++url_assigned;
  }
  for (std::size_t s = 0; s < config.n; ++s) {
    std::vector<std::size_t> text_slots;
    for (std::size_t k = 0; k < plan[s].size(); ++k)
      if (!plan[s][k].field.has_value()) text_slots.push_back(k);
    if (text_slots.size() == 1) {
      plan[s][text_slots[0]].field =
          rng.below(2) == 0 ? Field::DESCRIPTION : Field::REASON;
    } else if (text_slots.size() == 2) {
      bool first_desc = rng.below(2) == 0;
      plan[s][text_slots[0]].field = first_desc ? Field::DESCRIPTION : Field::REASON;
      plan[s][text_slots[1]].field = first_desc ? Field::REASON : Field::DESCRIPTION;
    }
  }

  // Render in sample order.
  std::vector<CorpusSample> samples;
  samples.reserve(config.n);
  for (std::size_t s = 0; s < config.n; ++s) {
    const CategoryConfig& cat = config.categories[cat_of[s]];
    CorpusSample sample;
    sample.id = s;
    sample.category = cat.name;

    for (Field field : {Field::RESOURCE_URL, Field::DESCRIPTION, Field::REASON}) {
      const Slot* slot = nullptr;
      for (const Slot& candidate : plan[s])
        if (candidate.field == field) slot = &candidate;

      const std::vector<std::string>* clean_pool = nullptr;
      const std::vector<std::string>* slot_pool = nullptr;
      if (field == Field::RESOURCE_URL) {
        clean_pool = &cat.templates.url_clean;
      } else if (field == Field::DESCRIPTION) {
        clean_pool = &cat.templates.desc_clean;
        slot_pool = &cat.templates.desc_slot;
      } else {
        clean_pool = &cat.templates.reason_clean;
        slot_pool = &cat.templates.reason_slot;
      }

      std::string text;
      if (slot != nullptr) {
        const SurfaceForm& form = config.surface_forms[slot->form_ix];
        if (field == Field::RESOURCE_URL)
          slot_pool = &slot_pool_for(cat.templates, form.placement, cat.name);
        if (slot_pool == nullptr || slot_pool->empty())
          throw std::runtime_error("corpus config: category '" + cat.name +
                                   "' has no slot templates for " +
                                   std::string(field_name(field)));
        const std::string& tmpl = (*slot_pool)[rng.below(slot_pool->size())];
        const std::string& value = form.values[rng.below(form.values.size())];
        auto [rendered, start] = render_slot(tmpl, sample.id, value);
        text = std::move(rendered);
        sample.labels.push_back(
            {field, form.entity_type, start, start + value.size(), form.id});
      } else {
        text = render_clean((*clean_pool)[rng.below(clean_pool->size())], sample.id);
      }

      if (field == Field::RESOURCE_URL) sample.triple.resource_url = std::move(text);
      else if (field == Field::DESCRIPTION) sample.triple.description = std::move(text);
      else sample.triple.reason = std::move(text);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

nlohmann::ordered_json build_meta(const GeneratorConfig& config,
                                  std::span<const CorpusSample> samples) {
  nlohmann::ordered_json meta;
  meta["seed"] = config.seed;
  meta["n"] = samples.size();
  meta["pii_rate"] = config.pii_rate;
  meta["extra_entity_rate"] = config.extra_entity_rate;
  meta["url_share_target"] = config.url_share;

  std::size_t total_labels = 0;
  std::size_t positive = 0;
  nlohmann::ordered_json category_counts = nlohmann::ordered_json::object();
  nlohmann::ordered_json positives_per_category = nlohmann::ordered_json::object();
  for (const CategoryConfig& cat : config.categories) {
    category_counts[cat.name] = 0;
    positives_per_category[cat.name] = 0;
  }
  std::array<std::size_t, kEntityTypeCount> entity_counts{};
  std::size_t url_labels = 0, desc_labels = 0, reason_labels = 0;
  nlohmann::ordered_json form_counts = nlohmann::ordered_json::object();
  for (const SurfaceForm& form : config.surface_forms) form_counts[form.id] = 0;
  std::size_t phone_labels = 0;
  std::size_t compact_phone_labels = 0;

  for (const CorpusSample& sample : samples) {
    if (category_counts.contains(sample.category))
      category_counts[sample.category] = category_counts[sample.category].get<std::size_t>() + 1;
    if (!sample.labels.empty() && positives_per_category.contains(sample.category))
      positives_per_category[sample.category] =
          positives_per_category[sample.category].get<std::size_t>() + 1;
    if (!sample.labels.empty()) ++positive;
    for (const GoldLabel& label : sample.labels) {
      ++total_labels;
      entity_counts[static_cast<std::size_t>(label.entity_type)] += 1;
      if (label.field == Field::RESOURCE_URL) ++url_labels;
      else if (label.field == Field::DESCRIPTION) ++desc_labels;
      else ++reason_labels;
      if (form_counts.contains(label.surface_form_id))
        form_counts[label.surface_form_id] =
            form_counts[label.surface_form_id].get<std::size_t>() + 1;
      if (label.entity_type == EntityType::PHONE_NUMBER) {
        ++phone_labels;
        if (label.surface_form_id == "phone_compact_intl") ++compact_phone_labels;
      }
    }
  }

  meta["pii_positive_total"] = positive;
  meta["total_labels"] = total_labels;
  meta["url_label_share"] =
      total_labels == 0 ? 0.0
                        : static_cast<double>(url_labels) / static_cast<double>(total_labels);
  // Fraction of phone labels a shape-only scan can see (compact intl forms
  // need the contextual pass).
  meta["phone_noncompact_fraction"] =
      phone_labels == 0 ? 0.0
                        : static_cast<double>(phone_labels - compact_phone_labels) /
                              static_cast<double>(phone_labels);
  meta["category_counts"] = category_counts;
  meta["pii_positive_per_category"] = positives_per_category;
  nlohmann::ordered_json entities = nlohmann::ordered_json::object();
  for (EntityType type : all_entity_types())
    entities[std::string(entity_type_name(type))] =
        entity_counts[static_cast<std::size_t>(type)];
  meta["entity_counts"] = entities;
  meta["field_counts"] = {{"resource_url", url_labels},
                          {"description", desc_labels},
                          {"reason", reason_labels}};
  meta["surface_form_counts"] = form_counts;
  nlohmann::ordered_json cats = nlohmann::ordered_json::array();
  for (const CategoryConfig& cat : config.categories) {
    nlohmann::ordered_json entry;
    entry["name"] = cat.name;
    entry["weight"] = cat.weight;
    nlohmann::ordered_json allowed = nlohmann::ordered_json::array();
    for (const auto& [type, weight] : cat.entity_weights)
      allowed.push_back(std::string(entity_type_name(type)));
    entry["allowed_entities"] = allowed;
    cats.push_back(entry);
  }
  meta["categories"] = cats;
  return meta;
}

void check_meta(const nlohmann::json& meta, const GeneratorConfig& config,
                std::span<const CorpusSample> samples) {
  nlohmann::json expected = nlohmann::json::parse(build_meta(config, samples).dump());
  nlohmann::json actual = nlohmann::json::parse(meta.dump());
  if (expected == actual) return;
  for (const auto& [key, value] : expected.items()) {
    if (!actual.contains(key))
      throw std::runtime_error("corpus meta mismatch: missing key '" + key + "'");
    if (actual[key] != value)
      throw std::runtime_error("corpus meta mismatch at '" + key + "': expected " + value.dump() +
                               ", found " + actual[key].dump());
  }
  for (const auto& [key, value] : actual.items())
    if (!expected.contains(key))
      throw std::runtime_error("corpus meta mismatch: unexpected key '" + key + "'");
  throw std::runtime_error("corpus meta mismatch");
}

std::string sample_json_line(const CorpusSample& sample) {
  nlohmann::ordered_json j;
  j["id"] = sample.id;
  j["category"] = sample.category;
  j["resource_url"] = sample.triple.resource_url;
  j["description"] = sample.triple.description;
  j["reason"] = sample.triple.reason;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (const GoldLabel& label : sample.labels) {
    nlohmann::ordered_json entry;
    entry["field"] = std::string(field_name(label.field));
    entry["entity_type"] = std::string(entity_type_name(label.entity_type));
    entry["start"] = label.start;
    entry["end"] = label.end;
    entry["surface_form_id"] = label.surface_form_id;
    labels.push_back(entry);
  }
  j["labels"] = labels;
  return j.dump();
}

CorpusSample sample_from_json(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::invalid_argument("corpus line: not a JSON object");
  for (const char* key : {"id", "category", "resource_url", "description", "reason", "labels"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("corpus line: missing key '") + key + "'");
  if (!j["id"].is_number_unsigned() || !j["category"].is_string() ||
      !j["resource_url"].is_string() || !j["description"].is_string() ||
      !j["reason"].is_string() || !j["labels"].is_array())
    throw std::invalid_argument("corpus line: wrong field type");

  CorpusSample sample;
  sample.id = j["id"].get<std::uint64_t>();
  sample.category = j["category"].get<std::string>();
  sample.triple.resource_url = j["resource_url"].get<std::string>();
  sample.triple.description = j["description"].get<std::string>();
  sample.triple.reason = j["reason"].get<std::string>();
  for (const auto& entry : j["labels"]) {
    if (!entry.is_object() || !entry.contains("field") || !entry.contains("entity_type") ||
        !entry.contains("start") || !entry.contains("end") ||
        !entry.contains("surface_form_id") || !entry["field"].is_string() ||
        !entry["entity_type"].is_string() || !entry["start"].is_number_unsigned() ||
        !entry["end"].is_number_unsigned() || !entry["surface_form_id"].is_string())
      throw std::invalid_argument("corpus line: malformed label");
    GoldLabel label;
    auto field = parse_field(entry["field"].get<std::string>());
    auto type = parse_entity_type(entry["entity_type"].get<std::string>());
    if (!field) throw std::invalid_argument("corpus line: unknown field name");
    if (!type) throw std::invalid_argument("corpus line: unknown entity type");
    label.field = *field;
    label.entity_type = *type;
    label.start = entry["start"].get<std::size_t>();
    label.end = entry["end"].get<std::size_t>();
    label.surface_form_id = entry["surface_form_id"].get<std::string>();
    if (label.end < label.start) throw std::invalid_argument("corpus line: inverted span");
    sample.labels.push_back(std::move(label));
  }
  return sample;
}

void write_corpus(const GeneratorConfig& config, std::span<const CorpusSample> samples,
                  const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path dir(out_dir);

  std::ofstream jsonl(dir / "corpus.jsonl", std::ios::binary | std::ios::trunc);
  if (!jsonl) throw std::runtime_error("cannot open " + (dir / "corpus.jsonl").string());
  for (const CorpusSample& sample : samples) jsonl << sample_json_line(sample) << '\n';
  jsonl.flush();
  if (!jsonl) throw std::runtime_error("write failed: " + (dir / "corpus.jsonl").string());

  std::ofstream meta(dir / "corpus_meta.json", std::ios::binary | std::ios::trunc);
  if (!meta) throw std::runtime_error("cannot open " + (dir / "corpus_meta.json").string());
  meta << build_meta(config, samples).dump(2) << '\n';
  meta.flush();
  if (!meta) throw std::runtime_error("write failed: " + (dir / "corpus_meta.json").string());
}

std::vector<CorpusSample> load_corpus(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + jsonl_path);
  std::vector<CorpusSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      samples.push_back(sample_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(jsonl_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

}  // namespace x402guard::corpus
