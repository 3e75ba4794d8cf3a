#include "domavec/lexicon.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace domavec {

using nlohmann::json;

DomainTooSmall::DomainTooSmall(std::string name, std::size_t count,
                               std::size_t min_dims)
    : LexiconError("domain " + name + " has " + std::to_string(count) +
                   " dimensions, minimum is " + std::to_string(min_dims)),
      count_(count) {}

std::string_view KindName(DimensionKind kind) {
  switch (kind) {
    case DimensionKind::kNoun: return "noun";
    case DimensionKind::kVerb: return "verb";
    case DimensionKind::kGeneric: return "generic";
  }
  return "noun";
}

DimensionKind ParseKind(std::string_view name) {
  if (name == "noun") return DimensionKind::kNoun;
  if (name == "verb") return DimensionKind::kVerb;
  if (name == "generic") return DimensionKind::kGeneric;
  throw LexiconError("unknown dimension kind '" + std::string(name) + "'");
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kSubj: return "subj";
    case Role::kObj: return "obj";
    case Role::kOther: return "other";
  }
  return "other";
}

DimensionSet::DimensionSet(std::string name, DimensionKind kind,
                           std::vector<std::string> labels,
                           std::vector<std::string> source_tags)
    : name_(std::move(name)),
      kind_(kind),
      labels_(std::move(labels)),
      source_tags_(std::move(source_tags)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw LexiconError("duplicate label '" + l + "' in " + name_);
    }
  }
  if (kind_ != DimensionKind::kVerb) {
    for (std::size_t c = 0; c < labels_.size(); ++c) base_column_[labels_[c]] = c;
    return;
  }
  if (labels_.size() % 3 != 0) {
    throw LexiconError("verb dimension set " + name_ +
                       " is not a multiple of three columns");
  }
  for (std::size_t c = 0; c < labels_.size(); c += 3) {
    const std::string& first = labels_[c];
    auto hash = first.rfind('#');
    if (hash == std::string::npos) {
      throw LexiconError("verb label without role: " + first);
    }
    std::string lemma = first.substr(0, hash);
    for (std::size_t r = 0; r < 3; ++r) {
      std::string expected = lemma + "#" + std::string(RoleName(kRoles[r]));
      if (labels_[c + r] != expected) {
        throw LexiconError("verb columns out of order near " + expected);
      }
    }
    base_column_[lemma] = c;
  }
}

std::optional<std::size_t> DimensionSet::Column(const std::string& lemma) const {
  auto it = base_column_.find(lemma);
  if (it == base_column_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> DimensionSet::Column(const std::string& lemma,
                                                Role role) const {
  auto base = Column(lemma);
  if (!base || kind_ != DimensionKind::kVerb) return base;
  return *base + static_cast<std::size_t>(role);
}

RowVocab::RowVocab(std::vector<std::string> words, std::string source,
                   std::size_t cutoff)
    : words_(std::move(words)), source_(std::move(source)), cutoff_(cutoff) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw LexiconError("duplicate row word '" + words_[i] + "'");
    }
  }
}

std::optional<std::size_t> RowVocab::Find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LexiconError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string OptionalString(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw LexiconError(std::string("field ") + key + " is not a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::vector<LexEntry> ParseDictionary(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LexiconError(std::string("dictionary is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw LexiconError("dictionary must be a JSON array");

  std::vector<LexEntry> entries;
  std::map<std::pair<std::string, std::string>, std::size_t> by_key;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& pair = doc[i];
    auto where = [&](const std::string& msg) {
      std::string head = pair.is_array() && !pair.empty() && pair[0].is_string()
                             ? " ('" + pair[0].get<std::string>() + "')"
                             : "";
      return LexiconError("record " + std::to_string(i) + head + ": " + msg);
    };
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
        !pair[1].is_object()) {
      throw where("expected [lemma, record]");
    }
    const json& record = pair[1];
    LexEntry e;
    try {
      e.lemma = OptionalString(record, "lemma");
      e.pos = OptionalString(record, "POS");
      e.number = OptionalString(record, "num");
      e.gender = OptionalString(record, "gen");
      e.token = OptionalString(record, "token");
      e.inflection_class = OptionalString(record, "FLX");
    } catch (const LexiconError& err) {
      throw where(err.what());
    }
    if (e.lemma.empty()) e.lemma = pair[0].get<std::string>();
    if (e.lemma.empty()) throw where("empty lemma");
    auto sem = record.find("SEM");
    if (sem == record.end() || !sem->is_array()) throw where("SEM must be an array");
    for (const json& tag : *sem) {
      if (!tag.is_string()) throw where("SEM tags must be strings");
      e.sem_tags.insert(tag.get<std::string>());
    }

    auto key = std::make_pair(e.lemma, e.pos);
    auto found = by_key.find(key);
    if (found != by_key.end()) {
      entries[found->second].sem_tags.insert(e.sem_tags.begin(), e.sem_tags.end());
      continue;
    }
    by_key.emplace(key, entries.size());
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<LexEntry> LoadDictionary(const std::string& path) {
  return ParseDictionary(ReadFile(path));
}

namespace {

// Requested tags closed under the merge rules, plus one recipe string per
// merged group ("Npc+Npcorg").
std::pair<std::set<std::string>, std::vector<std::string>> ExpandTags(
    const std::vector<std::string>& tags, const std::vector<MergeRule>& merges) {
  std::set<std::string> expanded(tags.begin(), tags.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& rule : merges) {
      bool hit = std::any_of(rule.tags.begin(), rule.tags.end(),
                             [&](const auto& t) { return expanded.count(t) > 0; });
      if (!hit) continue;
      for (const auto& t : rule.tags) grew = expanded.insert(t).second || grew;
    }
  }
  std::vector<std::string> recipe;
  std::set<std::string> covered;
  for (const auto& rule : merges) {
    if (rule.tags.empty() || !expanded.count(rule.tags.front())) continue;
    std::string joined;
    for (const auto& t : rule.tags) {
      if (!joined.empty()) joined += '+';
      joined += t;
      covered.insert(t);
    }
    recipe.push_back(joined);
  }
  for (const auto& t : expanded) {
    if (!covered.count(t)) recipe.push_back(t);
  }
  std::sort(recipe.begin(), recipe.end());
  recipe.erase(std::unique(recipe.begin(), recipe.end()), recipe.end());
  return {expanded, recipe};
}

std::vector<std::string> LemmasWithTags(const std::vector<LexEntry>& entries,
                                        const std::set<std::string>& tags) {
  std::set<std::string> lemmas;
  for (const auto& e : entries) {
    for (const auto& t : e.sem_tags) {
      if (tags.count(t)) {
        lemmas.insert(e.lemma);
        break;
      }
    }
  }
  return {lemmas.begin(), lemmas.end()};
}

}  // namespace

DimensionSet SelectDomain(const std::string& name,
                          const std::vector<LexEntry>& entries,
                          const std::vector<std::string>& tags,
                          const std::vector<MergeRule>& merges,
                          std::size_t min_dims) {
  if (tags.empty()) throw std::invalid_argument("SelectDomain: no tags");
  auto [expanded, recipe] = ExpandTags(tags, merges);
  auto labels = LemmasWithTags(entries, expanded);
  if (labels.size() < min_dims) {
    throw DomainTooSmall(name, labels.size(), min_dims);
  }
  return DimensionSet(name, DimensionKind::kNoun, std::move(labels),
                      std::move(recipe));
}

DimensionSet TripleVerbDimensions(const std::string& name,
                                  const std::vector<std::string>& verbs,
                                  std::vector<std::string> source_tags) {
  if (verbs.empty()) {
    throw std::invalid_argument("TripleVerbDimensions: empty verb list");
  }
  std::vector<std::string> labels;
  labels.reserve(verbs.size() * 3);
  for (const auto& v : verbs) {
    for (Role r : kRoles) labels.push_back(v + "#" + std::string(RoleName(r)));
  }
  return DimensionSet(name, DimensionKind::kVerb, std::move(labels),
                      std::move(source_tags));
}

DimensionSet SelectVerbDomain(const std::string& name,
                              const std::vector<LexEntry>& entries,
                              const std::vector<std::string>& tags,
                              std::size_t min_dims) {
  if (tags.empty()) throw std::invalid_argument("SelectVerbDomain: no tags");
  auto [expanded, recipe] = ExpandTags(tags, {});
  // Sorted and unique: homographs from different sub-classes collapse here.
  auto verbs = LemmasWithTags(entries, expanded);
  if (verbs.size() < min_dims) throw DomainTooSmall(name, verbs.size(), min_dims);
  return TripleVerbDimensions(name, verbs, std::move(recipe));
}

FrequencyList LoadFrequencyList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LexiconError("cannot open " + path);
  FrequencyList out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw LexiconError(path + ":" + std::to_string(line_no) + ": expected word<TAB>count");
    }
    std::uint64_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoull(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw LexiconError(path + ":" + std::to_string(line_no) + ": bad count");
    }
    out.emplace_back(line.substr(0, tab), count);
  }
  return out;
}

RowVocab BuildRowVocab(FrequencyList freq, std::size_t cutoff,
                       std::string source) {
  // Duplicate words in the list are summed.
  std::map<std::string, std::uint64_t> merged;
  for (auto& [w, c] : freq) merged[w] += c;
  if (merged.size() < cutoff) {
    throw LexiconError("frequency list has " + std::to_string(merged.size()) +
                       " words, cutoff is " + std::to_string(cutoff));
  }
  std::vector<std::pair<std::string, std::uint64_t>> sorted(merged.begin(),
                                                            merged.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;  // map order already makes ties lexicographic
  });
  std::vector<std::string> words;
  words.reserve(cutoff);
  for (std::size_t i = 0; i < cutoff; ++i) words.push_back(sorted[i].first);
  return RowVocab(std::move(words), std::move(source), cutoff);
}

DimensionSet GenericDimensions(const RowVocab& rows, const std::string& name) {
  return DimensionSet(name, DimensionKind::kGeneric, rows.words(),
                      {"top-" + std::to_string(rows.size())});
}

BuildRecipe ParseRecipe(std::string_view json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LexiconError(std::string("recipe is not valid JSON: ") + e.what());
  }
  BuildRecipe recipe;
  recipe.row_cutoff = doc.value("row_cutoff", kDefaultRowCutoff);
  std::size_t default_min = doc.value("min_dims", kDefaultMinDims);
  if (!doc.contains("matrices") || !doc["matrices"].is_array()) {
    throw LexiconError("recipe needs a 'matrices' array");
  }
  std::set<std::string> names;
  for (const json& m : doc["matrices"]) {
    MatrixRecipe r;
    r.name = m.at("name").get<std::string>();
    if (!names.insert(r.name).second) {
      throw LexiconError("duplicate matrix name " + r.name);
    }
    r.kind = ParseKind(m.value("kind", std::string("noun")));
    r.min_dims = m.value("min_dims", default_min);
    if (r.kind != DimensionKind::kGeneric) {
      auto dicts = m.at("dictionary");
      std::vector<std::string> paths;
      if (dicts.is_string()) {
        paths.push_back(dicts.get<std::string>());
      } else {
        paths = dicts.get<std::vector<std::string>>();
      }
      for (auto& p : paths) {
        std::filesystem::path fp(p);
        if (fp.is_relative() && !base_dir.empty()) fp = std::filesystem::path(base_dir) / fp;
        r.dictionaries.push_back(fp.string());
      }
      r.tags = m.at("tags").get<std::vector<std::string>>();
      for (const json& merge : m.value("merges", json::array())) {
        r.merges.push_back({merge.get<std::vector<std::string>>()});
      }
    }
    recipe.matrices.push_back(std::move(r));
  }
  return recipe;
}

BuildRecipe LoadRecipe(const std::string& path) {
  auto base = std::filesystem::path(path).parent_path().string();
  try {
    return ParseRecipe(ReadFile(path), base);
  } catch (const json::exception& e) {
    throw LexiconError(path + ": " + e.what());
  }
}

}  // namespace domavec
