// Tagged dictionaries, domain dimension sets and the shared row vocabulary.

#ifndef DOMAVEC_LEXICON_H_
#define DOMAVEC_LEXICON_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace domavec {

struct LexEntry {
  std::string lemma;
  std::string pos;
  std::set<std::string> sem_tags;
  std::string inflection_class;  // FLX
  std::string number;
  std::string gender;
  std::string token;
};

class LexiconError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a domain falls below the minimum dimension count.
class DomainTooSmall : public LexiconError {
 public:
  DomainTooSmall(std::string name, std::size_t count, std::size_t min_dims);
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

enum class DimensionKind { kNoun, kVerb, kGeneric };

std::string_view KindName(DimensionKind kind);
DimensionKind ParseKind(std::string_view name);

enum class Role { kSubj, kObj, kOther };

inline constexpr Role kRoles[] = {Role::kSubj, Role::kObj, Role::kOther};
std::string_view RoleName(Role role);

// Ordered column labels of one domain matrix. Verb sets carry three physical
// columns per logical verb, labelled "lemma#subj", "lemma#obj", "lemma#other".
class DimensionSet {
 public:
  DimensionSet() = default;
  DimensionSet(std::string name, DimensionKind kind,
               std::vector<std::string> labels,
               std::vector<std::string> source_tags);

  const std::string& name() const { return name_; }
  DimensionKind kind() const { return kind_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& source_tags() const { return source_tags_; }

  std::size_t physical_size() const { return labels_.size(); }
  std::size_t logical_size() const {
    return kind_ == DimensionKind::kVerb ? labels_.size() / 3 : labels_.size();
  }

  // Column for a noun/generic lemma, or for a verb lemma in a given role.
  std::optional<std::size_t> Column(const std::string& lemma) const;
  std::optional<std::size_t> Column(const std::string& lemma, Role role) const;

 private:
  std::string name_;
  DimensionKind kind_ = DimensionKind::kNoun;
  std::vector<std::string> labels_;
  std::vector<std::string> source_tags_;
  // lemma -> first physical column (the subj column for verbs)
  std::unordered_map<std::string, std::size_t> base_column_;
};

// Tags that are always selected together, e.g. {Npc, Npcorg}.
struct MergeRule {
  std::vector<std::string> tags;
};

class RowVocab {
 public:
  RowVocab() = default;
  RowVocab(std::vector<std::string> words, std::string source,
           std::size_t cutoff);

  const std::vector<std::string>& words() const { return words_; }
  const std::string& source() const { return source_; }
  std::size_t cutoff() const { return cutoff_; }
  std::size_t size() const { return words_.size(); }
  std::optional<std::size_t> Find(const std::string& word) const;

 private:
  std::vector<std::string> words_;
  std::string source_;
  std::size_t cutoff_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::size_t kDefaultMinDims = 200;
inline constexpr std::size_t kDefaultRowCutoff = 17074;

// Parses the JSON dictionary format: an array of [lemma, record] pairs.
std::vector<LexEntry> ParseDictionary(std::string_view json_text);
std::vector<LexEntry> LoadDictionary(const std::string& path);

// Labels are the sorted lemmas carrying any requested tag, where a requested
// tag pulls in every tag merged with it. Throws DomainTooSmall below min_dims.
DimensionSet SelectDomain(const std::string& name,
                          const std::vector<LexEntry>& entries,
                          const std::vector<std::string>& tags,
                          const std::vector<MergeRule>& merges = {},
                          std::size_t min_dims = kDefaultMinDims);

// Expands verbs lemma-major, role-minor. Input must already be deduplicated.
DimensionSet TripleVerbDimensions(const std::string& name,
                                  const std::vector<std::string>& verbs,
                                  std::vector<std::string> source_tags = {});

// Verb domain from a verb dictionary: select by tag, collapse homographs,
// then triple. min_dims applies to the logical verb count.
DimensionSet SelectVerbDomain(const std::string& name,
                              const std::vector<LexEntry>& entries,
                              const std::vector<std::string>& tags,
                              std::size_t min_dims = kDefaultMinDims);

using FrequencyList = std::vector<std::pair<std::string, std::uint64_t>>;

// Reads "word<TAB>count" lines.
FrequencyList LoadFrequencyList(const std::string& path);

// The top `cutoff` words by count, ties broken lexicographically.
RowVocab BuildRowVocab(FrequencyList freq, std::size_t cutoff,
                       std::string source = "");

// Every generic matrix uses the row vocabulary itself as columns.
DimensionSet GenericDimensions(const RowVocab& rows,
                               const std::string& name = "GENERIC");

// One matrix definition in a build recipe.
struct MatrixRecipe {
  std::string name;
  DimensionKind kind = DimensionKind::kNoun;
  std::vector<std::string> dictionaries;  // paths, unused for generic
  std::vector<std::string> tags;
  std::vector<MergeRule> merges;
  std::size_t min_dims = kDefaultMinDims;
};

struct BuildRecipe {
  std::vector<MatrixRecipe> matrices;
  std::size_t row_cutoff = kDefaultRowCutoff;
};

// Recipe files are JSON; relative dictionary paths resolve against base_dir.
BuildRecipe ParseRecipe(std::string_view json_text, const std::string& base_dir);
BuildRecipe LoadRecipe(const std::string& path);

}  // namespace domavec

#endif  // DOMAVEC_LEXICON_H_
