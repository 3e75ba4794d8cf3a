// Syntactic-distance co-occurrence counting with POS weighting and
// role-split verb columns.

#ifndef DOMAVEC_SDW2_H_
#define DOMAVEC_SDW2_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "domavec/lexicon.h"
#include "domavec/matrix.h"
#include "domavec/treebank.h"

namespace domavec {

enum class PosClass { kNoun, kVerb, kAdjective, kOther };

// Maps corpus POS tags onto the classes that may act as contexts.
struct Tagset {
  enum class Column { kUpos, kXpos };

  Column column = Column::kUpos;
  std::unordered_map<std::string, PosClass> classes;

  // UPOS NOUN/VERB/ADJ plus the ISST-TANL S/V/A tags used by Italian corpora.
  static Tagset Default();

  PosClass Classify(std::string_view tag) const;
  const std::string& TagOf(const Token& t) const {
    return column == Column::kUpos ? t.upos : t.xpos;
  }
};

// POS tag -> context weight. Weights are held in exact thousandths.
class GravTable {
 public:
  GravTable() = default;
  GravTable(std::map<std::string, double> weights, double default_weight);

  // Noun 1.0, Verb 1.0, Adjective 0.5, everything else 0.0.
  static GravTable Default();
  // "tag<TAB>weight" lines; a "*" tag sets the default weight.
  static GravTable Load(const std::string& path);

  double Weight(std::string_view tag) const;
  std::int64_t WeightMilli(std::string_view tag) const;
  double default_weight() const {
    return static_cast<double>(default_milli_) / kWeightScale;
  }
  const std::map<std::string, std::int64_t, std::less<>>& entries() const {
    return milli_;
  }

  // Checks that every noun and verb weight is >= every other listed weight.
  void Validate(const Tagset& tagset) const;

 private:
  std::map<std::string, std::int64_t, std::less<>> milli_;
  std::int64_t default_milli_ = 0;
};

// How the target (row) token attaches to the verb context.
enum class Attachment {
  kNounIsDependent,  // the verb is the noun's head
  kNounIsHead,       // the verb depends on the noun
  kIndirect,         // path of length >= 2
};

// subj for nsubj-family labels, obj for obj-family, other for the rest.
Role RouteRole(std::string_view deprel, Attachment attachment);

struct BuildOptions {
  int window = 2;
  GravTable grav = GravTable::Default();
  Tagset tagset = Tagset::Default();
  std::string weighting = "GRAV";
  int workers = 1;
  std::string corpus_id;
};

struct BuildStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t skipped_sentences = 0;
};

// Accumulates counts for a set of matrices sharing one row vocabulary.
// Builders over disjoint corpus shards merge by cellwise addition.
class MatrixBuilder {
 public:
  MatrixBuilder(const RowVocab& rows, std::vector<const DimensionSet*> dims,
                const BuildOptions& options);

  void Add(const SentenceGraph& g);
  void Merge(const MatrixBuilder& other);

  // One matrix per dimension set, in construction order.
  std::vector<CoocMatrix> Finish() const;

 private:
  const RowVocab& rows_;
  std::vector<const DimensionSet*> dims_;
  BuildOptions options_;
  // One accumulator per matrix, keyed (row << 32 | col).
  std::vector<std::unordered_map<std::uint64_t, std::int64_t>> acc_;
};

CoocMatrix BuildMatrix(const std::vector<SentenceGraph>& corpus,
                       const RowVocab& rows, const DimensionSet& dims,
                       const BuildOptions& options = {});

// Streams the corpus once and builds every matrix, sharding batches of
// sentences across options.workers threads.
std::vector<CoocMatrix> BuildMatrices(ConlluReader& reader, const RowVocab& rows,
                                      const std::vector<DimensionSet>& dims,
                                      const BuildOptions& options,
                                      BuildStats* stats = nullptr);

// Text manifest written next to each matrix file.
std::string FormatManifest(const CoocMatrix& m, const BuildOptions& options,
                           const BuildStats& stats);

}  // namespace domavec

#endif  // DOMAVEC_SDW2_H_
