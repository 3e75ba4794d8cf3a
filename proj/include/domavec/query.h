// Text outputs shared by the CLI and the query service. Both front ends call
// these functions, so their answers agree byte for byte.

#ifndef DOMAVEC_QUERY_H_
#define DOMAVEC_QUERY_H_

#include <memory>
#include <string>
#include <vector>

#include "domavec/catalog.h"
#include "domavec/concept_network.h"
#include "domavec/features.h"
#include "domavec/vecspace.h"

namespace domavec {

// Fixed six-decimal rendering; negative zero prints as zero.
std::string FormatNumber(double v);

struct NamedSpace {
  std::string name;
  std::shared_ptr<const VectorSpace> space;
};

std::vector<NamedSpace> SelectMatrices(const MatrixCatalog& catalog,
                                       const std::vector<std::string>& names);

struct OovNote {
  std::string word;
  std::string matrix;
};

struct VectorsOutput {
  std::string text;  // vectors.txt
  std::vector<WordVector> vectors;
  std::vector<OovNote> oov;
};

// One line per (word, matrix): word, matrix, then the row values.
VectorsOutput QueryVectors(const std::vector<NamedSpace>& matrices,
                           const std::vector<std::string>& words);

struct WordFile {
  std::string word;
  std::string text;
};

struct SimilarityOutput {
  std::vector<WordFile> files;  // <word>.sim.txt
  std::vector<OovNote> oov;
};

// Per word: header "target<TAB>M1<TAB>M2...", one row per target; "NA" where
// either word is out of vocabulary.
SimilarityOutput QuerySimilarity(const std::vector<NamedSpace>& matrices,
                                 const std::vector<std::string>& words,
                                 const std::vector<std::string>& targets,
                                 const Measure& measure);

struct NeighborsOutput {
  struct PerWord {
    std::string word;
    std::string text;  // <word>.nn.txt
    std::vector<std::pair<std::string, std::vector<Neighbor>>> lists;
  };
  std::vector<PerWord> files;
  std::vector<OovNote> oov;
};

// Per word: "matrix<TAB>rank<TAB>neighbor<TAB>score" lines, matrices in order.
NeighborsOutput QueryNeighbors(const std::vector<NamedSpace>& matrices,
                               const std::vector<std::string>& words,
                               std::size_t k, const Measure& measure);

// The k nearest neighbours of `word`, then the `expand` nearest of each, as
// an undirected graph (at most 1 + k + k*expand nodes).
WeightedGraph NeighborGraph(const VectorSpace& m, const std::string& word,
                            std::size_t k, std::size_t expand,
                            const Measure& measure);

// "feature<TAB>S_rel<TAB>S_unrel<TAB>C_t<TAB>F_t<TAB>assigned" with a header.
std::string FormatFeatureReport(const std::vector<FeatureScore>& scores);
std::string FormatSweepTable(const SweepResult& result);

// Filesystem-safe rendering of a word for per-word output names.
std::string FileStem(const std::string& word);

}  // namespace domavec

#endif  // DOMAVEC_QUERY_H_
