// Vector queries, similarity measures, SVD reduction and concept tensors.

#ifndef DOMAVEC_VECSPACE_H_
#define DOMAVEC_VECSPACE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "domavec/matrix.h"

namespace domavec {

class OovError : public std::runtime_error {
 public:
  OovError(std::string word, std::string matrix);
  const std::string& word() const { return word_; }
  const std::string& matrix() const { return matrix_; }

 private:
  std::string word_;
  std::string matrix_;
};

struct WordVector {
  std::string word;
  std::string matrix;
  std::vector<double> values;
  bool all_zero = false;
};

WordVector GetVector(const VectorSpace& m, const std::string& word);

// A similarity score; degenerate marks a zero-vector argument (value 0).
struct Similarity {
  double value = 0.0;
  bool degenerate = false;
};

Similarity Cosine(std::span<const double> u, std::span<const double> v);

// Named similarity measure. `dense` scores two vectors; neighbour search uses
// `row_score` when set so sparse rows need not be expanded.
struct Measure {
  std::string name;
  std::function<Similarity(std::span<const double>, std::span<const double>)> dense;
  std::function<Similarity(const VectorSpace&, std::size_t row,
                           std::span<const double> query, double query_sq_norm)>
      row_score;
};

// Registered: cosine (default), dot, jaccard (weighted, min/max).
const Measure& GetMeasure(const std::string& name);
std::vector<std::string> MeasureNames();

Similarity WordSimilarity(const VectorSpace& m, const std::string& a,
                          const std::string& b,
                          const Measure& measure = GetMeasure("cosine"));

struct Neighbor {
  std::string word;
  double score;
};

// Top-k rows by measure, excluding the query word; ties broken by word.
std::vector<Neighbor> Neighbors(const VectorSpace& m, const std::string& word,
                                std::size_t k,
                                const Measure& measure = GetMeasure("cosine"));

inline constexpr std::size_t kDefaultRank = 200;

// Truncated SVD: row i maps to U_i * Sigma over the first `rank` components.
// Each component's sign is fixed so its largest-magnitude U loading is
// positive (first such row on ties).
ReducedMatrix ReduceSvd(const CoocMatrix& m, std::size_t rank = kDefaultRank);
ReducedMatrix ReduceSvd(const std::string& name, const RowVocab& rows,
                        const Eigen::MatrixXd& dense, std::size_t rank,
                        const CoocMeta& meta = {});

// Frobenius norm of dense - U_r Sigma_r V_r^T.
double ReconstructionError(const Eigen::MatrixXd& dense, const ReducedMatrix& r);

// A word's reduced vectors across an ordered list of domain matrices, each
// part scaled to unit L2 norm (zero parts stay zero).
struct ConceptMatrix {
  std::string word;
  std::vector<std::pair<std::string, std::vector<double>>> parts;
  std::size_t rank = 0;
};

ConceptMatrix MakeConceptMatrix(const std::string& word,
                                const std::vector<const ReducedMatrix*>& matrices);

// Reduces every matrix once, then serves concept matrices for any word.
class ConceptSpace {
 public:
  ConceptSpace(const std::vector<const CoocMatrix*>& matrices,
               std::size_t rank = kDefaultRank);
  explicit ConceptSpace(std::vector<ReducedMatrix> reduced);

  ConceptMatrix Concept(const std::string& word) const;
  const std::vector<ReducedMatrix>& reduced() const { return reduced_; }

 private:
  std::vector<ReducedMatrix> reduced_;
};

// Cosine of the row-major flattened stacks. Throws on shape mismatch.
Similarity TensorSimilarity(const ConceptMatrix& a, const ConceptMatrix& b);

}  // namespace domavec

#endif  // DOMAVEC_VECSPACE_H_
