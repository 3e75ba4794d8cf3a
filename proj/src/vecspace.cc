#include "domavec/vecspace.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace domavec {

OovError::OovError(std::string word, std::string matrix)
    : std::runtime_error("'" + word + "' is not in the rows of " + matrix),
      word_(std::move(word)),
      matrix_(std::move(matrix)) {}

namespace {

std::size_t RowOf(const VectorSpace& m, const std::string& word) {
  auto r = m.rows().Find(word);
  if (!r) throw OovError(word, m.name());
  return *r;
}

Similarity CosineFromParts(double dot, double uu, double vv) {
  if (uu == 0.0 || vv == 0.0) return {0.0, true};
  double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  return {std::clamp(c, -1.0, 1.0), false};
}

double SquaredNorm(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return s;
}

double Dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

void RequireSameLength(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("vector length mismatch");
}

Similarity DotSimilarity(std::span<const double> u, std::span<const double> v) {
  RequireSameLength(u, v);
  return {Dot(u, v), false};
}

Similarity WeightedJaccard(std::span<const double> u, std::span<const double> v) {
  RequireSameLength(u, v);
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    lo += std::min(u[i], v[i]);
    hi += std::max(u[i], v[i]);
  }
  if (hi == 0.0) return {0.0, true};
  return {lo / hi, false};
}

std::map<std::string, Measure> BuildRegistry() {
  std::map<std::string, Measure> reg;
  reg["cosine"] = Measure{
      "cosine", Cosine,
      [](const VectorSpace& m, std::size_t row, std::span<const double> q,
         double q_sq) {
        return CosineFromParts(m.RowDot(row, q), m.RowSquaredNorm(row), q_sq);
      }};
  reg["dot"] = Measure{
      "dot", DotSimilarity,
      [](const VectorSpace& m, std::size_t row, std::span<const double> q, double) {
        return Similarity{m.RowDot(row, q), false};
      }};
  reg["jaccard"] = Measure{"jaccard", WeightedJaccard, nullptr};
  return reg;
}

const std::map<std::string, Measure>& Registry() {
  static const std::map<std::string, Measure> reg = BuildRegistry();
  return reg;
}

}  // namespace

WordVector GetVector(const VectorSpace& m, const std::string& word) {
  WordVector v{word, m.name(), m.Row(RowOf(m, word)), false};
  v.all_zero = std::all_of(v.values.begin(), v.values.end(),
                           [](double x) { return x == 0.0; });
  return v;
}

Similarity Cosine(std::span<const double> u, std::span<const double> v) {
  RequireSameLength(u, v);
  return CosineFromParts(Dot(u, v), SquaredNorm(u), SquaredNorm(v));
}

const Measure& GetMeasure(const std::string& name) {
  auto it = Registry().find(name);
  if (it == Registry().end()) {
    throw std::invalid_argument("unknown similarity measure '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> MeasureNames() {
  std::vector<std::string> out;
  for (const auto& [name, m] : Registry()) out.push_back(name);
  return out;
}

Similarity WordSimilarity(const VectorSpace& m, const std::string& a,
                          const std::string& b, const Measure& measure) {
  auto u = m.Row(RowOf(m, a));
  auto v = m.Row(RowOf(m, b));
  return measure.dense(u, v);
}

std::vector<Neighbor> Neighbors(const VectorSpace& m, const std::string& word,
                                std::size_t k, const Measure& measure) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  const std::size_t query_row = RowOf(m, word);
  const std::vector<double> query = m.Row(query_row);
  const double query_sq = SquaredNorm(query);
  const auto& words = m.rows().words();

  std::vector<double> buffer(m.dimension());
  std::vector<Neighbor> scored;
  scored.reserve(words.size());
  for (std::size_t r = 0; r < words.size(); ++r) {
    if (r == query_row) continue;
    Similarity s;
    if (measure.row_score) {
      s = measure.row_score(m, r, query, query_sq);
    } else {
      m.CopyRow(r, buffer);
      s = measure.dense(buffer, query);
    }
    scored.push_back({words[r], s.value});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    return a.score != b.score ? a.score > b.score : a.word < b.word;
  };
  std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), better);
  scored.resize(keep);
  return scored;
}

ReducedMatrix ReduceSvd(const std::string& name, const RowVocab& rows,
                        const Eigen::MatrixXd& dense, std::size_t rank,
                        const CoocMeta& meta) {
  const auto max_rank = static_cast<std::size_t>(std::min(dense.rows(), dense.cols()));
  if (rank == 0 || rank > max_rank) {
    throw std::invalid_argument("rank " + std::to_string(rank) + " invalid for " +
                                name + " (at most " + std::to_string(max_rank) + ")");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto r = static_cast<Eigen::Index>(rank);
  Eigen::MatrixXd u = svd.matrixU().leftCols(r);
  Eigen::MatrixXd v = svd.matrixV().leftCols(r);
  Eigen::VectorXd sigma = svd.singularValues().head(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < u.rows(); ++i) {
      if (std::abs(u(i, k)) > std::abs(u(best, k))) best = i;
    }
    if (u(best, k) < 0.0) {
      u.col(k) *= -1.0;
      v.col(k) *= -1.0;
    }
  }
  Eigen::MatrixXd vectors = u * sigma.asDiagonal();
  return ReducedMatrix(name, rows, std::move(vectors), std::move(sigma),
                       std::move(v), meta, static_cast<std::size_t>(dense.cols()));
}

ReducedMatrix ReduceSvd(const CoocMatrix& m, std::size_t rank) {
  return ReduceSvd(m.name(), m.rows(), m.ToDense(), rank, m.meta());
}

double ReconstructionError(const Eigen::MatrixXd& dense, const ReducedMatrix& r) {
  if (r.components().size() == 0) {
    throw std::invalid_argument("reduced matrix carries no components");
  }
  return (dense - r.vectors() * r.components().transpose()).norm();
}

ConceptMatrix MakeConceptMatrix(const std::string& word,
                                const std::vector<const ReducedMatrix*>& matrices) {
  if (matrices.empty()) throw std::invalid_argument("no matrices for concept");
  ConceptMatrix cm{word, {}, matrices.front()->rank()};
  for (const ReducedMatrix* m : matrices) {
    if (m->rank() != cm.rank) {
      throw std::invalid_argument("concept parts must share one rank");
    }
    auto row = m->rows().Find(word);
    if (!row) throw OovError(word, m->name());
    std::vector<double> v = m->Row(*row);
    double norm = std::sqrt(SquaredNorm(v));
    if (norm > 0.0) {
      for (double& x : v) x /= norm;
    }
    cm.parts.emplace_back(m->name(), std::move(v));
  }
  return cm;
}

ConceptSpace::ConceptSpace(const std::vector<const CoocMatrix*>& matrices,
                           std::size_t rank) {
  for (const CoocMatrix* m : matrices) reduced_.push_back(ReduceSvd(*m, rank));
}

ConceptSpace::ConceptSpace(std::vector<ReducedMatrix> reduced)
    : reduced_(std::move(reduced)) {}

ConceptMatrix ConceptSpace::Concept(const std::string& word) const {
  std::vector<const ReducedMatrix*> ptrs;
  for (const auto& r : reduced_) ptrs.push_back(&r);
  return MakeConceptMatrix(word, ptrs);
}

Similarity TensorSimilarity(const ConceptMatrix& a, const ConceptMatrix& b) {
  if (a.parts.size() != b.parts.size() || a.rank != b.rank) {
    throw std::invalid_argument("concept matrices differ in shape");
  }
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t p = 0; p < a.parts.size(); ++p) {
    const auto& [an, av] = a.parts[p];
    const auto& [bn, bv] = b.parts[p];
    if (an != bn || av.size() != bv.size()) {
      throw std::invalid_argument("concept matrices differ in part order");
    }
    for (std::size_t j = 0; j < av.size(); ++j) {
      dot += av[j] * bv[j];
      aa += av[j] * av[j];
      bb += bv[j] * bv[j];
    }
  }
  return CosineFromParts(dot, aa, bb);
}

}  // namespace domavec
