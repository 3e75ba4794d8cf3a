// Co-occurrence and reduced matrices, and the DOMA1 container format.

#ifndef DOMAVEC_MATRIX_H_
#define DOMAVEC_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "domavec/lexicon.h"

namespace domavec {

// Read access shared by sparse count matrices and dense reduced matrices.
class VectorSpace {
 public:
  virtual ~VectorSpace() = default;

  virtual const std::string& name() const = 0;
  virtual const RowVocab& rows() const = 0;
  virtual std::size_t dimension() const = 0;

  // Writes row `row` into `out` (size dimension()).
  virtual void CopyRow(std::size_t row, std::span<double> out) const = 0;
  // Sum over columns in increasing order of row[j] * dense[j].
  virtual double RowDot(std::size_t row, std::span<const double> dense) const = 0;
  virtual double RowSquaredNorm(std::size_t row) const = 0;

  std::vector<double> Row(std::size_t row) const;
};

struct CoocMeta {
  int window = 2;
  std::string weighting = "GRAV";
  std::string corpus;    // manifest only
  std::string built_at;  // manifest only
};

// One populated cell. Weights are exact thousandths.
struct Cell {
  std::uint32_t row;
  std::uint32_t col;
  std::int64_t milli;
};

inline constexpr std::int64_t kWeightScale = 1000;

// Sparse row-word x dimension matrix. Immutable; rows stored CSR.
class CoocMatrix : public VectorSpace {
 public:
  CoocMatrix() = default;
  // Cells need not be sorted; duplicates are summed. Zero cells are dropped.
  CoocMatrix(std::string name, RowVocab rows, DimensionSet dims, CoocMeta meta,
             std::vector<Cell> cells);

  const std::string& name() const override { return name_; }
  const RowVocab& rows() const override { return rows_; }
  std::size_t dimension() const override { return dims_.physical_size(); }
  void CopyRow(std::size_t row, std::span<double> out) const override;
  double RowDot(std::size_t row, std::span<const double> dense) const override;
  double RowSquaredNorm(std::size_t row) const override { return sq_norm_.at(row); }

  const DimensionSet& dims() const { return dims_; }
  const CoocMeta& meta() const { return meta_; }
  std::size_t nnz() const { return col_.size(); }

  // Exact stored weight in thousandths.
  std::int64_t milli(std::size_t row, std::size_t col) const;
  double value(std::size_t row, std::size_t col) const {
    return static_cast<double>(milli(row, col)) / kWeightScale;
  }

  // Cells sorted by (row, col).
  std::vector<Cell> cells() const;

  std::span<const std::uint32_t> row_cols(std::size_t row) const;
  std::span<const std::int64_t> row_millis(std::size_t row) const;

  // Dense copy for SVD, rows x physical columns.
  Eigen::MatrixXd ToDense() const;

 private:
  std::string name_;
  RowVocab rows_;
  DimensionSet dims_;
  CoocMeta meta_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<std::int64_t> milli_;
  std::vector<double> sq_norm_;
};

// Row vectors after truncated SVD: row i is U_i * Sigma over the kept rank.
class ReducedMatrix : public VectorSpace {
 public:
  ReducedMatrix() = default;
  ReducedMatrix(std::string name, RowVocab rows, Eigen::MatrixXd vectors,
                Eigen::VectorXd singular_values, Eigen::MatrixXd components,
                CoocMeta meta, std::size_t source_columns);

  const std::string& name() const override { return name_; }
  const RowVocab& rows() const override { return rows_; }
  std::size_t dimension() const override {
    return static_cast<std::size_t>(vectors_.cols());
  }
  void CopyRow(std::size_t row, std::span<double> out) const override;
  double RowDot(std::size_t row, std::span<const double> dense) const override;
  double RowSquaredNorm(std::size_t row) const override { return sq_norm_.at(row); }

  std::size_t rank() const { return dimension(); }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  // Kept singular values; empty for matrices read back from a cache file.
  const Eigen::VectorXd& singular_values() const { return singular_values_; }
  // Right singular vectors (source columns x rank); empty when read back.
  const Eigen::MatrixXd& components() const { return components_; }
  const CoocMeta& meta() const { return meta_; }
  std::size_t source_columns() const { return source_columns_; }

 private:
  std::string name_;
  RowVocab rows_;
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd singular_values_;
  Eigen::MatrixXd components_;
  CoocMeta meta_;
  std::size_t source_columns_ = 0;
  std::vector<double> sq_norm_;
};

class MatrixFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kMatrixMagic[] = "DOMA1";

// Header fields of a DOMA1 file, readable without loading the body.
struct MatrixHeader {
  std::string name;
  DimensionKind kind = DimensionKind::kNoun;
  int window = 0;
  std::string weighting;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t logical_cols = 0;
  std::size_t nnz = 0;
  std::optional<std::size_t> reduced_rank;
};

// Thousandths as an exact decimal string, e.g. 1500 -> "1.500".
std::string FormatMilli(std::int64_t milli);

void WriteMatrix(const CoocMatrix& m, std::ostream& out);
void WriteMatrix(const ReducedMatrix& m, std::ostream& out);
void SaveMatrix(const CoocMatrix& m, const std::string& path);
void SaveMatrix(const ReducedMatrix& m, const std::string& path);

MatrixHeader ReadHeader(std::istream& in);
MatrixHeader ReadHeaderFile(const std::string& path);
CoocMatrix ReadCoocMatrix(std::istream& in);
ReducedMatrix ReadReducedMatrix(std::istream& in);

// Loads either kind, dispatching on the reduced-rank header field.
std::shared_ptr<const VectorSpace> LoadVectorSpace(const std::string& path);

}  // namespace domavec

#endif  // DOMAVEC_MATRIX_H_
