#include "domavec/matrix.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace domavec {

std::vector<double> VectorSpace::Row(std::size_t row) const {
  std::vector<double> out(dimension(), 0.0);
  CopyRow(row, out);
  return out;
}

CoocMatrix::CoocMatrix(std::string name, RowVocab rows, DimensionSet dims,
                       CoocMeta meta, std::vector<Cell> cells)
    : name_(std::move(name)),
      rows_(std::move(rows)),
      dims_(std::move(dims)),
      meta_(std::move(meta)) {
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(rows_.size() + 1, 0);
  for (std::size_t i = 0; i < cells.size();) {
    const Cell& c = cells[i];
    if (c.row >= rows_.size() || c.col >= dims_.physical_size()) {
      throw std::out_of_range("cell (" + std::to_string(c.row) + "," +
                              std::to_string(c.col) + ") outside " + name_);
    }
    std::int64_t sum = 0;
    std::size_t j = i;
    for (; j < cells.size() && cells[j].row == c.row && cells[j].col == c.col; ++j) {
      sum += cells[j].milli;
    }
    if (sum < 0) throw std::invalid_argument("negative weight in " + name_);
    if (sum != 0) {
      col_.push_back(c.col);
      milli_.push_back(sum);
      ++row_ptr_[c.row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) row_ptr_[r + 1] += row_ptr_[r];
  sq_norm_.assign(rows_.size(), 0.0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double s = 0.0;
    for (auto m : row_millis(r)) {
      double v = static_cast<double>(m) / kWeightScale;
      s += v * v;
    }
    sq_norm_[r] = s;
  }
}

std::span<const std::uint32_t> CoocMatrix::row_cols(std::size_t row) const {
  return {col_.data() + row_ptr_.at(row), row_ptr_.at(row + 1) - row_ptr_[row]};
}

std::span<const std::int64_t> CoocMatrix::row_millis(std::size_t row) const {
  return {milli_.data() + row_ptr_.at(row), row_ptr_.at(row + 1) - row_ptr_[row]};
}

void CoocMatrix::CopyRow(std::size_t row, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  auto cols = row_cols(row);
  auto ms = row_millis(row);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out[cols[k]] = static_cast<double>(ms[k]) / kWeightScale;
  }
}

double CoocMatrix::RowDot(std::size_t row, std::span<const double> dense) const {
  auto cols = row_cols(row);
  auto ms = row_millis(row);
  double s = 0.0;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    s += (static_cast<double>(ms[k]) / kWeightScale) * dense[cols[k]];
  }
  return s;
}

std::int64_t CoocMatrix::milli(std::size_t row, std::size_t col) const {
  auto cols = row_cols(row);
  auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0;
  return row_millis(row)[it - cols.begin()];
}

std::vector<Cell> CoocMatrix::cells() const {
  std::vector<Cell> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    auto cols = row_cols(r);
    auto ms = row_millis(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out.push_back({static_cast<std::uint32_t>(r), cols[k], ms[k]});
    }
  }
  return out;
}

Eigen::MatrixXd CoocMatrix::ToDense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_.size(), dimension());
  for (const Cell& c : cells()) {
    d(c.row, c.col) = static_cast<double>(c.milli) / kWeightScale;
  }
  return d;
}

ReducedMatrix::ReducedMatrix(std::string name, RowVocab rows,
                             Eigen::MatrixXd vectors,
                             Eigen::VectorXd singular_values,
                             Eigen::MatrixXd components, CoocMeta meta,
                             std::size_t source_columns)
    : name_(std::move(name)),
      rows_(std::move(rows)),
      vectors_(std::move(vectors)),
      singular_values_(std::move(singular_values)),
      components_(std::move(components)),
      meta_(std::move(meta)),
      source_columns_(source_columns) {
  if (static_cast<std::size_t>(vectors_.rows()) != rows_.size()) {
    throw std::invalid_argument("reduced matrix row count mismatch");
  }
  sq_norm_.resize(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
      s += vectors_(r, j) * vectors_(r, j);
    }
    sq_norm_[r] = s;
  }
}

void ReducedMatrix::CopyRow(std::size_t row, std::span<double> out) const {
  for (Eigen::Index j = 0; j < vectors_.cols(); ++j) out[j] = vectors_(row, j);
}

double ReducedMatrix::RowDot(std::size_t row, std::span<const double> dense) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < vectors_.cols(); ++j) s += vectors_(row, j) * dense[j];
  return s;
}

std::string FormatMilli(std::int64_t milli) {
  char buf[32];
  std::int64_t whole = milli / kWeightScale;
  std::int64_t frac = milli % kWeightScale;
  const char* sign = "";
  if (milli < 0) {
    sign = "-";
    whole = -whole;
    frac = -frac;
  }
  std::snprintf(buf, sizeof(buf), "%s%lld.%03lld", sign,
                static_cast<long long>(whole), static_cast<long long>(frac));
  return buf;
}

namespace {

std::int64_t ParseMilli(std::string_view s) {
  auto dot = s.find('.');
  std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? "" : s.substr(dot + 1);
  std::int64_t w = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
  if (ec != std::errc() || p != whole.data() + whole.size() || w < 0 ||
      frac.size() > 3) {
    throw MatrixFormatError("bad weight '" + std::string(s) + "'");
  }
  std::int64_t f = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    char ch = i < frac.size() ? frac[i] : '0';
    if (ch < '0' || ch > '9') throw MatrixFormatError("bad weight '" + std::string(s) + "'");
    f = f * 10 + (ch - '0');
  }
  return w * kWeightScale + f;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteHeader(const MatrixHeader& h, std::ostream& out) {
  out << kMatrixMagic << '\n'
      << "name\t" << h.name << '\n'
      << "kind\t" << KindName(h.kind) << '\n'
      << "window\t" << h.window << '\n'
      << "weighting\t" << h.weighting << '\n'
      << "rows\t" << h.rows << '\n'
      << "cols\t" << h.cols << '\n'
      << "logical_cols\t" << h.logical_cols << '\n'
      << "nnz\t" << h.nnz << '\n';
  if (h.reduced_rank) out << "reduced-rank\t" << *h.reduced_rank << '\n';
  out << "end\n";
}

std::string NextLine(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw MatrixFormatError(std::string("truncated matrix file: expected ") + what);
  }
  return line;
}

std::size_t ParseSize(const std::string& s, const char* field) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw MatrixFormatError(std::string("bad ") + field + " '" + s + "'");
  }
  return v;
}

std::vector<std::string> ReadLines(std::istream& in, std::size_t n,
                                   const char* what) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(NextLine(in, what));
  return out;
}

struct Triple {
  std::size_t row, col;
  std::string value;
};

Triple ParseTriple(const std::string& line, const MatrixHeader& h) {
  auto t1 = line.find('\t');
  auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
  if (t2 == std::string::npos) throw MatrixFormatError("bad triple '" + line + "'");
  Triple t{ParseSize(line.substr(0, t1), "row index"),
           ParseSize(line.substr(t1 + 1, t2 - t1 - 1), "column index"),
           line.substr(t2 + 1)};
  if (t.row >= h.rows || t.col >= h.cols) {
    throw MatrixFormatError("triple outside matrix bounds: " + line);
  }
  return t;
}

}  // namespace

void WriteMatrix(const CoocMatrix& m, std::ostream& out) {
  MatrixHeader h;
  h.name = m.name();
  h.kind = m.dims().kind();
  h.window = m.meta().window;
  h.weighting = m.meta().weighting;
  h.rows = m.rows().size();
  h.cols = m.dims().physical_size();
  h.logical_cols = m.dims().logical_size();
  h.nnz = m.nnz();
  WriteHeader(h, out);
  for (const auto& w : m.rows().words()) out << w << '\n';
  for (const auto& l : m.dims().labels()) out << l << '\n';
  for (const Cell& c : m.cells()) {
    out << c.row << '\t' << c.col << '\t' << FormatMilli(c.milli) << '\n';
  }
}

void WriteMatrix(const ReducedMatrix& m, std::ostream& out) {
  const auto& v = m.vectors();
  MatrixHeader h;
  h.name = m.name();
  h.kind = DimensionKind::kGeneric;
  h.window = m.meta().window;
  h.weighting = m.meta().weighting;
  h.rows = m.rows().size();
  h.cols = m.rank();
  h.logical_cols = m.source_columns();
  h.nnz = static_cast<std::size_t>((v.array() != 0.0).count());
  h.reduced_rank = m.rank();
  WriteHeader(h, out);
  for (const auto& w : m.rows().words()) out << w << '\n';
  for (std::size_t j = 0; j < m.rank(); ++j) out << "svd" << j + 1 << '\n';
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (v(r, j) != 0.0) out << r << '\t' << j << '\t' << FormatDouble(v(r, j)) << '\n';
    }
  }
}

namespace {

template <typename M>
void SaveTo(const M& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MatrixFormatError("cannot write " + path);
  WriteMatrix(m, out);
  if (!out) throw MatrixFormatError("write failed for " + path);
}

}  // namespace

void SaveMatrix(const CoocMatrix& m, const std::string& path) { SaveTo(m, path); }
void SaveMatrix(const ReducedMatrix& m, const std::string& path) { SaveTo(m, path); }

MatrixHeader ReadHeader(std::istream& in) {
  if (NextLine(in, "magic") != kMatrixMagic) {
    throw MatrixFormatError("not a DOMA1 matrix file");
  }
  MatrixHeader h;
  bool have_rows = false, have_cols = false;
  while (true) {
    std::string line = NextLine(in, "header field");
    if (line == "end") break;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw MatrixFormatError("bad header line '" + line + "'");
    std::string key = line.substr(0, tab), val = line.substr(tab + 1);
    if (key == "name") {
      h.name = val;
    } else if (key == "kind") {
      h.kind = ParseKind(val);
    } else if (key == "window") {
      h.window = static_cast<int>(ParseSize(val, "window"));
    } else if (key == "weighting") {
      h.weighting = val;
    } else if (key == "rows") {
      h.rows = ParseSize(val, "rows");
      have_rows = true;
    } else if (key == "cols") {
      h.cols = ParseSize(val, "cols");
      have_cols = true;
    } else if (key == "logical_cols") {
      h.logical_cols = ParseSize(val, "logical_cols");
    } else if (key == "nnz") {
      h.nnz = ParseSize(val, "nnz");
    } else if (key == "reduced-rank") {
      h.reduced_rank = ParseSize(val, "reduced-rank");
    } else {
      throw MatrixFormatError("unknown header field '" + key + "'");
    }
  }
  if (h.name.empty() || !have_rows || !have_cols) {
    throw MatrixFormatError("header missing name, rows or cols");
  }
  return h;
}

MatrixHeader ReadHeaderFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixFormatError("cannot open " + path);
  return ReadHeader(in);
}

CoocMatrix ReadCoocMatrix(std::istream& in) {
  MatrixHeader h = ReadHeader(in);
  if (h.reduced_rank) throw MatrixFormatError(h.name + " is a reduced matrix");
  RowVocab rows(ReadLines(in, h.rows, "row word"), h.name, h.rows);
  DimensionSet dims(h.name, h.kind, ReadLines(in, h.cols, "column label"), {});
  std::vector<Cell> cells;
  cells.reserve(h.nnz);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Triple t = ParseTriple(line, h);
    if (!cells.empty() && std::make_pair(cells.back().row, cells.back().col) >=
                              std::make_pair(static_cast<std::uint32_t>(t.row),
                                             static_cast<std::uint32_t>(t.col))) {
      throw MatrixFormatError("triples out of (row, col) order in " + h.name);
    }
    cells.push_back({static_cast<std::uint32_t>(t.row),
                     static_cast<std::uint32_t>(t.col), ParseMilli(t.value)});
  }
  if (cells.size() != h.nnz) throw MatrixFormatError("nnz mismatch in " + h.name);
  CoocMeta meta;
  meta.window = h.window;
  meta.weighting = h.weighting;
  return CoocMatrix(h.name, std::move(rows), std::move(dims), std::move(meta),
                    std::move(cells));
}

ReducedMatrix ReadReducedMatrix(std::istream& in) {
  MatrixHeader h = ReadHeader(in);
  if (!h.reduced_rank) throw MatrixFormatError(h.name + " is not a reduced matrix");
  RowVocab rows(ReadLines(in, h.rows, "row word"), h.name, h.rows);
  ReadLines(in, h.cols, "column label");
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(h.rows, h.cols);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Triple t = ParseTriple(line, h);
    char* end = nullptr;
    v(t.row, t.col) = std::strtod(t.value.c_str(), &end);
    if (end != t.value.c_str() + t.value.size()) {
      throw MatrixFormatError("bad value '" + t.value + "'");
    }
    ++n;
  }
  if (n != h.nnz) throw MatrixFormatError("nnz mismatch in " + h.name);
  CoocMeta meta;
  meta.window = h.window;
  meta.weighting = h.weighting;
  return ReducedMatrix(h.name, std::move(rows), std::move(v), {}, {},
                       std::move(meta), h.logical_cols);
}

std::shared_ptr<const VectorSpace> LoadVectorSpace(const std::string& path) {
  MatrixHeader h = ReadHeaderFile(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixFormatError("cannot open " + path);
  if (h.reduced_rank) return std::make_shared<ReducedMatrix>(ReadReducedMatrix(in));
  return std::make_shared<CoocMatrix>(ReadCoocMatrix(in));
}

}  // namespace domavec
