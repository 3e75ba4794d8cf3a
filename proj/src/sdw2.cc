#include "domavec/sdw2.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace domavec {

Tagset Tagset::Default() {
  Tagset t;
  t.classes = {
      {"NOUN", PosClass::kNoun}, {"VERB", PosClass::kVerb},
      {"ADJ", PosClass::kAdjective}, {"S", PosClass::kNoun},
      {"V", PosClass::kVerb},        {"A", PosClass::kAdjective},
  };
  return t;
}

PosClass Tagset::Classify(std::string_view tag) const {
  auto it = classes.find(std::string(tag));
  return it == classes.end() ? PosClass::kOther : it->second;
}

namespace {

std::int64_t ToMilli(double w, std::string_view tag) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument("GRAV weight for '" + std::string(tag) +
                                "' must be finite and non-negative");
  }
  double scaled = w * kWeightScale;
  double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-6) {
    throw std::invalid_argument("GRAV weight for '" + std::string(tag) +
                                "' is finer than 0.001");
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

GravTable::GravTable(std::map<std::string, double> weights, double default_weight)
    : default_milli_(ToMilli(default_weight, "*")) {
  for (const auto& [tag, w] : weights) milli_[tag] = ToMilli(w, tag);
}

GravTable GravTable::Default() {
  return GravTable({{"NOUN", 1.0}, {"VERB", 1.0}, {"ADJ", 0.5},
                    {"S", 1.0}, {"V", 1.0}, {"A", 0.5}},
                   0.0);
}

GravTable GravTable::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, double> weights;
  double def = 0.0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    double w = 0.0;
    if (!(ss >> tag >> w)) throw std::runtime_error(path + ": bad line '" + line + "'");
    if (tag == "*") {
      def = w;
    } else {
      weights[tag] = w;
    }
  }
  return GravTable(std::move(weights), def);
}

double GravTable::Weight(std::string_view tag) const {
  return static_cast<double>(WeightMilli(tag)) / kWeightScale;
}

std::int64_t GravTable::WeightMilli(std::string_view tag) const {
  auto it = milli_.find(tag);
  return it == milli_.end() ? default_milli_ : it->second;
}

void GravTable::Validate(const Tagset& tagset) const {
  std::int64_t min_core = INT64_MAX, max_other = default_milli_;
  for (const auto& [tag, m] : milli_) {
    PosClass c = tagset.Classify(tag);
    if (c == PosClass::kNoun || c == PosClass::kVerb) {
      min_core = std::min(min_core, m);
    } else {
      max_other = std::max(max_other, m);
    }
  }
  if (min_core != INT64_MAX && min_core < max_other) {
    throw std::invalid_argument(
        "GRAV table must weight nouns and verbs at least as high as any other tag");
  }
}

Role RouteRole(std::string_view deprel, Attachment attachment) {
  if (attachment != Attachment::kNounIsDependent) return Role::kOther;
  std::string_view base = deprel.substr(0, deprel.find(':'));
  if (base == "nsubj" || base == "subj" || base == "subj_pass") return Role::kSubj;
  if (base == "obj" || base == "dobj" || base == "iobj") return Role::kObj;
  return Role::kOther;
}

MatrixBuilder::MatrixBuilder(const RowVocab& rows,
                             std::vector<const DimensionSet*> dims,
                             const BuildOptions& options)
    : rows_(rows), dims_(std::move(dims)), options_(options), acc_(dims_.size()) {
  if (options_.window < 1) throw std::invalid_argument("window must be >= 1");
}

void MatrixBuilder::Add(const SentenceGraph& g) {
  const int n = static_cast<int>(g.size());
  for (int ti = 1; ti <= n; ++ti) {
    const Token& t = g.token(ti);
    auto row = rows_.Find(t.lemma);
    if (!row) continue;
    std::vector<int> dist = g.DistancesFrom(ti, options_.window);
    for (int ci = 1; ci <= n; ++ci) {
      int d = dist[ci - 1];
      if (d <= 0) continue;  // unreachable or the target itself
      const Token& c = g.token(ci);
      const std::string& tag = options_.tagset.TagOf(c);
      if (options_.tagset.Classify(tag) == PosClass::kOther) continue;
      std::int64_t w = options_.grav.WeightMilli(tag);
      if (w == 0) continue;
      Attachment att = t.head == ci   ? Attachment::kNounIsDependent
                       : c.head == ti ? Attachment::kNounIsHead
                                      : Attachment::kIndirect;
      for (std::size_t m = 0; m < dims_.size(); ++m) {
        const DimensionSet& ds = *dims_[m];
        auto col = ds.kind() == DimensionKind::kVerb
                       ? ds.Column(c.lemma, RouteRole(t.deprel, att))
                       : ds.Column(c.lemma);
        if (!col) continue;
        std::uint64_t key = (static_cast<std::uint64_t>(*row) << 32) | *col;
        acc_[m][key] += w;
      }
    }
  }
}

void MatrixBuilder::Merge(const MatrixBuilder& other) {
  if (other.dims_.size() != dims_.size()) {
    throw std::invalid_argument("cannot merge builders over different matrices");
  }
  for (std::size_t m = 0; m < acc_.size(); ++m) {
    for (const auto& [key, w] : other.acc_[m]) acc_[m][key] += w;
  }
}

std::vector<CoocMatrix> MatrixBuilder::Finish() const {
  std::vector<CoocMatrix> out;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    std::vector<Cell> cells;
    cells.reserve(acc_[m].size());
    for (const auto& [key, w] : acc_[m]) {
      cells.push_back({static_cast<std::uint32_t>(key >> 32),
                       static_cast<std::uint32_t>(key & 0xffffffffu), w});
    }
    CoocMeta meta;
    meta.window = options_.window;
    meta.weighting = options_.weighting;
    meta.corpus = options_.corpus_id;
    out.emplace_back(dims_[m]->name(), rows_, *dims_[m], std::move(meta),
                     std::move(cells));
  }
  return out;
}

CoocMatrix BuildMatrix(const std::vector<SentenceGraph>& corpus,
                       const RowVocab& rows, const DimensionSet& dims,
                       const BuildOptions& options) {
  MatrixBuilder b(rows, {&dims}, options);
  for (const auto& g : corpus) b.Add(g);
  return std::move(b.Finish().front());
}

std::vector<CoocMatrix> BuildMatrices(ConlluReader& reader, const RowVocab& rows,
                                      const std::vector<DimensionSet>& dims,
                                      const BuildOptions& options,
                                      BuildStats* stats) {
  std::vector<const DimensionSet*> ptrs;
  for (const auto& d : dims) ptrs.push_back(&d);
  const int workers = std::max(1, options.workers);
  std::vector<MatrixBuilder> builders;
  for (int w = 0; w < workers; ++w) builders.emplace_back(rows, ptrs, options);

  BuildStats local;
  constexpr std::size_t kBatch = 4096;
  std::vector<SentenceGraph> batch;
  bool done = false;
  while (!done) {
    batch.clear();
    while (batch.size() < kBatch) {
      auto g = reader.Next();
      if (!g) {
        done = true;
        break;
      }
      local.tokens += g->size();
      batch.push_back(std::move(*g));
    }
    local.sentences += batch.size();
    if (workers == 1) {
      for (const auto& g : batch) builders[0].Add(g);
      continue;
    }
    std::vector<std::jthread> threads;
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < batch.size(); i += workers) builders[w].Add(batch[i]);
      });
    }
  }
  for (int w = 1; w < workers; ++w) builders[0].Merge(builders[w]);
  local.skipped_sentences = reader.skipped();
  if (stats) *stats = local;
  return builders[0].Finish();
}

std::string FormatManifest(const CoocMatrix& m, const BuildOptions& options,
                           const BuildStats& stats) {
  std::ostringstream out;
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "name\t" << m.name() << '\n'
      << "kind\t" << KindName(m.dims().kind()) << '\n'
      << "corpus\t" << options.corpus_id << '\n'
      << "built_at\t" << stamp << '\n'
      << "window\t" << options.window << '\n'
      << "weighting\t" << options.weighting << '\n'
      << "rows\t" << m.rows().size() << '\n'
      << "row_source\t" << m.rows().source() << '\n'
      << "physical_cols\t" << m.dims().physical_size() << '\n'
      << "logical_cols\t" << m.dims().logical_size() << '\n'
      << "nnz\t" << m.nnz() << '\n'
      << "sentences\t" << stats.sentences << '\n'
      << "tokens\t" << stats.tokens << '\n'
      << "skipped_sentences\t" << stats.skipped_sentences << '\n'
      << "workers\t" << options.workers << '\n';
  out << "source_tags\t";
  for (std::size_t i = 0; i < m.dims().source_tags().size(); ++i) {
    out << (i ? "," : "") << m.dims().source_tags()[i];
  }
  out << '\n';
  for (const auto& [tag, milli] : options.grav.entries()) {
    out << "grav\t" << tag << '\t' << FormatMilli(milli) << '\n';
  }
  out << "grav_default\t" << FormatMilli(static_cast<std::int64_t>(
                                 std::llround(options.grav.default_weight() * kWeightScale)))
      << '\n';
  return out.str();
}

}  // namespace domavec
