#include "domavec/cli.h"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <pthread.h>

#include "CLI11.hpp"
#include "domavec/catalog.h"
#include "domavec/concept_network.h"
#include "domavec/features.h"
#include "domavec/lexicon.h"
#include "domavec/query.h"
#include "domavec/sdw2.h"
#include "domavec/service.h"
#include "domavec/treebank.h"
#include "domavec/vecspace.h"

namespace domavec {

namespace fs = std::filesystem;

namespace {

std::string Trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
}

void ReportOov(const std::vector<OovNote>& oov, std::ostream& err) {
  for (const auto& o : oov) {
    err << "warning: '" << o.word << "' not in " << o.matrix << ", skipped\n";
  }
  if (!oov.empty()) {
    err << "warning: " << oov.size() << " out-of-vocabulary word/matrix pair"
        << (oov.size() == 1 ? "" : "s") << '\n';
  }
}

std::shared_ptr<const CoocMatrix> AsCooc(const std::shared_ptr<const VectorSpace>& m,
                                         const std::string& name) {
  auto c = std::dynamic_pointer_cast<const CoocMatrix>(m);
  if (!c) throw std::invalid_argument(name + " is already a reduced matrix");
  return c;
}

struct Common {
  std::vector<std::string> matrices;
  std::string words;
  std::string catalog;
  std::string out = ".";
  std::string measure = "cosine";
};

void AddCommon(CLI::App* cmd, Common& c, bool need_words = true) {
  cmd->add_option("--matrices", c.matrices, "Comma-separated matrix names or files")
      ->delimiter(',')
      ->required();
  auto w = cmd->add_option("--words", c.words, "Word list, one per line")
               ->check(CLI::ExistingFile);
  if (need_words) w->required();
  cmd->add_option("--catalog", c.catalog, "Catalog file (default $DOMAVEC_CATALOG)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory");
}

std::vector<NamedSpace> Open(const Common& c) {
  auto cat = ResolveCatalog(c.catalog, c.matrices);
  return SelectMatrices(*cat, c.matrices);
}

// build --------------------------------------------------------------------

struct BuildArgs {
  std::string corpus, rows, recipe, out, grav;
  int window = 2;
  int workers = 1;
  std::size_t cutoff = 0;
  bool skip_malformed = false;
  bool xpos = false;
};

int RunBuild(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  BuildRecipe recipe = LoadRecipe(a.recipe);
  std::size_t cutoff = a.cutoff ? a.cutoff : recipe.row_cutoff;
  RowVocab rows = BuildRowVocab(LoadFrequencyList(a.rows), cutoff, a.rows);

  std::vector<DimensionSet> dims;
  for (const auto& m : recipe.matrices) {
    try {
      if (m.kind == DimensionKind::kGeneric) {
        dims.push_back(GenericDimensions(rows, m.name));
        continue;
      }
      std::vector<LexEntry> entries;
      for (const auto& d : m.dictionaries) {
        auto part = LoadDictionary(d);
        entries.insert(entries.end(), part.begin(), part.end());
      }
      if (m.kind == DimensionKind::kVerb) {
        dims.push_back(SelectVerbDomain(m.name, entries, m.tags, m.min_dims));
      } else {
        dims.push_back(SelectDomain(m.name, entries, m.tags, m.merges, m.min_dims));
      }
    } catch (const DomainTooSmall& e) {
      err << "warning: " << e.what() << "; matrix skipped\n";
    }
  }
  if (dims.empty()) throw std::runtime_error("recipe yields no buildable matrix");

  BuildOptions opt;
  opt.window = a.window;
  opt.workers = a.workers;
  opt.corpus_id = a.corpus;
  if (!a.grav.empty()) opt.grav = GravTable::Load(a.grav);
  if (a.xpos) opt.tagset.column = Tagset::Column::kXpos;
  opt.grav.Validate(opt.tagset);

  auto in = OpenCorpus(a.corpus);
  ConlluReader reader(*in, a.skip_malformed ? OnMalformed::kSkipSentence
                                            : OnMalformed::kAbort);
  BuildStats stats;
  auto built = BuildMatrices(reader, rows, dims, opt, &stats);
  if (stats.skipped_sentences > 0) {
    err << "warning: " << stats.skipped_sentences << " malformed sentence"
        << (stats.skipped_sentences == 1 ? "" : "s") << " skipped\n";
  }

  EnsureDir(a.out);
  fs::path dir(a.out);
  fs::path catalog_path = dir / "catalog.json";
  MatrixCatalog cat;
  for (const auto& m : built) {
    fs::path file = dir / (m.name() + ".doma");
    SaveMatrix(m, file.string());
    WriteFile(dir / (m.name() + ".manifest"), FormatManifest(m, opt, stats));
    cat.Add(m.name(), file.string());
    out << m.name() << '\t' << m.rows().size() << 'x' << m.dims().physical_size()
        << '\t' << m.nnz() << " nonzero\n";
  }
  cat.Save(catalog_path.string());
  out << "sentences\t" << stats.sentences << "\ntokens\t" << stats.tokens << '\n';
  return 0;
}

// reduce -------------------------------------------------------------------

int RunReduce(const Common& c, std::size_t rank, std::ostream& out) {
  auto cat = ResolveCatalog(c.catalog, c.matrices);
  EnsureDir(c.out);
  fs::path dir(c.out);
  fs::path catalog_path = dir / "catalog.json";
  std::shared_ptr<MatrixCatalog> out_cat = fs::exists(catalog_path)
                                               ? MatrixCatalog::Load(catalog_path.string())
                                               : std::make_shared<MatrixCatalog>();
  for (const auto& name : c.matrices) {
    auto m = AsCooc(cat->Get(name), name);
    ReducedMatrix r = ReduceSvd(*m, rank);
    std::string rname = m->name() + "_svd" + std::to_string(rank);
    fs::path file = dir / (rname + ".doma");
    SaveMatrix(r, file.string());
    if (!out_cat->Contains(rname)) out_cat->Add(rname, file.string());
    out << rname << '\t' << r.rows().size() << 'x' << r.rank() << '\n';
  }
  out_cat->Save(catalog_path.string());
  return 0;
}

// vectors / sim / nn -------------------------------------------------------

int RunVectors(const Common& c, std::ostream& err) {
  auto words = ReadWordList(c.words);
  auto matrices = Open(c);
  auto res = QueryVectors(matrices, words);
  EnsureDir(c.out);
  WriteFile(fs::path(c.out) / "vectors.txt", res.text);
  ReportOov(res.oov, err);
  return 0;
}

int RunSim(const Common& c, const std::string& targets_path, std::ostream& err) {
  auto words = ReadWordList(c.words);
  auto targets = ReadWordList(targets_path);
  if (targets.empty()) throw UsageError("target list " + targets_path + " is empty");
  auto matrices = Open(c);
  auto res = QuerySimilarity(matrices, words, targets, GetMeasure(c.measure));
  EnsureDir(c.out);
  for (const auto& f : res.files) {
    WriteFile(fs::path(c.out) / (FileStem(f.word) + ".sim.txt"), f.text);
  }
  ReportOov(res.oov, err);
  return 0;
}

int RunNn(const Common& c, std::size_t k, std::size_t expand, std::ostream& err) {
  auto words = ReadWordList(c.words);
  auto matrices = Open(c);
  const Measure& measure = GetMeasure(c.measure);
  auto res = QueryNeighbors(matrices, words, k, measure);
  EnsureDir(c.out);
  for (const auto& f : res.files) {
    WriteFile(fs::path(c.out) / (FileStem(f.word) + ".nn.txt"), f.text);
    if (expand == 0) continue;
    for (const auto& [name, list] : f.lists) {
      const VectorSpace* space = nullptr;
      for (const auto& m : matrices) {
        if (m.name == name) space = m.space.get();
      }
      auto g = NeighborGraph(*space, f.word, k, expand, measure);
      std::ostringstream edges;
      WriteEdgeList(g, edges);
      WriteFile(fs::path(c.out) / (FileStem(f.word) + "." + FileStem(name) + ".graph.tsv"),
                edges.str());
    }
  }
  ReportOov(res.oov, err);
  return 0;
}

// classify -----------------------------------------------------------------

struct ClassifyArgs {
  std::size_t rank = kDefaultRank;
  double resolution = kDefaultResolution;
  std::uint64_t seed = 0;
  double edge_floor = 0.0;
  std::string labels;
};

std::map<std::string, std::string> LoadLabels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::map<std::string, std::string> labels;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(n) + ": expected word<TAB>label");
    }
    labels[line.substr(0, tab)] = Trim(line.substr(tab + 1));
  }
  return labels;
}

int RunClassify(const Common& c, const ClassifyArgs& a, std::ostream& out,
                std::ostream& err) {
  auto words = ReadWordList(c.words);
  auto matrices = Open(c);
  // Concept matrices need one rank; cap it by the smallest count matrix.
  std::size_t rank = a.rank;
  for (const auto& m : matrices) {
    if (auto cooc = std::dynamic_pointer_cast<const CoocMatrix>(m.space)) {
      std::size_t cap = std::min(cooc->rows().size(), cooc->dims().physical_size());
      if (rank > cap) {
        err << "warning: rank " << rank << " exceeds " << m.name << " (" << cap
            << "); using " << cap << '\n';
        rank = cap;
      }
    }
  }
  std::vector<ReducedMatrix> reduced;
  for (const auto& m : matrices) {
    if (auto r = std::dynamic_pointer_cast<const ReducedMatrix>(m.space)) {
      reduced.push_back(*r);
    } else {
      reduced.push_back(ReduceSvd(*AsCooc(m.space, m.name), rank));
    }
  }
  rank = reduced.front().rank();
  for (const auto& r : reduced) {
    if (r.rank() != rank) {
      throw std::invalid_argument("concept matrices need a common rank; " + r.name() +
                                  " has " + std::to_string(r.rank()));
    }
  }
  ConceptSpace space(std::move(reduced));

  std::vector<std::string> kept;
  std::map<std::string, ConceptMatrix> concepts;
  std::vector<OovNote> oov;
  for (const auto& w : words) {
    if (concepts.count(w)) continue;
    try {
      concepts.emplace(w, space.Concept(w));
      kept.push_back(w);
    } catch (const OovError& e) {
      oov.push_back({e.word(), e.matrix()});
    }
  }
  ReportOov(oov, err);
  if (kept.size() < 2) throw std::runtime_error("fewer than two in-vocabulary words");

  std::vector<SkippedPair> skipped;
  auto g = BuildGraph(
      kept,
      [&](const std::string& x, const std::string& y) {
        auto s = TensorSimilarity(concepts.at(x), concepts.at(y));
        if (s.degenerate) throw std::domain_error("zero concept vector");
        return s.value;
      },
      a.edge_floor, &skipped);
  for (const auto& s : skipped) {
    err << "warning: pair " << s.a << '/' << s.b << " skipped: " << s.reason << '\n';
  }
  Partition p = Louvain(g, a.resolution, a.seed);

  EnsureDir(c.out);
  std::ostringstream edges, part;
  WriteEdgeList(g, edges);
  WritePartition(p, g.nodes(), part);
  WriteFile(fs::path(c.out) / "edges.tsv", edges.str());
  WriteFile(fs::path(c.out) / "partition.tsv", part.str());
  out << "nodes\t" << g.size() << "\nedges\t" << g.edges().size() << "\nclasses\t"
      << p.class_count() << "\nmodularity\t" << FormatNumber(p.modularity) << '\n';
  if (!a.labels.empty()) {
    auto labels = LoadLabels(a.labels);
    double precision = ClassPrecision(p, g.nodes(), MajorityJudgments(p, g.nodes(), labels));
    out << "precision\t" << FormatNumber(precision) << '\n';
  }
  return 0;
}

// features -----------------------------------------------------------------

struct FeatureArgs {
  std::string config, targets, gold, sweep, catalog, out = ".", measure = "cosine";
  double pk = 0.71;
  double ck = 3.9;
};

int RunFeatures(const FeatureArgs& a, std::ostream& out, std::ostream& err) {
  FeatureConfig config = LoadFeatureConfig(a.config);
  std::vector<std::string> names{config.generic};
  for (const auto& f : config.features) names.push_back(f.matrix);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  auto cat = ResolveCatalog(a.catalog, names);
  auto lookup = cat->Lookup();
  const Measure& measure = GetMeasure(a.measure);

  auto targets = ReadWordList(a.targets);
  std::vector<std::string> kept;
  std::vector<FeatureScore> all;
  std::vector<OovNote> oov;
  EnsureDir(a.out);
  for (const auto& t : targets) {
    std::vector<FeatureScore> scores;
    try {
      scores = AssignFeatures(t, config, lookup, a.pk, a.ck, measure);
    } catch (const OovError& e) {
      if (e.word() != t) throw;
      oov.push_back({e.word(), e.matrix()});
      continue;
    }
    kept.push_back(t);
    WriteFile(fs::path(a.out) / (FileStem(t) + ".features.tsv"), FormatFeatureReport(scores));
    all.insert(all.end(), scores.begin(), scores.end());
  }
  ReportOov(oov, err);

  if (a.gold.empty()) {
    if (!a.sweep.empty()) throw UsageError("--sweep needs --gold");
    return 0;
  }
  GoldStandard gold = LoadGold(a.gold);
  Metrics m = Evaluate(all, gold);
  std::ostringstream metrics;
  metrics << "PK\tCK\tTP\tFP\tFN\tP\tR\tF1\n"
          << FormatNumber(a.pk) << '\t' << FormatNumber(a.ck) << '\t' << m.tp << '\t'
          << m.fp << '\t' << m.fn << '\t' << FormatNumber(m.precision) << '\t'
          << FormatNumber(m.recall) << '\t' << FormatNumber(m.f1) << '\n';
  WriteFile(fs::path(a.out) / "metrics.tsv", metrics.str());
  out << "P\t" << FormatNumber(m.precision) << "\nR\t" << FormatNumber(m.recall)
      << "\nF1\t" << FormatNumber(m.f1) << '\n';
  if (m.precision_undefined) err << "warning: no features assigned; precision undefined\n";

  if (!a.sweep.empty()) {
    auto comma = a.sweep.find(',');
    if (comma == std::string::npos) {
      throw UsageError("--sweep expects pkmin:pkmax:step,ckmin:ckmax:step");
    }
    Grid pk, ck;
    try {
      pk = ParseGrid(a.sweep.substr(0, comma));
      ck = ParseGrid(a.sweep.substr(comma + 1));
    } catch (const std::exception& e) {
      throw UsageError(std::string("--sweep: ") + e.what());
    }
    SweepResult s = Sweep(kept, config, lookup, pk.Values(), ck.Values(), gold, measure);
    WriteFile(fs::path(a.out) / "sweep.tsv", FormatSweepTable(s));
    const SweepPoint& best = s.points[s.best];
    out << "best\tPK=" << FormatNumber(best.pk) << "\tCK=" << FormatNumber(best.ck)
        << "\tF1=" << FormatNumber(best.metrics.f1) << '\n';
  }
  return 0;
}

// serve --------------------------------------------------------------------

int RunServe(const std::string& catalog_path, const std::string& bind, std::ostream& out) {
  std::string path = catalog_path;
  if (path.empty()) {
    if (const char* env = std::getenv("DOMAVEC_CATALOG")) path = env;
  }
  if (path.empty()) throw UsageError("serve needs --catalog or DOMAVEC_CATALOG");
  if (!fs::is_regular_file(path)) throw UsageError("no such catalog " + path);
  auto cat = MatrixCatalog::Load(path);
  cat->Preload();

  // Signals are taken synchronously so shutdown can drain in-flight requests.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  HttpServer server(cat);
  BindAddress addr = ParseBind(bind);
  int port = server.Start(addr);
  out << "listening on " << addr.host << ':' << port << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.Stop();
  out << "stopped" << std::endl;
  return 0;
}

}  // namespace

std::vector<std::string> ReadWordList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Domain-restricted distributional vector spaces", "domavec");
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build co-occurrence matrices from a treebank");
  b->add_option("--corpus", build.corpus, "CoNLL-U corpus (.gz accepted)")
      ->required()
      ->check(CLI::ExistingFile);
  b->add_option("--rows", build.rows, "Frequency list word<TAB>count")
      ->required()
      ->check(CLI::ExistingFile);
  b->add_option("--recipe", build.recipe, "Build recipe (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  b->add_option("--out", build.out, "Output directory")->required();
  b->add_option("--window", build.window, "Syntactic distance window")
      ->check(CLI::PositiveNumber);
  b->add_option("--workers", build.workers, "Worker threads")->check(CLI::PositiveNumber);
  b->add_option("--grav", build.grav, "POS weight table")->check(CLI::ExistingFile);
  b->add_option("--cutoff", build.cutoff, "Row vocabulary size (overrides recipe)");
  b->add_flag("--skip-malformed", build.skip_malformed, "Skip malformed sentences");
  b->add_flag("--xpos", build.xpos, "Classify contexts by XPOS instead of UPOS");

  Common red;
  std::size_t red_rank = kDefaultRank;
  auto* r = app.add_subcommand("reduce", "Reduce matrices with truncated SVD");
  AddCommon(r, red, false);
  r->add_option("--rank", red_rank, "Target rank")->check(CLI::PositiveNumber);

  Common vec;
  auto* v = app.add_subcommand("vectors", "Write word vectors");
  AddCommon(v, vec);

  Common sim;
  std::string sim_targets;
  auto* s = app.add_subcommand("sim", "Write word-to-target similarities");
  AddCommon(s, sim);
  s->add_option("--targets", sim_targets, "Target word list")
      ->required()
      ->check(CLI::ExistingFile);
  s->add_option("--measure", sim.measure, "Similarity measure");

  Common nn;
  std::size_t nn_k = 20, nn_expand = 0;
  auto* n = app.add_subcommand("nn", "Write nearest neighbours");
  AddCommon(n, nn);
  n->add_option("--k", nn_k, "Neighbours per word")->check(CLI::PositiveNumber);
  n->add_option("--measure", nn.measure, "Similarity measure");
  n->add_option("--expand", nn_expand, "Also write a graph with N neighbours of each neighbour");

  Common cls;
  ClassifyArgs cls_args;
  auto* c = app.add_subcommand("classify", "Cluster words by concept-matrix similarity");
  AddCommon(c, cls);
  c->add_option("--rank", cls_args.rank, "SVD rank")->check(CLI::PositiveNumber);
  c->add_option("--resolution", cls_args.resolution, "Modularity resolution");
  c->add_option("--seed", cls_args.seed, "Tie-breaking seed");
  c->add_option("--edge-floor", cls_args.edge_floor, "Omit edges below this weight");
  c->add_option("--labels", cls_args.labels, "Reference labels word<TAB>label")
      ->check(CLI::ExistingFile);

  FeatureArgs feat;
  auto* f = app.add_subcommand("features", "Assign semantic features to targets");
  f->add_option("--config", feat.config, "Feature configuration")
      ->required()
      ->check(CLI::ExistingFile);
  f->add_option("--targets", feat.targets, "Target word list")
      ->required()
      ->check(CLI::ExistingFile);
  f->add_option("--gold", feat.gold, "Gold standard target<TAB>feature")
      ->check(CLI::ExistingFile);
  f->add_option("--pk", feat.pk, "Assignment threshold");
  f->add_option("--ck", feat.ck, "Centrality threshold");
  f->add_option("--sweep", feat.sweep, "pkmin:pkmax:step,ckmin:ckmax:step");
  f->add_option("--catalog", feat.catalog, "Catalog file")->check(CLI::ExistingFile);
  f->add_option("--out", feat.out, "Output directory");
  f->add_option("--measure", feat.measure, "Similarity measure");

  std::string serve_catalog, serve_bind = "127.0.0.1:8080";
  auto* sv = app.add_subcommand("serve", "Serve read-only queries over HTTP");
  sv->add_option("--catalog", serve_catalog, "Catalog file (default $DOMAVEC_CATALOG)");
  sv->add_option("--bind", serve_bind, "host:port");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (const std::string* m : {&sim.measure, &nn.measure, &feat.measure}) {
    try {
      GetMeasure(*m);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }

  try {
    if (b->parsed()) return RunBuild(build, out, err);
    if (r->parsed()) return RunReduce(red, red_rank, out);
    if (v->parsed()) return RunVectors(vec, err);
    if (s->parsed()) return RunSim(sim, sim_targets, err);
    if (n->parsed()) return RunNn(nn, nn_k, nn_expand, err);
    if (c->parsed()) return RunClassify(cls, cls_args, out, err);
    if (f->parsed()) return RunFeatures(feat, out, err);
    if (sv->parsed()) return RunServe(serve_catalog, serve_bind, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnknownMatrix& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace domavec
