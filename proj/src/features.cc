#include "domavec/features.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace domavec {

namespace {

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    out.push_back(cur);
  }
  return out;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  for (auto& item : SplitOn(s, ',')) {
    auto b = item.find_first_not_of(' ');
    auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FeatureError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FeatureConfig ParseFeatureConfig(const std::string& text) {
  FeatureConfig cfg;
  bool explicit_prototypes = false;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  for (auto& line : SplitOn(text, '\n')) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = SplitOn(line, '\t');
    auto fail = [&](const std::string& msg) {
      return FeatureError("feature config line " + std::to_string(line_no) + ": " + msg);
    };
    if (cols[0] == "prototypes" && cols.size() == 2) {
      cfg.prototypes = SplitList(cols[1]);
      explicit_prototypes = true;
    } else if (cols[0] == "generic" && cols.size() == 2) {
      cfg.generic = cols[1];
    } else if (cols[0] == "feature" && cols.size() == 5) {
      FeatureSpec f{cols[1], cols[2], cols[3], SplitList(cols[4])};
      if (f.id.empty() || f.matrix.empty()) throw fail("empty feature id or matrix");
      if (f.prototypes.empty()) throw fail("feature " + f.id + " has no prototypes");
      if (!ids.insert(f.id).second) throw fail("duplicate feature " + f.id);
      cfg.features.push_back(std::move(f));
    } else {
      throw fail("unrecognized record '" + cols[0] + "'");
    }
  }
  if (!explicit_prototypes) {
    std::unordered_set<std::string> seen;
    for (const auto& f : cfg.features) {
      for (const auto& p : f.prototypes) {
        if (seen.insert(p).second) cfg.prototypes.push_back(p);
      }
    }
  }
  std::unordered_set<std::string> known(cfg.prototypes.begin(), cfg.prototypes.end());
  if (known.size() != cfg.prototypes.size()) {
    throw FeatureError("duplicate entries in the prototype set");
  }
  for (const auto& f : cfg.features) {
    for (const auto& p : f.prototypes) {
      if (!known.count(p)) {
        throw FeatureError("feature " + f.id + " uses '" + p +
                           "', which is not in the prototype set");
      }
    }
  }
  return cfg;
}

FeatureConfig LoadFeatureConfig(const std::string& path) {
  return ParseFeatureConfig(ReadAll(path));
}

double WeightedSimilarity(double s, double sg) { return (2.0 * s + sg) / 3.0; }

PsimMap PercentageSimilarity(const std::map<std::string, double>& wsims) {
  double total = 0.0;
  for (const auto& [p, w] : wsims) total += w;
  if (!(total > 0.0)) {
    throw DegenerateSimilarity("weighted similarities sum to zero");
  }
  PsimMap out;
  for (const auto& [p, w] : wsims) out[p] = kPercent * w / total;
  return out;
}

namespace {

double PsimOf(const PsimMap& psims, const std::string& p) {
  auto it = psims.find(p);
  if (it == psims.end()) throw FeatureError("no Psim for prototype " + p);
  return it->second;
}

// Psim values of a feature's related prototypes.
std::vector<double> RelatedValues(const PsimMap& psims, const FeatureSpec& f) {
  std::vector<double> out;
  for (const auto& p : f.prototypes) out.push_back(PsimOf(psims, p));
  return out;
}

double CentralityFromCount(std::size_t k, std::size_t n_p) {
  if (k == 0) return 0.0;
  return std::log(static_cast<double>(k)) / std::log(static_cast<double>(n_p));
}

void RequireCentralityBase(const FeatureSpec& f) {
  if (f.prototypes.size() < 2) {
    throw FeatureError("feature " + f.id +
                       " has a single prototype; centrality is undefined");
  }
}

}  // namespace

RelatedUnrelated RelatedUnrelatedAverages(const PsimMap& psims,
                                          const FeatureSpec& feature) {
  if (feature.prototypes.empty()) {
    throw FeatureError("feature " + feature.id + " has no prototypes");
  }
  std::unordered_set<std::string> related(feature.prototypes.begin(),
                                          feature.prototypes.end());
  double rel = 0.0;
  for (double v : RelatedValues(psims, feature)) rel += v;
  double unrel = 0.0;
  std::size_t n_unrel = 0;
  for (const auto& [p, v] : psims) {
    if (related.count(p)) continue;
    unrel += v;
    ++n_unrel;
  }
  if (n_unrel == 0) {
    throw FeatureError("feature " + feature.id + " covers every prototype");
  }
  return {rel / static_cast<double>(feature.prototypes.size()),
          unrel / static_cast<double>(n_unrel)};
}

double Centrality(const PsimMap& psims, const FeatureSpec& feature, double ck) {
  RequireCentralityBase(feature);
  std::size_t k = 0;
  for (double v : RelatedValues(psims, feature)) k += v > ck ? 1 : 0;
  return CentralityFromCount(k, feature.prototypes.size());
}

double FeatureIndex(double s_rel, double s_unrel, double c_t) {
  return s_rel - s_unrel + c_t;
}

SimTable ComputeSimTable(const std::string& target, const VectorSpace& matrix,
                         const VectorSpace& generic,
                         const std::vector<std::string>& prototypes,
                         const Measure& measure) {
  SimTable t{target, matrix.name(), {}, {}, {}, {}};
  for (const auto& p : prototypes) {
    double s = WordSimilarity(matrix, p, target, measure).value;
    double sg = WordSimilarity(generic, p, target, measure).value;
    t.raw[p] = s;
    t.generic[p] = sg;
    t.wsim[p] = WeightedSimilarity(s, sg);
  }
  try {
    t.psim = PercentageSimilarity(t.wsim);
  } catch (const DegenerateSimilarity&) {
    throw DegenerateSimilarity("all weighted similarities of '" + target +
                               "' are zero in " + matrix.name());
  }
  return t;
}

namespace {

// Everything about a (target, feature) pair that does not depend on PK/CK.
struct PairBase {
  std::string feature;
  double s_rel;
  double s_unrel;
  std::vector<double> related;  // sorted descending
};

std::vector<PairBase> ComputeBases(const std::string& target,
                                   const FeatureConfig& config,
                                   const MatrixLookup& matrices,
                                   const Measure& measure) {
  const VectorSpace& generic = matrices(config.generic);
  std::map<std::string, SimTable> tables;
  std::vector<PairBase> out;
  for (const auto& f : config.features) {
    RequireCentralityBase(f);
    auto it = tables.find(f.matrix);
    if (it == tables.end()) {
      it = tables
               .emplace(f.matrix, ComputeSimTable(target, matrices(f.matrix), generic,
                                                  config.prototypes, measure))
               .first;
    }
    auto avgs = RelatedUnrelatedAverages(it->second.psim, f);
    auto rel = RelatedValues(it->second.psim, f);
    std::sort(rel.begin(), rel.end(), std::greater<>());
    out.push_back({f.id, avgs.related, avgs.unrelated, std::move(rel)});
  }
  return out;
}

FeatureScore Score(const std::string& target, const PairBase& b, double pk,
                   double ck) {
  std::size_t k = 0;
  while (k < b.related.size() && b.related[k] > ck) ++k;
  FeatureScore s;
  s.target = target;
  s.feature = b.feature;
  s.s_rel = b.s_rel;
  s.s_unrel = b.s_unrel;
  s.c_t = CentralityFromCount(k, b.related.size());
  s.f_t = FeatureIndex(s.s_rel, s.s_unrel, s.c_t);
  s.assigned = s.f_t > pk;
  return s;
}

}  // namespace

std::vector<FeatureScore> AssignFeatures(const std::string& target,
                                         const FeatureConfig& config,
                                         const MatrixLookup& matrices, double pk,
                                         double ck, const Measure& measure) {
  std::vector<FeatureScore> out;
  for (const auto& b : ComputeBases(target, config, matrices, measure)) {
    out.push_back(Score(target, b, pk, ck));
  }
  return out;
}

Metrics MetricsFromCounts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision_undefined = tp + fp == 0;
  m.recall_undefined = tp + fn == 0;
  m.precision = m.precision_undefined ? 0.0 : static_cast<double>(tp) / (tp + fp);
  m.recall = m.recall_undefined ? 0.0 : static_cast<double>(tp) / (tp + fn);
  double denom = m.precision + m.recall;
  m.f1 = denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
  return m;
}

GoldStandard LoadGold(const std::string& path) {
  GoldStandard gold;
  std::size_t line_no = 0;
  for (auto& line : SplitOn(ReadAll(path), '\n')) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = SplitOn(line, '\t');
    if (cols.size() != 2) {
      throw FeatureError(path + ":" + std::to_string(line_no) +
                         ": expected target<TAB>feature_id");
    }
    gold[cols[0]].insert(cols[1]);
  }
  return gold;
}

namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

Counts CountTarget(const std::string& target, const std::set<std::string>& assigned,
                   const GoldStandard& gold) {
  auto it = gold.find(target);
  if (it == gold.end()) throw FeatureError("gold standard has no entry for " + target);
  Counts c;
  for (const auto& f : assigned) {
    if (it->second.count(f)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  for (const auto& f : it->second) c.fn += assigned.count(f) ? 0 : 1;
  return c;
}

}  // namespace

Metrics Evaluate(const std::vector<FeatureScore>& scores, const GoldStandard& gold) {
  std::map<std::string, std::set<std::string>> assigned;
  for (const auto& s : scores) {
    auto& set = assigned[s.target];
    if (s.assigned) set.insert(s.feature);
  }
  Counts total;
  for (const auto& [target, feats] : assigned) {
    Counts c = CountTarget(target, feats, gold);
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  return MetricsFromCounts(total.tp, total.fp, total.fn);
}

std::vector<double> Grid::Values() const {
  if (!(step > 0.0) || max < min) throw FeatureError("invalid sweep grid");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    double v = min + static_cast<double>(i) * step;
    if (v > max + step * 1e-9) break;
    // Snap to 1e-9 so grid points print and compare cleanly.
    out.push_back(std::round(v * 1e9) / 1e9);
  }
  return out;
}

Grid ParseGrid(const std::string& spec) {
  auto parts = SplitOn(spec, ':');
  if (parts.size() != 3) throw FeatureError("grid must be min:max:step, got " + spec);
  try {
    return Grid{std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
  } catch (const std::exception&) {
    throw FeatureError("grid must be min:max:step, got " + spec);
  }
}

SweepResult Sweep(const std::vector<std::string>& targets,
                  const FeatureConfig& config, const MatrixLookup& matrices,
                  const std::vector<double>& pk_grid,
                  const std::vector<double>& ck_grid, const GoldStandard& gold,
                  const Measure& measure) {
  if (pk_grid.empty() || ck_grid.empty()) throw FeatureError("empty sweep grid");
  std::vector<std::vector<PairBase>> bases;
  for (const auto& t : targets) {
    if (!gold.count(t)) throw FeatureError("gold standard has no entry for " + t);
    bases.push_back(ComputeBases(t, config, matrices, measure));
  }
  SweepResult result;
  for (double pk : pk_grid) {
    for (double ck : ck_grid) {
      Counts total;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        std::set<std::string> assigned;
        for (const auto& b : bases[i]) {
          if (Score(targets[i], b, pk, ck).assigned) assigned.insert(b.feature);
        }
        Counts c = CountTarget(targets[i], assigned, gold);
        total.tp += c.tp;
        total.fp += c.fp;
        total.fn += c.fn;
      }
      result.points.push_back({pk, ck, MetricsFromCounts(total.tp, total.fp, total.fn)});
      if (result.points.back().metrics.f1 > result.points[result.best].metrics.f1) {
        result.best = result.points.size() - 1;
      }
    }
  }
  return result;
}

}  // namespace domavec
