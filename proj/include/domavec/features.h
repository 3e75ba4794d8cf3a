// Prototype-based feature attribution.
//
// For a target word t and each prototype p the governing domain matrix gives
// S(p,t) and the generic matrix Sg(p,t). These are blended and normalized per
// matrix over the whole prototype set:
//
//   Wsim(p,t) = (2 S(p,t) + Sg(p,t)) / 3
//   Psim(p,t) = 100 * Wsim(p,t) / sum_p Wsim(p,t)        (percent)
//
// A feature f with prototypes P_f then scores
//
//   F_t = mean_{p in P_f} Psim - mean_{p not in P_f} Psim + C_t
//   C_t = log_{|P_f|} |{p in P_f : Psim(p,t) > CK}|      (0 when the count is 0)
//
// and is assigned when F_t > PK.

#ifndef DOMAVEC_FEATURES_H_
#define DOMAVEC_FEATURES_H_

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "domavec/matrix.h"
#include "domavec/vecspace.h"

namespace domavec {

struct FeatureSpec {
  std::string id;
  std::string family;
  std::string matrix;
  std::vector<std::string> prototypes;
};

struct FeatureConfig {
  std::vector<std::string> prototypes;  // the full prototype set
  std::vector<FeatureSpec> features;
  std::string generic = "GENERIC";
};

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when every Wsim for a target/matrix is zero.
class DegenerateSimilarity : public FeatureError {
 public:
  using FeatureError::FeatureError;
};

// Tab-separated lines: "prototypes <list>", "generic <name>",
// "feature <id> <family> <matrix> <list>"; lists are comma-separated.
FeatureConfig ParseFeatureConfig(const std::string& text);
FeatureConfig LoadFeatureConfig(const std::string& path);

using PsimMap = std::map<std::string, double>;

inline constexpr double kPercent = 100.0;

double WeightedSimilarity(double s, double sg);
PsimMap PercentageSimilarity(const std::map<std::string, double>& wsims);

struct RelatedUnrelated {
  double related;
  double unrelated;
};

RelatedUnrelated RelatedUnrelatedAverages(const PsimMap& psims,
                                          const FeatureSpec& feature);
double Centrality(const PsimMap& psims, const FeatureSpec& feature, double ck);
double FeatureIndex(double s_rel, double s_unrel, double c_t);

// Per-prototype similarities of one target under one governing matrix.
struct SimTable {
  std::string target;
  std::string matrix;
  std::map<std::string, double> raw;      // S(p,t)
  std::map<std::string, double> generic;  // Sg(p,t)
  std::map<std::string, double> wsim;
  PsimMap psim;
};

SimTable ComputeSimTable(const std::string& target, const VectorSpace& matrix,
                         const VectorSpace& generic,
                         const std::vector<std::string>& prototypes,
                         const Measure& measure = GetMeasure("cosine"));

struct FeatureScore {
  std::string target;
  std::string feature;
  double s_rel = 0.0;
  double s_unrel = 0.0;
  double c_t = 0.0;
  double f_t = 0.0;
  bool assigned = false;
};

using MatrixLookup = std::function<const VectorSpace&(const std::string&)>;

// Scores every configured feature for one target.
std::vector<FeatureScore> AssignFeatures(const std::string& target,
                                         const FeatureConfig& config,
                                         const MatrixLookup& matrices, double pk,
                                         double ck,
                                         const Measure& measure = GetMeasure("cosine"));

struct Metrics {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // nothing assigned
  bool recall_undefined = false;     // empty gold
};

Metrics MetricsFromCounts(std::size_t tp, std::size_t fp, std::size_t fn);

using GoldStandard = std::map<std::string, std::set<std::string>>;

// "target<TAB>feature_id" lines.
GoldStandard LoadGold(const std::string& path);

// Micro-averaged over (target, feature) pairs. Every target in `scores` must
// appear in gold.
Metrics Evaluate(const std::vector<FeatureScore>& scores, const GoldStandard& gold);

struct Grid {
  double min, max, step;
  std::vector<double> Values() const;
};
// "min:max:step"
Grid ParseGrid(const std::string& spec);

struct SweepPoint {
  double pk, ck;
  Metrics metrics;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // PK-major, CK-minor
  std::size_t best = 0;            // first point with maximal F1
};

// Similarity tables and averages are computed once per target; only the
// centrality count and the threshold vary over the grid.
SweepResult Sweep(const std::vector<std::string>& targets,
                  const FeatureConfig& config, const MatrixLookup& matrices,
                  const std::vector<double>& pk_grid,
                  const std::vector<double>& ck_grid, const GoldStandard& gold,
                  const Measure& measure = GetMeasure("cosine"));

}  // namespace domavec

#endif  // DOMAVEC_FEATURES_H_
