// Similarity graphs over concepts and modularity-based partitioning.

#ifndef DOMAVEC_CONCEPT_NETWORK_H_
#define DOMAVEC_CONCEPT_NETWORK_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace domavec {

struct Edge {
  std::size_t a;  // a < b
  std::size_t b;
  double weight;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;
  // Edges are normalized to a < b; self-loops, duplicates and negative weights
  // are rejected.
  WeightedGraph(std::vector<std::string> nodes, std::vector<Edge> edges);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
};

using PairSimilarity =
    std::function<double(const std::string&, const std::string&)>;

struct SkippedPair {
  std::string a, b, reason;
};

// Scores all pairs; pairs below edge_floor are omitted, pairs whose scoring
// throws are skipped and reported.
WeightedGraph BuildGraph(const std::vector<std::string>& words,
                         const PairSimilarity& sim, double edge_floor = 0.0,
                         std::vector<SkippedPair>* skipped = nullptr);

struct Partition {
  std::vector<int> assignment;  // node index -> class id, contiguous from 0
  double modularity = 0.0;
  double resolution = 1.0;
  int class_count() const;
};

inline constexpr double kDefaultResolution = 0.7;

// Resolution-scaled modularity:
//   Q = sum_c [ L_c / m - resolution * (d_c / 2m)^2 ]
// with L_c the internal edge weight and d_c the total degree of class c.
double Modularity(const WeightedGraph& g, const std::vector<int>& assignment,
                  double resolution = 1.0);

// Multi-level Louvain with a refinement step between levels; cycles repeat
// while modularity improves. Graphs small enough for the polish budget then
// get vertex-mover passes and merge/split perturbations that are kept only
// when they raise modularity. Nodes are visited in index order; the seed only
// breaks exact ties between equally good moves.
Partition Louvain(const WeightedGraph& g, double resolution = kDefaultResolution,
                  std::uint64_t seed = 0);

// Fraction of nodes judged correct. Every node must be judged.
double ClassPrecision(const Partition& p, const std::vector<std::string>& nodes,
                      const std::map<std::string, bool>& judgments);

// Judges each node correct when its label matches the most common label in
// its class (ties to the smallest label). Automates the naming protocol when
// reference labels exist.
std::map<std::string, bool> MajorityJudgments(
    const Partition& p, const std::vector<std::string>& nodes,
    const std::map<std::string, std::string>& labels);

void WriteEdgeList(const WeightedGraph& g, std::ostream& out);
void WritePartition(const Partition& p, const std::vector<std::string>& nodes,
                    std::ostream& out);

}  // namespace domavec

#endif  // DOMAVEC_CONCEPT_NETWORK_H_
