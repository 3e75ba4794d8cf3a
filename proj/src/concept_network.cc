#include "domavec/concept_network.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace domavec {

WeightedGraph::WeightedGraph(std::vector<std::string> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (Edge e : edges) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a == e.b) throw std::invalid_argument("self-loop on " + nodes_.at(e.a));
    if (e.b >= nodes_.size()) throw std::out_of_range("edge endpoint out of range");
    if (!(e.weight >= 0.0)) throw std::invalid_argument("edge weight must be >= 0");
    if (!seen.insert({e.a, e.b}).second) {
      throw std::invalid_argument("duplicate edge " + nodes_[e.a] + "-" + nodes_[e.b]);
    }
    edges_.push_back(e);
  }
}

WeightedGraph BuildGraph(const std::vector<std::string>& words,
                         const PairSimilarity& sim, double edge_floor,
                         std::vector<SkippedPair>* skipped) {
  if (words.size() < 2) throw std::invalid_argument("graph needs at least 2 words");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      double w = 0.0;
      try {
        w = sim(words[i], words[j]);
      } catch (const std::exception& e) {
        if (skipped) skipped->push_back({words[i], words[j], e.what()});
        continue;
      }
      if (!(w >= edge_floor)) continue;
      edges.push_back({i, j, w});
    }
  }
  return WeightedGraph(words, std::move(edges));
}

int Partition::class_count() const {
  int n = 0;
  for (int c : assignment) n = std::max(n, c + 1);
  return n;
}

double Modularity(const WeightedGraph& g, const std::vector<int>& assignment,
                  double resolution) {
  if (assignment.size() != g.size()) {
    throw std::invalid_argument("assignment size does not match graph");
  }
  double m = 0.0;
  for (const Edge& e : g.edges()) m += e.weight;
  if (m == 0.0) return 0.0;
  std::unordered_map<int, double> internal, degree;
  for (const Edge& e : g.edges()) {
    degree[assignment[e.a]] += e.weight;
    degree[assignment[e.b]] += e.weight;
    if (assignment[e.a] == assignment[e.b]) internal[assignment[e.a]] += e.weight;
  }
  double q = 0.0;
  for (const auto& [c, d] : degree) {
    double frac = d / (2.0 * m);
    q += internal[c] / m - resolution * frac * frac;
  }
  return q;
}

namespace {

// Symmetric weighted adjacency with explicit self-loop weights, as produced
// by community aggregation. self[i] holds A_ii (internal weight counted twice).
struct Level {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self;
  std::vector<double> degree;
};

Level FromGraph(const WeightedGraph& g) {
  Level l;
  const std::size_t n = g.size();
  l.adj.resize(n);
  l.self.assign(n, 0.0);
  l.degree.assign(n, 0.0);
  for (const Edge& e : g.edges()) {
    if (e.weight == 0.0) continue;
    l.adj[e.a].emplace_back(static_cast<int>(e.b), e.weight);
    l.adj[e.b].emplace_back(static_cast<int>(e.a), e.weight);
    l.degree[e.a] += e.weight;
    l.degree[e.b] += e.weight;
  }
  return l;
}

// Local moves until no node improves. Returns whether any node changed
// community; `comm` is updated in place. With `parent`, nodes start in
// singletons and may only join communities of nodes sharing their parent.
bool LocalMoves(const Level& l, double resolution, double two_m,
                std::mt19937_64& rng, std::vector<int>& comm,
                const std::vector<int>* parent = nullptr) {
  const int n = static_cast<int>(l.adj.size());
  std::vector<double> total(n, 0.0);
  for (int i = 0; i < n; ++i) total[comm[i]] += l.degree[i];
  std::vector<int> comm_parent(n, -1);
  if (parent) {
    for (int i = 0; i < n; ++i) comm_parent[comm[i]] = (*parent)[i];
  }

  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  std::vector<int> empty;
  for (int c = 0; c < n; ++c) {
    if (total[c] == 0.0) empty.push_back(c);
  }
  // Exact ties are broken by a seeded priority per community.
  std::vector<std::uint64_t> priority(n);
  for (auto& p : priority) p = rng();

  bool any = false;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n; ++i) {
      const int own = comm[i];
      const double ki = l.degree[i];
      for (int c : touched) link[c] = 0.0;
      touched.clear();
      for (auto [j, w] : l.adj[i]) {
        if (j == i) continue;
        if (link[comm[j]] == 0.0) touched.push_back(comm[j]);
        link[comm[j]] += w;
      }
      total[own] -= ki;

      auto gain = [&](int c) { return link[c] - resolution * total[c] * ki / two_m; };
      int best = own;
      double best_gain = gain(own);
      auto consider = [&](int c, double gc) {
        if (parent && comm_parent[c] != -1 && comm_parent[c] != (*parent)[i]) return;
        const double eps = 1e-12 * std::max(1.0, std::abs(best_gain));
        if (gc > best_gain + eps) {
          best = c;
          best_gain = gc;
        } else if (std::abs(gc - best_gain) <= eps && best != own &&
                   priority[c] > priority[best]) {
          best = c;
        }
      };
      for (int c : touched) {
        if (c != own) consider(c, gain(c));
      }
      // An empty community scores 0; leaving alone can beat a weak group.
      if (total[own] > 0.0) {
        while (!empty.empty() && total[empty.back()] != 0.0) empty.pop_back();
        if (!empty.empty()) consider(empty.back(), 0.0);
      }

      total[best] += ki;
      if (best != own) {
        if (parent) comm_parent[best] = (*parent)[i];
        comm[i] = best;
        improved = true;
        any = true;
        if (total[own] == 0.0) {
          empty.push_back(own);
          comm_parent[own] = -1;
        }
      }
    }
  }
  return any;
}

// Renumbers communities contiguously by first appearance.
int Compact(std::vector<int>& comm) {
  std::unordered_map<int, int> remap;
  for (int& c : comm) {
    auto [it, inserted] = remap.emplace(c, static_cast<int>(remap.size()));
    c = it->second;
  }
  return static_cast<int>(remap.size());
}

Level Aggregate(const Level& l, const std::vector<int>& comm, int k) {
  Level out;
  out.adj.resize(k);
  out.self.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  std::vector<std::map<int, double>> acc(k);
  for (std::size_t i = 0; i < l.adj.size(); ++i) {
    int ci = comm[i];
    out.self[ci] += l.self[i];
    out.degree[ci] += l.degree[i];
    for (auto [j, w] : l.adj[i]) {
      int cj = comm[j];
      if (ci == cj) {
        out.self[ci] += w;  // each internal edge seen from both ends
      } else {
        acc[ci][cj] += w;
      }
    }
  }
  for (int c = 0; c < k; ++c) {
    for (auto [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
  }
  return out;
}

// One multilevel cycle: local moves, then a refinement that splits each
// community into well-connected parts, then the same on the graph of parts
// with each part starting in its community. Refinement lets later levels
// move parts between communities, which plain aggregation cannot.
std::vector<int> Cycle(const Level& level, std::vector<int> comm, double resolution,
                       double two_m, std::mt19937_64& rng) {
  const int n = static_cast<int>(level.adj.size());
  LocalMoves(level, resolution, two_m, rng, comm);
  Compact(comm);
  std::vector<int> sub(n);
  std::iota(sub.begin(), sub.end(), 0);
  LocalMoves(level, resolution, two_m, rng, sub, &comm);
  int ks = Compact(sub);
  if (ks == n) return comm;
  Level agg = Aggregate(level, sub, ks);
  std::vector<int> init(ks);
  for (int i = 0; i < n; ++i) init[sub[i]] = comm[i];
  std::vector<int> agg_comm = Cycle(agg, std::move(init), resolution, two_m, rng);
  for (int i = 0; i < n; ++i) comm[i] = agg_comm[sub[i]];
  return comm;
}

// Kernighan-Lin style pass on the original graph: every node moves once, in
// order of best gain (even when negative), and the best prefix of moves is
// kept. Lets the search cross shallow barriers between local optima.
// Returns the modularity gain kept (0 when nothing improved).
double VertexMoverPass(const Level& l, double resolution, double two_m,
                       std::vector<int>& comm) {
  const int n = static_cast<int>(l.adj.size());
  const double m = two_m / 2.0;
  std::vector<double> total(n, 0.0);
  std::vector<int> size(n, 0);
  for (int i = 0; i < n; ++i) {
    total[comm[i]] += l.degree[i];
    ++size[comm[i]];
  }
  std::vector<char> moved(n, 0);
  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  std::vector<std::pair<int, int>> history;  // (node, previous community)
  double gain_sum = 0.0, best_sum = 0.0;
  std::size_t best_len = 0;

  for (int step = 0; step < n; ++step) {
    int pick = -1, pick_to = -1;
    double pick_gain = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (moved[i]) continue;
      const int own = comm[i];
      const double ki = l.degree[i];
      for (int c : touched) link[c] = 0.0;
      touched.clear();
      for (auto [j, w] : l.adj[i]) {
        if (j == i) continue;
        if (link[comm[j]] == 0.0) touched.push_back(comm[j]);
        link[comm[j]] += w;
      }
      const double own_rest = total[own] - ki;
      auto delta = [&](int c, double total_c) {
        return (link[c] - link[own] - resolution * ki * (total_c - own_rest) / two_m) / m;
      };
      auto take = [&](int c, double d) {
        if (d > pick_gain + 1e-15) {
          pick = i;
          pick_to = c;
          pick_gain = d;
        }
      };
      for (int c : touched) {
        if (c != own) take(c, delta(c, total[c]));
      }
      if (size[own] > 1) {
        int fresh = -1;
        for (int c = 0; c < n; ++c) {
          if (size[c] == 0) {
            fresh = c;
            break;
          }
        }
        if (fresh >= 0) take(fresh, (-link[own] + resolution * ki * own_rest / two_m) / m);
      }
    }
    if (pick < 0) break;
    history.emplace_back(pick, comm[pick]);
    total[comm[pick]] -= l.degree[pick];
    --size[comm[pick]];
    comm[pick] = pick_to;
    total[pick_to] += l.degree[pick];
    ++size[pick_to];
    moved[pick] = 1;
    gain_sum += pick_gain;
    if (gain_sum > best_sum + 1e-12) {
      best_sum = gain_sum;
      best_len = history.size();
    }
  }
  for (std::size_t k = history.size(); k > best_len; --k) {
    comm[history[k - 1].first] = history[k - 1].second;
  }
  return best_sum;
}

// The vertex mover costs O(nodes * edges) per pass.
constexpr double kVertexMoverBudget = 2e8;

void Polish(const Level& l, double resolution, double two_m, std::vector<int>& comm) {
  while (VertexMoverPass(l, resolution, two_m, comm) > 0.0) {
  }
  Compact(comm);
}

// Splits class c by the sign of the leading eigenvector of its
// resolution-scaled modularity matrix. Returns false when the class is
// indivisible (no positive eigenvalue or a one-sided vector).
bool SpectralSplit(const Level& l, double resolution, double two_m, int c,
                   std::vector<int>& comm, int fresh) {
  std::vector<int> members;
  for (int i = 0; i < static_cast<int>(comm.size()); ++i) {
    if (comm[i] == c) members.push_back(i);
  }
  const int s = static_cast<int>(members.size());
  if (s < 2) return false;
  std::unordered_map<int, int> local;
  for (int i = 0; i < s; ++i) local[members[i]] = i;
  Eigen::MatrixXd b(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      b(i, j) = -resolution * l.degree[members[i]] * l.degree[members[j]] / two_m;
    }
    for (auto [j, w] : l.adj[members[i]]) {
      auto it = local.find(j);
      if (it != local.end() && j != members[i]) b(i, it->second) += w;
    }
  }
  for (int i = 0; i < s; ++i) b(i, i) -= b.row(i).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(s - 1) > 1e-12)) return false;
  const Eigen::VectorXd v = es.eigenvectors().col(s - 1);
  int moved = 0;
  for (int i = 0; i < s; ++i) {
    if (v(i) < 0.0) {
      comm[members[i]] = fresh;
      ++moved;
    }
  }
  return moved > 0 && moved < s;
}

// Perturbs the partition by merging a pair of classes, redrawing the border
// between two classes, splitting a class in two, or pulling one node into a
// class of its own, polishes, and keeps the first trial that raises
// modularity. Returns false when no trial helps.
bool Perturb(const WeightedGraph& g, const Level& l, double resolution, double two_m,
             std::vector<int>& comm, double& q) {
  const int n = static_cast<int>(comm.size());
  const int k = *std::max_element(comm.begin(), comm.end()) + 1;
  auto accept = [&](std::vector<int> trial) {
    Polish(l, resolution, two_m, trial);
    double tq = Modularity(g, trial, resolution);
    if (!(tq > q + 1e-12)) return false;
    comm = std::move(trial);
    q = tq;
    return true;
  };
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      std::vector<int> trial = comm;
      for (int& c : trial) {
        if (c == b) c = a;
      }
      if (accept(trial)) return true;
      if (SpectralSplit(l, resolution, two_m, a, trial, b) && accept(std::move(trial))) {
        return true;
      }
    }
  }
  for (int c = 0; c < k; ++c) {
    std::vector<int> trial = comm;
    if (SpectralSplit(l, resolution, two_m, c, trial, k) && accept(std::move(trial))) {
      return true;
    }
  }
  if (k == n) return false;
  for (int v = 0; v < n; ++v) {
    std::vector<int> trial = comm;
    trial[v] = k;
    if (accept(std::move(trial))) return true;
  }
  return false;
}

void PerturbLoop(const WeightedGraph& g, const Level& l, double resolution, double two_m,
                 std::vector<int>& comm, double& q) {
  const double cost = static_cast<double>(g.size()) * static_cast<double>(g.edges().size());
  for (int iter = 0; iter < 64; ++iter) {
    const double k = *std::max_element(comm.begin(), comm.end()) + 1;
    if ((k * k / 2.0 + static_cast<double>(g.size())) * cost > kVertexMoverBudget) break;
    if (!Perturb(g, l, resolution, two_m, comm, q)) break;
  }
}

}  // namespace

Partition Louvain(const WeightedGraph& g, double resolution, std::uint64_t seed) {
  if (g.size() == 0) throw std::invalid_argument("Louvain on an empty graph");
  Partition p;
  p.resolution = resolution;
  p.assignment.resize(g.size());
  std::iota(p.assignment.begin(), p.assignment.end(), 0);

  double two_m = 0.0;
  for (const Edge& e : g.edges()) two_m += 2.0 * e.weight;
  if (two_m == 0.0) {
    p.modularity = Modularity(g, p.assignment, resolution);
    return p;
  }

  std::mt19937_64 rng(seed);
  const Level level = FromGraph(g);
  std::vector<int> comm = p.assignment;
  double q = Modularity(g, comm, resolution);
  const bool polish = static_cast<double>(g.size()) * static_cast<double>(g.edges().size()) <=
                      kVertexMoverBudget;
  // Cycles restart from the previous partition until modularity stalls.
  for (int iter = 0; iter < 32; ++iter) {
    std::vector<int> next = Cycle(level, comm, resolution, two_m, rng);
    Compact(next);
    if (polish) Polish(level, resolution, two_m, next);
    double nq = Modularity(g, next, resolution);
    if (!(nq > q + 1e-12)) break;
    comm = std::move(next);
    q = nq;
  }
  Compact(comm);
  if (polish) {
    PerturbLoop(g, level, resolution, two_m, comm, q);
    // A second search grows from the single-class partition by splits; the
    // Louvain result wins ties.
    std::vector<int> whole(g.size(), 0);
    double wq = Modularity(g, whole, resolution);
    PerturbLoop(g, level, resolution, two_m, whole, wq);
    if (wq > q + 1e-12) {
      comm = std::move(whole);
      q = wq;
    }
  }
  p.assignment = std::move(comm);
  p.modularity = q;
  return p;
}

double ClassPrecision(const Partition& p, const std::vector<std::string>& nodes,
                      const std::map<std::string, bool>& judgments) {
  if (nodes.size() != p.assignment.size()) {
    throw std::invalid_argument("node list does not match partition");
  }
  if (nodes.empty()) throw std::invalid_argument("empty partition");
  std::size_t correct = 0;
  for (const auto& n : nodes) {
    auto it = judgments.find(n);
    if (it == judgments.end()) throw std::invalid_argument("no judgment for " + n);
    correct += it->second ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

std::map<std::string, bool> MajorityJudgments(
    const Partition& p, const std::vector<std::string>& nodes,
    const std::map<std::string, std::string>& labels) {
  std::map<int, std::map<std::string, int>> votes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto it = labels.find(nodes[i]);
    if (it == labels.end()) throw std::invalid_argument("no label for " + nodes[i]);
    ++votes[p.assignment.at(i)][it->second];
  }
  std::map<int, std::string> majority;
  for (const auto& [c, counts] : votes) {
    const std::string* best = nullptr;
    int best_n = -1;
    for (const auto& [label, n] : counts) {
      if (n > best_n) {
        best = &label;
        best_n = n;
      }
    }
    majority[c] = *best;
  }
  std::map<std::string, bool> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out[nodes[i]] = labels.at(nodes[i]) == majority[p.assignment[i]];
  }
  return out;
}

void WriteEdgeList(const WeightedGraph& g, std::ostream& out) {
  char buf[32];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof(buf), "%.6f", e.weight);
    out << g.nodes()[e.a] << '\t' << g.nodes()[e.b] << '\t' << buf << '\n';
  }
}

void WritePartition(const Partition& p, const std::vector<std::string>& nodes,
                    std::ostream& out) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out << nodes[i] << '\t' << p.assignment.at(i) << '\n';
  }
}

}  // namespace domavec
