#include "domavec/query.h"

#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace domavec {

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::vector<NamedSpace> SelectMatrices(const MatrixCatalog& catalog,
                                       const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("no matrices selected");
  std::vector<NamedSpace> out;
  for (const auto& n : names) out.push_back({n, catalog.Get(n)});
  return out;
}

VectorsOutput QueryVectors(const std::vector<NamedSpace>& matrices,
                           const std::vector<std::string>& words) {
  VectorsOutput out;
  std::ostringstream text;
  for (const auto& w : words) {
    for (const auto& [name, m] : matrices) {
      if (!m->rows().Find(w)) {
        out.oov.push_back({w, name});
        continue;
      }
      WordVector v = GetVector(*m, w);
      v.matrix = name;
      text << w << '\t' << name;
      for (double x : v.values) text << '\t' << FormatNumber(x);
      text << '\n';
      out.vectors.push_back(std::move(v));
    }
  }
  out.text = text.str();
  return out;
}

SimilarityOutput QuerySimilarity(const std::vector<NamedSpace>& matrices,
                                 const std::vector<std::string>& words,
                                 const std::vector<std::string>& targets,
                                 const Measure& measure) {
  if (targets.empty()) throw std::invalid_argument("similarity needs target words");
  SimilarityOutput out;
  std::set<std::pair<std::string, std::string>> noted;
  auto note = [&](const std::string& w, const std::string& m) {
    if (noted.insert({w, m}).second) out.oov.push_back({w, m});
  };
  for (const auto& w : words) {
    std::ostringstream text;
    text << "target";
    for (const auto& nm : matrices) text << '\t' << nm.name;
    text << '\n';
    for (const auto& t : targets) {
      text << t;
      for (const auto& [name, m] : matrices) {
        bool have_w = m->rows().Find(w).has_value();
        bool have_t = m->rows().Find(t).has_value();
        if (!have_w) note(w, name);
        if (!have_t) note(t, name);
        text << '\t';
        if (have_w && have_t) {
          text << FormatNumber(WordSimilarity(*m, w, t, measure).value);
        } else {
          text << "NA";
        }
      }
      text << '\n';
    }
    out.files.push_back({w, text.str()});
  }
  return out;
}

NeighborsOutput QueryNeighbors(const std::vector<NamedSpace>& matrices,
                               const std::vector<std::string>& words,
                               std::size_t k, const Measure& measure) {
  NeighborsOutput out;
  for (const auto& w : words) {
    NeighborsOutput::PerWord pw{w, {}, {}};
    std::ostringstream text;
    for (const auto& [name, m] : matrices) {
      if (!m->rows().Find(w)) {
        out.oov.push_back({w, name});
        continue;
      }
      auto list = Neighbors(*m, w, k, measure);
      for (std::size_t i = 0; i < list.size(); ++i) {
        text << name << '\t' << i + 1 << '\t' << list[i].word << '\t'
             << FormatNumber(list[i].score) << '\n';
      }
      pw.lists.emplace_back(name, std::move(list));
    }
    pw.text = text.str();
    out.files.push_back(std::move(pw));
  }
  return out;
}

WeightedGraph NeighborGraph(const VectorSpace& m, const std::string& word,
                            std::size_t k, std::size_t expand,
                            const Measure& measure) {
  std::vector<std::string> nodes{word};
  std::map<std::string, std::size_t> id{{word, 0}};
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  auto node = [&](const std::string& w) {
    auto [it, inserted] = id.emplace(w, nodes.size());
    if (inserted) nodes.push_back(w);
    return it->second;
  };
  auto link = [&](std::size_t a, std::size_t b, double w) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    edges.emplace(std::make_pair(a, b), w);
  };
  auto first = Neighbors(m, word, k, measure);
  for (const auto& n : first) link(0, node(n.word), n.score);
  if (expand > 0) {
    for (const auto& n : first) {
      std::size_t from = id.at(n.word);
      for (const auto& nn : Neighbors(m, n.word, expand, measure)) {
        link(from, node(nn.word), nn.score);
      }
    }
  }
  std::vector<Edge> out;
  for (const auto& [ab, w] : edges) {
    if (w >= 0.0) out.push_back({ab.first, ab.second, w});
  }
  return WeightedGraph(std::move(nodes), std::move(out));
}

std::string FormatFeatureReport(const std::vector<FeatureScore>& scores) {
  std::ostringstream out;
  out << "feature\tS_rel\tS_unrel\tC_t\tF_t\tassigned\n";
  for (const auto& s : scores) {
    out << s.feature << '\t' << FormatNumber(s.s_rel) << '\t'
        << FormatNumber(s.s_unrel) << '\t' << FormatNumber(s.c_t) << '\t'
        << FormatNumber(s.f_t) << '\t' << (s.assigned ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string FormatSweepTable(const SweepResult& result) {
  std::ostringstream out;
  out << "PK\tCK\tP\tR\tF1\n";
  for (const auto& p : result.points) {
    out << FormatNumber(p.pk) << '\t' << FormatNumber(p.ck) << '\t'
        << FormatNumber(p.metrics.precision) << '\t'
        << FormatNumber(p.metrics.recall) << '\t' << FormatNumber(p.metrics.f1)
        << '\n';
  }
  return out.str();
}

std::string FileStem(const std::string& word) {
  std::string s;
  for (char c : word) {
    s += (c == '/' || c == '\\' || c == '\0' || c == ':') ? '_' : c;
  }
  if (s.empty() || s == "." || s == "..") s = "_" + s;
  return s;
}

}  // namespace domavec
