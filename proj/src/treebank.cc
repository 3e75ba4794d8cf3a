#include "domavec/treebank.h"

#include <zlib.h>

#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>
#include <string_view>

namespace domavec {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

SentenceGraph::SentenceGraph(std::vector<Token> tokens)
    : tokens_(std::move(tokens)), adjacency_(tokens_.size()) {
  const int n = static_cast<int>(tokens_.size());
  for (const Token& t : tokens_) {
    if (t.head < 1 || t.head > n || t.head == t.index) continue;
    auto& from = adjacency_[t.index - 1];
    auto& to = adjacency_[t.head - 1];
    // Corpus noise can repeat an arc through inconsistent heads; keep one.
    bool seen = false;
    for (int a : from) seen = seen || a == t.head;
    if (seen) continue;
    from.push_back(t.head);
    to.push_back(t.index);
    ++arc_count_;
  }
}

std::vector<int> SentenceGraph::DistancesFrom(int source, int max_depth) const {
  std::vector<int> dist(tokens_.size(), -1);
  dist.at(source - 1) = 0;
  std::deque<int> queue{source};
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    int du = dist[u - 1];
    if (max_depth >= 0 && du >= max_depth) continue;
    for (int v : adjacency_[u - 1]) {
      if (dist[v - 1] < 0) {
        dist[v - 1] = du + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::optional<int> SyntacticDistance(const SentenceGraph& g, int i, int j) {
  const int n = static_cast<int>(g.size());
  if (i < 1 || i > n || j < 1 || j > n) {
    throw std::out_of_range("token index out of range");
  }
  int d = g.DistancesFrom(i)[j - 1];
  if (d < 0) return std::nullopt;
  return d;
}

namespace {

bool ParseInt(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Splits on tabs without collapsing empty fields.
std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Returns nullopt for lines that are legal but carry no token (ranges,
// empty nodes).
std::optional<Token> ParseTokenLine(std::string_view line, std::size_t line_no) {
  auto cols = SplitTabs(line);
  if (cols.size() != 10) {
    throw ParseError(line_no, "expected 10 columns, found " +
                                  std::to_string(cols.size()));
  }
  std::string_view id = cols[0];
  if (id.find('-') != std::string_view::npos ||
      id.find('.') != std::string_view::npos) {
    return std::nullopt;
  }
  Token t;
  if (!ParseInt(id, t.index) || t.index < 1) {
    throw ParseError(line_no, "non-numeric token index '" + std::string(id) + "'");
  }
  if (!ParseInt(cols[6], t.head) || t.head < 0) {
    throw ParseError(line_no, "non-numeric head '" + std::string(cols[6]) + "'");
  }
  if (t.head == t.index) throw ParseError(line_no, "token is its own head");
  if (cols[7].empty()) throw ParseError(line_no, "empty dependency relation");
  t.surface = cols[1];
  t.lemma = cols[2];
  t.upos = cols[3];
  t.xpos = cols[4];
  t.feats = cols[5];
  t.deprel = cols[7];
  t.deps = cols[8];
  t.misc = cols[9];
  return t;
}

}  // namespace

ConlluReader::ConlluReader(std::istream& in, OnMalformed policy)
    : in_(in), policy_(policy) {}

std::optional<SentenceGraph> ConlluReader::Next() {
  std::vector<Token> tokens;
  bool broken = false;
  bool any_line = false;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!any_line) continue;
      if (broken) {
        tokens.clear();
        broken = false;
        any_line = false;
        continue;
      }
      if (tokens.empty()) {
        any_line = false;
        continue;
      }
      return SentenceGraph(std::move(tokens));
    }
    any_line = true;
    if (line[0] == '#' || broken) continue;
    try {
      if (auto t = ParseTokenLine(line, line_no_)) {
        if (t->index != static_cast<int>(tokens.size()) + 1) {
          throw ParseError(line_no_, "token index out of sequence");
        }
        tokens.push_back(std::move(*t));
      }
    } catch (const ParseError&) {
      if (policy_ == OnMalformed::kAbort) throw;
      broken = true;
      ++skipped_;
    }
  }
  if (!broken && !tokens.empty()) return SentenceGraph(std::move(tokens));
  return std::nullopt;
}

std::vector<SentenceGraph> ReadConllu(std::istream& in, OnMalformed policy) {
  ConlluReader reader(in, policy);
  std::vector<SentenceGraph> out;
  while (auto g = reader.Next()) out.push_back(std::move(*g));
  return out;
}

namespace {

class GzipStreamBuf : public std::streambuf {
 public:
  explicit GzipStreamBuf(const std::string& path)
      : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw std::runtime_error("cannot open " + path);
  }
  ~GzipStreamBuf() override { gzclose(file_); }
  GzipStreamBuf(const GzipStreamBuf&) = delete;
  GzipStreamBuf& operator=(const GzipStreamBuf&) = delete;

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    int n = gzread(file_, buffer_, sizeof(buffer_));
    if (n <= 0) return traits_type::eof();
    setg(buffer_, buffer_, buffer_ + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  gzFile file_;
  char buffer_[1 << 16];
};

class GzipIStream : public std::istream {
 public:
  explicit GzipIStream(const std::string& path)
      : std::istream(nullptr), buf_(path) {
    rdbuf(&buf_);
  }

 private:
  GzipStreamBuf buf_;
};

}  // namespace

std::unique_ptr<std::istream> OpenCorpus(const std::string& path) {
  // gzread passes plain files through untouched, but an ifstream is cheaper.
  bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (gz) return std::make_unique<GzipIStream>(path);
  auto in = std::make_unique<std::ifstream>(path);
  if (!*in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::string ToConllu(const SentenceGraph& g) {
  std::ostringstream out;
  for (const Token& t : g.tokens()) {
    out << t.index << '\t' << t.surface << '\t' << t.lemma << '\t' << t.upos
        << '\t' << t.xpos << '\t' << t.feats << '\t' << t.head << '\t'
        << t.deprel << '\t' << t.deps << '\t' << t.misc << '\n';
  }
  out << '\n';
  return out.str();
}

}  // namespace domavec
