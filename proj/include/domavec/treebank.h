// Dependency treebank ingestion: CoNLL-U streaming and syntactic distance.

#ifndef DOMAVEC_TREEBANK_H_
#define DOMAVEC_TREEBANK_H_

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace domavec {

// One token line of a CoNLL-U sentence. All ten columns are retained so a
// sentence can be written back out unchanged.
struct Token {
  int index = 0;         // 1-based
  std::string surface;   // FORM
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  int head = 0;          // 0 = root
  std::string deprel;
  std::string deps;
  std::string misc;
};

// Thrown by the reader for a malformed token line. Recoverable: the reader
// stays positioned after the offending sentence.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An immutable parsed sentence. Arcs are the undirected edges implied by head
// links; heads pointing outside the sentence are ignored.
class SentenceGraph {
 public:
  SentenceGraph() = default;
  explicit SentenceGraph(std::vector<Token> tokens);

  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  const Token& token(int index) const { return tokens_.at(index - 1); }

  // Neighbours of token `index` in the undirected arc graph.
  const std::vector<int>& adjacent(int index) const {
    return adjacency_.at(index - 1);
  }
  std::size_t arc_count() const { return arc_count_; }

  // BFS from `source`; entry i-1 holds the distance to token i, or -1 when
  // unreachable. Search stops expanding beyond `max_depth` when non-negative.
  std::vector<int> DistancesFrom(int source, int max_depth = -1) const;

 private:
  std::vector<Token> tokens_;
  std::vector<std::vector<int>> adjacency_;
  std::size_t arc_count_ = 0;
};

// Shortest path length between tokens i and j, or nullopt if no path exists.
// Throws std::out_of_range for invalid indices.
std::optional<int> SyntacticDistance(const SentenceGraph& g, int i, int j);

enum class OnMalformed { kAbort, kSkipSentence };

// Lazily reads sentences from a CoNLL-U stream. Multiword ranges ("1-2") and
// empty nodes ("1.1") are skipped, comment lines ignored.
class ConlluReader {
 public:
  explicit ConlluReader(std::istream& in,
                        OnMalformed policy = OnMalformed::kAbort);

  // Returns the next sentence, or nullopt at end of stream. Under kAbort a
  // malformed line throws ParseError; under kSkipSentence the sentence is
  // dropped and counted in skipped().
  std::optional<SentenceGraph> Next();

  std::size_t skipped() const { return skipped_; }
  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  OnMalformed policy_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
};

// Reads a whole stream into memory.
std::vector<SentenceGraph> ReadConllu(std::istream& in,
                                      OnMalformed policy = OnMalformed::kAbort);

// Opens a CoNLL-U file, transparently decompressing gzip input.
std::unique_ptr<std::istream> OpenCorpus(const std::string& path);

// Serializes a sentence as CoNLL-U token lines followed by a blank line.
std::string ToConllu(const SentenceGraph& g);

}  // namespace domavec

#endif  // DOMAVEC_TREEBANK_H_
