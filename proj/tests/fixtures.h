// Temporary directories and a small on-disk catalog shared by the query,
// service and command-line suites.

#ifndef DOMAVEC_TESTS_FIXTURES_H_
#define DOMAVEC_TESTS_FIXTURES_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "domavec/matrix.h"

namespace fixture {

namespace fs = std::filesystem;

// Removed with its contents on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("domavec_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Two count matrices over overlapping vocabularies:
//   ANIMAL rows cane, gatto, lupo, topo, volpe
//   PLACE  rows cane, gatto, lupo, bosco
inline domavec::CoocMatrix AnimalMatrix() {
  using namespace domavec;
  RowVocab rows({"cane", "gatto", "lupo", "topo", "volpe"}, "freq", 5);
  DimensionSet dims("ANIMAL", DimensionKind::kNoun, {"a", "b", "c", "d"}, {"Nanim"});
  return CoocMatrix("ANIMAL", rows, dims, CoocMeta{},
                    {{0, 0, 3000}, {0, 1, 1000}, {1, 0, 2500}, {1, 2, 500},
                     {2, 0, 1000}, {2, 1, 2000}, {2, 3, 1500}, {3, 2, 4000},
                     {3, 3, 250},  {4, 1, 1750}, {4, 3, 2000}, {4, 0, 750}});
}

inline domavec::CoocMatrix PlaceMatrix() {
  using namespace domavec;
  RowVocab rows({"cane", "gatto", "lupo", "bosco"}, "freq", 4);
  DimensionSet dims("PLACE", DimensionKind::kNoun, {"x", "y", "z"}, {"Nloc"});
  return CoocMatrix("PLACE", rows, dims, CoocMeta{},
                    {{0, 0, 1000}, {0, 2, 2000}, {1, 0, 1500}, {1, 1, 500},
                     {2, 1, 3000}, {2, 2, 1000}, {3, 0, 500}, {3, 1, 500}, {3, 2, 500}});
}

// Writes both matrices and catalog.json; returns the catalog path.
inline std::string WriteToyCatalog(const TempDir& dir) {
  domavec::SaveMatrix(AnimalMatrix(), dir / "ANIMAL.doma");
  domavec::SaveMatrix(PlaceMatrix(), dir / "PLACE.doma");
  WriteFile(dir / "catalog.json",
            R"({"matrices": [{"name": "ANIMAL", "path": "ANIMAL.doma"},
                             {"name": "PLACE", "path": "PLACE.doma"}]})");
  return dir / "catalog.json";
}

}  // namespace fixture

#endif  // DOMAVEC_TESTS_FIXTURES_H_
