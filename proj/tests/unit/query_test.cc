#include <cmath>
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "domavec/catalog.h"
#include "domavec/query.h"
#include "fixtures.h"

using namespace domavec;

namespace {

double RefCosine(const std::vector<double>& a, const std::vector<double>& b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return static_cast<double>(ab / std::sqrt(aa * bb));
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, '\t');) out.push_back(f);
  return out;
}

}  // namespace

TEST_SUITE("query") {

TEST_CASE("numbers print with six decimals and no negative zero") {
  CHECK(FormatNumber(0.5) == "0.500000");
  CHECK(FormatNumber(-0.25) == "-0.250000");
  CHECK(FormatNumber(-0.0) == "0.000000");
  CHECK(FormatNumber(-1e-9) == "0.000000");
  CHECK(FormatNumber(1.0 / 3.0) == "0.333333");
  CHECK(FormatNumber(1234.5) == "1234.500000");
}

TEST_CASE("catalogs load, resolve relative paths and save") {
  fixture::TempDir dir("catalog");
  auto cat = MatrixCatalog::Load(fixture::WriteToyCatalog(dir));
  REQUIRE(cat->entries().size() == 2);
  CHECK(cat->entries()[0].header.rows == 5);
  CHECK(cat->Contains("PLACE"));
  CHECK(cat->Get("ANIMAL")->rows().size() == 5);
  CHECK(cat->Get("ANIMAL") == cat->Get("ANIMAL"));  // loaded once
  CHECK_THROWS_AS(cat->Get("NOPE"), UnknownMatrix);
  CHECK_THROWS_AS(cat->Features("none"), std::invalid_argument);
  CHECK_THROWS_AS(cat->Add("ANIMAL", dir / "ANIMAL.doma"), std::invalid_argument);

  fixture::WriteFile(dir / "toy.cfg", "feature\tf\tfam\tANIMAL\tcane,gatto\n");
  cat->AddFeatureConfig("toy", dir / "toy.cfg");
  CHECK(cat->Features("toy").features.size() == 1);
  cat->Save(dir / "saved.json");
  std::string saved = fixture::ReadFile(dir / "saved.json");
  CHECK(saved.find("\"ANIMAL.doma\"") != std::string::npos);
  CHECK(saved.find("\"toy.cfg\"") != std::string::npos);
  auto again = MatrixCatalog::Load(dir / "saved.json");
  CHECK(again->Get("PLACE")->rows().size() == 4);
  CHECK(again->Features("toy").features[0].id == "f");

  fixture::WriteFile(dir / "broken.json", "{\"matrices\": [{\"name\": 3}]}");
  CHECK_THROWS(MatrixCatalog::Load(dir / "broken.json"));
  CHECK_THROWS(MatrixCatalog::Load(dir / "missing.json"));
}

TEST_CASE("catalog resolution falls back to files and the environment") {
  fixture::TempDir dir("resolve");
  std::string path = fixture::WriteToyCatalog(dir);
  auto direct = ResolveCatalog("", {dir / "PLACE.doma"});
  CHECK(direct->Get(dir / "PLACE.doma")->rows().size() == 4);
  CHECK_THROWS_AS(ResolveCatalog("", {"NOT_A_FILE"}), UnknownMatrix);
  ::setenv("DOMAVEC_CATALOG", path.c_str(), 1);
  CHECK(ResolveCatalog("", {"ANIMAL"})->Contains("PLACE"));
  ::unsetenv("DOMAVEC_CATALOG");
  CHECK(ResolveCatalog(path, {"ANIMAL"})->Contains("ANIMAL"));
  CHECK_THROWS_AS(SelectMatrices(*direct, {}), std::invalid_argument);
}

TEST_CASE("vectors list one line per word and matrix") {
  fixture::TempDir dir("vectors");
  auto cat = MatrixCatalog::Load(fixture::WriteToyCatalog(dir));
  auto ms = SelectMatrices(*cat, {"ANIMAL", "PLACE"});
  auto out = QueryVectors(ms, {"cane", "topo"});
  CHECK(out.text ==
        "cane\tANIMAL\t3.000000\t1.000000\t0.000000\t0.000000\n"
        "cane\tPLACE\t1.000000\t0.000000\t2.000000\n"
        "topo\tANIMAL\t0.000000\t0.000000\t4.000000\t0.250000\n");
  REQUIRE(out.oov.size() == 1);
  CHECK(out.oov[0].word == "topo");
  CHECK(out.oov[0].matrix == "PLACE");
  CHECK(out.vectors.size() == 3);
  CHECK(out.vectors[1].matrix == "PLACE");
}

TEST_CASE("similarity tables mark missing words") {
  fixture::TempDir dir("sim");
  auto cat = MatrixCatalog::Load(fixture::WriteToyCatalog(dir));
  auto ms = SelectMatrices(*cat, {"ANIMAL", "PLACE"});
  auto out = QuerySimilarity(ms, {"cane", "bosco"}, {"gatto", "topo"}, GetMeasure("cosine"));
  REQUIRE(out.files.size() == 2);
  CHECK(out.files[0].word == "cane");
  auto lines = SplitLines(out.files[0].text);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "target\tANIMAL\tPLACE");
  auto row = SplitTabs(lines[1]);
  REQUIRE(row.size() == 3);
  CHECK(row[0] == "gatto");
  CHECK(row[1] == FormatNumber(RefCosine({3, 1, 0, 0}, {2.5, 0, 0.5, 0})));
  CHECK(row[2] == FormatNumber(RefCosine({1, 0, 2}, {1.5, 0.5, 0})));
  CHECK(SplitTabs(lines[2])[2] == "NA");  // topo is not a PLACE row
  CHECK(SplitLines(out.files[1].text)[1].substr(0, 9) == "gatto\tNA\t");
  // Each missing pair is reported once.
  CHECK(out.oov.size() == 2);
  CHECK_THROWS_AS(QuerySimilarity(ms, {"cane"}, {}, GetMeasure("cosine")),
                  std::invalid_argument);
}

TEST_CASE("neighbor files rank per matrix") {
  fixture::TempDir dir("nn");
  auto cat = MatrixCatalog::Load(fixture::WriteToyCatalog(dir));
  auto ms = SelectMatrices(*cat, {"ANIMAL", "PLACE"});
  auto out = QueryNeighbors(ms, {"lupo", "volpe"}, 2, GetMeasure("dot"));
  REQUIRE(out.files.size() == 2);
  auto lines = SplitLines(out.files[0].text);
  REQUIRE(lines.size() == 4);
  auto direct = Neighbors(*ms[0].space, "lupo", 2, GetMeasure("dot"));
  CHECK(lines[0] == "ANIMAL\t1\t" + direct[0].word + "\t" + FormatNumber(direct[0].score));
  CHECK(lines[1] == "ANIMAL\t2\t" + direct[1].word + "\t" + FormatNumber(direct[1].score));
  CHECK(lines[2].rfind("PLACE\t1\t", 0) == 0);
  CHECK(out.files[0].lists.size() == 2);
  CHECK(out.files[1].lists.size() == 1);
  REQUIRE(out.oov.size() == 1);
  CHECK(out.oov[0].word == "volpe");
}

TEST_CASE("neighbor graphs stay within their size bound") {
  fixture::TempDir dir("graph");
  auto cat = MatrixCatalog::Load(fixture::WriteToyCatalog(dir));
  auto m = cat->Get("ANIMAL");
  auto star = NeighborGraph(*m, "cane", 3, 0, GetMeasure("cosine"));
  CHECK(star.size() == 4);
  CHECK(star.nodes()[0] == "cane");
  for (const auto& e : star.edges()) CHECK(e.a == 0);
  auto wide = NeighborGraph(*m, "cane", 2, 2, GetMeasure("cosine"));
  CHECK(wide.size() <= 1 + 2 + 2 * 2);
  for (const auto& e : wide.edges()) CHECK(e.weight >= 0.0);
}

TEST_CASE("feature reports and sweep tables") {
  std::vector<FeatureScore> scores{{"ox", "has_horns", 4.222, 1.72, 0.6826061944859854,
                                    3.1846061944859854, true},
                                   {"ox", "has_poison", 1.62, 2.01, 0.0, -0.39, false}};
  CHECK(FormatFeatureReport(scores) ==
        "feature\tS_rel\tS_unrel\tC_t\tF_t\tassigned\n"
        "has_horns\t4.222000\t1.720000\t0.682606\t3.184606\t1\n"
        "has_poison\t1.620000\t2.010000\t0.000000\t-0.390000\t0\n");
  SweepResult r;
  r.points.push_back({0.5, 3.9, MetricsFromCounts(1, 1, 0)});
  r.points.push_back({0.71, 3.9, MetricsFromCounts(0, 0, 2)});
  CHECK(FormatSweepTable(r) ==
        "PK\tCK\tP\tR\tF1\n"
        "0.500000\t3.900000\t0.500000\t1.000000\t0.666667\n"
        "0.710000\t3.900000\t0.000000\t0.000000\t0.000000\n");
}

TEST_CASE("file stems are filesystem safe") {
  CHECK(FileStem("cane") == "cane");
  CHECK(FileStem("a/b\\c:d") == "a_b_c_d");
  CHECK(FileStem("..") == "_..");
  CHECK(FileStem("") == "_");
  CHECK(FileStem("perché") == "perché");
}

}  // TEST_SUITE
