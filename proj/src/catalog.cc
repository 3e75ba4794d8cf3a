#include "domavec/catalog.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace domavec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Resolve(const fs::path& base, const std::string& p) {
  fs::path fp(p);
  if (fp.is_relative() && !base.empty()) fp = base / fp;
  return fp.string();
}

}  // namespace

std::shared_ptr<MatrixCatalog> MatrixCatalog::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("catalog " + path + ": " + e.what());
  }
  auto cat = std::make_shared<MatrixCatalog>();
  fs::path base = fs::path(path).parent_path();
  try {
    const json matrices = doc.value("matrices", json::array());
    const json features = doc.value("features", json::object());
    for (const json& m : matrices) {
      cat->Add(m.at("name").get<std::string>(),
               Resolve(base, m.at("path").get<std::string>()));
    }
    for (const auto& [ref, p] : features.items()) {
      cat->AddFeatureConfig(ref, Resolve(base, p.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("catalog " + path + ": " + e.what());
  }
  return cat;
}

void MatrixCatalog::Add(const std::string& name, const std::string& path) {
  std::lock_guard lock(mu_);
  if (index_.count(name)) throw std::invalid_argument("duplicate matrix name " + name);
  index_[name] = entries_.size();
  entries_.push_back({name, path, ReadHeaderFile(path)});
}

void MatrixCatalog::AddFeatureConfig(const std::string& ref, const std::string& path) {
  std::lock_guard lock(mu_);
  feature_paths_[ref] = path;
}

bool MatrixCatalog::Contains(const std::string& name) const {
  std::lock_guard lock(mu_);
  return index_.count(name) > 0;
}

std::shared_ptr<const VectorSpace> MatrixCatalog::Get(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto hit = loaded_.find(name);
  if (hit != loaded_.end()) return hit->second;
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownMatrix(name);
  auto m = LoadVectorSpace(entries_[it->second].path);
  loaded_[name] = m;
  return m;
}

const FeatureConfig& MatrixCatalog::Features(const std::string& ref) const {
  std::lock_guard lock(mu_);
  auto hit = configs_.find(ref);
  if (hit != configs_.end()) return *hit->second;
  auto it = feature_paths_.find(ref);
  if (it == feature_paths_.end()) {
    throw std::invalid_argument("unknown feature config '" + ref + "'");
  }
  auto cfg = std::make_shared<const FeatureConfig>(LoadFeatureConfig(it->second));
  configs_[ref] = cfg;
  return *cfg;
}

MatrixLookup MatrixCatalog::Lookup() const {
  return [this](const std::string& name) -> const VectorSpace& {
    // Entries stay alive in loaded_ for the catalog's lifetime.
    return *Get(name);
  };
}

void MatrixCatalog::Preload() const {
  for (const auto& e : entries_) Get(e.name);
}

void MatrixCatalog::Save(const std::string& path) const {
  std::lock_guard lock(mu_);
  json doc;
  doc["matrices"] = json::array();
  fs::path base = fs::path(path).parent_path();
  // Paths under the catalog's directory are stored relative to it.
  auto relative = [&](const std::string& p) {
    if (base.empty()) return p;
    auto rel = fs::path(p).lexically_relative(base);
    if (rel.empty() || rel.native().rfind("..", 0) == 0) return p;
    return rel.string();
  };
  for (const auto& e : entries_) {
    doc["matrices"].push_back({{"name", e.name}, {"path", relative(e.path)}});
  }
  if (!feature_paths_.empty()) {
    doc["features"] = json::object();
    for (const auto& [ref, p] : feature_paths_) doc["features"][ref] = relative(p);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

std::shared_ptr<MatrixCatalog> ResolveCatalog(const std::string& catalog_path,
                                              const std::vector<std::string>& names) {
  std::string path = catalog_path;
  if (path.empty()) {
    if (const char* env = std::getenv("DOMAVEC_CATALOG")) path = env;
  }
  auto cat = path.empty() ? std::make_shared<MatrixCatalog>() : MatrixCatalog::Load(path);
  for (const auto& n : names) {
    if (cat->Contains(n)) continue;
    if (fs::is_regular_file(n)) {
      cat->Add(n, n);
    } else {
      throw UnknownMatrix(n);
    }
  }
  return cat;
}

}  // namespace domavec
