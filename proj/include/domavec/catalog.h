// Named matrices and feature configurations served to the CLI and service.

#ifndef DOMAVEC_CATALOG_H_
#define DOMAVEC_CATALOG_H_

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "domavec/features.h"
#include "domavec/matrix.h"

namespace domavec {

class UnknownMatrix : public std::runtime_error {
 public:
  explicit UnknownMatrix(const std::string& name)
      : std::runtime_error("unknown matrix '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

struct CatalogEntry {
  std::string name;
  std::string path;
  MatrixHeader header;
};

// Catalog file (JSON):
//   {"matrices": [{"name": "GENERIC", "path": "GENERIC.doma"}, ...],
//    "features": {"animals": "animals.features"}}
// Relative paths resolve against the catalog's directory. Matrices load on
// first use and are shared read-only afterwards.
class MatrixCatalog {
 public:
  MatrixCatalog() = default;
  static std::shared_ptr<MatrixCatalog> Load(const std::string& path);

  // Registers a matrix file; its header is read immediately.
  void Add(const std::string& name, const std::string& path);
  void AddFeatureConfig(const std::string& ref, const std::string& path);

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  bool Contains(const std::string& name) const;

  // Throws UnknownMatrix.
  std::shared_ptr<const VectorSpace> Get(const std::string& name) const;
  const FeatureConfig& Features(const std::string& ref) const;
  MatrixLookup Lookup() const;

  // Loads every matrix now.
  void Preload() const;

  void Save(const std::string& path) const;

 private:
  std::vector<CatalogEntry> entries_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::string> feature_paths_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::shared_ptr<const VectorSpace>> loaded_;
  mutable std::map<std::string, std::shared_ptr<const FeatureConfig>> configs_;
};

// Catalog from --catalog, else $DOMAVEC_CATALOG, else empty. Names that are
// not catalogued but name an existing DOMA1 file are added under that path.
std::shared_ptr<MatrixCatalog> ResolveCatalog(const std::string& catalog_path,
                                              const std::vector<std::string>& names);

}  // namespace domavec

#endif  // DOMAVEC_CATALOG_H_
