#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ced/tsstore/series_path.hpp"

namespace ced::coherence {

/// Hierarchical path tree mapping storage-group prefixes to their owning edge node.
class PathCatalog {
 public:
  PathCatalog();
  ~PathCatalog();
  PathCatalog(PathCatalog&&) noexcept;
  PathCatalog& operator=(PathCatalog&&) noexcept;

  /// Registers `prefix` (e.g. root.ln.edge1) as owned by `node`.
  void register_prefix(const tsstore::SeriesPath& prefix, std::string node);

  /// Owner of the longest registered prefix of `path`; throws CedError(kUnknownPath).
  const std::string& resolve(const tsstore::SeriesPath& path) const;
  std::optional<std::string> try_resolve(const tsstore::SeriesPath& path) const;

  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  struct Node {
    std::map<std::string, std::unique_ptr<Node>> children;
    std::optional<std::string> owner;
  };

  std::unique_ptr<Node> root_;
};

}  // namespace ced::coherence
