#include "ced/coherence/path_catalog.hpp"

#include <functional>

#include "ced/common/error.hpp"

namespace ced::coherence {

PathCatalog::PathCatalog() : root_(std::make_unique<Node>()) {}
PathCatalog::~PathCatalog() = default;
PathCatalog::PathCatalog(PathCatalog&&) noexcept = default;
PathCatalog& PathCatalog::operator=(PathCatalog&&) noexcept = default;

void PathCatalog::register_prefix(const tsstore::SeriesPath& prefix, std::string node) {
  Node* cur = root_.get();
  for (const auto& seg : prefix.segments()) {
    auto& child = cur->children[seg];
    if (!child) child = std::make_unique<Node>();
    cur = child.get();
  }
  cur->owner = std::move(node);
}

std::optional<std::string> PathCatalog::try_resolve(const tsstore::SeriesPath& path) const {
  const Node* cur = root_.get();
  std::optional<std::string> best;
  for (const auto& seg : path.segments()) {
    auto it = cur->children.find(seg);
    if (it == cur->children.end()) break;
    cur = it->second.get();
    if (cur->owner) best = cur->owner;
  }
  return best;
}

const std::string& PathCatalog::resolve(const tsstore::SeriesPath& path) const {
  const Node* cur = root_.get();
  const std::string* best = nullptr;
  for (const auto& seg : path.segments()) {
    auto it = cur->children.find(seg);
    if (it == cur->children.end()) break;
    cur = it->second.get();
    if (cur->owner) best = &*cur->owner;
  }
  if (!best) throw CedError(ErrorCode::kUnknownPath, path.str());
  return *best;
}

std::vector<std::pair<std::string, std::string>> PathCatalog::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  std::function<void(const Node&, const std::string&)> walk = [&](const Node& n, const std::string& prefix) {
    if (n.owner) out.emplace_back(prefix, *n.owner);
    for (const auto& [seg, child] : n.children) walk(*child, prefix.empty() ? seg : prefix + "." + seg);
  };
  walk(*root_, "");
  return out;
}

}  // namespace ced::coherence
