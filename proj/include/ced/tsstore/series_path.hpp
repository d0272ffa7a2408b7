#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace ced::tsstore {

inline constexpr std::string_view kRootLabel = "root";

/// Dotted hierarchical series identifier, e.g. root.ln.edge1.device1.t1.
class SeriesPath {
 public:
  SeriesPath() = default;

  /// Throws CedError(kUnknownPath) when the text is not a valid path.
  static SeriesPath parse(std::string_view text);

  const std::vector<std::string>& segments() const { return segments_; }
  std::size_t depth() const { return segments_.size(); }
  const std::string& leaf() const { return segments_.back(); }
  bool empty() const { return segments_.empty(); }

  SeriesPath child(std::string_view segment) const;
  SeriesPath parent() const;
  bool has_prefix(const SeriesPath& prefix) const;

  std::string str() const;

  auto operator<=>(const SeriesPath&) const = default;
  bool operator==(const SeriesPath&) const = default;

 private:
  std::vector<std::string> segments_;
};

bool is_identifier(std::string_view s);

}  // namespace ced::tsstore
