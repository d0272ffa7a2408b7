#include "ced/tsstore/series_path.hpp"

#include <algorithm>

#include "ced/common/error.hpp"

namespace ced::tsstore {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '*';
  });
}

SeriesPath SeriesPath::parse(std::string_view text) {
  SeriesPath p;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto dot = text.find('.', start);
    auto seg = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (!is_identifier(seg)) {
      throw CedError(ErrorCode::kUnknownPath, "invalid path segment in '" + std::string(text) + "'");
    }
    p.segments_.emplace_back(seg);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (p.segments_.size() < 3 || p.segments_.front() != kRootLabel) {
    throw CedError(ErrorCode::kUnknownPath, "path must start with root and have at least 3 segments: '" +
                                                std::string(text) + "'");
  }
  return p;
}

SeriesPath SeriesPath::child(std::string_view segment) const {
  if (!is_identifier(segment)) throw CedError(ErrorCode::kUnknownPath, "invalid segment " + std::string(segment));
  SeriesPath p = *this;
  p.segments_.emplace_back(segment);
  return p;
}

SeriesPath SeriesPath::parent() const {
  SeriesPath p = *this;
  if (!p.segments_.empty()) p.segments_.pop_back();
  return p;
}

bool SeriesPath::has_prefix(const SeriesPath& prefix) const {
  if (prefix.segments_.size() > segments_.size()) return false;
  return std::equal(prefix.segments_.begin(), prefix.segments_.end(), segments_.begin());
}

std::string SeriesPath::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '.';
    out += segments_[i];
  }
  return out;
}

}  // namespace ced::tsstore
