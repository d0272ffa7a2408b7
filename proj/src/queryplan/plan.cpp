#include "ced/queryplan/plan.hpp"

#include <algorithm>

#include "ced/common/error.hpp"

namespace ced::queryplan {

using tsstore::SeriesPath;

void Catalog::add_alias(std::string alias, SeriesPath device) { aliases_[std::move(alias)] = std::move(device); }

void Catalog::add_series(SeriesInfo info) {
  auto key = info.path;
  series_[key] = std::move(info);
}

SeriesPath Catalog::resolve_source(const std::string& source) const {
  if (auto it = aliases_.find(source); it != aliases_.end()) return it->second;
  if (source.find('.') == std::string::npos) throw CedError(ErrorCode::kUnknownSeries, "unknown source " + source);
  return SeriesPath::parse(source);
}

const SeriesInfo* Catalog::find(const SeriesPath& series) const {
  auto it = series_.find(series);
  return it == series_.end() ? nullptr : &it->second;
}

Catalog Catalog::from_store(const tsstore::SeriesStore& store, const std::map<std::string, SeriesPath>& aliases) {
  Catalog c;
  for (const auto& [k, v] : aliases) c.add_alias(k, v);
  for (const auto& path : store.list_series()) {
    auto s = store.stats(path);
    c.add_series({path, s.type, s.rows, s.min_ts, s.max_ts});
  }
  return c;
}

std::string_view op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::kSeriesScan: return "series-scan";
    case OpKind::kAggregationScan: return "agg-scan";
    case OpKind::kFilter: return "filter";
    case OpKind::kProject: return "project";
    case OpKind::kMerge: return "merge";
  }
  return "?";
}

namespace {

const SeriesInfo& require(const Catalog& c, const SeriesPath& device, const std::string& sensor) {
  auto path = device.child(sensor);
  const auto* info = c.find(path);
  if (!info || info->rows == 0) throw CedError(ErrorCode::kUnknownSeries, path.str());
  return *info;
}

void number_sources(OperatorNode& n, std::int32_t& next) {
  std::int32_t self = next++;
  if (n.is_scan()) n.source_id = self;
  for (auto& c : n.children) number_sources(c, next);
}

}  // namespace

OperatorNode plan(const Query& q, const Catalog& catalog) {
  if (q.select.empty()) throw CedError(ErrorCode::kPlanError, "empty select list");
  bool aggregate = q.is_aggregate();
  for (const auto& it : q.select) {
    if (it.agg.has_value() != aggregate) throw CedError(ErrorCode::kPlanError, "aggregate/plain select mismatch");
  }
  if (aggregate && *q.group_by_ms <= 0) throw CedError(ErrorCode::kPlanError, "window width must be positive");
  if (aggregate && q.where) throw CedError(ErrorCode::kPlanError, "WHERE with GROUP BY");

  auto device = catalog.resolve_source(q.source);
  std::vector<OperatorNode> leaves;
  std::vector<std::string> names;

  if (aggregate) {
    for (const auto& it : q.select) {
      const auto& info = require(catalog, device, it.sensor);
      OperatorNode leaf;
      leaf.kind = OpKind::kAggregationScan;
      leaf.series = info.path.str();
      leaf.agg = *it.agg;
      leaf.window_ms = *q.group_by_ms;
      leaf.range_lo = info.min_ts;
      leaf.range_hi = info.max_ts + 1;
      leaves.push_back(std::move(leaf));
      names.push_back(std::string(agg_name(*it.agg)) + "(" + it.sensor + ")");
    }
  } else {
    for (const auto& it : q.select) {
      if (std::find(names.begin(), names.end(), it.sensor) == names.end()) names.push_back(it.sensor);
    }
    if (q.where && std::find(names.begin(), names.end(), q.where->sensor) == names.end()) {
      names.push_back(q.where->sensor);
    }
    for (const auto& name : names) {
      const auto& info = require(catalog, device, name);
      OperatorNode leaf;
      leaf.kind = OpKind::kSeriesScan;
      leaf.series = info.path.str();
      leaves.push_back(std::move(leaf));
    }
  }

  OperatorNode root;
  if (leaves.size() == 1) {
    root = std::move(leaves.front());
  } else {
    root.kind = OpKind::kMerge;
    root.children = std::move(leaves);
    root.names = names;
  }

  if (q.where) {
    OperatorNode filter;
    filter.kind = OpKind::kFilter;
    filter.predicate = q.where;
    filter.column = static_cast<std::uint32_t>(
        std::find(names.begin(), names.end(), q.where->sensor) - names.begin());
    filter.children.push_back(std::move(root));
    root = std::move(filter);
  }

  // Project away a predicate-only column, or reorder duplicates out of the select list.
  std::vector<std::string> wanted;
  for (const auto& it : q.select) {
    wanted.push_back(it.agg ? std::string(agg_name(*it.agg)) + "(" + it.sensor + ")" : it.sensor);
  }
  if (wanted != names) {
    OperatorNode project;
    project.kind = OpKind::kProject;
    for (const auto& w : wanted) {
      project.keep.push_back(static_cast<std::uint32_t>(std::find(names.begin(), names.end(), w) - names.begin()));
    }
    project.names = wanted;
    project.children.push_back(std::move(root));
    root = std::move(project);
  }

  std::int32_t next = 0;
  number_sources(root, next);
  return root;
}

namespace {

void write_sexpr(std::string& out, const OperatorNode& n) {
  out += "(";
  out += op_kind_name(n.kind);
  switch (n.kind) {
    case OpKind::kSeriesScan:
      out += " :src " + std::to_string(n.source_id) + " :series " + n.series;
      break;
    case OpKind::kAggregationScan:
      out += " :src " + std::to_string(n.source_id) + " :series " + n.series + " :fn " +
             std::string(agg_name(n.agg)) + " :window " + std::to_string(n.window_ms) + " :range [" +
             std::to_string(n.range_lo) + " " + std::to_string(n.range_hi) + ")";
      break;
    case OpKind::kFilter:
      out += " :col " + std::to_string(n.column) + " :pred (" + std::string(op_symbol(n.predicate->op)) + " " +
             n.predicate->sensor + " " + render_literal(n.predicate->literal) + ")";
      break;
    case OpKind::kProject:
      out += " :keep (";
      for (std::size_t i = 0; i < n.keep.size(); ++i) out += (i ? " " : "") + std::to_string(n.keep[i]);
      out += ")";
      [[fallthrough]];
    case OpKind::kMerge:
      out += " :names (";
      for (std::size_t i = 0; i < n.names.size(); ++i) out += (i ? " " : "") + n.names[i];
      out += ")";
      break;
  }
  for (const auto& c : n.children) {
    out += " ";
    write_sexpr(out, c);
  }
  out += ")";
}

void collect_scans(const OperatorNode& n, std::vector<const OperatorNode*>& out) {
  if (n.is_scan()) out.push_back(&n);
  for (const auto& c : n.children) collect_scans(c, out);
}

bool pushable(const OperatorNode& n, std::int32_t source_id, std::optional<Predicate>& found,
              std::optional<Predicate> above) {
  if (n.is_scan() && n.source_id == source_id) {
    if (above && n.kind == OpKind::kSeriesScan && SeriesPath::parse(n.series).leaf() == above->sensor) found = above;
    return true;
  }
  if (n.kind == OpKind::kFilter) above = n.predicate;
  for (const auto& c : n.children) {
    if (pushable(c, source_id, found, above)) return true;
  }
  return false;
}

}  // namespace

std::string serialize(const OperatorNode& n) {
  std::string out;
  write_sexpr(out, n);
  return out;
}

const OperatorNode* find_source(const OperatorNode& root, std::int32_t source_id) {
  for (const auto* s : scan_leaves(root)) {
    if (s->source_id == source_id) return s;
  }
  return nullptr;
}

std::vector<const OperatorNode*> scan_leaves(const OperatorNode& root) {
  std::vector<const OperatorNode*> out;
  collect_scans(root, out);
  return out;
}

std::optional<Predicate> pushable_predicate(const OperatorNode& root, std::int32_t source_id) {
  std::optional<Predicate> found;
  pushable(root, source_id, found, std::nullopt);
  return found;
}

}  // namespace ced::queryplan
