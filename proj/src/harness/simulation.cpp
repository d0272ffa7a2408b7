#include "ced/harness/simulation.hpp"

#include <algorithm>
#include <set>

#include "ced/common/error.hpp"

namespace ced::harness {

using netsim::Direction;

double RunReport::cache_hit_rate() const {
  auto total = cache_hits + cache_misses;
  return total == 0 ? 0.0 : static_cast<double>(cache_hits) / static_cast<double>(total);
}

std::uint64_t RunReport::bytes_sent(Direction dir) const {
  std::uint64_t n = 0;
  for (const auto& b : bytes)
    if (b.dir == dir) n += b.counts.sent;
  return n;
}

const QueryRow& RunReport::query(const std::string& name, int instance) const {
  for (const auto& q : queries)
    if (q.name == name && q.instance == instance) return q;
  throw CedError(ErrorCode::kInvalidConfig, "no query " + name + "#" + std::to_string(instance));
}

void compute_metrics(RunReport& r) {
  r.mean_latency_ms = r.max_time_ms = r.qps = 0;
  if (r.queries.empty()) return;
  double total = 0;
  auto first = r.queries.front().outcome.start;
  auto last = r.queries.front().outcome.end;
  for (const auto& q : r.queries) {
    total += q.outcome.latency_ms();
    first = std::min(first, q.outcome.start);
    last = std::max(last, q.outcome.end);
  }
  auto n = static_cast<double>(r.queries.size());
  r.mean_latency_ms = total / n;
  r.max_time_ms = netsim::to_ms(last - first);
  r.qps = r.max_time_ms > 0 ? n / (r.max_time_ms / 1000.0) : 0.0;
}

namespace {

std::vector<tsstore::SeriesPath> query_series(const std::string& sql, const queryplan::Catalog& catalog) {
  std::vector<tsstore::SeriesPath> out;
  auto plan = queryplan::plan(queryplan::parse(sql), catalog);
  for (const auto* leaf : queryplan::scan_leaves(plan)) out.push_back(tsstore::SeriesPath::parse(leaf->series));
  return out;
}

std::vector<tsstore::SeriesPath> resolve_preload(const ScenarioConfig& cfg, const Dataset& data) {
  std::set<tsstore::SeriesPath> out;
  bool all_queries = cfg.preload.empty() && cfg.mode == Mode::kCloudOnly;
  for (const auto& entry : cfg.preload) {
    if (entry == "queries") {
      all_queries = true;
      continue;
    }
    auto dot = entry.find('.');
    auto head = entry.substr(0, dot);
    auto alias = data.catalog().aliases().find(head);
    tsstore::SeriesPath path;
    if (alias != data.catalog().aliases().end()) {
      path = dot == std::string::npos ? alias->second : alias->second.child(entry.substr(dot + 1));
    } else {
      path = tsstore::SeriesPath::parse(entry);
    }
    if (data.catalog().find(path)) {
      out.insert(path);
      continue;
    }
    bool any = false;
    for (const auto& s : data.series()) {
      if (s.parent() == path) {
        out.insert(s);
        any = true;
      }
    }
    if (!any) throw CedError(ErrorCode::kUnknownSeries, "preload entry '" + entry + "' matches nothing");
  }
  if (all_queries) {
    for (const auto& q : cfg.queries)
      for (auto& s : query_series(q.sql, data.catalog())) out.insert(s);
  }
  return {out.begin(), out.end()};
}

}  // namespace

RunReport simulate(const ScenarioConfig& cfg, Dataset& data, const std::filesystem::path& scratch) {
  cfg.validate(data.catalog());
  netsim::EventLoop loop;
  netsim::Link link(loop, cfg.link);
  migrate::EdgeNode edge(loop, link, data.store(), data.catalog(), cfg.edge);

  auto cache_dir = scratch / "cloud-cache";
  std::filesystem::remove_all(cache_dir);
  coherence::CloudCache cache(cache_dir, data.store().options(), cfg.cache);
  coherence::MessageQueue queue;
  coherence::Publisher publisher(queue, 64);
  migrate::CloudNode cloud(loop, link, cache, data.catalog(),
                           [&publisher](const tsstore::SeriesPath& p) { return publisher.published_seq(p); },
                           cfg.cloud);

  bool forced = cfg.forced_migration_at.has_value();
  edge.set_forced_migration(cfg.forced_migration_at);
  cloud.set_forced_fallback(cfg.forced_fallback_at);

  // Snapshots shipped for cache syncs, keyed by series; taken at send time.
  std::map<tsstore::SeriesPath, std::pair<tsstore::SeriesSnapshot, std::uint64_t>> in_transit;
  auto sync_now = [&](const tsstore::SeriesPath& p) {
    auto snap = data.store().export_series(p);
    ByteWriter w;
    w.str16(p.str());
    w.bytes32(data.store().image(p));
    netsim::Envelope env;
    env.channel = "sync:" + p.str();
    env.dir = Direction::kEdgeToCloud;
    env.payload = migrate::encode_message({migrate::MsgType::kSnapshot, {cfg.edge.address, cfg.edge.port, 0, 0, 0},
                                           std::move(w).take()});
    in_transit[p] = {std::move(snap), publisher.published_seq(p)};
    if (link.is_open()) link.send(std::move(env));
  };

  link.set_receiver(Direction::kEdgeToCloud, [&](netsim::Envelope&& env) {
    auto m = migrate::decode_message(env.payload);
    if (m.type != migrate::MsgType::kSnapshot) {
      cloud.on_message(std::move(m));
      return;
    }
    ByteReader r(m.payload);
    auto path = tsstore::SeriesPath::parse(r.str16());
    auto it = in_transit.find(path);
    if (it == in_transit.end()) return;
    cache.admit(path, it->second.first, it->second.second);
    in_transit.erase(it);
  });
  link.set_receiver(Direction::kCloudToEdge,
                    [&](netsim::Envelope&& env) { edge.on_message(migrate::decode_message(env.payload)); });

  for (const auto& p : resolve_preload(cfg, data)) {
    for (std::uint64_t i = 0; i <= cfg.cache.tau_hot; ++i) cache.record_access(p, 0.0);
    cache.admit(p, data.store().export_series(p), publisher.published_seq(p));
  }

  RunReport report;
  report.scenario = cfg.name;
  report.mode = cfg.mode;
  std::map<std::uint64_t, std::pair<std::string, int>> names;
  auto period = netsim::from_ms(cfg.sample_period_ms);
  for (const auto& spec : cfg.queries) {
    for (int i = 0; i < spec.concurrency; ++i) {
      if (cfg.mode != Mode::kEdgeOnly) {
        for (const auto& p : query_series(spec.sql, data.catalog())) {
          if (cache.record_access(p, link.utilization(Direction::kEdgeToCloud, period)) ==
              coherence::AccessOutcome::kSyncScheduled) {
            sync_now(p);
          }
        }
      }
      auto id = edge.submit(spec.name, spec.sql,
                            cfg.mode == Mode::kCloudOnly ? migrate::ExecMode::kCloudOnly : migrate::ExecMode::kLocal);
      names[id] = {spec.name, i};
    }
  }

  if (cfg.link_fail_at_ms) loop.at(netsim::from_ms(*cfg.link_fail_at_ms), [&link] { link.close(); });

  monitor::Monitor mon(cfg.policy);
  auto placement = monitor::Placement::kEdge;
  bool acting = cfg.mode == Mode::kCollaborative && !forced;
  std::function<void()> sample = [&] {
    if (edge.all_done()) return;
    auto snap = monitor::make_snapshot(edge.disk().io_usage(period), edge.cpu().cpu_usage(period), loop.now());
    auto d = mon.observe(snap, placement, acting);
    if (acting) {
      if (d == monitor::Decision::kMigrateToCloud) {
        placement = monitor::Placement::kCloud;
        edge.migrate_all();
      } else if (d == monitor::Decision::kFallBackToEdge) {
        placement = monitor::Placement::kEdge;
        edge.fall_back_all();
      }
    }
    for (const auto& p : cache.retry_deferred(link.utilization(Direction::kEdgeToCloud, period))) sync_now(p);
    loop.after(period, sample);
  };
  loop.after(period, sample);

  auto limit = netsim::from_seconds(cfg.time_limit_s);
  while (!edge.all_done()) {
    if (!loop.step() || loop.now() > limit) {
      throw CedError(ErrorCode::kProtocolViolation, cfg.name + ": " + std::to_string(edge.running()) +
                                                        " queries still running at t=" +
                                                        std::to_string(netsim::to_ms(loop.now())) + " ms");
    }
  }

  for (const auto& o : edge.outcomes()) {
    auto& [name, inst] = names.at(o.query_id);
    report.queries.push_back({name, inst, o});
  }
  report.decisions = mon.log();
  for (const auto& [key, counts] : link.byte_report()) report.bytes.push_back({key.first, key.second, counts});
  report.events = edge.events();
  report.cloud = cloud.stats();
  report.channel_map = cloud.channel_map();
  report.cache_hits = cache.hits();
  report.cache_misses = cache.misses();
  report.cross_deliveries = edge.cross_deliveries();
  report.data_before_ack = edge.data_before_ack();
  report.protocol_errors = edge.protocol_errors() + cloud.stats().protocol_errors;
  report.end_time = loop.now();
  compute_metrics(report);
  return report;
}

Dataset& DatasetPool::get(const WorkloadConfig& w) {
  auto key = w.key();
  auto it = sets_.find(key);
  if (it != sets_.end()) return *it->second;
  auto dir = scratch_ / ("edge-" + std::to_string(sets_.size()));
  auto ds = std::make_unique<Dataset>(w, dir);
  return *sets_.emplace(key, std::move(ds)).first->second;
}

std::vector<RunReport> run_all(const std::vector<ScenarioConfig>& scenarios, const std::filesystem::path& scratch) {
  DatasetPool pool(scratch);
  std::vector<RunReport> out;
  for (const auto& s : scenarios) out.push_back(simulate(s, pool.get(s.workload), scratch));
  return out;
}

}  // namespace ced::harness
