#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "ced/coherence/cloud_cache.hpp"
#include "ced/migrate/channel.hpp"
#include "ced/migrate/executor.hpp"
#include "ced/netsim/link.hpp"
#include "ced/scanops/builder.hpp"

namespace ced::migrate {

struct CloudConfig {
  std::string address = "cloud1";
  std::uint16_t port = 6667;
  double cache_read_mb_s = 2000.0;
  int cores = 16;
  double planning_ms = 2.0;
  CostModel cost{.cpu_speedup = 2.5};
};

struct CloudStats {
  std::uint64_t confirms = 0;
  std::uint64_t rejects = 0;
  std::uint64_t sessions = 0;
  std::uint64_t blocks_sent = 0;
  std::uint64_t rows_sent = 0;
  std::uint64_t remigrations = 0;
  std::uint64_t aborted = 0;
  std::uint64_t protocol_errors = 0;
};

/// Cloud tier: confirms requests it can serve from the cache and streams
/// fragment results back under credit-based flow control.
class CloudNode {
 public:
  using SeqSource = std::function<std::uint64_t(const tsstore::SeriesPath&)>;

  CloudNode(netsim::EventLoop& loop, netsim::Link& link, coherence::CloudCache& cache,
            const queryplan::Catalog& catalog, SeqSource published_seq, CloudConfig config);
  ~CloudNode();
  CloudNode(const CloudNode&) = delete;
  CloudNode& operator=(const CloudNode&) = delete;

  void on_message(Message&& m);

  /// Hands a fragment back at the first boundary at or past `rows` stored rows.
  void set_forced_fallback(std::optional<std::int64_t> rows) { forced_rows_ = rows; }

  /// Cloud-side channel id -> edge channel id, one entry per confirmed request.
  const std::map<ChannelId, ChannelId>& channel_map() const { return channel_map_; }
  const CloudStats& stats() const { return stats_; }
  std::size_t active_sessions() const;
  netsim::CpuModel& cpu() { return cpu_; }

 private:
  struct Session;

  void plan_request(const ChannelId& id, MigrationRequest req);
  void start_fragment(Session& s, const DeltaState& d);
  void begin_stop(Session& s);
  void arm_forced_stop(Session& s);
  Task::Verdict emit(Session& s, tsstore::TsBlock&& b);
  void flush_held(Session& s);
  void finish(Session& s);
  bool send(MsgType t, const ChannelId& id, Bytes payload);

  netsim::EventLoop& loop_;
  netsim::Link& link_;
  coherence::CloudCache& cache_;
  const queryplan::Catalog& catalog_;
  SeqSource published_seq_;
  CloudConfig config_;
  netsim::DiskModel disk_;
  netsim::CpuModel cpu_;
  std::map<ChannelId, std::unique_ptr<Session>> sessions_;
  std::vector<std::unique_ptr<Session>> retired_;  // may still be referenced by queued events
  std::map<ChannelId, ChannelId> channel_map_;
  std::optional<std::int64_t> forced_rows_;
  CloudStats stats_;
};

}  // namespace ced::migrate
