#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "ced/migrate/channel.hpp"
#include "ced/migrate/executor.hpp"
#include "ced/netsim/link.hpp"
#include "ced/scanops/builder.hpp"

namespace ced::migrate {

struct EdgeConfig {
  std::string address = "edge1";
  std::uint16_t port = 6667;
  double disk_mb_s = 200.0;
  double io_throttle = 1.0;
  int cores = 4;
  double cpu_load = 0.0;
  CostModel cost;
  ProtocolConfig protocol;
  /// Replaces the plan-derived transmission mode when set.
  std::optional<TransmissionMode> transmission;
};

enum class ExecMode : std::uint8_t { kLocal, kCloudOnly };

struct QueryOutcome {
  std::uint64_t query_id = 0;
  std::string name;
  std::string sql;
  netsim::SimTime start = 0;
  netsim::SimTime end = 0;
  bool finished = false;
  std::uint64_t rows = 0;
  std::uint64_t blocks = 0;
  std::string checksum;
  std::uint32_t requests = 0;
  std::uint32_t migrations = 0;    // scans switched to a cloud stream
  std::uint32_t remigrations = 0;  // streams handed back by the cloud
  std::uint32_t rejections = 0;
  std::uint32_t handshake_failures = 0;
  std::uint32_t broken_channels = 0;
  scanops::ExecCounters counters;

  double latency_ms() const { return netsim::to_ms(end - start); }
};

struct ProtocolEvent {
  netsim::SimTime time = 0;
  ChannelId channel;
  std::string event;
  std::string detail;
};

/// Edge tier: runs queries against the local store and moves scans to the
/// cloud and back over a Link.
class EdgeNode {
 public:
  EdgeNode(netsim::EventLoop& loop, netsim::Link& link, const tsstore::SeriesStore& store,
           const queryplan::Catalog& catalog, EdgeConfig config);
  ~EdgeNode();
  EdgeNode(const EdgeNode&) = delete;
  EdgeNode& operator=(const EdgeNode&) = delete;

  /// Starts a query now. Throws parse/plan errors synchronously.
  std::uint64_t submit(std::string name, const std::string& sql, ExecMode mode = ExecMode::kLocal);

  /// Requests migration of every local, unfinished scan. Returns requests sent.
  std::size_t migrate_all();
  /// Asks the cloud to hand back every migrated scan. Returns channels affected.
  std::size_t fall_back_all();
  /// Every scan negotiates a channel at start and switches at the first
  /// boundary at or past `rows` stored rows.
  void set_forced_migration(std::optional<std::int64_t> rows) { forced_rows_ = rows; }

  void on_message(Message&& m);

  bool all_done() const;
  std::size_t running() const;
  std::size_t migrated_scans() const;
  std::vector<QueryOutcome> outcomes() const;
  const QueryOutcome& outcome(std::uint64_t id) const;
  void set_on_query_done(std::function<void(const QueryOutcome&)> f) { on_done_ = std::move(f); }

  netsim::DiskModel& disk() { return disk_; }
  netsim::CpuModel& cpu() { return cpu_; }
  const EdgeConfig& config() const { return config_; }

  std::uint64_t cross_deliveries() const { return cross_deliveries_; }
  std::uint64_t data_before_ack() const { return data_before_ack_; }
  std::uint64_t protocol_errors() const { return protocol_errors_; }
  const std::vector<ProtocolEvent>& events() const { return events_; }

 private:
  struct Query;

  void request(Query& q, std::int32_t source_id);
  void on_confirmed(Query& q, EdgeChannel& ch);
  std::shared_ptr<scanops::RemoteBlockSource> switch_over(Query& q, const std::shared_ptr<EdgeChannel>& ch,
                                                          const scanops::LogicalIndex& idx);
  void send_probe(Query& q, const std::shared_ptr<EdgeChannel>& ch);
  void check_forced(Query& q);
  void maybe_start(Query& q);
  void handle(Query& q, EdgeChannel& ch, Message&& m);
  void arm_pause(Query& q, const std::shared_ptr<EdgeChannel>& ch, scanops::CollaborativeScan* scan);
  void finish(Query& q);
  void link_closed();
  bool send(MsgType t, const ChannelId& id, Bytes payload);
  void log(const ChannelId& id, std::string event, std::string detail = {});
  ChannelId channel_id(std::uint64_t query_id, std::int32_t source_id) const;

  netsim::EventLoop& loop_;
  netsim::Link& link_;
  const tsstore::SeriesStore& store_;
  const queryplan::Catalog& catalog_;
  EdgeConfig config_;
  netsim::DiskModel disk_;
  netsim::CpuModel cpu_;
  std::map<std::uint64_t, std::unique_ptr<Query>> queries_;
  std::uint64_t next_query_ = 1;
  std::optional<std::int64_t> forced_rows_;
  std::function<void(const QueryOutcome&)> on_done_;
  std::uint64_t cross_deliveries_ = 0;
  std::uint64_t data_before_ack_ = 0;
  std::uint64_t protocol_errors_ = 0;
  std::vector<ProtocolEvent> events_;
};

}  // namespace ced::migrate
