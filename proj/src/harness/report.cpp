#include "ced/harness/report.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>

#include "ced/common/error.hpp"

namespace ced::harness {

void write_metrics_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "scenario,mode,query,instance,start_ms,end_ms,latency_ms,rows,blocks,checksum,requests,migrations,"
         "remigrations,rejections,handshake_failures,broken_channels,chunks_loaded,chunks_skipped,disk_bytes\n";
  for (const auto& r : runs) {
    for (const auto& q : r.queries) {
      const auto& o = q.outcome;
      fmt::print(out, "{},{},{},{},{:.3f},{:.3f},{:.3f},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario,
                 mode_name(r.mode), q.name, q.instance, netsim::to_ms(o.start), netsim::to_ms(o.end), o.latency_ms(),
                 o.rows, o.blocks, o.checksum, o.requests, o.migrations, o.remigrations, o.rejections,
                 o.handshake_failures, o.broken_channels, o.counters.chunks_loaded, o.counters.chunks_skipped,
                 o.counters.disk_bytes);
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "scenario,mode,queries,mean_latency_ms,max_time_ms,qps,cache_hit_rate,bytes_edge_to_cloud,"
         "bytes_cloud_to_edge,cross_deliveries,data_before_ack,protocol_errors\n";
  for (const auto& r : runs) {
    fmt::print(out, "{},{},{},{:.3f},{:.3f},{:.4f},{:.4f},{},{},{},{},{}\n", r.scenario, mode_name(r.mode),
               r.queries.size(), r.mean_latency_ms, r.max_time_ms, r.qps, r.cache_hit_rate(),
               r.bytes_sent(netsim::Direction::kEdgeToCloud), r.bytes_sent(netsim::Direction::kCloudToEdge),
               r.cross_deliveries, r.data_before_ack, r.protocol_errors);
  }
}

void write_decisions_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "scenario,time_ms,io_usage,cpu_usage,placement,decision,acted\n";
  for (const auto& r : runs) {
    for (const auto& d : r.decisions) {
      fmt::print(out, "{},{:.3f},{:.4f},{:.4f},{},{},{}\n", r.scenario, netsim::to_ms(d.time), d.io_usage,
                 d.cpu_usage, monitor::placement_name(d.placement), monitor::decision_name(d.decision),
                 d.acted ? 1 : 0);
    }
  }
}

void write_bytes_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "scenario,channel,direction,messages,sent,delivered,dropped\n";
  for (const auto& r : runs) {
    for (const auto& b : r.bytes) {
      fmt::print(out, "{},{},{},{},{},{},{}\n", r.scenario, b.channel, netsim::direction_name(b.dir),
                 b.counts.messages, b.counts.sent, b.counts.delivered, b.counts.dropped);
    }
  }
}

void write_events_csv(std::ostream& out, const std::vector<RunReport>& runs) {
  out << "scenario,time_ms,channel,event,detail\n";
  for (const auto& r : runs) {
    for (const auto& e : r.events) {
      fmt::print(out, "{},{:.3f},{},{},\"{}\"\n", r.scenario, netsim::to_ms(e.time), e.channel.label(), e.event,
                 e.detail);
    }
  }
}

void emit(const std::vector<RunReport>& runs, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CedError(ErrorCode::kStorageIo, dir.string() + ": " + ec.message());
  auto write = [&](const char* name, void (*fn)(std::ostream&, const std::vector<RunReport>&)) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw CedError(ErrorCode::kStorageIo, "cannot open " + (dir / name).string());
    fn(out, runs);
    if (!out) throw CedError(ErrorCode::kStorageIo, "write failed for " + (dir / name).string());
  };
  write("metrics.csv", write_metrics_csv);
  write("summary.csv", write_summary_csv);
  write("decisions.csv", write_decisions_csv);
  write("bytes.csv", write_bytes_csv);
  write("events.csv", write_events_csv);
}

}  // namespace ced::harness
