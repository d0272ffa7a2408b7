#include "ced/migrate/edge_node.hpp"

#include <algorithm>

#include "ced/common/error.hpp"

namespace ced::migrate {

using scanops::LogicalIndex;
using scanops::NextResult;
using scanops::Operator;
using scanops::OperatorPtr;

namespace {

/// Root of a query shipped whole to the cloud. Falls back to a local plan,
/// dropping rows already received, if the cloud refuses or the link breaks.
class RemoteQuery final : public Operator {
 public:
  RemoteQuery(std::shared_ptr<EdgeChannel> ch, std::function<scanops::BuiltPlan()> build_local)
      : ch_(std::move(ch)), build_local_(std::move(build_local)) {}

  NextResult next(scanops::ExecCounters& c) override {
    if (local_.root) {
      auto r = local_.root->next(c);
      if (r.status != NextResult::Status::kBlock || !watermark_) return r;
      auto& b = r.block;
      auto first = std::upper_bound(b.timestamps.begin(), b.timestamps.end(), *watermark_) - b.timestamps.begin();
      if (first > 0) {
        b.timestamps.erase(b.timestamps.begin(), b.timestamps.begin() + first);
        for (auto& col : b.columns) col.erase(col.begin(), col.begin() + first);
      }
      if (b.empty()) return NextResult::yield();
      watermark_.reset();
      return r;
    }
    auto p = ch_->pull();
    switch (p.kind) {
      case scanops::RemoteBlockSource::Pull::Kind::kBlock:
        c.rows_received += p.block.row_count();
        if (!p.block.empty()) last_ = p.block.timestamps.back();
        return NextResult::of(std::move(p.block));
      case scanops::RemoteBlockSource::Pull::Kind::kPending:
        return NextResult::pending();
      case scanops::RemoteBlockSource::Pull::Kind::kFinished:
        return NextResult::done();
      case scanops::RemoteBlockSource::Pull::Kind::kResumeLocal:
        local_ = build_local_();
        watermark_ = last_;
        return NextResult::yield();
    }
    return NextResult::done();
  }

  bool has_next() const override { return local_.root ? local_.root->has_next() : !ch_->finished(); }

 private:
  std::shared_ptr<EdgeChannel> ch_;
  std::function<scanops::BuiltPlan()> build_local_;
  scanops::BuiltPlan local_;
  std::optional<tsstore::Timestamp> last_;
  std::optional<tsstore::Timestamp> watermark_;
};

}  // namespace

struct EdgeNode::Query {
  QueryOutcome out;
  ExecMode mode = ExecMode::kLocal;
  queryplan::OperatorNode plan;
  TransmissionMode tx = TransmissionMode::kBlockStreaming;
  scanops::BuiltPlan built;
  std::unique_ptr<Operator> remote_root;
  Operator* root = nullptr;
  std::unique_ptr<Task> task;
  Fnv1a hash;
  std::map<std::int32_t, std::shared_ptr<EdgeChannel>> channels;  // latest channel per source
  std::set<std::int32_t> forced;
  bool held = false;  // forced runs start once every channel is confirmed or refused
};

EdgeNode::EdgeNode(netsim::EventLoop& loop, netsim::Link& link, const tsstore::SeriesStore& store,
                   const queryplan::Catalog& catalog, EdgeConfig config)
    : loop_(loop),
      link_(link),
      store_(store),
      catalog_(catalog),
      config_(std::move(config)),
      disk_(loop, config_.disk_mb_s, config_.io_throttle),
      cpu_(loop, config_.cores, config_.cpu_load) {
  config_.protocol.validate();
  link_.on_close([this] { link_closed(); });
}

EdgeNode::~EdgeNode() = default;

ChannelId EdgeNode::channel_id(std::uint64_t query_id, std::int32_t source_id) const {
  return {config_.address, config_.port, queryplan::kFragmentId, source_id, query_id};
}

bool EdgeNode::send(MsgType t, const ChannelId& id, Bytes payload) {
  if (!link_.is_open()) return false;
  netsim::Envelope env;
  env.channel = id.label();
  env.dir = netsim::Direction::kEdgeToCloud;
  env.best_effort = is_best_effort(t);
  env.payload = encode_message({t, id, std::move(payload)});
  try {
    link_.send(std::move(env));
  } catch (const CedError& e) {
    if (e.code() == ErrorCode::kLinkClosed) return false;
    throw;
  }
  return true;
}

void EdgeNode::log(const ChannelId& id, std::string event, std::string detail) {
  events_.push_back({loop_.now(), id, std::move(event), std::move(detail)});
}

std::uint64_t EdgeNode::submit(std::string name, const std::string& sql, ExecMode mode) {
  auto q = std::make_unique<Query>();
  auto parsed = queryplan::parse(sql);
  q->plan = queryplan::plan(parsed, catalog_);
  q->tx = config_.transmission.value_or(select_transmission_mode(q->plan));
  q->mode = mode;
  q->out.query_id = next_query_++;
  q->out.name = std::move(name);
  q->out.sql = queryplan::render(parsed);
  q->out.start = loop_.now();
  auto& ref = *q;

  if (mode == ExecMode::kLocal) {
    q->built = scanops::build(q->plan, store_);
    q->root = q->built.root.get();
  } else {
    auto id = channel_id(q->out.query_id, kFullQuerySource);
    auto ch = std::make_shared<EdgeChannel>(id, std::string{}, LogicalIndex::Kind::kRowOffset);
    ch->set_on_consume([this, id, ch = ch.get()] {
      if (ch->phase == ChannelPhase::kStreaming) send(MsgType::kCredit, id, encode_credit(1));
    });
    q->channels[kFullQuerySource] = ch;
    q->remote_root = std::make_unique<RemoteQuery>(ch, [this, &ref] { return scanops::build(ref.plan, store_); });
    q->root = q->remote_root.get();
  }

  q->task = std::make_unique<Task>(
      loop_, disk_, cpu_, config_.cost, *q->root,
      [&ref](tsstore::TsBlock&& b) {
        ++ref.out.blocks;
        ref.out.rows += b.row_count();
        tsstore::hash_rows(ref.hash, b);
        return Task::Verdict::kContinue;
      },
      [this, &ref] { finish(ref); });

  auto id = q->out.query_id;
  queries_.emplace(id, std::move(q));
  if (mode == ExecMode::kCloudOnly) {
    auto& ch = ref.channels[kFullQuerySource];
    ++ref.out.requests;
    log(ch->id(), "request", "full-query");
    if (!send(MsgType::kRequest, ch->id(), encode(MigrationRequest{ref.out.sql, RequestKind::kFullQuery, ref.tx}))) {
      ch->fail();
    }
  } else {
    check_forced(ref);
    ref.held = forced_rows_.has_value();
  }
  maybe_start(ref);
  return id;
}

void EdgeNode::maybe_start(Query& q) {
  if (q.held) {
    for (const auto& [src, ch] : q.channels)
      if (ch->phase == ChannelPhase::kRequested) return;
    q.held = false;
  }
  q.task->start();
}

void EdgeNode::request(Query& q, std::int32_t source_id) {
  auto* scan = q.built.scans.at(source_id);
  auto id = channel_id(q.out.query_id, source_id);
  auto ch = std::make_shared<EdgeChannel>(id, scan->output_name(), scan->index_kind());
  ch->set_on_consume([this, id, ch = ch.get()] {
    if (ch->phase == ChannelPhase::kStreaming) send(MsgType::kCredit, id, encode_credit(1));
  });
  q.channels[source_id] = ch;
  ++q.out.requests;
  log(id, "request", std::string(mode_name(q.tx)));
  if (!send(MsgType::kRequest, id, encode(MigrationRequest{q.out.sql, RequestKind::kFragment, q.tx}))) {
    ch->phase = ChannelPhase::kClosed;
  }
}

std::size_t EdgeNode::migrate_all() {
  std::size_t n = 0;
  for (auto& [qid, q] : queries_) {
    if (q->out.finished || q->mode != ExecMode::kLocal) continue;
    for (auto& [src, scan] : q->built.scans) {
      if (scan->finished() || scan->remote() || scan->pause_requested()) continue;
      auto it = q->channels.find(src);
      if (it != q->channels.end() && it->second->phase != ChannelPhase::kClosed) continue;
      request(*q, src);
      ++n;
    }
  }
  return n;
}

std::size_t EdgeNode::fall_back_all() {
  std::size_t n = 0;
  for (auto& [qid, q] : queries_) {
    if (q->out.finished || q->mode != ExecMode::kLocal) continue;
    for (auto& [src, ch] : q->channels) {
      switch (ch->phase) {
        case ChannelPhase::kRequested:
          if (!ch->cancel_on_confirm) {
            ch->cancel_on_confirm = true;
            ++n;
          }
          break;
        case ChannelPhase::kConfirmed:
          q->built.scans.at(src)->cancel_pause();
          ch->phase = ChannelPhase::kClosed;
          send(MsgType::kTerminate, ch->id(), encode(TerminateReason::kAbort));
          log(ch->id(), "cancel");
          ++n;
          break;
        case ChannelPhase::kProbing:
        case ChannelPhase::kStreaming:
          if (!ch->stop_sent) {
            ch->stop_sent = true;
            send(MsgType::kStop, ch->id(), {});
            log(ch->id(), "stop");
            ++n;
          }
          break;
        case ChannelPhase::kClosed:
          break;
      }
    }
  }
  return n;
}

void EdgeNode::check_forced(Query& q) {
  if (!forced_rows_ || q.out.finished || q.mode != ExecMode::kLocal) return;
  for (auto& [src, scan] : q.built.scans) {
    if (q.forced.count(src) || scan->finished() || scan->remote()) continue;
    q.forced.insert(src);
    request(q, src);
  }
}

void EdgeNode::arm_pause(Query& q, const std::shared_ptr<EdgeChannel>& ch, scanops::CollaborativeScan* scan) {
  scan->request_pause([this, &q, ch, scan](const LogicalIndex& idx) -> std::shared_ptr<scanops::RemoteBlockSource> {
    if (forced_rows_ && ch->phase == ChannelPhase::kConfirmed && scan->progress_rows() < *forced_rows_) {
      arm_pause(q, ch, scan);  // not there yet; ask again at the next boundary
      return nullptr;
    }
    return switch_over(q, ch, idx);
  });
}

void EdgeNode::on_confirmed(Query& q, EdgeChannel& ch) {
  auto src = ch.id().source_id;
  if (ch.cancel_on_confirm || q.out.finished) {
    ch.phase = ChannelPhase::kClosed;
    send(MsgType::kTerminate, ch.id(), encode(TerminateReason::kAbort));
    log(ch.id(), "abort", "cancelled before switch");
    return;
  }
  ch.phase = ChannelPhase::kConfirmed;
  if (q.mode == ExecMode::kCloudOnly) {
    switch_over(q, q.channels.at(src), LogicalIndex::row_offset(0));
    return;
  }
  auto* scan = q.built.scans.at(src);
  if (scan->finished()) {
    ch.phase = ChannelPhase::kClosed;
    send(MsgType::kTerminate, ch.id(), encode(TerminateReason::kAbort));
    log(ch.id(), "abort", "scan already finished");
    return;
  }
  arm_pause(q, q.channels.at(src), scan);
  // A parked task must run a step to reach the pause boundary.
  q.task->wake();
}

std::shared_ptr<scanops::RemoteBlockSource> EdgeNode::switch_over(Query& q, const std::shared_ptr<EdgeChannel>& ch,
                                                                  const LogicalIndex& idx) {
  if (ch->phase != ChannelPhase::kConfirmed || !link_.is_open()) {
    ch->phase = ChannelPhase::kClosed;
    return nullptr;
  }
  ch->switch_index = idx;
  if (!send(MsgType::kDeltaState, ch->id(), encode(DeltaState{DeltaDirection::kEdgeToCloud, q.out.sql, idx}))) {
    ch->phase = ChannelPhase::kClosed;
    return nullptr;
  }
  ch->phase = ChannelPhase::kProbing;
  ++q.out.migrations;
  log(ch->id(), "switch", scanops::to_string(idx));
  send_probe(q, ch);
  return ch;
}

void EdgeNode::send_probe(Query& q, const std::shared_ptr<EdgeChannel>& ch) {
  auto attempt = ++ch->probe_attempt;
  send(MsgType::kProbe, ch->id(), encode_probe(ch->series()));
  auto rtt = static_cast<double>(link_.rtt() + link_.backlog(netsim::Direction::kEdgeToCloud) +
                                 link_.backlog(netsim::Direction::kCloudToEdge));
  auto timeout = static_cast<netsim::SimTime>(config_.protocol.probe_timeout_factor * rtt);
  loop_.after(timeout, [this, &q, ch, attempt] {
    if (ch->phase != ChannelPhase::kProbing || ch->probe_attempt != attempt || ch->finished()) return;
    if (attempt <= config_.protocol.probe_retries) {
      log(ch->id(), "probe-retry", std::to_string(attempt));
      send_probe(q, ch);
      return;
    }
    ++q.out.handshake_failures;
    log(ch->id(), "handshake-timeout");
    send(MsgType::kTerminate, ch->id(), encode(TerminateReason::kAbort));
    ch->phase = ChannelPhase::kClosed;
    ch->fail();
    q.task->wake();
  });
}

void EdgeNode::on_message(Message&& m) {
  auto qit = queries_.find(m.channel.query_id);
  if (qit == queries_.end()) {
    ++protocol_errors_;
    return;
  }
  auto& q = *qit->second;
  auto cit = q.channels.find(m.channel.source_id);
  if (cit == q.channels.end() || cit->second->id() != m.channel) {
    ++protocol_errors_;
    return;
  }
  auto ch = cit->second;
  handle(q, *ch, std::move(m));
  maybe_start(q);
}

void EdgeNode::handle(Query& q, EdgeChannel& chref, Message&& m) {
  auto ch = q.channels.at(chref.id().source_id);
  switch (m.type) {
    case MsgType::kConfirm: {
      if (ch->phase != ChannelPhase::kRequested) return;  // duplicate
      auto c = decode_confirm(m.payload);
      if (c != Confirmation{m.channel.fragment_id, m.channel.source_id, m.channel.query_id}) {
        ++protocol_errors_;
        return;
      }
      log(ch->id(), "confirm");
      on_confirmed(q, *ch);
      return;
    }
    case MsgType::kReject:
      if (ch->phase != ChannelPhase::kRequested) return;
      ++q.out.rejections;
      log(ch->id(), "reject", decode_reject(m.payload));
      ch->phase = ChannelPhase::kClosed;
      if (q.mode == ExecMode::kCloudOnly) {
        ch->fail();
        q.task->wake();
      }
      return;
    case MsgType::kAck:
      if (ch->phase != ChannelPhase::kProbing) return;
      ch->phase = ChannelPhase::kStreaming;
      log(ch->id(), "ack");
      send(MsgType::kCredit, ch->id(), encode_credit(config_.protocol.credit_depth));
      return;
    case MsgType::kData: {
      if (ch->phase != ChannelPhase::kStreaming) {
        ++data_before_ack_;
        return;
      }
      auto d = decode_data(m.payload);
      if (!ch->accept(std::move(d))) {
        ++cross_deliveries_;
        log(ch->id(), "cross-delivery");
        return;
      }
      q.task->wake();
      return;
    }
    case MsgType::kDeltaState: {
      auto d = decode_delta(m.payload);
      if (d.direction != DeltaDirection::kCloudToEdge) {
        ++protocol_errors_;
        return;
      }
      ch->switch_index = d.index;
      return;
    }
    case MsgType::kTerminate: {
      auto reason = decode_terminate(m.payload);
      log(ch->id(), "terminate", std::string(terminate_name(reason)));
      if (ch->phase == ChannelPhase::kRequested || ch->phase == ChannelPhase::kConfirmed) {
        if (ch->phase == ChannelPhase::kConfirmed && q.mode == ExecMode::kLocal) {
          q.built.scans.at(ch->id().source_id)->cancel_pause();
        }
        ch->phase = ChannelPhase::kClosed;
        if (q.mode == ExecMode::kCloudOnly) ch->fail();
        q.task->wake();
        return;
      }
      if (ch->phase == ChannelPhase::kClosed) return;
      switch (reason) {
        case TerminateReason::kCloudCompleted:
          ch->complete();
          break;
        case TerminateReason::kRemigration:
          ++q.out.remigrations;
          ch->resume_at(ch->switch_index);
          break;
        case TerminateReason::kAbort:
          ++q.out.broken_channels;
          ch->fail();
          break;
      }
      ch->phase = ChannelPhase::kClosed;
      q.task->wake();
      return;
    }
    default:
      ++protocol_errors_;
      return;
  }
}

void EdgeNode::finish(Query& q) {
  q.out.finished = true;
  q.out.end = loop_.now();
  q.out.checksum = q.hash.hex();
  q.out.counters = q.task->totals();
  for (auto& [src, ch] : q.channels) {
    if (ch->phase == ChannelPhase::kRequested || ch->phase == ChannelPhase::kConfirmed) {
      send(MsgType::kTerminate, ch->id(), encode(TerminateReason::kAbort));
      ch->phase = ChannelPhase::kClosed;
    }
  }
  if (on_done_) on_done_(q.out);
}

void EdgeNode::link_closed() {
  for (auto& [qid, q] : queries_) {
    if (q->out.finished) continue;
    for (auto& [src, ch] : q->channels) {
      switch (ch->phase) {
        case ChannelPhase::kRequested:
        case ChannelPhase::kConfirmed:
          if (q->mode == ExecMode::kLocal) {
            if (ch->phase == ChannelPhase::kConfirmed) q->built.scans.at(src)->cancel_pause();
          } else {
            ch->fail();
          }
          ch->phase = ChannelPhase::kClosed;
          break;
        case ChannelPhase::kProbing:
        case ChannelPhase::kStreaming:
          ++q->out.broken_channels;
          log(ch->id(), "broken");
          ch->fail();
          ch->phase = ChannelPhase::kClosed;
          break;
        case ChannelPhase::kClosed:
          break;
      }
    }
    maybe_start(*q);
    q->task->wake();
  }
}

bool EdgeNode::all_done() const {
  return std::all_of(queries_.begin(), queries_.end(), [](const auto& kv) { return kv.second->out.finished; });
}

std::size_t EdgeNode::running() const {
  return std::count_if(queries_.begin(), queries_.end(), [](const auto& kv) { return !kv.second->out.finished; });
}

std::size_t EdgeNode::migrated_scans() const {
  std::size_t n = 0;
  for (const auto& [qid, q] : queries_) {
    if (q->out.finished) continue;
    for (const auto& [src, ch] : q->channels)
      if (ch->phase == ChannelPhase::kProbing || ch->phase == ChannelPhase::kStreaming) ++n;
  }
  return n;
}

std::vector<QueryOutcome> EdgeNode::outcomes() const {
  std::vector<QueryOutcome> out;
  for (const auto& [qid, q] : queries_) out.push_back(q->out);
  return out;
}

const QueryOutcome& EdgeNode::outcome(std::uint64_t id) const { return queries_.at(id)->out; }

}  // namespace ced::migrate
