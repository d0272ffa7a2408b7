#include "ced/coherence/cloud_cache.hpp"

#include "ced/common/error.hpp"

namespace ced::coherence {

void CacheConfig::validate() const {
  if (capacity == 0) throw CedError(ErrorCode::kInvalidConfig, "cache capacity must be > 0");
  if (!(sync_threshold > 0 && sync_threshold <= 1)) {
    throw CedError(ErrorCode::kInvalidConfig, "sync_threshold must be in (0, 1]");
  }
}

CloudCache::CloudCache(std::filesystem::path dir, tsstore::StoreOptions options, CacheConfig config)
    : store_(std::move(dir), options), config_(config) {
  config_.validate();
}

AccessOutcome CloudCache::record_access(const tsstore::SeriesPath& series, double bandwidth_utilization) {
  auto& e = entries_[series];
  e.series = series;
  ++e.freq;
  e.last_access = ++clock_;
  if (e.resident) return AccessOutcome::kResident;
  if (e.freq <= config_.tau_hot) return AccessOutcome::kCounted;
  if (e.sync_pending) return AccessOutcome::kSyncScheduled;
  if (bandwidth_utilization < config_.sync_threshold) {
    e.sync_pending = true;
    e.sync_deferred = false;
    return AccessOutcome::kSyncScheduled;
  }
  e.sync_deferred = true;
  return AccessOutcome::kSyncDeferred;
}

std::vector<tsstore::SeriesPath> CloudCache::retry_deferred(double bandwidth_utilization) {
  std::vector<tsstore::SeriesPath> out;
  if (bandwidth_utilization >= config_.sync_threshold) return out;
  for (auto& [k, e] : entries_) {
    if (!e.sync_deferred || e.resident) continue;
    e.sync_deferred = false;
    e.sync_pending = true;
    out.push_back(k);
  }
  return out;
}

std::optional<tsstore::SeriesPath> CloudCache::admit(const tsstore::SeriesPath& series,
                                                     const tsstore::SeriesSnapshot& snapshot, std::uint64_t seq) {
  auto it = entries_.find(series);
  if (it == entries_.end() || it->second.freq <= config_.tau_hot) {
    throw CedError(ErrorCode::kProtocolViolation, series.str() + " is not hot");
  }
  auto& e = it->second;
  store_.import_series(series, snapshot);
  e.resident = true;
  e.sync_pending = false;
  e.sync_deferred = false;
  e.applied_seq = seq;
  e.last_access = ++clock_;
  // Batches buffered while the sync was in flight may now apply.
  auto buffered = std::move(e.buffered);
  e.buffered.clear();
  for (auto& [first, b] : buffered) replay(b);

  std::size_t resident = 0;
  for (const auto& [k, v] : entries_) resident += v.resident ? 1 : 0;
  if (resident <= config_.capacity) return std::nullopt;

  CacheEntry* victim = nullptr;
  for (auto& [k, v] : entries_) {
    if (!v.resident || k == series) continue;
    if (!victim || v.last_access < victim->last_access) victim = &v;
  }
  store_.drop_series(victim->series);
  victim->resident = false;
  victim->applied_seq = 0;
  victim->buffered.clear();
  ++evictions_;
  return victim->series;
}

bool CloudCache::lookup(const tsstore::SeriesPath& series, std::uint64_t published_seq) {
  auto it = entries_.find(series);
  bool hit = it != entries_.end() && it->second.resident && it->second.applied_seq == published_seq;
  if (hit) it->second.last_access = ++clock_;
  (hit ? hits_ : misses_)++;
  return hit;
}

void CloudCache::apply(CacheEntry& e, const ChangeBatch& batch) {
  for (const auto& r : batch.records) {
    if (r.seq <= e.applied_seq) continue;
    apply_change(store_, r);
    e.applied_seq = r.seq;
  }
}

ReplayStatus CloudCache::replay(const ChangeBatch& batch) {
  if (batch.empty()) return ReplayStatus::kNoop;
  const auto& series = batch.records.front().series;
  auto it = entries_.find(series);
  if (it == entries_.end()) return ReplayStatus::kNotResident;
  auto& e = it->second;
  if (!e.resident) {
    // A sync in flight will carry a snapshot; keep later changes until it lands.
    if (e.sync_pending) {
      e.buffered.emplace(batch.first_seq, batch);
      return ReplayStatus::kBuffered;
    }
    return ReplayStatus::kNotResident;
  }
  if (batch.last_seq <= e.applied_seq) return ReplayStatus::kDuplicate;
  if (batch.first_seq > e.applied_seq + 1) {
    e.buffered.emplace(batch.first_seq, batch);
    return ReplayStatus::kBuffered;
  }
  apply(e, batch);
  while (!e.buffered.empty()) {
    auto first = e.buffered.begin();
    if (first->first > e.applied_seq + 1) break;
    auto next = std::move(first->second);
    e.buffered.erase(first);
    if (next.last_seq > e.applied_seq) apply(e, next);
  }
  return ReplayStatus::kApplied;
}

const CacheEntry* CloudCache::entry(const tsstore::SeriesPath& series) const {
  auto it = entries_.find(series);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<tsstore::SeriesPath> CloudCache::residents() const {
  std::vector<tsstore::SeriesPath> out;
  for (const auto& [k, v] : entries_) {
    if (v.resident) out.push_back(k);
  }
  return out;
}

}  // namespace ced::coherence
