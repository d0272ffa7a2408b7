#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "ced/coherence/change_log.hpp"
#include "ced/tsstore/series_store.hpp"

namespace ced::coherence {

struct CacheConfig {
  std::uint64_t tau_hot = 3;      // admit once freq > tau_hot
  std::size_t capacity = 8;       // resident series
  double sync_threshold = 0.70;   // bandwidth utilization ceiling for syncs

  void validate() const;
};

struct CacheEntry {
  tsstore::SeriesPath series;
  std::uint64_t freq = 0;
  std::uint64_t last_access = 0;
  std::uint64_t applied_seq = 0;
  bool resident = false;
  bool sync_pending = false;
  bool sync_deferred = false;
  std::map<std::uint64_t, ChangeBatch> buffered;  // keyed by first_seq
};

enum class AccessOutcome : std::uint8_t { kCounted, kSyncScheduled, kSyncDeferred, kResident };
enum class ReplayStatus : std::uint8_t { kApplied, kBuffered, kDuplicate, kNotResident, kNoop };

/// Whole-series LRU cache on the cloud node, kept current by replaying the
/// edge's change batches on top of an initial snapshot.
class CloudCache {
 public:
  CloudCache(std::filesystem::path dir, tsstore::StoreOptions options, CacheConfig config);

  /// Counts an access. Crossing tau_hot schedules a sync when the link is
  /// below the sync threshold, otherwise marks it deferred.
  AccessOutcome record_access(const tsstore::SeriesPath& series, double bandwidth_utilization);

  /// Deferred syncs that may start now; they become pending.
  std::vector<tsstore::SeriesPath> retry_deferred(double bandwidth_utilization);

  /// Installs a snapshot taken at `seq`. Throws kProtocolViolation for a
  /// series that never became hot. Returns the evicted series, if any.
  std::optional<tsstore::SeriesPath> admit(const tsstore::SeriesPath& series, const tsstore::SeriesSnapshot& snapshot,
                                           std::uint64_t seq);

  /// Hit iff resident and replay has caught up with `published_seq`.
  bool lookup(const tsstore::SeriesPath& series, std::uint64_t published_seq);

  ReplayStatus replay(const ChangeBatch& batch);

  const CacheEntry* entry(const tsstore::SeriesPath& series) const;
  std::vector<tsstore::SeriesPath> residents() const;
  tsstore::SeriesStore& store() { return store_; }
  const tsstore::SeriesStore& store() const { return store_; }
  const CacheConfig& config() const { return config_; }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t evictions() const { return evictions_; }

 private:
  void apply(CacheEntry& e, const ChangeBatch& batch);

  tsstore::SeriesStore store_;
  CacheConfig config_;
  std::map<tsstore::SeriesPath, CacheEntry> entries_;
  std::uint64_t clock_ = 0;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t evictions_ = 0;
};

}  // namespace ced::coherence
