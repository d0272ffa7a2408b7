#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "ced/harness/simulation.hpp"

namespace ced::harness {

// Stable column order; numbers use fixed precision so reruns compare byte for byte.
void write_metrics_csv(std::ostream& out, const std::vector<RunReport>& runs);
void write_summary_csv(std::ostream& out, const std::vector<RunReport>& runs);
void write_decisions_csv(std::ostream& out, const std::vector<RunReport>& runs);
void write_bytes_csv(std::ostream& out, const std::vector<RunReport>& runs);
void write_events_csv(std::ostream& out, const std::vector<RunReport>& runs);

/// Writes metrics.csv, summary.csv, decisions.csv, bytes.csv and events.csv
/// into `dir`. Throws CedError(kStorageIo) on filesystem errors.
void emit(const std::vector<RunReport>& runs, const std::filesystem::path& dir);

}  // namespace ced::harness
