#include "ced/harness/workload.hpp"

#include <yaml-cpp/yaml.h>

#include <sstream>

#include "ced/common/error.hpp"
#include "ced/common/rng.hpp"

namespace ced::harness {

using tsstore::DataType;

namespace {

DataType parse_type(const std::string& name) {
  if (name == "text" || name == "string") return DataType::kText;
  if (name == "boolean" || name == "bool") return DataType::kBoolean;
  if (name == "double" || name == "float") return DataType::kDouble;
  if (name == "int64" || name == "int") return DataType::kInt64;
  throw CedError(ErrorCode::kInvalidConfig, "unknown sensor type '" + name + "'");
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void WorkloadConfig::validate() const {
  if (sensor_count < 1) throw CedError(ErrorCode::kInvalidConfig, "sensor_count must be >= 1");
  if (sampling_interval_ms < 1) throw CedError(ErrorCode::kInvalidConfig, "sampling_interval_ms must be >= 1");
  if (total_rows < 0) throw CedError(ErrorCode::kInvalidConfig, "total_rows must be >= 0");
  if (devices < 1) throw CedError(ErrorCode::kInvalidConfig, "devices must be >= 1");
  if (chunk_rows == 0 || page_rows == 0) throw CedError(ErrorCode::kInvalidConfig, "chunk and page sizes must be > 0");
  if (planted_matches < 0) throw CedError(ErrorCode::kInvalidConfig, "planted_matches must be >= 0");
  for (const auto& t : type_mix) parse_type(t);
  if (planted_matches > 0) {
    bool found = false;
    for (int i = 0; i < sensor_count; ++i) {
      if ("t" + std::to_string(i + 1) == planted_sensor) {
        found = true;
        if (sensor_type(i) != DataType::kDouble) {
          throw CedError(ErrorCode::kInvalidConfig, "planted sensor " + planted_sensor + " is not a double sensor");
        }
      }
    }
    if (!found) throw CedError(ErrorCode::kInvalidConfig, "planted sensor " + planted_sensor + " does not exist");
  }
}

DataType WorkloadConfig::sensor_type(int index) const {
  if (!type_mix.empty()) return parse_type(type_mix[static_cast<std::size_t>(index) % type_mix.size()]);
  static constexpr DataType kCycle[] = {DataType::kText, DataType::kBoolean, DataType::kDouble, DataType::kInt64};
  return kCycle[index % 4];
}

std::string WorkloadConfig::key() const {
  std::ostringstream out;
  out << sensor_count << '|';
  for (const auto& t : type_mix) out << t << ',';
  out << '|' << sampling_interval_ms << '|' << total_rows << '|' << seed << '|' << devices << '|' << storage_group
      << '|' << planted_matches << '|' << planted_sensor << '|' << planted_value << '|' << chunk_rows << '|'
      << page_rows;
  return out.str();
}

WorkloadConfig parse_workload(const YAML::Node& n, WorkloadConfig c) {
  if (!n) return c;
  if (n["sensors"]) c.sensor_count = n["sensors"].as<int>();
  if (n["types"]) c.type_mix = n["types"].as<std::vector<std::string>>();
  if (n["interval_ms"]) c.sampling_interval_ms = n["interval_ms"].as<std::int64_t>();
  if (n["rows"]) c.total_rows = n["rows"].as<std::int64_t>();
  if (n["seed"]) c.seed = n["seed"].as<std::uint64_t>();
  if (n["devices"]) c.devices = n["devices"].as<int>();
  if (n["storage_group"]) c.storage_group = n["storage_group"].as<std::string>();
  if (n["planted_matches"]) c.planted_matches = n["planted_matches"].as<int>();
  if (n["planted_sensor"]) c.planted_sensor = n["planted_sensor"].as<std::string>();
  if (n["planted_value"]) c.planted_value = n["planted_value"].as<double>();
  if (n["chunk_rows"]) c.chunk_rows = n["chunk_rows"].as<std::size_t>();
  if (n["page_rows"]) c.page_rows = n["page_rows"].as<std::size_t>();
  c.validate();
  return c;
}

WorkloadConfig load_workload(const std::filesystem::path& file) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw CedError(ErrorCode::kInvalidConfig, file.string() + ": " + e.what());
  }
  return parse_workload(root["workload"] ? root["workload"] : root);
}

std::string device_path(const WorkloadConfig& cfg, int device) {
  return cfg.storage_group + ".device" + std::to_string(device);
}

std::string device_alias(int device) { return device == 1 ? "dev" : "dev" + std::to_string(device); }

Dataset::Dataset(const WorkloadConfig& config, std::filesystem::path dir) : config_(config) {
  config_.validate();
  std::filesystem::remove_all(dir);
  store_ = std::make_unique<tsstore::SeriesStore>(dir, tsstore::StoreOptions{config_.chunk_rows, config_.page_rows});
  std::map<std::string, tsstore::SeriesPath> aliases;
  std::uint64_t stream = 0;
  for (int d = 1; d <= config_.devices; ++d) {
    auto device = tsstore::SeriesPath::parse(device_path(config_, d));
    aliases[device_alias(d)] = device;
    for (int s = 0; s < config_.sensor_count; ++s) {
      auto sensor = "t" + std::to_string(s + 1);
      auto path = device.child(sensor);
      auto type = config_.sensor_type(s);
      Rng rng(mix(config_.seed ^ mix(++stream)));
      bool planted = sensor == config_.planted_sensor && config_.planted_matches > 0;
      std::int64_t next_plant = 0;
      std::int64_t plants_done = 0;
      auto plant_at = [&](std::int64_t k) {
        return (2 * k + 1) * config_.total_rows / (2 * static_cast<std::int64_t>(config_.planted_matches));
      };
      if (planted) next_plant = plant_at(0);
      for (std::int64_t i = 0; i < config_.total_rows; ++i) {
        tsstore::Value v;
        switch (type) {
          case DataType::kText: v = "v" + std::to_string(rng.below(1000)); break;
          case DataType::kBoolean: v = rng.chance(0.5); break;
          case DataType::kDouble: v = rng.uniform() * 1000.0; break;
          case DataType::kInt64: v = static_cast<std::int64_t>(rng.below(1000)); break;
          case DataType::kNull: break;
        }
        if (planted && plants_done < config_.planted_matches && i == next_plant) {
          v = config_.planted_value;
          if (++plants_done < config_.planted_matches) next_plant = plant_at(plants_done);
        }
        store_->append(path, {i * config_.sampling_interval_ms, std::move(v)});
      }
      if (config_.total_rows > 0) store_->flush(path);
      series_.push_back(path);
      points_ += static_cast<std::uint64_t>(config_.total_rows);
    }
  }
  catalog_ = queryplan::Catalog::from_store(*store_, aliases);
}

}  // namespace ced::harness
