#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace qplab {

/// One sweep axis over a real spec field. Valid names: lambda, omega, theta,
/// energy (operator tasks; energy for the lyapunov task only) and kappa, a, b
/// (kicked task).
struct SweepAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  int points = 1;
  bool log_scale = false;
};

struct SweepConfig {
  std::string task;            // lyapunov | spectrum | localize | evolve | kicked
  nlohmann::json base;         // operator spec, or rotor spec for `kicked`
  std::vector<SweepAxis> axes; // up to 3; row-major grid order, axes[0] outermost
  nlohmann::json options;      // per-task options
  int workers = 1;
  unsigned seed = 0;
  std::size_t budget = 100000; // refuse larger grids up front
  std::string out_path;
  std::string format = "csv";
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);
SweepConfig load_sweep_config(const std::string& path);
nlohmann::json to_json(const SweepConfig& config);

struct SweepRecord {
  std::vector<double> params;
  std::vector<double> values;  // NaN-filled on error
  std::string status;          // ok | flagged | error
  std::string message;
  double wall_ms = 0.0;
};

struct SweepTable {
  nlohmann::json config_echo;  // full resolved config (audit trail)
  std::vector<std::string> param_names;
  std::vector<std::string> value_names;
  std::vector<SweepRecord> records;  // row-major grid order
  bool has_errors = false;
};

/// Executes the grid with a work-stealing worker pool. Value fields are
/// bit-identical across reruns and worker counts; per-task failures become
/// single error records and never abort the sweep.
SweepTable run_sweep(const SweepConfig& config);

void emit_csv(const SweepTable& table, std::ostream& os);
void emit_json(const SweepTable& table, std::ostream& os);
/// format: "csv" or "json"; path "-" writes to stdout.
void emit(const SweepTable& table, const std::string& format, const std::string& path);

}  // namespace qplab
