#pragma once

#include "floquet/indices.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace floquet {

inline constexpr const char* config_schema = "floquet-experiment/1";
inline constexpr const char* report_schema = "floquet-report/1";
inline constexpr const char* library_version = "1.0.0";

/// Thrown for malformed or invalid configurations; the message carries the
/// line/column or the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  std::string name = "five_step";  // five_step | chern_static | zero
  double J = 0;                    // five_step hopping; NaN selects full coupling
  double delta = 0;                // five_step on-site splitting
  double mass = -1;                // chern_static
};

struct ExperimentConfig {
  ModelSpec model;
  double period = 1;
  std::vector<int> sizes{8};
  bool auto_epsilon = true;
  std::vector<double> epsilon;  // absolute quasi-energies
  double min_width = 0;         // mandatory, > 0
  DisorderSpec disorder;
  SwitchPlacement placement;
  QuadratureConfig quadrature{16, false};
  Tolerances tol;
  bool edge = true;
  std::uint64_t seed = 1;
  std::string source;  // canonical JSON text, hashed into the report
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

LatticeGeometry bulk_geometry(const ExperimentConfig& c, int L);
DriveProtocol build_protocol(const ExperimentConfig& c, const LatticeGeometry& g);
RestrictionMap edge_map(const LatticeGeometry& bulk);

struct Check {
  std::string name;
  double value = 0;  // defect or residual
  bool passed = false;
  bool tolerance_bound = false;  // failed only because a tolerance is tighter than the attainable error
  std::string detail;
};

struct CellResult {
  std::string model;
  int L = 0;
  double epsilon = 0;
  GapDescriptor gap;
  std::vector<IndexReport> indices;
  std::vector<Check> checks;
  double runtime_s = 0;
};

struct RunReport {
  std::vector<CellResult> cells;
  std::vector<Check> checks;  // suite-level checks
  std::vector<std::string> warnings;
  std::string config_hash;
  bool all_passed() const;
};

// One (L, eps) evaluation: relative bulk/edge indices plus, when U(T) = I,
// the direct formulas.
CellResult run_cell(const ExperimentConfig& c, int L, double eps);
// Quasi-energies to evaluate at size L (gap midpoints when "auto").
std::vector<double> target_epsilons(const ExperimentConfig& c, int L);

RunReport run_experiment(const ExperimentConfig& c);
RunReport convergence_sweep(const ExperimentConfig& c, const std::vector<int>& sizes);
RunReport verify_suite(const ExperimentConfig& c, bool full);

nlohmann::json to_json(const RunReport& r, const ExperimentConfig& c);
std::string to_csv(const RunReport& r);
void write_report(const RunReport& r, const ExperimentConfig& c, const std::string& dir);

// Columns of the flat table, in order.
inline constexpr const char* table_header =
    "model,L,epsilon,kind,raw_re,raw_im,integer,residual,r_window,runtime_s";

}  // namespace floquet
