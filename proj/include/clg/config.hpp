#pragma once

// JSON run configuration: geometry, initial-condition preset, series order,
// time stepping, weight class, optional estimator constants, and output
// locations.  Validation is strict: unknown keys and incompatible
// preset/geometry combinations are rejected with the offending key named.

#include "clg/grid.hpp"
#include "clg/weights.hpp"

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace clg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulationConfig {
  Geometry geometry = Geometry::Periodic3D;
  std::array<Index, 3> dims{32, 32, 32};
  std::array<Real, 3> lengths{2 * kPi, 2 * kPi, 2 * kPi};

  std::string preset = "abc";
  std::map<std::string, Real> preset_params;

  int taylor_order = 8;
  Real t_end = 0;
  Real cfl_fraction = 0.25;
  std::optional<Real> dt_max;

  WeightKind weights_kind = WeightKind::Analytic;
  Real gevrey_r = 0;

  std::optional<EstimateConstants> estimator;

  std::string output_dir = "out";
  long snapshot_every = 0; // 0 = no snapshots
  std::string diagnostics_file = "diagnostics.csv";

  Real residual_ceiling = 1e-5; // per-step bound on the measured residuals

  LabelGrid make_grid() const;
  WeightSequence make_weight_sequence(int kmax) const;
};

// Parses and validates a JSON config file; fills defaults (taylor_order 8,
// cfl_fraction 0.25, analytic weights).  Throws ConfigError with the
// offending key in the message.
SimulationConfig load_config(const std::string& path);

// Same, from an in-memory JSON string (testing convenience).
SimulationConfig parse_config(const std::string& json_text);

} // namespace clg
