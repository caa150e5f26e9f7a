#pragma once

// Command implementations behind the CLI: full simulation runs with streamed
// diagnostics, the weight-class checker, the radius report, and the
// trajectory oracle.  Each returns a process exit code:
//   0 success, 1 configuration error, 2 numeric failure, 3 I/O error.

#include "clg/config.hpp"
#include "clg/presets.hpp"

#include <string>

namespace clg {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

// Builds the configured preset on the grid; validates parameter names.
InitialData make_preset(const SimulationConfig& cfg, const LabelGrid& grid);

// Exact diagnostics CSV header for a series of order S.
std::string diagnostics_header(int S);

int run_simulation(const SimulationConfig& cfg);
int run_check_weights(const SimulationConfig& cfg);
int run_radius(const SimulationConfig& cfg);
int run_oracle(const SimulationConfig& cfg, Real t);

} // namespace clg
