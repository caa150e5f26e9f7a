#include "clg/runner.hpp"

#include "clg/oracle.hpp"
#include "clg/snapshot.hpp"
#include "clg/stepper.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace clg {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Real param_or(const std::map<std::string, Real>& params, const std::string& key, Real fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void check_param_names(const std::map<std::string, Real>& params, const std::string& preset,
                       const std::set<std::string>& allowed) {
  for (const auto& [key, value] : params) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("config: preset \"" + preset + "\" has no parameter '" + key + "'");
  }
}

std::string fmt_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_row(const SimState& state, const StepReport& rep) {
  std::string row = std::to_string(state.step_index);
  row += ',' + fmt_real(state.time);
  row += ',' + fmt_real(rep.dt_taken);
  row += ',' + fmt_real(rep.radius_estimate);
  row += ',' + fmt_real(rep.residuals.cauchy);
  row += ',' + fmt_real(rep.residuals.jacobian);
  row += ',' + fmt_real(rep.residuals.boundary);
  row += ',' + fmt_real(rep.energy);
  row += ',' + fmt_real(rep.residuals.energy_drift);
  for (Real n : rep.coefficient_norms) row += ',' + fmt_real(n);
  return row;
}

json radius_report_json(const RadiusReport& rr) {
  json j;
  j["gamma_c"] = rr.gamma_c;
  j["zeta2_at_gamma_c"] = rr.zeta2_at_gamma_c;
  j["t_c"] = rr.t_c;
  if (std::isinf(rr.t_Sad))
    j["t_Sad"] = "infinity";
  else
    j["t_Sad"] = rr.t_Sad;
  j["T"] = rr.T;
  return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

} // namespace

InitialData make_preset(const SimulationConfig& cfg, const LabelGrid& grid) {
  const auto& p = cfg.preset_params;
  if (cfg.preset == "abc") {
    check_param_names(p, cfg.preset, {"A", "B", "C"});
    return preset_abc(grid, param_or(p, "A", 1), param_or(p, "B", 1), param_or(p, "C", 1));
  }
  if (cfg.preset == "shear") {
    check_param_names(p, cfg.preset, {"U0"});
    return preset_shear(grid, param_or(p, "U0", 1));
  }
  if (cfg.preset == "channel-vortex") {
    check_param_names(p, cfg.preset, {"scale"});
    return preset_channel_vortex(grid, param_or(p, "scale", 1));
  }
  if (cfg.preset == "zero") {
    check_param_names(p, cfg.preset, {});
    return preset_zero(grid);
  }
  throw ConfigError("config: unknown preset \"" + cfg.preset + "\"");
}

std::string diagnostics_header(int S) {
  std::string h = "step,time,dt,radius_est,cauchy_res,jacobian_res,boundary_res,energy,"
                  "energy_drift";
  for (int s = 1; s <= S; ++s) h += ",coeff_norm_" + std::to_string(s);
  return h;
}

int run_simulation(const SimulationConfig& cfg) {
  try {
    const LabelGrid grid = cfg.make_grid();
    const InitialData data = make_preset(cfg, grid);
    const int kmax = std::max(20, cfg.taylor_order);

    ensure_output_dir(cfg.output_dir);
    const fs::path out_dir(cfg.output_dir);
    const fs::path csv_path = out_dir / cfg.diagnostics_file;
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
    csv << diagnostics_header(cfg.taylor_order) << '\n';
    csv.flush();

    bool ceiling_ok = true;
    std::string ceiling_msg;

    RunOptions opt;
    opt.S = cfg.taylor_order;
    opt.cfl_fraction = cfg.cfl_fraction;
    opt.weights = cfg.make_weight_sequence(kmax);
    if (cfg.dt_max) opt.dt_max = *cfg.dt_max;
    opt.on_step = [&](const SimState& state, const StepReport& rep) {
      csv << csv_row(state, rep) << '\n';
      csv.flush();
      if (!csv) throw IoError("write to '" + csv_path.string() + "' failed");
      if (cfg.snapshot_every > 0 && state.step_index % cfg.snapshot_every == 0) {
        char name[64];
        std::snprintf(name, sizeof(name), "velocity_%06ld.clgf",
                      static_cast<long>(state.step_index));
        write_snapshot((out_dir / name).string(), state.velocity);
      }
      const Real worst = std::max({rep.residuals.cauchy, rep.residuals.jacobian,
                                   rep.residuals.boundary});
      if (worst > cfg.residual_ceiling && ceiling_ok) {
        ceiling_ok = false;
        ceiling_msg = "residual " + fmt_real(worst) + " exceeds ceiling " +
                      fmt_real(cfg.residual_ceiling) + " at step " +
                      std::to_string(state.step_index);
      }
    };

    SimState state{0.0, grid, data.v0, data.omega0, 0};
    const RunResult result = run_until(std::move(state), cfg.t_end, opt);

    if (cfg.estimator) {
      const RadiusReport rr = radius_from_cubic(*cfg.estimator);
      write_text_file(out_dir / "radius_report.json", radius_report_json(rr).dump(2) + "\n");
    }

    if (!result.ok) {
      std::cerr << "run failed: " << result.error << '\n';
      return kExitNumeric;
    }
    if (!ceiling_ok) {
      std::cerr << "run completed but " << ceiling_msg << '\n';
      return kExitNumeric;
    }
    std::cout << "completed " << result.reports.size() << " steps to t = "
              << fmt_real(result.state.time) << ", diagnostics in " << csv_path.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitNumeric;
  }
}

int run_check_weights(const SimulationConfig& cfg) {
  try {
    const WeightSequence W = cfg.make_weight_sequence(20);
    const ClassReport rep = check_class_properties(W);
    const DenjoyCarlemanReport dc = denjoy_carleman(W);
    std::cout << "differentiation-stable: " << (rep.diff_stable ? "yes" : "no")
              << " (C_d = " << fmt_real(rep.C_d) << ")\n";
    std::cout << "log-superlinear: " << (rep.log_superlinear ? "yes" : "no") << '\n';
    std::cout << "faa-di-bruno-stable: " << (rep.fdb_stable ? "yes" : "no")
              << " (C_FdB = " << fmt_real(rep.C_FdB) << ")\n";
    std::cout << "denjoy-carleman: " << to_string(dc.verdict)
              << " (partial sum = " << fmt_real(dc.partial_sum) << ")\n";
    return (rep.diff_stable && rep.log_superlinear && rep.fdb_stable) ? kExitOk : kExitNumeric;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitNumeric;
  }
}

int run_radius(const SimulationConfig& cfg) {
  try {
    const LabelGrid grid = cfg.make_grid();
    const InitialData data = make_preset(cfg, grid);
    const TaylorSeries series =
        compute_coefficients(data.v0, data.omega0, cfg.taylor_order);
    const WeightSequence W = cfg.make_weight_sequence(std::max(20, cfg.taylor_order));
    const Real rho = estimate_radius(series, W);

    json out;
    if (std::isinf(rho))
      out["practical_radius"] = "infinity";
    else
      out["practical_radius"] = rho;
    if (cfg.estimator) out["cubic"] = radius_report_json(radius_from_cubic(*cfg.estimator));
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitNumeric;
  }
}

int run_oracle(const SimulationConfig& cfg, Real t) {
  try {
    const LabelGrid grid = cfg.make_grid();
    std::vector<Vec3> labels(static_cast<size_t>(grid.size()));
    for (Index i = 0; i < grid.size(); ++i) labels[static_cast<size_t>(i)] = grid.pos(i);
    const std::vector<Vec3> positions =
        oracle_trajectories(cfg.preset, cfg.preset_params, grid, labels, t);

    VectorField pos(grid);
    Real sup_disp = 0;
    for (Index i = 0; i < grid.size(); ++i) {
      const Vec3& x = positions[static_cast<size_t>(i)];
      pos.x[i] = x.x();
      pos.y[i] = x.y();
      pos.z[i] = x.z();
      sup_disp = std::max(sup_disp, (x - labels[static_cast<size_t>(i)]).cwiseAbs().maxCoeff());
    }

    ensure_output_dir(cfg.output_dir);
    const fs::path out_path = fs::path(cfg.output_dir) / "oracle_positions.clgf";
    write_snapshot(out_path.string(), pos);
    std::cout << "wrote " << out_path.string() << " (sup displacement " << fmt_real(sup_disp)
              << " at t = " << fmt_real(t) << ")\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    // non-steady or unknown preset: a configuration-level refusal
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitNumeric;
  }
}

} // namespace clg
