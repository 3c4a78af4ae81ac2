#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sleppulse/config.hpp"

namespace sleppulse {

struct CommonOptions {
  std::filesystem::path out = "out";
  int threads = 1;
  std::uint64_t seed = 0;
};

struct PulseOptions {
  double half_width = 2.0;
  int points = 4001;
};

struct DiagramOptions {
  int n_psi = 181;
  int region_grid = 24;  // per axis, 0 disables the shaded sample grid
  double tau_max = 16.0;
  double theta_max = 8.0;
};

struct TraceOptions {
  double psi = 0.7853981633974483;
  std::optional<double> s_min, s_max;  // default half of s_under and 1.5 s_over
  int n_real = 60;
};

struct SimulateOptions {
  double dx = 7.0 / 1024.0;
  double dt = 0.012;
  double t_end = 2000 * 0.012;
  int record_every = 10;
  double kick = 1e-3;
  bool symmetric = false;
  double noise = 0.0;
  int snapshot_every = 0;
};

struct SpectrumOptions {
  double xi_max = 1e3;
  int n_xi = 400;
  bool half = false;  // emit only xi >= 0
  int discrete_grid = 0;  // 0 skips the discrete eigenvalues
  int n_eigs = 6;
};

struct SweepOptions {
  // (tau_hat, theta_hat) pairs; empty means the four reference points
  std::vector<std::pair<double, double>> points;
  SimulateOptions sim;
};

// Each command writes its files and manifest.json into opts.out and a summary to log.
void cmd_pulse(const RunConfig& cfg, const CommonOptions& opts, const PulseOptions& po, std::ostream& log);
void cmd_diagram(const RunConfig& cfg, const CommonOptions& opts, const DiagramOptions& dopt, std::ostream& log);
void cmd_trace(const RunConfig& cfg, const CommonOptions& opts, const TraceOptions& to, std::ostream& log);
void cmd_simulate(const RunConfig& cfg, const CommonOptions& opts, const SimulateOptions& so, std::ostream& log);
void cmd_spectrum(const RunConfig& cfg, const CommonOptions& opts, const SpectrumOptions& so, std::ostream& log);
void cmd_sweep(const RunConfig& cfg, const CommonOptions& opts, const SweepOptions& so, std::ostream& log);

}  // namespace sleppulse
