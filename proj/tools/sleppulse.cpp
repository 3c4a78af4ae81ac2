#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sleppulse/commands.hpp"

using namespace sleppulse;

namespace {

std::vector<std::pair<double, double>> parse_points(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw Error(Errc::config, "point '" + item + "' is not tau_hat,theta_hat");
    try {
      out.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(Errc::config, "point '" + item + "' is not numeric");
    }
  }
  return out;
}

void add_sim_options(CLI::App* cmd, SimulateOptions& so) {
  cmd->add_option("--dx", so.dx, "grid spacing")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", so.dt, "time step")->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", so.t_end, "final time")->check(CLI::PositiveNumber);
  cmd->add_option("--record-every", so.record_every, "steps between recorded frames")->check(CLI::PositiveNumber);
  cmd->add_option("--kick", so.kick, "perturbation amplitude on v");
  cmd->add_flag("--symmetric", so.symmetric, "even perturbation instead of the velocity-like kick");
  cmd->add_option("--noise", so.noise, "seeded white noise amplitude on u");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Standing pulses of a three-component reaction-diffusion system: construction, stability, dynamics"};
  app.require_subcommand(1);
  std::string config_path;
  CommonOptions common;
  app.add_option("--config", config_path, "key=value parameter file")->envname("SLEPPULSE_CONFIG");
  app.add_option("--out", common.out, "output directory")->envname("SLEPPULSE_OUT");
  app.add_option("--threads", common.threads, "worker threads")->envname("SLEPPULSE_THREADS")->check(CLI::PositiveNumber);
  app.add_option("--seed", common.seed, "seed for randomised perturbations")->envname("SLEPPULSE_SEED");

  PulseOptions po;
  auto* pulse = app.add_subcommand("pulse", "composite pulse profile");
  pulse->add_option("--half-width", po.half_width, "sample on [-h, h]");
  pulse->add_option("--points", po.points, "number of samples");

  DiagramOptions dopt;
  auto* diagram = app.add_subcommand("diagram", "drift line, Hopf curve and codimension-two points");
  diagram->add_option("--n-psi", dopt.n_psi, "angles on the Hopf grid");
  diagram->add_option("--region-grid", dopt.region_grid, "region samples per axis (0 disables)");
  diagram->add_option("--tau-max", dopt.tau_max);
  diagram->add_option("--theta-max", dopt.theta_max);

  TraceOptions to;
  double s_min = 0, s_max = 0;
  auto* trace = app.add_subcommand("trace", "critical eigenvalue path along a ray");
  trace->add_option("--psi", to.psi, "ray angle in (0, pi/2)");
  auto* o_smin = trace->add_option("--s-min", s_min);
  auto* o_smax = trace->add_option("--s-max", s_max);
  trace->add_option("--n-real", to.n_real, "samples on each real segment");

  SimulateOptions so;
  int snap = 0;
  auto* simulate = app.add_subcommand("simulate", "time integration and dynamics label");
  add_sim_options(simulate, so);
  simulate->add_option("--snapshot-every", snap, "write full fields every k recorded frames");

  SpectrumOptions sp;
  auto* spectrum = app.add_subcommand("spectrum", "essential spectrum bound and dispersion curves");
  spectrum->add_option("--xi-max", sp.xi_max);
  spectrum->add_option("--n-xi", sp.n_xi);
  spectrum->add_flag("--half", sp.half, "emit only xi >= 0");
  spectrum->add_option("--discrete", sp.discrete_grid, "half-line cells for the discretised eigenproblem");
  spectrum->add_option("--n-eigs", sp.n_eigs);

  SweepOptions sw;
  std::string points;
  auto* sweep = app.add_subcommand("sweep", "simulate a list of (tau_hat, theta_hat) points in parallel");
  sweep->add_option("--points", points, "tau_hat,theta_hat;tau_hat,theta_hat;...");
  add_sim_options(sweep, sw.sim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 2);
  }

  try {
    if (config_path.empty()) throw Error(Errc::config, "--config is required");
    const auto cfg = load_config(config_path);
    if (*pulse) cmd_pulse(cfg, common, po, std::cout);
    else if (*diagram) cmd_diagram(cfg, common, dopt, std::cout);
    else if (*trace) {
      if (*o_smin) to.s_min = s_min;
      if (*o_smax) to.s_max = s_max;
      cmd_trace(cfg, common, to, std::cout);
    } else if (*simulate) {
      so.snapshot_every = snap;
      cmd_simulate(cfg, common, so, std::cout);
    } else if (*spectrum) cmd_spectrum(cfg, common, sp, std::cout);
    else if (*sweep) {
      sw.points = parse_points(points);
      cmd_sweep(cfg, common, sw, std::cout);
    }
  } catch (const ParamError& e) {
    std::cerr << "error [" << to_string(e.code()) << "] " << e.name() << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
