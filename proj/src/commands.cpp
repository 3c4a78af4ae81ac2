#include "sleppulse/commands.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sleppulse/bifurcation.hpp"
#include "sleppulse/parallel.hpp"
#include "sleppulse/pulse.hpp"
#include "sleppulse/report.hpp"
#include "sleppulse/sim.hpp"
#include "sleppulse/spectrum.hpp"

namespace sleppulse {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> param_comments(const RunConfig& cfg) {
  const auto& p = cfg.params;
  std::vector<std::string> c;
  c.push_back("alpha = " + format_double(p.alpha));
  c.push_back("beta = " + format_double(p.beta));
  c.push_back("gamma = " + format_double(p.gamma));
  c.push_back("D = " + format_double(p.D));
  c.push_back("epsilon = " + format_double(p.epsilon));
  if (cfg.rates) {
    c.push_back(std::string("regime = ") + to_string(cfg.rates->regime()));
    const bool slow = cfg.rates->regime() == Regime::slow;
    c.push_back(std::string(slow ? "tau_hat = " : "tau = ") + format_double(cfg.rates->first()));
    c.push_back(std::string(slow ? "theta_hat = " : "theta = ") + format_double(cfg.rates->second()));
  }
  return c;
}

class Run {
 public:
  Run(const char* name, const RunConfig& cfg, const CommonOptions& opts, std::ostream& log)
      : name_(name), cfg_(cfg), dir_(opts.out), log_(log), start_(Clock::now()) {
    fs::create_directories(dir_);
    for (const auto& w : cfg.warnings) log_ << "warning: " << w << '\n';
  }

  fs::path file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  void finish() {
    RunManifest m;
    m.command = name_;
    m.config = cfg_.entries;
    m.version = tool_version();
    m.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    write_manifest(dir_, m, files_);
    log_ << name_ << ": wrote " << files_.size() << " files to " << dir_.string() << '\n';
  }

 private:
  std::string name_;
  const RunConfig& cfg_;
  fs::path dir_;
  std::ostream& log_;
  Clock::time_point start_;
  std::vector<std::string> files_;
};

}  // namespace

void cmd_pulse(const RunConfig& cfg, const CommonOptions& opts, const PulseOptions& po, std::ostream& log) {
  if (po.points < 2 || !(po.half_width > 0.0)) throw Error(Errc::config, "pulse: need points >= 2 and half width > 0");
  Run job("pulse", cfg, opts, log);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(po.points, -po.half_width, po.half_width);
  const auto sp = composite_profile(x, cfg.params);
  CsvTable t;
  t.comments = param_comments(cfg);
  t.comments.push_back("x_star = " + format_double(sp.pulse.layer().x_star));
  t.columns = {"x", "u", "v", "w"};
  for (Eigen::Index i = 0; i < x.size(); ++i) t.rows.push_back({x(i), sp.u(i), sp.v(i), sp.w(i)});
  write_csv(job.file("pulse.csv"), t);
  write_text(job.file("pulse.gp"),
             "set datafile separator ','\n"
             "set key autotitle columnhead\n"
             "set xlabel 'x'\n"
             "set terminal pngcairo size 900,500\n"
             "set output 'pulse.png'\n"
             "plot 'pulse.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
  log << "x_star = " << format_double(sp.pulse.layer().x_star) << '\n';
  job.finish();
}

void cmd_diagram(const RunConfig& cfg, const CommonOptions& opts, const DiagramOptions& d, std::ostream& log) {
  if (d.n_psi < 1) throw Error(Errc::config, "diagram: the Hopf grid is empty (n_psi < 1)");
  Run job("diagram", cfg, opts, log);
  const auto ctx = SlepContext::make(cfg.params);
  const auto line = drift_line(ctx);
  auto header = param_comments(cfg);
  header.push_back("x_star = " + format_double(ctx.x_star));

  {
    CsvTable t;
    t.comments = header;
    t.comments.push_back("C1 = " + format_double(line.C1));
    t.comments.push_back("C2 = " + format_double(line.C2));
    t.columns = {"tau_hat", "theta_hat"};
    const int n = 101;
    for (int i = 0; i < n; ++i) {
      const double th = (1.0 / line.C1) * i / (n - 1);
      t.rows.push_back({th, (1.0 - line.C1 * th) / line.C2});
    }
    write_csv(job.file("drift_line.csv"), t);
  }

  const auto grid = default_psi_grid(d.n_psi);
  const auto curve = hopf_curve(grid, ctx, opts.threads);
  {
    CsvTable t;
    t.comments = header;
    for (const auto& [psi, msg] : curve.failures) {
      t.comments.push_back("failed psi = " + format_double(psi) + ": " + msg);
      log << "hopf: psi = " << psi << " failed: " << msg << '\n';
    }
    t.columns = {"psi", "s_star", "tau_hat", "theta_hat", "xi_star", "residual", "transversality"};
    for (const auto& h : curve.points) {
      t.rows.push_back({h.psi, h.s_star, h.tau_hat, h.theta_hat, h.xi_star, h.residual, h.transversality});
    }
    write_csv(job.file("hopf_curve.csv"), t);
  }

  const auto pts = codim2_points(ctx, grid, opts.threads);
  {
    CsvTable t;
    t.comments = header;
    t.columns = {"psi", "tau_hat", "theta_hat", "xi_star", "line_residual", "slep_residual"};
    for (const auto& c : pts) t.rows.push_back({c.psi, c.tau_hat, c.theta_hat, c.xi_star, c.line_residual, c.slep_residual});
    write_csv(job.file("codim2.csv"), t);
  }
  log << "codim-2 points: " << pts.size() << '\n';

  if (d.region_grid > 0) {
    const int n = d.region_grid;
    std::vector<std::string> labels(n * n);
    parallel_for(labels.size(), opts.threads, [&](std::size_t k) {
      const double tau = d.tau_max * (static_cast<double>(k % n) + 0.5) / n;
      const double theta = d.theta_max * (static_cast<double>(k / n) + 0.5) / n;
      try {
        labels[k] = to_string(classify_region(tau, theta, ctx));
      } catch (const Error& e) {
        labels[k] = "error";
      }
    });
    CsvTable t;
    t.comments = header;
    t.columns = {"tau_hat", "theta_hat"};
    t.text_columns = {"region"};
    for (std::size_t k = 0; k < labels.size(); ++k) {
      t.rows.push_back({d.tau_max * (static_cast<double>(k % n) + 0.5) / n,
                        d.theta_max * (static_cast<double>(k / n) + 0.5) / n});
      t.text.push_back({labels[k]});
    }
    write_csv(job.file("regions.csv"), t);
  }
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
        "set xlabel 'tau_hat'\nset ylabel 'theta_hat'\n"
        "set terminal pngcairo size 800,700\nset output 'diagram.png'\n"
     << "set xrange [0:" << d.tau_max << "]\nset yrange [0:" << d.theta_max << "]\n"
     << "plot 'drift_line.csv' using 1:2 with lines title 'drift', "
        "'hopf_curve.csv' using 3:4 with lines dashtype 2 title 'hopf', "
        "'codim2.csv' using 2:3 with points pointtype 7 title 'codim-2'\n";
  write_text(job.file("diagram.gp"), gp.str());
  job.finish();
}

void cmd_trace(const RunConfig& cfg, const CommonOptions& opts, const TraceOptions& to, std::ostream& log) {
  Run job("trace", cfg, opts, log);
  const auto ctx = SlepContext::make(cfg.params);
  const auto lm = real_eig_landmarks(to.psi, ctx);
  const double s_min = to.s_min.value_or(0.5 * lm.s_under);
  const double s_max = to.s_max.value_or(1.5 * lm.s_over);
  const auto path = trace_eigen_path(to.psi, s_min, s_max, ctx, to.n_real);
  CsvTable t;
  t.comments = param_comments(cfg);
  t.comments.push_back("psi = " + format_double(to.psi));
  t.comments.push_back("s_under = " + format_double(path.s_under));
  t.comments.push_back("s_star = " + format_double(path.s_star));
  t.comments.push_back("s_over = " + format_double(path.s_over));
  t.comments.push_back("c_minus = " + format_double(path.c_minus));
  t.comments.push_back("c_plus = " + format_double(path.c_plus));
  t.columns = {"s", "re", "im", "partner_re", "partner_im"};
  t.text_columns = {"kind"};
  for (const auto& smp : path.samples) {
    t.rows.push_back({smp.s, smp.lambda.real(), smp.lambda.imag(), smp.partner.real(), smp.partner.imag()});
    t.text.push_back({to_string(smp.kind)});
  }
  write_csv(job.file("path.csv"), t);
  write_text(job.file("trace.gp"),
             "set datafile separator ','\n"
             "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\n"
             "set terminal pngcairo size 800,700\nset output 'trace.png'\n"
             "plot 'path.csv' using 2:3 with linespoints title 'lambda', "
             "'' using 4:5 with linespoints title 'conjugate'\n");
  log << "s_under = " << path.s_under << ", s_star = " << path.s_star << ", s_over = " << path.s_over << '\n';
  job.finish();
}

namespace {

SimConfig sim_config(const ModelParams& p, const TimeScale& rates, const SimulateOptions& so, std::uint64_t seed) {
  SimConfig c;
  c.params = p;
  c.rates = rates;
  c.dx = so.dx;
  c.dt = so.dt;
  c.t_end = so.t_end;
  c.record_every = so.record_every;
  c.kick = so.kick;
  c.mode = so.symmetric ? PerturbMode::symmetric : PerturbMode::antisymmetric;
  c.noise = so.noise;
  c.seed = seed;
  return c;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, const CommonOptions& opts, const SimulateOptions& so, std::ostream& log) {
  const auto rates = require_rates(cfg);
  Run job("simulate", cfg, opts, log);
  const auto sc = sim_config(cfg.params, rates, so, opts.seed);
  if (so.dx > cfg.params.epsilon / 4.0) {
    log << "warning: dx = " << so.dx << " exceeds eps/4 = " << cfg.params.epsilon / 4.0 << '\n';
  }
  std::optional<SnapshotSink> sink;
  if (so.snapshot_every > 0) sink = SnapshotSink{(opts.out / "snapshots.bin").string(), so.snapshot_every};
  const auto tr = run(sc, sink ? &*sink : nullptr);
  if (sink) {
    job.file("snapshots.bin");
    job.file("snapshots.bin.txt");
  }
  CsvTable t;
  t.comments = param_comments(cfg);
  t.comments.push_back("dx = " + format_double(sc.dx));
  t.comments.push_back("dt = " + format_double(sc.dt));
  t.comments.push_back(std::string("label = ") + to_string(tr.report.label));
  t.comments.push_back("drift_velocity = " + format_double(tr.report.drift_velocity));
  t.comments.push_back("width_ptp = " + format_double(tr.report.width_ptp));
  t.comments.push_back("periods = " + std::to_string(tr.report.periods));
  t.comments.push_back("v_min = " + format_double(tr.report.v_min));
  t.comments.push_back("a_min = " + format_double(tr.report.a_min));
  if (tr.hit_wall) t.comments.push_back("stopped near the boundary");
  t.columns = {"t", "x_minus", "x_plus", "center", "width"};
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    t.rows.push_back({tr.times[i], tr.x_minus[i], tr.x_plus[i], tr.center[i], tr.width[i]});
  }
  write_csv(job.file("trajectory.csv"), t);
  write_text(job.file("simulate.gp"),
             "set datafile separator ','\n"
             "set xlabel 'x'\nset ylabel 't'\n"
             "set terminal pngcairo size 600,800\nset output 'simulate.png'\n"
             "plot 'trajectory.csv' using 2:1 with lines title 'u = 0', '' using 3:1 with lines notitle\n");
  log << "label: " << to_string(tr.report.label) << " (drift " << tr.report.drift_velocity << ", width ptp "
      << tr.report.width_ptp << ", periods " << tr.report.periods << ")\n";
  job.finish();
}

void cmd_spectrum(const RunConfig& cfg, const CommonOptions& opts, const SpectrumOptions& so, std::ostream& log) {
  const auto rates = require_rates(cfg);
  if (so.n_xi < 1 || !(so.xi_max > 0.0)) throw Error(Errc::config, "spectrum: need n_xi >= 1 and xi_max > 0");
  Run job("spectrum", cfg, opts, log);
  const auto& p = cfg.params;
  const auto eb = essential_bound(p, rates, so.xi_max, so.n_xi, opts.threads);
  auto xi = dispersion_grid(so.xi_max, so.n_xi);
  if (!so.half) {
    std::vector<double> full;
    for (auto it = xi.rbegin(); it != xi.rend(); ++it) if (*it > 0.0) full.push_back(-*it);
    full.insert(full.end(), xi.begin(), xi.end());
    xi = std::move(full);
  }
  const auto samples = dispersion_samples(p, rates, xi, opts.threads);
  CsvTable t;
  t.comments = param_comments(cfg);
  t.comments.push_back("essential_bound = " + format_double(eb.bound));
  t.comments.push_back("argmax_xi = " + format_double(eb.argmax_xi));
  t.comments.push_back("scaled_bound = " + format_double(eb.scaled));
  t.columns = {"xi", "re1", "re2", "re3", "im1", "im2", "im3"};
  for (const auto& s : samples) {
    t.rows.push_back({s.xi, s.roots[0].real(), s.roots[1].real(), s.roots[2].real(), s.roots[0].imag(),
                      s.roots[1].imag(), s.roots[2].imag()});
  }
  write_csv(job.file("dispersion.csv"), t);
  log << "essential bound " << format_double(eb.bound) << " at xi = " << eb.argmax_xi << '\n';
  if (so.discrete_grid > 0) {
    const auto pulse = build_pulse(p);
    const auto eig = discrete_linearization_eigs(pulse, rates, so.discrete_grid, so.n_eigs);
    const auto ctx = SlepContext::make(p);
    CsvTable e;
    e.comments = param_comments(cfg);
    e.comments.push_back("n_grid = " + std::to_string(so.discrete_grid));
    e.comments.push_back("leading_even_scaled_prediction = " + format_double(o1_critical_eigenvalue(ctx).even));
    e.columns = {"re", "im", "re_scaled", "im_scaled"};
    e.text_columns = {"parity"};
    const double e2 = p.epsilon * p.epsilon;
    for (const auto& d : eig) {
      e.rows.push_back({d.lambda.real(), d.lambda.imag(), d.lambda.real() / e2, d.lambda.imag() / e2});
      e.text.push_back({d.parity == Parity::even ? "even" : "odd"});
    }
    write_csv(job.file("eigenvalues.csv"), e);
  }
  write_text(job.file("spectrum.gp"),
             "set datafile separator ','\n"
             "set xlabel 'xi'\nset ylabel 'Re lambda'\n"
             "set terminal pngcairo size 800,500\nset output 'spectrum.png'\n"
             "plot 'dispersion.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
  job.finish();
}

void cmd_sweep(const RunConfig& cfg, const CommonOptions& opts, const SweepOptions& so, std::ostream& log) {
  auto points = so.points;
  if (points.empty()) points = {{5.0, 4.0}, {3.0, 2.0}, {8.2, 3.7}, {13.0, 0.5}};
  Run job("sweep", cfg, opts, log);
  const auto ctx = SlepContext::make(cfg.params);
  struct Row {
    DynamicsReport rep;
    std::string region;
    std::string error;
  };
  std::vector<Row> rows(points.size());
  parallel_for(points.size(), opts.threads, [&](std::size_t i) {
    const auto rates = TimeScale::slow(points[i].first, points[i].second);
    try {
      rows[i].region = to_string(classify_region(points[i].first, points[i].second, ctx));
    } catch (const Error& e) {
      rows[i].region = "error";
    }
    try {
      rows[i].rep = run(sim_config(cfg.params, rates, so.sim, opts.seed), nullptr).report;
    } catch (const Error& e) {
      rows[i].error = e.what();
    }
  });
  CsvTable t;
  t.comments = param_comments(cfg);
  t.columns = {"tau_hat", "theta_hat", "drift_velocity", "width_ptp", "periods"};
  t.text_columns = {"label", "region"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = rows[i];
    t.rows.push_back({points[i].first, points[i].second, r.rep.drift_velocity, r.rep.width_ptp,
                      static_cast<double>(r.rep.periods)});
    t.text.push_back({r.error.empty() ? to_string(r.rep.label) : "failed", r.region});
    log << "(" << points[i].first << ", " << points[i].second << "): "
        << (r.error.empty() ? to_string(r.rep.label) : r.error.c_str()) << ", predicted " << r.region << '\n';
  }
  write_csv(job.file("sweep.csv"), t);
  job.finish();
}

}  // namespace sleppulse
