#include "sleppulse/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sleppulse/pulse.hpp"
#include "sleppulse/tridiag.hpp"

namespace sleppulse {

SimGrid make_grid(const SimConfig& cfg) {
  if (!(cfg.L > 0.0 && cfg.dx > 0.0 && cfg.dt > 0.0)) {
    throw Error(Errc::domain_error, "simulation: L, dx and dt must be positive");
  }
  const long n = std::lround(2.0 * cfg.L / cfg.dx);
  if (n < 8) throw Error(Errc::domain_error, "simulation: fewer than 8 cells");
  SimGrid g;
  g.L = cfg.L;
  g.dx = 2.0 * cfg.L / static_cast<double>(n);
  g.x = Eigen::VectorXd::LinSpaced(n, -cfg.L + 0.5 * g.dx, cfg.L - 0.5 * g.dx);
  return g;
}

namespace {

TridiagonalFactor implicit_factor(Eigen::Index n, double dx, double diff, double shift) {
  const double k = diff / (dx * dx);
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n, -k);
  Eigen::VectorXd sup = Eigen::VectorXd::Constant(n, -k);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 2.0 * k + shift);
  diag(0) -= k;
  diag(n - 1) -= k;
  return TridiagonalFactor(sub, diag, sup);
}

}  // namespace

Stepper::Stepper(const SimConfig& cfg) : cfg_(cfg), grid_(make_grid(cfg)) {
  if (!cfg.skip_validation) cfg_.params = validate(cfg.params);
  const double e2 = cfg_.params.epsilon * cfg_.params.epsilon;
  if (cfg.rates.regime() == Regime::slow) {
    ku_ = e2;
  } else {
    ku_ = 1.0;
  }
  kv_ = cfg.rates.first();
  kw_ = cfg.rates.second();
  if (!(kv_ > 0.0 && kw_ > 0.0)) throw Error(Errc::domain_error, "simulation: relaxation rates must be positive");
}

void Stepper::step(SimState& s) const {
  const auto& p = cfg_.params;
  const double dt = cfg_.dt;
  const double dx = grid_.dx;
  const Eigen::Index n = s.u.size();
  const double e = p.epsilon;
  const double decay = cfg_.reaction ? 1.0 : 0.0;

  // u: (ku/dt - eps^2 Lap - f'(u_old)) u_new = ku u_old/dt + f - f' u_old - eps(alpha v + beta w + gamma)
  {
    const double k = e * e / (dx * dx);
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(n, -k);
    Eigen::VectorXd sup = Eigen::VectorXd::Constant(n, -k);
    Eigen::VectorXd diag(n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = s.u(i);
      double d = ku_ / dt + 2.0 * k;
      if (i == 0) d -= k;
      if (i == n - 1) d -= k;
      rhs(i) = ku_ * u / dt;
      if (cfg_.reaction) {
        const double fp = reaction_prime(u);
        d -= fp;
        rhs(i) += reaction(u) - fp * u - e * (p.alpha * s.v(i) + p.beta * s.w(i) + p.gamma);
      }
      diag(i) = d;
    }
    solve_tridiagonal<double>(sub, diag, sup, rhs);
    s.u = std::move(rhs);
  }
  // v and w with the constant-coefficient factorisations
  {
    const auto fv = implicit_factor(n, dx, 1.0, kv_ / dt + decay);
    Eigen::VectorXd rhs = kv_ / dt * s.v;
    if (cfg_.reaction) rhs += s.u;
    fv.solve(rhs);
    s.v = std::move(rhs);
  }
  {
    const auto fw = implicit_factor(n, dx, p.D * p.D, kw_ / dt + decay);
    Eigen::VectorXd rhs = kw_ / dt * s.w;
    if (cfg_.reaction) rhs += s.u;
    fw.solve(rhs);
    s.w = std::move(rhs);
  }
  s.t += dt;
  const double umax = s.u.cwiseAbs().maxCoeff();
  if (!(umax <= 10.0)) {
    std::ostringstream os;
    os << "simulation blew up at t = " << s.t << " (max|u| = " << umax << ")";
    throw Error(Errc::blow_up, os.str());
  }
}

SimState step(const SimState& s, const SimConfig& cfg) {
  SimState out = s;
  Stepper(cfg).step(out);
  return out;
}

namespace {

SimState read_initial_file(const std::string& path, const SimGrid& g) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot open initial condition file " + path);
  std::vector<double> xs, us, vs, ws;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line) if (c == ',') c = ' ';
    std::istringstream ls(line);
    double x, u, v, w;
    if (!(ls >> x >> u >> v >> w)) continue;  // header rows
    xs.push_back(x);
    us.push_back(u);
    vs.push_back(v);
    ws.push_back(w);
  }
  if (xs.size() != static_cast<std::size_t>(g.x.size())) {
    std::ostringstream os;
    os << "initial condition file has " << xs.size() << " rows, grid has " << g.x.size();
    throw Error(Errc::domain_mismatch, os.str());
  }
  SimState s;
  s.u = Eigen::Map<Eigen::VectorXd>(us.data(), us.size());
  s.v = Eigen::Map<Eigen::VectorXd>(vs.data(), vs.size());
  s.w = Eigen::Map<Eigen::VectorXd>(ws.data(), ws.size());
  return s;
}

}  // namespace

SimState initial_state(const SimConfig& cfg) {
  const auto g = make_grid(cfg);
  if (cfg.initial == InitialKind::file) return read_initial_file(cfg.initial_file, g);
  const auto pulse = build_pulse(validate(cfg.params));
  if (!(cfg.L > 2.0 * pulse.layer().x_star)) throw Error(Errc::domain_error, "simulation: L must exceed 2 x*");
  SimState s;
  s.u = pulse.u(g.x);
  s.v = pulse.v(g.x);
  s.w = pulse.w(g.x);
  if (cfg.initial == InitialKind::perturbed_pulse && cfg.kick != 0.0) {
    const Eigen::Index n = g.x.size();
    Eigen::VectorXd shape(n);
    if (cfg.mode == PerturbMode::antisymmetric) {
      // velocity-like: derivative of the v profile
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < n; ++i) shape(i) = (pulse.v(g.x(i) + h) - pulse.v(g.x(i) - h)) / (2.0 * h);
    } else {
      shape = s.v.array() - s.v.minCoeff();
    }
    const double m = shape.cwiseAbs().maxCoeff();
    if (m > 0.0) s.v += cfg.kick / m * shape;
  }
  if (cfg.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    for (Eigen::Index i = 0; i < s.u.size(); ++i) s.u(i) += cfg.noise * nd(rng);
  }
  return s;
}

std::vector<double> extract_zero_contour(const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i + 1 < u.size(); ++i) {
    const double a = u(i), b = u(i + 1);
    if (a == 0.0) {
      out.push_back(x(i));
    } else if ((a < 0.0) != (b < 0.0) && b != 0.0) {
      out.push_back(x(i) + (x(i + 1) - x(i)) * a / (a - b));
    }
  }
  if (u.size() > 0 && u(u.size() - 1) == 0.0) out.push_back(x(u.size() - 1));
  if (out.empty()) throw Error(Errc::no_crossing, "u has no sign change");
  return out;
}

const char* to_string(Dynamics d) {
  switch (d) {
    case Dynamics::standing: return "standing";
    case Dynamics::traveling: return "traveling";
    case Dynamics::standing_breather: return "standing-breather";
    case Dynamics::traveling_breather: return "traveling-breather";
    case Dynamics::collapsed: return "collapsed";
    case Dynamics::indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

struct Fit {
  double slope, intercept;
};

Fit linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double mt = st / n, my = sy / n;
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  const double slope = stt > 0 ? sty / stt : 0.0;
  return {slope, my - slope * mt};
}

std::vector<double> detrend(const std::vector<double>& t, const std::vector<double>& y) {
  const auto f = linear_fit(t, y);
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - (f.slope * t[i] + f.intercept);
  return r;
}

double ptp(const std::vector<double>& y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo;
}

}  // namespace

DynamicsReport classify_dynamics(const std::vector<double>& t, const std::vector<double>& center,
                                 const std::vector<double>& width, double v_min, double a_min) {
  if (t.size() < 100 || center.size() != t.size() || width.size() != t.size()) {
    throw Error(Errc::domain_error, "classify_dynamics: need at least 100 aligned frames");
  }
  DynamicsReport r;
  r.v_min = v_min;
  r.a_min = a_min;
  r.drift_velocity = linear_fit(t, center).slope;
  r.center_ptp = ptp(detrend(t, center));
  const auto h = detrend(t, width);
  r.width_ptp = ptp(h);

  // maxima of excursions above +band, separated by dips below -band. A peak on the window
  // edge is not counted.
  const double band = 0.25 * r.width_ptp;
  std::vector<double> peaks;
  bool high = false;
  std::size_t best = 0;
  auto close = [&](bool tail_ok) {
    if (best > 0 && best + 1 < h.size() && tail_ok) peaks.push_back(t[best]);
  };
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] > band) {
      if (!high) best = i;
      high = true;
      if (h[i] > h[best]) best = i;
    } else if (h[i] < -band && high) {
      close(true);
      high = false;
    }
  }
  if (high) close(h.back() < h[best] - band);
  r.periods = static_cast<int>(peaks.size());
  if (peaks.size() >= 2) r.period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);

  const bool drift = std::abs(r.drift_velocity) > v_min;
  const bool oscillating = r.width_ptp > a_min;
  if (oscillating && r.periods < 3) {
    r.label = Dynamics::indeterminate;
  } else if (oscillating) {
    r.label = drift ? Dynamics::traveling_breather : Dynamics::standing_breather;
  } else {
    r.label = drift ? Dynamics::traveling : Dynamics::standing;
  }
  return r;
}

namespace {

class SnapshotWriter {
 public:
  SnapshotWriter(const SnapshotSink& sink, const SimGrid& g) : every_(sink.every) {
    bin_.open(sink.path, std::ios::binary);
    side_.open(sink.path + ".txt");
    if (!bin_ || !side_) throw Error(Errc::config, "cannot open snapshot file " + sink.path);
    const std::int64_t n = g.x.size(), comps = 3;
    bin_.write(reinterpret_cast<const char*>(&n), sizeof n);
    bin_.write(reinterpret_cast<const char*>(&g.dx), sizeof g.dx);
    bin_.write(reinterpret_cast<const char*>(&g.L), sizeof g.L);
    bin_.write(reinterpret_cast<const char*>(&comps), sizeof comps);
    side_ << "# n_grid " << n << "\n# dx " << g.dx << "\n# L " << g.L << "\n# components u v w\n# frame t\n";
    side_.precision(17);
  }

  void frame(std::size_t index, const SimState& s) {
    if (every_ <= 0 || index % static_cast<std::size_t>(every_) != 0) return;
    for (const auto* f : {&s.u, &s.v, &s.w}) {
      bin_.write(reinterpret_cast<const char*>(f->data()), static_cast<std::streamsize>(f->size() * sizeof(double)));
    }
    side_ << frames_++ << ' ' << s.t << '\n';
  }

 private:
  int every_;
  std::size_t frames_ = 0;
  std::ofstream bin_, side_;
};

}  // namespace

SimTrajectory run(const SimConfig& cfg, SimState s, const SnapshotSink* sink) {
  const Stepper stepper(cfg);
  const auto& g = stepper.grid();
  if (s.u.size() != g.x.size() || s.v.size() != g.x.size() || s.w.size() != g.x.size()) {
    throw Error(Errc::domain_mismatch, "simulation: initial state does not match the grid");
  }
  std::optional<SnapshotWriter> writer;
  if (sink && sink->every > 0) writer.emplace(*sink, g);

  SimTrajectory tr;
  const int every = std::max(1, cfg.record_every);
  const long steps = std::lround(cfg.t_end / cfg.dt);
  auto record = [&]() -> bool {
    std::vector<double> z;
    try {
      z = extract_zero_contour(g.x, s.u);
    } catch (const Error& e) {
      if (e.code() != Errc::no_crossing) throw;
      tr.collapse_time = s.t;
      return false;
    }
    const double xm = z.front(), xp = z.back();
    if (writer) writer->frame(tr.times.size(), s);
    tr.times.push_back(s.t);
    tr.x_minus.push_back(xm);
    tr.x_plus.push_back(xp);
    tr.center.push_back(0.5 * (xm + xp));
    tr.width.push_back(xp - xm);
    if (xm < -g.L + cfg.wall_margin || xp > g.L - cfg.wall_margin) {
      tr.hit_wall = true;
      return false;
    }
    return true;
  };

  bool alive = record();
  for (long k = 1; k <= steps && alive; ++k) {
    stepper.step(s);
    if (k % every == 0) alive = record();
  }

  if (tr.collapse_time) {
    tr.report.label = Dynamics::collapsed;
    return tr;
  }
  tr.window_begin = tr.times.size() / 2;
  const std::vector<double> t(tr.times.begin() + tr.window_begin, tr.times.end());
  const std::vector<double> c(tr.center.begin() + tr.window_begin, tr.center.end());
  const std::vector<double> h(tr.width.begin() + tr.window_begin, tr.width.end());
  const double span = t.empty() ? 0.0 : t.back() - t.front();
  const double v_min = cfg.v_min > 0.0 ? cfg.v_min : (span > 0.0 ? 10.0 * g.dx / span : INFINITY);
  const double a_min = cfg.a_min > 0.0 ? cfg.a_min : 20.0 * g.dx;
  if (t.size() < 100) {
    tr.report.label = Dynamics::indeterminate;
    tr.report.v_min = v_min;
    tr.report.a_min = a_min;
    return tr;
  }
  tr.report = classify_dynamics(t, c, h, v_min, a_min);
  return tr;
}

SimTrajectory run(const SimConfig& cfg, const SnapshotSink* sink) {
  return run(cfg, initial_state(cfg), sink);
}

}  // namespace sleppulse
