#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sleppulse/params.hpp"

namespace sleppulse {

enum class InitialKind { pulse, perturbed_pulse, file };
enum class PerturbMode { symmetric, antisymmetric };

struct SimConfig {
  ModelParams params;
  TimeScale rates = TimeScale::slow(3.0, 2.0);
  double L = 7.0;
  double dx = 7.0 / 1024.0;
  double dt = 0.012;
  double t_end = 2000 * 0.012;
  int record_every = 10;
  InitialKind initial = InitialKind::perturbed_pulse;
  std::string initial_file;  // whitespace separated columns x u v w
  double kick = 1e-3;
  PerturbMode mode = PerturbMode::antisymmetric;
  double noise = 0.0;  // amplitude of seeded white noise added to u
  std::uint64_t seed = 0;
  double wall_margin = 1.0;
  // thresholds; nonpositive means the default 10 dx / window and 20 dx
  double v_min = 0.0;
  double a_min = 0.0;

  // test hooks
  bool reaction = true;          // false drops every non-diffusive term
  bool skip_validation = false;  // allows the decoupled Allen-Cahn limit
};

struct SimGrid {
  double L;
  double dx;
  Eigen::VectorXd x;  // cell centres on [-L, L]
};

SimGrid make_grid(const SimConfig& cfg);

struct SimState {
  Eigen::VectorXd u, v, w;
  double t = 0.0;
};

// One linearly implicit step. The cubic is linearised about the old level, diffusion and
// decay are implicit, the inhibitor coupling in the u equation is lagged.
class Stepper {
 public:
  explicit Stepper(const SimConfig& cfg);
  void step(SimState& s) const;
  const SimGrid& grid() const { return grid_; }
  // time derivative weights of (u, v, w)
  double weight_u() const { return ku_; }
  double weight_v() const { return kv_; }
  double weight_w() const { return kw_; }

 private:
  SimConfig cfg_;
  SimGrid grid_;
  double ku_, kv_, kw_;
};

SimState step(const SimState& s, const SimConfig& cfg);

SimState initial_state(const SimConfig& cfg);

// All sign changes of u, linearly interpolated.
std::vector<double> extract_zero_contour(const Eigen::VectorXd& x, const Eigen::VectorXd& u);

enum class Dynamics { standing, traveling, standing_breather, traveling_breather, collapsed, indeterminate };
const char* to_string(Dynamics d);

struct DynamicsReport {
  Dynamics label = Dynamics::indeterminate;
  double drift_velocity = 0;  // slope of the fitted centre
  double width_ptp = 0;       // detrended peak-to-peak of the width
  double center_ptp = 0;      // detrended peak-to-peak of the centre
  int periods = 0;
  double period = 0;  // mean spacing of width maxima
  double v_min = 0;
  double a_min = 0;
};

// Classifies a window of (t, centre, width). Needs at least 100 frames.
DynamicsReport classify_dynamics(const std::vector<double>& t, const std::vector<double>& center,
                                 const std::vector<double>& width, double v_min, double a_min);

struct SimTrajectory {
  std::vector<double> times, x_minus, x_plus, center, width;
  DynamicsReport report;
  bool hit_wall = false;
  std::optional<double> collapse_time;
  std::size_t window_begin = 0;  // first frame of the classification window
};

// Full-field frames: header (int64 n, float64 dx, float64 L, int64 components), then
// row-major float64 frames u, v, w. A text sidecar lists frame times.
struct SnapshotSink {
  std::string path;
  int every = 0;  // in recorded frames, 0 disables
};

SimTrajectory run(const SimConfig& cfg, const SnapshotSink* sink = nullptr);
SimTrajectory run(const SimConfig& cfg, SimState initial, const SnapshotSink* sink = nullptr);

}  // namespace sleppulse
