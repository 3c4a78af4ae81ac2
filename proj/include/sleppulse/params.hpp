#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sleppulse/error.hpp"

namespace sleppulse {

// Coefficients of the three-component activator/inhibitor system.
struct ModelParams {
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  double D = 0;
  double epsilon = 0;

  bool operator==(const ModelParams&) const = default;
};

// Unvalidated input record. Missing entries are empty.
struct RawParams {
  std::optional<double> alpha, beta, gamma, D, epsilon;
};

// Above this the layer asymptotics are not trusted; validate() warns only.
inline constexpr double kEpsilonWarn = 0.1;

ModelParams validate(const RawParams& raw, std::vector<std::string>* warnings = nullptr);
ModelParams validate(const ModelParams& p, std::vector<std::string>* warnings = nullptr);

enum class Regime { order1, slow };

// Relaxation times of the two inhibitors. In the slow regime the stored values are
// the rescaled rates tau_hat, theta_hat with tau = tau_hat / eps^2.
class TimeScale {
 public:
  static TimeScale order1(double tau, double theta);
  static TimeScale slow(double tau_hat, double theta_hat);

  Regime regime() const { return regime_; }
  double first() const { return a_; }
  double second() const { return b_; }

  // Conversions are the only bridge between the two regimes.
  TimeScale to_order1(const ModelParams& p) const;
  TimeScale to_slow(const ModelParams& p) const;

  bool operator==(const TimeScale&) const = default;

 private:
  TimeScale(Regime r, double a, double b) : regime_(r), a_(a), b_(b) {}
  Regime regime_;
  double a_;
  double b_;
};

const char* to_string(Regime r);

// Spatially constant equilibrium u = v = w near -1.
struct BackgroundState {
  double u_bar;
  double v_bar;
  double w_bar;
};

// Residual of u - u^3 - eps((alpha+beta)u + gamma).
double background_residual(double u, const ModelParams& p);

BackgroundState background_state(const ModelParams& p);

inline double reaction(double u) { return u - u * u * u; }
inline double reaction_prime(double u) { return 1.0 - 3.0 * u * u; }

}  // namespace sleppulse
