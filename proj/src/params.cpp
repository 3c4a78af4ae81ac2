#include "sleppulse/params.hpp"

#include <cmath>
#include <sstream>

namespace sleppulse {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::non_positive_parameter: return "NonPositiveParameter";
    case Errc::existence_violation: return "ExistenceViolation";
    case Errc::config: return "ConfigError";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::domain_mismatch: return "DomainMismatch";
    case Errc::domain_error: return "DomainError";
    case Errc::grid_too_coarse: return "GridTooCoarse";
    case Errc::branch_violation: return "BranchViolation";
    case Errc::bracket_failure: return "BracketFailure";
    case Errc::degenerate_bracket: return "DegenerateBracket";
    case Errc::continuation_stall: return "ContinuationStall";
    case Errc::positive_bound: return "PositiveBound";
    case Errc::resolution_error: return "ResolutionError";
    case Errc::blow_up: return "BlowUp";
    case Errc::no_crossing: return "NoCrossing";
  }
  return "Unknown";
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::non_positive_parameter:
    case Errc::existence_violation:
    case Errc::config:
    case Errc::domain_mismatch:
    case Errc::domain_error:
    case Errc::grid_too_coarse:
    case Errc::resolution_error:
      return 2;
    case Errc::bracket_failure:
    case Errc::degenerate_bracket:
    case Errc::positive_bound:
      return 4;
    default:
      return 3;
  }
}

namespace {

double require(const std::optional<double>& v, const char* name) {
  if (!v) throw ParamError(Errc::config, name, std::string("missing parameter '") + name + "'");
  return *v;
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "parameter '" << name << "' must be positive and finite, got " << v;
    throw ParamError(Errc::non_positive_parameter, name, os.str());
  }
}

}  // namespace

ModelParams validate(const RawParams& raw, std::vector<std::string>* warnings) {
  ModelParams p;
  p.alpha = require(raw.alpha, "alpha");
  p.beta = require(raw.beta, "beta");
  p.gamma = require(raw.gamma, "gamma");
  p.D = require(raw.D, "D");
  p.epsilon = require(raw.epsilon, "epsilon");
  return validate(p, warnings);
}

ModelParams validate(const ModelParams& p, std::vector<std::string>* warnings) {
  check_positive(p.alpha, "alpha");
  check_positive(p.beta, "beta");
  check_positive(p.gamma, "gamma");
  check_positive(p.D, "D");
  check_positive(p.epsilon, "epsilon");
  if (p.gamma >= p.alpha + p.beta) {
    std::ostringstream os;
    os << "no layer position exists: gamma = " << p.gamma << " >= alpha + beta = " << p.alpha + p.beta;
    throw ParamError(Errc::existence_violation, "gamma", os.str());
  }
  if (warnings && p.epsilon > kEpsilonWarn) {
    std::ostringstream os;
    os << "epsilon = " << p.epsilon << " exceeds " << kEpsilonWarn
       << "; asymptotic profiles may be inaccurate";
    warnings->push_back(os.str());
  }
  return p;
}

TimeScale TimeScale::order1(double tau, double theta) {
  check_positive(tau, "tau");
  check_positive(theta, "theta");
  return TimeScale(Regime::order1, tau, theta);
}

TimeScale TimeScale::slow(double tau_hat, double theta_hat) {
  check_positive(tau_hat, "tau_hat");
  check_positive(theta_hat, "theta_hat");
  return TimeScale(Regime::slow, tau_hat, theta_hat);
}

TimeScale TimeScale::to_order1(const ModelParams& p) const {
  if (regime_ == Regime::order1) return *this;
  const double e2 = p.epsilon * p.epsilon;
  return order1(a_ / e2, b_ / e2);
}

TimeScale TimeScale::to_slow(const ModelParams& p) const {
  if (regime_ == Regime::slow) return *this;
  const double e2 = p.epsilon * p.epsilon;
  return slow(a_ * e2, b_ * e2);
}

const char* to_string(Regime r) { return r == Regime::order1 ? "order1" : "slow"; }

double background_residual(double u, const ModelParams& p) {
  return u - u * u * u - p.epsilon * ((p.alpha + p.beta) * u + p.gamma);
}

BackgroundState background_state(const ModelParams& p) {
  double u = -1.0;
  for (int it = 0; it < 50; ++it) {
    const double f = background_residual(u, p);
    const double df = 1.0 - 3.0 * u * u - p.epsilon * (p.alpha + p.beta);
    const double du = f / df;
    u -= du;
    if (std::abs(du) <= 1e-15 * std::abs(u)) {
      // one extra step settles the last ulp
      u -= background_residual(u, p) / (1.0 - 3.0 * u * u - p.epsilon * (p.alpha + p.beta));
      return {u, u, u};
    }
  }
  throw Error(Errc::no_convergence, "background state: Newton did not converge (epsilon too large?)");
}

}  // namespace sleppulse
