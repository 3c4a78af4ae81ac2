#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "sleppulse/params.hpp"
#include "sleppulse/pulse.hpp"
#include "sleppulse/slep.hpp"

namespace sleppulse {

// Far-field slope of the reaction at the background state.
double far_field_slope(const ModelParams& p);

// Coefficients c0..c3 of det M(lambda; xi) as a cubic in lambda. Slow-regime rates are
// converted to order-one relaxation times first.
std::array<double, 4> dispersion_cubic(double xi, const ModelParams& p, const TimeScale& ts);
cplx dispersion_det(cplx lambda, double xi, const ModelParams& p, const TimeScale& ts);

// Roots of a real cubic c3 x^3 + c2 x^2 + c1 x + c0, polished by Newton.
std::array<cplx, 3> cubic_roots(const std::array<double, 4>& c);

struct DispersionSample {
  double xi;
  std::array<cplx, 3> roots;  // sorted by descending real part
};

DispersionSample dispersion_roots(double xi, const ModelParams& p, const TimeScale& ts);

// xi = 0 followed by n log-spaced points on [1e-3, xi_max].
std::vector<double> dispersion_grid(double xi_max, int n);
std::vector<DispersionSample> dispersion_samples(const ModelParams& p, const TimeScale& ts,
                                                 const std::vector<double>& xi, int threads = 1);

struct EssentialBound {
  double bound;
  double argmax_xi;
  double scaled;  // bound / eps^2 in the slow regime, bound otherwise
};

EssentialBound essential_bound(const ModelParams& p, const TimeScale& ts, double xi_max = 1e3,
                               int n_samples = 2000, int threads = 1);

// Direct discretisation of the linearisation about the pulse on the half line [0, L].
// Even modes carry a Neumann condition at 0, odd modes a Dirichlet condition.
struct DiscreteSteadyState {
  double dx;
  Eigen::VectorXd x, u, v, w;
  double residual;  // max norm of the discrete steady equations
  int iterations;
};

DiscreteSteadyState discrete_steady_state(const PulseSolution& pulse, int n_grid, double L = 7.0);

struct DiscreteEigen {
  cplx lambda;
  Parity parity;
};

// n_eigs eigenvalues of each parity nearest to shift, merged and sorted by distance to shift.
std::vector<DiscreteEigen> discrete_linearization_eigs(const PulseSolution& pulse, const TimeScale& ts,
                                                       int n_grid, int n_eigs, cplx shift = 0.0,
                                                       double L = 7.0);
std::vector<DiscreteEigen> discrete_linearization_eigs(const DiscreteSteadyState& state,
                                                       const ModelParams& p, const TimeScale& ts,
                                                       int n_eigs, cplx shift = 0.0);

}  // namespace sleppulse
