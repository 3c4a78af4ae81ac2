#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "sleppulse/params.hpp"

namespace sleppulse {

using cplx = std::complex<double>;

// Squared normalisation of the layer derivative, 1 / |u_y|^2.
inline constexpr double kKappaSq = 3.0 * std::numbers::sqrt2 / 4.0;

enum class Parity { even, odd };
enum class Component { q, r };

namespace detail {

template <typename T>
T g_minus_series(T y) {
  // sum_k (-y)^k / (k+1)!, six terms
  return T(1.0) + y * (T(-1.0 / 2) + y * (T(1.0 / 6) + y * (T(-1.0 / 24) + y * (T(1.0 / 120) + y * T(-1.0 / 720)))));
}

template <typename T>
T g_minus_d1_series(T y) {
  T acc(0.0);
  double fact = 1.0;  // (k+1)!
  T pw(1.0);
  for (int k = 1; k <= 12; ++k) {
    fact *= (k + 1);
    acc += (k % 2 ? -1.0 : 1.0) * k / fact * pw;
    pw *= y;
  }
  return acc;
}

template <typename T>
T g_minus_d2_series(T y) {
  T acc(0.0);
  double fact = 2.0;
  T pw(1.0);
  for (int k = 2; k <= 14; ++k) {
    fact *= (k + 1);
    acc += (k % 2 ? -1.0 : 1.0) * k * (k - 1) / fact * pw;
    pw *= y;
  }
  return acc;
}

inline double one_minus_exp_neg(double y) { return -std::expm1(-y); }
// 1 - e^{-y} without cancellation near 0: e^{-a}(cos b - i sin b) written through expm1
inline cplx one_minus_exp_neg(cplx y) {
  const double a = y.real(), b = y.imag();
  const double sh = std::sin(0.5 * b);
  const double re = -std::expm1(-a) * std::cos(b) + 2.0 * sh * sh;
  const double im = std::exp(-a) * std::sin(b);
  return {re, im};
}

}  // namespace detail

// g_+(y) = (1 + e^{-y}) / y
template <typename T>
T g_plus(T y) {
  return (T(1.0) + std::exp(-y)) / y;
}

// g_-(y) = (1 - e^{-y}) / y, finite at 0
template <typename T>
T g_minus(T y) {
  if (std::abs(y) < 1e-4) return detail::g_minus_series(y);
  return detail::one_minus_exp_neg(y) / y;
}

template <typename T>
T g_plus_d1(T y) {
  const T e = std::exp(-y);
  return -e / y - (T(1.0) + e) / (y * y);
}

template <typename T>
T g_minus_d1(T y) {
  if (std::abs(y) < 0.05) return detail::g_minus_d1_series(y);
  const T e = std::exp(-y);
  return e / y - detail::one_minus_exp_neg(y) / (y * y);
}

template <typename T>
T g_plus_d2(T y) {
  const T e = std::exp(-y);
  return e / y + 2.0 * e / (y * y) + 2.0 * (T(1.0) + e) / (y * y * y);
}

template <typename T>
T g_minus_d2(T y) {
  if (std::abs(y) < 0.05) return detail::g_minus_d2_series(y);
  const T e = std::exp(-y);
  return -e / y - 2.0 * e / (y * y) + 2.0 * detail::one_minus_exp_neg(y) / (y * y * y);
}

// Even modes use g_+, odd modes g_-.
template <typename T>
T g_pm(T y, Parity par) {
  return par == Parity::even ? g_plus(y) : g_minus(y);
}
template <typename T>
T g_pm_d1(T y, Parity par) {
  return par == Parity::even ? g_plus_d1(y) : g_minus_d1(y);
}
template <typename T>
T g_pm_d2(T y, Parity par) {
  return par == Parity::even ? g_plus_d2(y) : g_minus_d2(y);
}

// Spectral constants bound to one validated parameter set.
struct SlepContext {
  ModelParams params;
  double x_star = 0;
  double kappa_sq = kKappaSq;
  double zeta0 = 0;  // limit of the scaled principal layer eigenvalue

  static SlepContext make(const ModelParams& p);
};

// Closed-form weights <K delta, delta> of the static Green operators on the half line.
double green_weight_static(Parity par, Component comp, const SlepContext& ctx);

// Weights with the eigenvalue-dependent operator; principal square root.
// Throws BranchViolation when Re(1 + rate * lambda) <= 0.
cplx green_weight_dynamic(Parity par, Component comp, cplx lambda, double tau_hat, double theta_hat,
                          const SlepContext& ctx);

// Value and partial derivatives of the reduced eigenvalue function.
template <typename T>
struct SlepEval {
  T value;
  T d_lambda;
  T d_lambda2;
  T d_tau;
  T d_theta;
};

template <typename T>
SlepEval<T> slep_eval(Parity par, T lambda, double tau_hat, double theta_hat, const SlepContext& ctx);

extern template SlepEval<double> slep_eval(Parity, double, double, double, const SlepContext&);
extern template SlepEval<cplx> slep_eval(Parity, cplx, double, double, const SlepContext&);

template <typename T>
T G_od(T lambda, double tau_hat, double theta_hat, const SlepContext& ctx) {
  return slep_eval(Parity::odd, lambda, tau_hat, theta_hat, ctx).value;
}

template <typename T>
T G_ev(T lambda, double tau_hat, double theta_hat, const SlepContext& ctx) {
  return slep_eval(Parity::even, lambda, tau_hat, theta_hat, ctx).value;
}

struct RI {
  double R, I, X, Y;
};

// Real and imaginary parts of g_+(d sqrt(1 + i tan 2z)), 0 <= z < pi/4.
RI RI_functions(double z, double d);

// d/dlambda g_+(d sqrt(1 + c lambda))
cplx g_plus_lambda_derivative(cplx lambda, double c, double d);

// Leading-order scaled critical eigenvalues for order-one relaxation times.
struct CriticalEigenvalues {
  double even;
  double odd;
};
CriticalEigenvalues o1_critical_eigenvalue(const SlepContext& ctx);

// Finite-difference weight of the half-line problem -ell^2 q'' + mu q = delta_{x0}.
// power = 2 evaluates <K^2 delta, delta> by two successive solves.
cplx green_fd_weight(Parity par, double ell, cplx mu, double x0, int power = 1);

struct AdjointResidual {
  double q;
  double r;
  double squared_q;  // <(K_q^o)^2 delta, delta>
  double squared_r;
};

// Compares the lambda-derivative of the odd dynamic weights at 0 with minus
// the rate times the squared static operator weight.
AdjointResidual adjoint_identity_check(double tau0, double theta0, const SlepContext& ctx);

}  // namespace sleppulse
