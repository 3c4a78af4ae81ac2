#include "sleppulse/slep.hpp"

#include <sstream>

#include "sleppulse/pulse.hpp"
#include "sleppulse/tridiag.hpp"

namespace sleppulse {

SlepContext SlepContext::make(const ModelParams& p) {
  SlepContext ctx;
  ctx.params = p;
  ctx.x_star = solve_layer_position(p);
  const double xs = ctx.x_star;
  ctx.zeta0 = 2.0 * ctx.kappa_sq *
              (p.alpha * -std::expm1(-2.0 * xs) + p.beta / p.D * -std::expm1(-2.0 * xs / p.D));
  return ctx;
}

double green_weight_static(Parity par, Component comp, const SlepContext& ctx) {
  const double ell = comp == Component::q ? 1.0 : ctx.params.D;
  const double z = ctx.x_star / ell;
  const double h = par == Parity::even ? std::cosh(z) : std::sinh(z);
  return h * std::exp(-z) / ell;
}

namespace {

bool branch_ok(double one_plus) { return one_plus > 0.0; }
bool branch_ok(cplx one_plus) { return one_plus.real() > 0.0; }

[[noreturn]] void branch_violation(double rate) {
  std::ostringstream os;
  os << "Re(1 + " << rate << " * lambda) <= 0: outside the principal branch";
  throw Error(Errc::branch_violation, os.str());
}

template <typename T>
struct Term {
  T value, d_lambda, d_lambda2, d_rate;
};

// (x*/ell^2) g(2 x* omega) with omega = sqrt(1 + rate lambda) / ell
template <typename T>
Term<T> weight_term(Parity par, T lambda, double rate, double ell, double xs) {
  const T one_plus = T(1.0) + rate * lambda;
  if (!branch_ok(one_plus)) branch_violation(rate);
  const T om = std::sqrt(one_plus) / ell;
  const T y = 2.0 * xs * om;
  const T g = g_pm(y, par);
  const T g1 = g_pm_d1(y, par);
  const T g2 = g_pm_d2(y, par);
  const double l2 = ell * ell;
  const double l4 = l2 * l2;
  const double x2 = xs * xs;
  Term<T> t;
  t.value = xs / l2 * g;
  t.d_lambda = x2 * rate * g1 / (l4 * om);
  t.d_lambda2 = x2 * rate * rate / (l4 * l2) * (xs * g2 / (om * om) - g1 / (2.0 * om * om * om));
  t.d_rate = x2 * lambda * g1 / (l4 * om);
  return t;
}

}  // namespace

cplx green_weight_dynamic(Parity par, Component comp, cplx lambda, double tau_hat, double theta_hat,
                          const SlepContext& ctx) {
  const bool q = comp == Component::q;
  return weight_term(par, lambda, q ? tau_hat : theta_hat, q ? 1.0 : ctx.params.D, ctx.x_star).value;
}

template <typename T>
SlepEval<T> slep_eval(Parity par, T lambda, double tau_hat, double theta_hat, const SlepContext& ctx) {
  const auto& p = ctx.params;
  const auto tq = weight_term(par, lambda, tau_hat, 1.0, ctx.x_star);
  const auto tr = weight_term(par, lambda, theta_hat, p.D, ctx.x_star);
  const double k4 = 4.0 * ctx.kappa_sq;
  SlepEval<T> e;
  e.value = lambda - ctx.zeta0 + k4 * (p.alpha * tq.value + p.beta * tr.value);
  e.d_lambda = T(1.0) + k4 * (p.alpha * tq.d_lambda + p.beta * tr.d_lambda);
  e.d_lambda2 = k4 * (p.alpha * tq.d_lambda2 + p.beta * tr.d_lambda2);
  e.d_tau = k4 * p.alpha * tq.d_rate;
  e.d_theta = k4 * p.beta * tr.d_rate;
  return e;
}

template SlepEval<double> slep_eval(Parity, double, double, double, const SlepContext&);
template SlepEval<cplx> slep_eval(Parity, cplx, double, double, const SlepContext&);

RI RI_functions(double z, double d) {
  if (!(z >= 0.0) || z >= std::numbers::pi / 4.0) {
    std::ostringstream os;
    os << "RI_functions: z = " << z << " outside [0, pi/4)";
    throw Error(Errc::domain_error, os.str());
  }
  if (!(d > 0.0)) throw Error(Errc::domain_error, "RI_functions: d must be positive");
  const double c2 = std::sqrt(std::cos(2.0 * z));
  const double X = d * std::cos(z) / c2;
  const double Y = d * std::sin(z) / c2;
  const double ex = std::exp(-X);
  const double R = c2 / d * (std::cos(z) + ex * std::cos(Y + z));
  const double I = -c2 / d * (std::sin(z) + ex * std::sin(Y + z));
  return {R, I, X, Y};
}

cplx g_plus_lambda_derivative(cplx lambda, double c, double d) {
  const cplx root = std::sqrt(1.0 + c * lambda);
  return g_plus_d1(d * root) * c * d / (2.0 * root);
}

CriticalEigenvalues o1_critical_eigenvalue(const SlepContext& ctx) {
  const auto& p = ctx.params;
  const double k4 = 4.0 * ctx.kappa_sq;
  const double even =
      ctx.zeta0 - k4 * (p.alpha * green_weight_static(Parity::even, Component::q, ctx) +
                        p.beta * green_weight_static(Parity::even, Component::r, ctx));
  // the odd combination cancels zeta0 identically: translation mode
  return {even, 0.0};
}

namespace {

cplx fd_solve_once(Parity par, double ell, cplx mu, double x0, int m, int power) {
  const double h = x0 / m;
  const double decay = std::sqrt(mu).real() / ell;
  const double len = x0 + 40.0 / decay;
  const Eigen::Index n = static_cast<Eigen::Index>(std::ceil(len / h)) + 1;
  const double k = ell * ell / (h * h);
  Eigen::VectorXcd sub = Eigen::VectorXcd::Constant(n, -k);
  Eigen::VectorXcd sup = Eigen::VectorXcd::Constant(n, -k);
  Eigen::VectorXcd diag = Eigen::VectorXcd::Constant(n, 2.0 * k + mu);
  if (par == Parity::even) {
    sup(0) = -2.0 * k;
  } else {
    diag(0) = 1.0;
    sup(0) = 0.0;
  }
  diag(n - 1) = 1.0;
  sub(n - 1) = 0.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(m) = 1.0 / h;
  solve_tridiagonal<cplx>(sub, diag, sup, rhs);
  for (int p = 1; p < power; ++p) {
    if (par == Parity::odd) rhs(0) = 0.0;
    rhs(n - 1) = 0.0;
    solve_tridiagonal<cplx>(sub, diag, sup, rhs);
  }
  return rhs(m);
}

}  // namespace

cplx green_fd_weight(Parity par, double ell, cplx mu, double x0, int power) {
  const double kh = 0.02;
  const double scale = std::abs(std::sqrt(mu)) / ell;
  const int m0 = std::max(16, static_cast<int>(std::ceil(x0 * scale / kh)));
  const cplx a0 = fd_solve_once(par, ell, mu, x0, m0, power);
  const cplx a1 = fd_solve_once(par, ell, mu, x0, 2 * m0, power);
  const cplx a2 = fd_solve_once(par, ell, mu, x0, 4 * m0, power);
  const cplx r0 = (4.0 * a1 - a0) / 3.0;
  const cplx r1 = (4.0 * a2 - a1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

AdjointResidual adjoint_identity_check(double tau0, double theta0, const SlepContext& ctx) {
  const double h = 1e-5;
  auto dq = [&](double l) {
    return green_weight_dynamic(Parity::odd, Component::q, l, tau0, theta0, ctx).real();
  };
  auto dr = [&](double l) {
    return green_weight_dynamic(Parity::odd, Component::r, l, tau0, theta0, ctx).real();
  };
  const double der_q = (dq(h) - dq(-h)) / (2.0 * h);
  const double der_r = (dr(h) - dr(-h)) / (2.0 * h);
  AdjointResidual res;
  res.squared_q = green_fd_weight(Parity::odd, 1.0, 1.0, ctx.x_star, 2).real();
  res.squared_r = green_fd_weight(Parity::odd, ctx.params.D, 1.0, ctx.x_star, 2).real();
  res.q = std::abs(der_q + tau0 * res.squared_q);
  res.r = std::abs(der_r + theta0 * res.squared_r);
  return res;
}

}  // namespace sleppulse
