#include "sleppulse/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sleppulse/parallel.hpp"

namespace sleppulse {

double far_field_slope(const ModelParams& p) {
  return reaction_prime(background_state(p).u_bar);
}

namespace {

struct Coupled {
  double m, tau, theta;
};

Coupled coupled(const ModelParams& p, const TimeScale& ts) {
  const auto o1 = ts.to_order1(p);
  return {far_field_slope(p), o1.first(), o1.second()};
}

std::array<double, 4> cubic_from(double xi, const ModelParams& p, const Coupled& c) {
  const double x2 = xi * xi;
  const double a = p.epsilon * p.epsilon * x2 - c.m;
  const double b = x2 + 1.0;
  const double cc = p.D * p.D * x2 + 1.0;
  const double ea = p.epsilon * p.alpha;
  const double eb = p.epsilon * p.beta;
  const double t = c.tau, th = c.theta;
  return {a * b * cc + ea * cc + eb * b,
          a * (t * cc + th * b) + b * cc + ea * th + eb * t,
          t * th * a + t * cc + th * b,
          t * th};
}

cplx horner(const std::array<double, 4>& c, cplx x) { return ((c[3] * x + c[2]) * x + c[1]) * x + c[0]; }
cplx horner_d(const std::array<double, 4>& c, cplx x) { return (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1]; }

double relative_residual(const std::array<double, 4>& c, cplx x) {
  const double ax = std::abs(x);
  const double scale = ((std::abs(c[3]) * ax + std::abs(c[2])) * ax + std::abs(c[1])) * ax + std::abs(c[0]);
  return scale > 0.0 ? std::abs(horner(c, x)) / scale : 0.0;
}

cplx polish(const std::array<double, 4>& c, cplx x) {
  for (int it = 0; it < 8; ++it) {
    const cplx d = horner_d(c, x);
    if (d == 0.0) break;
    const cplx next = x - horner(c, x) / d;
    if (!(relative_residual(c, next) < relative_residual(c, x))) break;
    x = next;
  }
  return x;
}

}  // namespace

std::array<cplx, 3> cubic_roots(const std::array<double, 4>& c) {
  int deg = 3;
  while (deg > 0 && c[deg] == 0.0) --deg;
  std::array<cplx, 3> out{cplx(NAN, NAN), cplx(NAN, NAN), cplx(NAN, NAN)};
  if (deg == 0) return out;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -c[i] / c[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  for (int i = 0; i < deg; ++i) out[i] = polish(c, es.eigenvalues()(i));
  if (deg < 3) return out;

  // restore exact conjugate symmetry: the root closest to the axis is real
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(out[i].imag()) < std::abs(out[k].imag())) k = i;
  const int i1 = (k + 1) % 3, i2 = (k + 2) % 3;
  out[k] = out[k].real();
  const cplx a = out[i1], b = out[i2];
  const double tol = 1e-6 * std::max(std::abs(a), std::abs(b));
  if (std::abs(a.imag()) > tol && std::abs(a - std::conj(b)) < std::abs(a - b)) {
    const cplx up = a.imag() > 0.0 ? a : b;
    const cplx z = 0.5 * (up + std::conj(a.imag() > 0.0 ? b : a));
    out[i1] = z;
    out[i2] = std::conj(z);
  } else {
    out[i1] = polish(c, a.real());
    out[i2] = polish(c, b.real());
  }
  return out;
}

std::array<double, 4> dispersion_cubic(double xi, const ModelParams& p, const TimeScale& ts) {
  return cubic_from(xi, p, coupled(p, ts));
}

cplx dispersion_det(cplx lambda, double xi, const ModelParams& p, const TimeScale& ts) {
  const auto c = coupled(p, ts);
  const double x2 = xi * xi;
  const cplx A = lambda + p.epsilon * p.epsilon * x2 - c.m;
  const cplx B = c.tau * lambda + x2 + 1.0;
  const cplx C = c.theta * lambda + p.D * p.D * x2 + 1.0;
  return A * B * C + p.epsilon * p.alpha * C + p.epsilon * p.beta * B;
}

namespace {

DispersionSample sample(double xi, const ModelParams& p, const Coupled& c) {
  DispersionSample s{xi, cubic_roots(cubic_from(xi, p, c))};
  std::sort(s.roots.begin(), s.roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return s;
}

}  // namespace

DispersionSample dispersion_roots(double xi, const ModelParams& p, const TimeScale& ts) {
  return sample(xi, p, coupled(p, ts));
}

std::vector<double> dispersion_grid(double xi_max, int n) {
  std::vector<double> g{0.0};
  if (n <= 0) return g;
  const double lo = std::log(1e-3), hi = std::log(std::max(xi_max, 2e-3));
  for (int i = 0; i < n; ++i) g.push_back(std::exp(n == 1 ? hi : lo + (hi - lo) * i / (n - 1)));
  return g;
}

std::vector<DispersionSample> dispersion_samples(const ModelParams& p, const TimeScale& ts,
                                                 const std::vector<double>& xi, int threads) {
  const auto c = coupled(p, ts);
  std::vector<DispersionSample> out(xi.size());
  parallel_for(xi.size(), threads, [&](std::size_t i) { out[i] = sample(xi[i], p, c); });
  return out;
}

EssentialBound essential_bound(const ModelParams& p, const TimeScale& ts, double xi_max, int n_samples,
                               int threads) {
  const auto samples = dispersion_samples(p, ts, dispersion_grid(xi_max, n_samples), threads);
  EssentialBound eb{-INFINITY, 0.0, 0.0};
  for (const auto& s : samples) {
    if (s.roots[0].real() > eb.bound) {
      eb.bound = s.roots[0].real();
      eb.argmax_xi = s.xi;
    }
  }
  eb.scaled = ts.regime() == Regime::slow ? eb.bound / (p.epsilon * p.epsilon) : eb.bound;
  if (!(eb.bound < 0.0)) {
    std::ostringstream os;
    os << "essential spectrum bound " << eb.bound << " at xi = " << eb.argmax_xi << " is not negative";
    throw Error(Errc::positive_bound, os.str());
  }
  return eb;
}

}  // namespace sleppulse
