#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sleppulse/bifurcation.hpp"
#include "sleppulse/pulse.hpp"
#include "sleppulse/spectrum.hpp"

using namespace sleppulse;

namespace {

const PulseSolution& reference_pulse() {
  static const PulseSolution pulse = build_pulse(oracle::reference_params());
  return pulse;
}

// eigenvalue of the given parity closest to the shift
cplx nearest(const std::vector<DiscreteEigen>& e, Parity par) {
  for (const auto& d : e)
    if (d.parity == par) return d.lambda;
  return cplx(NAN, NAN);
}

}  // namespace

TEST_CASE("order-one relaxation: translation and slow even eigenvalue") {
  const auto& pulse = reference_pulse();
  const auto p = pulse.params();
  const auto st = discrete_steady_state(pulse, 4096);
  CHECK(st.residual < 1e-9);
  const auto eigs = discrete_linearization_eigs(st, p, TimeScale::order1(1.0, 1.0), 4);
  REQUIRE(eigs.size() == 4);

  const cplx odd = nearest(eigs, Parity::odd);
  const cplx even = nearest(eigs, Parity::even);
  CHECK(std::abs(odd) < 1e-6);
  CHECK(std::abs(odd) < std::pow(p.epsilon, 3));

  // leading-order value from the layer position alone
  const double xs = oracle::layer_position(p);
  const double theory = -3.0 * std::numbers::sqrt2 * (p.alpha * std::exp(-2 * xs) + p.beta / p.D * std::exp(-2 * xs / p.D));
  const double scaled = even.real() / (p.epsilon * p.epsilon);
  CHECK(std::abs(even.imag()) < 1e-10);
  CHECK(std::abs(scaled / theory - 1.0) < 0.25);
  // the O(eps) correction is small at this epsilon
  CHECK(std::abs(scaled / theory - 1.0) < 0.05);
  MESSAGE("scaled even eigenvalue " << scaled << " against " << theory);
}

TEST_CASE("coarse grid is rejected") {
  CHECK_THROWS_AS(discrete_steady_state(reference_pulse(), 1024), Error);
  try {
    discrete_steady_state(reference_pulse(), 1024);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::resolution_error);
  }
}

TEST_CASE("slow relaxation at a Hopf point") {
  const auto& pulse = reference_pulse();
  const auto p = pulse.params();
  const auto ctx = SlepContext::make(p);
  const auto h = hopf_point(std::numbers::pi / 4, ctx);
  const auto ts = TimeScale::slow(h.tau_hat, h.theta_hat);
  const double e2 = p.epsilon * p.epsilon;
  const auto st = discrete_steady_state(pulse, 3072);

  const auto up = discrete_linearization_eigs(st, p, ts, 3, cplx(0.0, h.xi_star * e2));
  const cplx l = nearest(up, Parity::even);
  MESSAGE("scaled eigenvalue " << l / e2 << ", xi* = " << h.xi_star);
  CHECK(std::abs(l.real()) / e2 < 0.2 * h.xi_star);
  CHECK(std::abs(std::abs(l.imag()) / e2 / h.xi_star - 1.0) < 0.25);

  // real operator: the mirrored shift finds the conjugate
  const auto down = discrete_linearization_eigs(st, p, ts, 3, cplx(0.0, -h.xi_star * e2));
  const cplx lc = nearest(down, Parity::even);
  CHECK(std::abs(lc - std::conj(l)) < 1e-8 * std::abs(l));
}

TEST_CASE("second-order convergence in the grid spacing") {
  const auto& pulse = reference_pulse();
  const auto p = pulse.params();
  const auto ts = TimeScale::order1(1.0, 1.0);
  double lam[3];
  const int grids[3] = {1200, 2400, 4800};
  for (int k = 0; k < 3; ++k) {
    const auto st = discrete_steady_state(pulse, grids[k], 3.5);
    lam[k] = nearest(discrete_linearization_eigs(st, p, ts, 2), Parity::even).real();
  }
  const double order = std::log2(std::abs(lam[0] - lam[1]) / std::abs(lam[1] - lam[2]));
  MESSAGE("observed order " << order);
  CHECK(std::abs(order - 2.0) < 0.3);
}
