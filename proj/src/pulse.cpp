#include "sleppulse/pulse.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <vector>

namespace sleppulse {

double layer_function(double z, const ModelParams& p) {
  return p.alpha * std::exp(-z) + p.beta * std::exp(-z / p.D);
}

namespace {

double bisect_layer(const ModelParams& p, double lo, double hi) {
  auto h = [&](double x) { return layer_function(2.0 * x, p) - p.gamma; };
  // h(0) = alpha + beta - gamma > 0 for validated params
  if (lo < 0.0 || h(lo) <= 0.0) lo = 0.0;
  if (hi <= lo) hi = lo + 1.0;
  while (h(hi) >= 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double solve_layer_position(const ModelParams& p) { return bisect_layer(p, 0.0, 1.0); }

double solve_layer_position(const ModelParams& p, double lo, double hi) {
  return bisect_layer(p, lo, hi);
}

LayerValues layer_values(double x_star, const ModelParams& p) {
  const double v = -std::exp(-2.0 * x_star);
  const double w = -std::exp(-2.0 * x_star / p.D);
  return {v, w, v, w};
}

OuterInhibitors outer_inhibitors(double x, Side side, const LayerData& layer, const ModelParams& p) {
  const double xs = layer.x_star;
  const double D = p.D;
  // a few ulps of slack at the junction
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * xs;
  if (side == Side::inside) {
    if (x < -slack || x > xs + slack) {
      std::ostringstream os;
      os << "inside profile requested at x = " << x << " outside [0, " << xs << "]";
      throw Error(Errc::domain_mismatch, os.str());
    }
    const double cq = (layer.b0 - 1.0) / std::cosh(xs);
    const double cr = (layer.c0 - 1.0) / std::cosh(xs / D);
    return {cq * std::cosh(x) + 1.0, cr * std::cosh(x / D) + 1.0, cq * std::sinh(x),
            cr * std::sinh(x / D) / D};
  }
  if (x < xs - slack) {
    std::ostringstream os;
    os << "outside profile requested at x = " << x << " < x* = " << xs;
    throw Error(Errc::domain_mismatch, os.str());
  }
  const double eq = (layer.b0 + 1.0) * std::exp(xs - x);
  const double er = (layer.c0 + 1.0) * std::exp((xs - x) / D);
  return {eq - 1.0, er - 1.0, -eq, -er / D};
}

FirstOrder first_order_constants(const LayerData& layer, const ModelParams& p) {
  const double e = std::exp(-2.0 * layer.x_star);
  const double ed = std::exp(-2.0 * layer.x_star / p.D);
  const double s = -p.gamma / (2.0 * (p.alpha * e + p.beta / p.D * ed));
  const double b1 = -(1.0 + e) * s - e;
  const double c1 = -(1.0 + ed) * s / p.D - ed;
  return {b1, c1, s};
}

LayerData build_layer(const ModelParams& p) {
  LayerData l;
  l.x_star = solve_layer_position(p);
  const auto lv = layer_values(l.x_star, p);
  l.v_star = lv.v_star;
  l.w_star = lv.w_star;
  l.b0 = lv.b0;
  l.c0 = lv.c0;
  const auto fo = first_order_constants(l, p);
  l.b1 = fo.b1;
  l.c1 = fo.c1;
  l.s = fo.s;
  l.a0 = inner_profile(l.s).u;
  return l;
}

double cutoff(double d, double inner, double outer) {
  const double a = std::abs(d);
  if (a <= inner) return 1.0;
  if (a >= outer) return 0.0;
  const double t = (outer - a) / (outer - inner);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

PulseSolution::PulseSolution(const ModelParams& p, const LayerData& layer)
    : p_(p), layer_(layer), w_in_(layer.x_star / 4.0), w_out_(layer.x_star / 2.0) {}

double PulseSolution::u_outer(double x) const {
  const double ax = std::abs(x);
  const Side side = ax < layer_.x_star ? Side::inside : Side::outside;
  const auto o = outer_inhibitors(ax, side, layer_, p_);
  const double u0 = side == Side::inside ? 1.0 : -1.0;
  const double u1 = -0.5 * (p_.alpha * o.V + p_.beta * o.W + p_.gamma);
  return u0 + p_.epsilon * u1;
}

double PulseSolution::u(double x) const {
  const double ax = std::abs(x);
  const double d = ax - layer_.x_star;
  double val = u_outer(x);
  const double om = cutoff(d, w_in_, w_out_);
  if (om > 0.0) {
    const double u0 = d < 0.0 ? 1.0 : -1.0;
    val += om * (inner_profile(d / p_.epsilon + layer_.s).u - u0);
  }
  return val;
}

double PulseSolution::v(double x) const {
  const double ax = std::abs(x);
  const Side side = ax < layer_.x_star ? Side::inside : Side::outside;
  return outer_inhibitors(ax, side, layer_, p_).V;
}

double PulseSolution::w(double x) const {
  const double ax = std::abs(x);
  const Side side = ax < layer_.x_star ? Side::inside : Side::outside;
  return outer_inhibitors(ax, side, layer_, p_).W;
}

PulseSolution build_pulse(const ModelParams& p) { return PulseSolution(p, build_layer(p)); }

SampledPulse composite_profile(const Eigen::VectorXd& grid, const ModelParams& p) {
  PulseSolution pulse = build_pulse(p);
  const double xs = pulse.layer().x_star;
  const double band = 5.0 * p.epsilon;
  std::vector<double> g(grid.data(), grid.data() + grid.size());
  std::sort(g.begin(), g.end());
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = g[i + 1] - g[i];
    const bool near = std::abs(std::abs(g[i]) - xs) <= band || std::abs(std::abs(g[i + 1]) - xs) <= band;
    if (near && h > p.epsilon / 4.0) {
      std::ostringstream os;
      os << "grid spacing " << h << " near the layer exceeds eps/4 = " << p.epsilon / 4.0;
      throw Error(Errc::grid_too_coarse, os.str());
    }
  }
  SampledPulse out{pulse, grid, pulse.u(grid), pulse.v(grid), pulse.w(grid)};
  return out;
}

}  // namespace sleppulse
