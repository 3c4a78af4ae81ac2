#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "sleppulse/params.hpp"

namespace sleppulse {

// Data of the internal layer at x = x_star on the half line.
struct LayerData {
  double x_star = 0;
  double v_star = 0;
  double w_star = 0;
  double b0 = 0;
  double c0 = 0;
  double b1 = 0;
  double c1 = 0;
  double s = 0;   // shift of the inner profile
  double a0 = 0;  // activator value at the layer
};

// g(z) = alpha e^{-z} + beta e^{-z/D}; strictly decreasing.
double layer_function(double z, const ModelParams& p);

// Root of g(2x) = gamma. The bracket is grown until it encloses the root.
double solve_layer_position(const ModelParams& p);
double solve_layer_position(const ModelParams& p, double lo, double hi);

struct LayerValues {
  double v_star, w_star, b0, c0;
};
LayerValues layer_values(double x_star, const ModelParams& p);

// Inside is (0, x_star) where the activator sits near +1.
enum class Side { inside, outside };

struct OuterInhibitors {
  double V, W, Vx, Wx;
};

// Order-zero outer inhibitor profiles and their derivatives.
OuterInhibitors outer_inhibitors(double x, Side side, const LayerData& layer, const ModelParams& p);

struct InnerValue {
  double u, uy;
};

// Heteroclinic front -tanh(y / sqrt 2).
inline InnerValue inner_profile(double y) {
  const double t = std::tanh(y / std::numbers::sqrt2);
  return {-t, -(1.0 - t * t) / std::numbers::sqrt2};
}

struct FirstOrder {
  double b1, c1, s;
};
FirstOrder first_order_constants(const LayerData& layer, const ModelParams& p);

// x_star, the order-zero values and the first-order matching constants.
LayerData build_layer(const ModelParams& p);

// Smooth cutoff: 1 on |d| <= inner, 0 on |d| >= outer.
double cutoff(double d, double inner, double outer);

// Composite asymptotic standing pulse, evaluable on the whole line (even in x).
class PulseSolution {
 public:
  PulseSolution(const ModelParams& p, const LayerData& layer);

  const ModelParams& params() const { return p_; }
  const LayerData& layer() const { return layer_; }
  double cutoff_inner() const { return w_in_; }
  double cutoff_outer() const { return w_out_; }

  double u(double x) const;
  double v(double x) const;
  double w(double x) const;
  // Outer expansion U0 + eps U1 without the inner correction.
  double u_outer(double x) const;

  template <typename Derived>
  Eigen::VectorXd u(const Eigen::DenseBase<Derived>& x) const {
    return x.derived().unaryExpr([this](double t) { return u(t); });
  }
  template <typename Derived>
  Eigen::VectorXd v(const Eigen::DenseBase<Derived>& x) const {
    return x.derived().unaryExpr([this](double t) { return v(t); });
  }
  template <typename Derived>
  Eigen::VectorXd w(const Eigen::DenseBase<Derived>& x) const {
    return x.derived().unaryExpr([this](double t) { return w(t); });
  }

 private:
  ModelParams p_;
  LayerData layer_;
  double w_in_;
  double w_out_;
};

PulseSolution build_pulse(const ModelParams& p);

struct SampledPulse {
  PulseSolution pulse;
  Eigen::VectorXd x, u, v, w;
};

// Samples the pulse on a grid. Throws GridTooCoarse when the spacing near a
// layer exceeds eps/4.
SampledPulse composite_profile(const Eigen::VectorXd& grid, const ModelParams& p);

}  // namespace sleppulse
