#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sleppulse/slep.hpp"

namespace sleppulse {

// Drift bifurcation set C1 tau_hat + C2 theta_hat = 1.
struct DriftLine {
  double C1;
  double C2;
  // Signed distance in units of the line equation: positive on the unstable side.
  double excess(double tau_hat, double theta_hat) const { return C1 * tau_hat + C2 * theta_hat - 1.0; }
};

DriftLine drift_line(const SlepContext& ctx);

// Nonzero real root of the odd-mode function, found by Newton on G_od / lambda.
std::optional<double> drift_eigenvalue(double tau_hat, double theta_hat, const SlepContext& ctx,
                                       double guess = 0.01);

// Evaluations along the ray (tau_hat, theta_hat) = s (cos psi, sin psi).
SlepEval<double> ray_eval(double lambda, double s, double psi, const SlepContext& ctx);
SlepEval<cplx> ray_eval(cplx lambda, double s, double psi, const SlepContext& ctx);
// d/ds from the tau and theta partials.
template <typename T>
T ray_ds(const SlepEval<T>& e, double psi) {
  return std::cos(psi) * e.d_tau + std::sin(psi) * e.d_theta;
}

struct HopfPoint {
  double psi = 0;
  double eta_star = 0;  // s_star * xi_star
  double xi_star = 0;
  double s_star = 0;
  double tau_hat = 0;
  double theta_hat = 0;
  double residual = 0;                  // |G_ev(i xi*)|
  double transversality = 0;            // centered difference of Re lambda in s
  double transversality_analytic = 0;   // Re(-G_s / G_lambda) at the crossing
};

double hopf_real_part(double eta, double psi, const SlepContext& ctx);
double hopf_imag_part(double eta, double psi, const SlepContext& ctx);

// eta_hi is the initial upper end of the bisection bracket; it is doubled as needed.
HopfPoint hopf_point(double psi, const SlepContext& ctx, double eta_hi = 1.0);

std::vector<double> default_psi_grid(int n = 181);

struct HopfCurve {
  std::vector<HopfPoint> points;
  std::vector<std::pair<double, std::string>> failures;  // psi and message
};
HopfCurve hopf_curve(const std::vector<double>& psi, const SlepContext& ctx, int threads = 1);

// Newton on the even-mode function along a ray. Returns nothing when Newton fails.
std::optional<cplx> complex_root(double s, double psi, cplx guess, const SlepContext& ctx,
                                 int max_iter = 50, int* iterations = nullptr);

struct Landmarks {
  double psi = 0;
  double s_c = 0;         // where the minimiser of G(., s) crosses zero
  double s_under = 0;     // real pair merges
  double s_over = 0;      // pair returns to the real axis
  double lambda_under = 0;
  double lambda_over = 0;
};

// Left edge of the domain of G(., s): 1 + s max(cos, sin) lambda > 0.
double ray_domain_edge(double s, double psi);
double critical_s(double psi, const SlepContext& ctx);
double lambda_min(double s, double psi, const SlepContext& ctx);
double min_value(double s, double psi, const SlepContext& ctx);
Landmarks real_eig_landmarks(double psi, const SlepContext& ctx);

// Both real roots when min_value(s) < 0, ascending.
std::optional<std::pair<double, double>> real_roots(double s, double psi, const SlepContext& ctx);

enum class PathKind { real_pair, complex_pair, double_root };
const char* to_string(PathKind k);

struct PathSample {
  double s;
  cplx lambda;
  cplx partner;
  PathKind kind;
};

struct EigenPath {
  double psi = 0;
  std::vector<PathSample> samples;
  double s_under = 0;
  double s_star = 0;
  double s_over = 0;
  double c_minus = 0;
  double c_plus = 0;
  double lambda_under = 0;
  double lambda_over = 0;
};

// -2 G_s / G_lambdalambda at a double root.
double splitting_constant(double lambda, double s, double psi, const SlepContext& ctx);

EigenPath trace_eigen_path(double psi, double s_min, double s_max, const SlepContext& ctx,
                           int n_real = 60);

struct Codim2Point {
  double psi;
  double tau_hat;
  double theta_hat;
  double xi_star;
  double line_residual;
  double slep_residual;
};

std::vector<Codim2Point> codim2_points(const SlepContext& ctx, const std::vector<double>& psi_grid,
                                       int threads = 1);
std::vector<Codim2Point> codim2_points(const SlepContext& ctx);

enum class Region { stable, drift, hopf, drift_hopf };
const char* to_string(Region r);

// Points within this distance of the drift line count as drift-unstable.
inline constexpr double kDriftTie = 1e-10;

Region classify_region(double tau_hat, double theta_hat, const SlepContext& ctx);

}  // namespace sleppulse
