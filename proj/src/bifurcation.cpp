#include "sleppulse/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "roots.hpp"
#include "sleppulse/parallel.hpp"

namespace sleppulse {

DriftLine drift_line(const SlepContext& ctx) {
  const auto& p = ctx.params;
  const double xs = ctx.x_star;
  const double k = 4.0 * ctx.kappa_sq * xs * xs;
  return {-k * p.alpha * g_minus_d1(2.0 * xs), -k * p.beta / (p.D * p.D * p.D) * g_minus_d1(2.0 * xs / p.D)};
}

std::optional<double> drift_eigenvalue(double tau_hat, double theta_hat, const SlepContext& ctx,
                                       double guess) {
  // h(lambda) = G_od(lambda) / lambda is increasing because G_od is convex with G_od(0) = 0
  auto h = [&](double l) -> std::pair<double, double> {
    const auto e = slep_eval(Parity::odd, l, tau_hat, theta_hat, ctx);
    if (std::abs(l) < 1e-7) return {e.d_lambda - 0.5 * e.d_lambda2 * l, 0.5 * e.d_lambda2};
    return {e.value / l, (e.d_lambda * l - e.value) / (l * l)};
  };
  const double slope0 = h(0.0).first;
  if (slope0 == 0.0) return 0.0;
  double lo, hi;
  if (slope0 < 0.0) {
    lo = 0.0;
    hi = std::max(guess, 1e-3);
    while (h(hi).first <= 0.0) {
      hi *= 2.0;
      if (hi > 1e12) return std::nullopt;
    }
  } else {
    const double edge = -1.0 / std::max(tau_hat, theta_hat);
    lo = edge * (1.0 - 1e-12);
    hi = 0.0;
    if (h(lo).first >= 0.0) return std::nullopt;  // no second root inside the domain
  }
  const double r = detail::safeguarded_newton(h, lo, hi);
  if (std::abs(r) < 1e-12) return std::nullopt;
  return r;
}

SlepEval<double> ray_eval(double lambda, double s, double psi, const SlepContext& ctx) {
  return slep_eval(Parity::even, lambda, s * std::cos(psi), s * std::sin(psi), ctx);
}

SlepEval<cplx> ray_eval(cplx lambda, double s, double psi, const SlepContext& ctx) {
  return slep_eval(Parity::even, lambda, s * std::cos(psi), s * std::sin(psi), ctx);
}

namespace {

void check_angle(double psi) {
  if (!(psi > 0.0 && psi < std::numbers::pi / 2.0)) {
    std::ostringstream os;
    os << "angle psi = " << psi << " outside (0, pi/2)";
    throw Error(Errc::domain_error, os.str());
  }
}

}  // namespace

double hopf_real_part(double eta, double psi, const SlepContext& ctx) {
  const auto& p = ctx.params;
  const double xs = ctx.x_star;
  const auto q = RI_functions(0.5 * std::atan(eta * std::cos(psi)), 2.0 * xs);
  const auto r = RI_functions(0.5 * std::atan(eta * std::sin(psi)), 2.0 * xs / p.D);
  return 4.0 * ctx.kappa_sq * (p.alpha * xs * q.R + p.beta * xs / (p.D * p.D) * r.R);
}

double hopf_imag_part(double eta, double psi, const SlepContext& ctx) {
  const auto& p = ctx.params;
  const double xs = ctx.x_star;
  const auto q = RI_functions(0.5 * std::atan(eta * std::cos(psi)), 2.0 * xs);
  const auto r = RI_functions(0.5 * std::atan(eta * std::sin(psi)), 2.0 * xs / p.D);
  return 4.0 * ctx.kappa_sq * (p.alpha * xs * q.I + p.beta * xs / (p.D * p.D) * r.I);
}

std::optional<cplx> complex_root(double s, double psi, cplx guess, const SlepContext& ctx, int max_iter,
                                 int* iterations) {
  const double tau = s * std::cos(psi);
  const double theta = s * std::sin(psi);
  const double rate = std::max(tau, theta);
  cplx l = guess;
  double last = INFINITY;
  for (int it = 1; it <= max_iter; ++it) {
    SlepEval<cplx> e;
    try {
      e = slep_eval(Parity::even, l, tau, theta, ctx);
    } catch (const Error&) {
      return std::nullopt;
    }
    cplx step = e.value / e.d_lambda;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
    cplx next = l - step;
    for (int k = 0; k < 30 && (1.0 + rate * next).real() <= 0.0; ++k) {
      step *= 0.5;
      next = l - step;
    }
    if ((1.0 + rate * next).real() <= 0.0) return std::nullopt;
    l = next;
    const double scale = std::max(1.0, std::abs(l));
    // stop at the roundoff floor: tiny steps that no longer contract
    if (std::abs(step) <= 1e-14 * scale || (std::abs(step) <= 1e-11 * scale && std::abs(step) > 0.5 * last)) {
      if (iterations) *iterations = it;
      return l;
    }
    last = std::abs(step);
  }
  return std::nullopt;
}

HopfPoint hopf_point(double psi, const SlepContext& ctx, double eta_hi) {
  check_angle(psi);
  auto f = [&](double eta) { return hopf_real_part(eta, psi, ctx) - ctx.zeta0; };
  if (f(0.0) <= 0.0) {
    throw Error(Errc::bracket_failure, "Hopf bracket: real part at eta = 0 does not exceed zeta0");
  }
  double hi = eta_hi > 0.0 ? eta_hi : 1.0;
  while (f(hi) >= 0.0) {
    hi *= 2.0;
    if (hi > 1e15) throw Error(Errc::bracket_failure, "Hopf bracket: real part never drops below zeta0");
  }
  const double eta = detail::bisect(f, 0.0, hi, 1e-12);

  HopfPoint hp;
  hp.psi = psi;
  double xi = -hopf_imag_part(eta, psi, ctx);
  double s = eta / xi;

  // polish (xi, s) on the complex equation
  auto residual = [&](double x, double ss) {
    return ray_eval(cplx(0.0, x), ss, psi, ctx);
  };
  auto e = residual(xi, s);
  for (int it = 0; it < 4; ++it) {
    const cplx a = cplx(0.0, 1.0) * e.d_lambda;
    const cplx b = ray_ds(e, psi);
    const double det = a.real() * b.imag() - b.real() * a.imag();
    if (det == 0.0) break;
    const double dx = -(e.value.real() * b.imag() - b.real() * e.value.imag()) / det;
    const double ds = -(a.real() * e.value.imag() - e.value.real() * a.imag()) / det;
    const auto trial = residual(xi + dx, s + ds);
    if (!(std::abs(trial.value) < std::abs(e.value))) break;
    xi += dx;
    s += ds;
    e = trial;
  }
  hp.xi_star = xi;
  hp.s_star = s;
  hp.eta_star = s * xi;
  hp.tau_hat = s * std::cos(psi);
  hp.theta_hat = s * std::sin(psi);
  hp.residual = std::abs(e.value);
  const cplx dlds = -ray_ds(e, psi) / e.d_lambda;
  hp.transversality_analytic = dlds.real();

  const double h = 1e-3;
  const auto up = complex_root(s + h, psi, cplx(0.0, xi) + h * dlds, ctx);
  const auto dn = complex_root(s - h, psi, cplx(0.0, xi) - h * dlds, ctx);
  if (!up || !dn) throw Error(Errc::no_convergence, "Hopf transversality: continuation failed");
  hp.transversality = (up->real() - dn->real()) / (2.0 * h);
  return hp;
}

std::vector<double> default_psi_grid(int n) {
  std::vector<double> g;
  if (n <= 0) return g;
  const double a = 0.01;
  const double b = std::numbers::pi / 2.0 - 0.01;
  if (n == 1) return {0.5 * (a + b)};
  g.reserve(n);
  for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
  return g;
}

HopfCurve hopf_curve(const std::vector<double>& psi, const SlepContext& ctx, int threads) {
  std::vector<std::optional<HopfPoint>> pts(psi.size());
  std::vector<std::string> errs(psi.size());
  parallel_for(psi.size(), threads, [&](std::size_t i) {
    try {
      pts[i] = hopf_point(psi[i], ctx);
    } catch (const Error& e) {
      errs[i] = e.what();
    }
  });
  HopfCurve c;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (pts[i]) c.points.push_back(*pts[i]);
    else c.failures.emplace_back(psi[i], errs[i]);
  }
  return c;
}

double ray_domain_edge(double s, double psi) {
  return -1.0 / (s * std::max(std::cos(psi), std::sin(psi)));
}

double critical_s(double psi, const SlepContext& ctx) {
  const auto& p = ctx.params;
  const double xs = ctx.x_star;
  const double k = 4.0 * ctx.kappa_sq * xs * xs;
  return -1.0 / (k * (p.alpha * g_plus_d1(2.0 * xs) * std::cos(psi) +
                      p.beta / (p.D * p.D * p.D) * g_plus_d1(2.0 * xs / p.D) * std::sin(psi)));
}

double lambda_min(double s, double psi, const SlepContext& ctx) {
  const double edge = ray_domain_edge(s, psi);
  auto dG = [&](double l) -> std::pair<double, double> {
    const auto e = ray_eval(l, s, psi, ctx);
    return {e.d_lambda, e.d_lambda2};
  };
  const double lo = edge + 1e-12 * std::abs(edge);
  double hi = 0.0;
  if (dG(0.0).first <= 0.0) {
    hi = 1.0;
    while (dG(hi).first <= 0.0) hi *= 2.0;
  }
  return detail::safeguarded_newton(dG, lo, hi);
}

double min_value(double s, double psi, const SlepContext& ctx) {
  return ray_eval(lambda_min(s, psi, ctx), s, psi, ctx).value;
}

Landmarks real_eig_landmarks(double psi, const SlepContext& ctx) {
  check_angle(psi);
  Landmarks lm;
  lm.psi = psi;
  lm.s_c = critical_s(psi, ctx);
  auto m = [&](double t) { return min_value(std::exp(t), psi, ctx); };
  if (!(lm.s_c > 0.0) || min_value(lm.s_c, psi, ctx) <= 0.0) {
    throw Error(Errc::degenerate_bracket, "landmarks: minimum of G at s_c is not positive");
  }
  const double tc = std::log(lm.s_c);
  double tlo = tc - std::log(2.0);
  while (m(tlo) >= 0.0) {
    tlo -= std::log(2.0);
    if (tlo < -600.0) throw Error(Errc::degenerate_bracket, "landmarks: no lower merge point");
  }
  double thi = tc + std::log(2.0);
  while (m(thi) >= 0.0) {
    thi += std::log(2.0);
    if (thi > 600.0) throw Error(Errc::degenerate_bracket, "landmarks: no upper merge point");
  }
  lm.s_under = std::exp(detail::bisect(m, tlo, tc));
  lm.s_over = std::exp(detail::bisect(m, tc, thi));
  lm.lambda_under = lambda_min(lm.s_under, psi, ctx);
  lm.lambda_over = lambda_min(lm.s_over, psi, ctx);
  return lm;
}

std::optional<std::pair<double, double>> real_roots(double s, double psi, const SlepContext& ctx) {
  const double lm = lambda_min(s, psi, ctx);
  if (ray_eval(lm, s, psi, ctx).value >= 0.0) return std::nullopt;
  auto G = [&](double l) -> std::pair<double, double> {
    const auto e = ray_eval(l, s, psi, ctx);
    return {e.value, e.d_lambda};
  };
  const double edge = ray_domain_edge(s, psi);
  double lo = edge + 1e-12 * std::abs(edge);
  for (int k = 0; k < 40 && G(lo).first <= 0.0; ++k) lo = edge + 0.5 * (lo - edge);
  const double left = detail::safeguarded_newton(G, lo, lm);
  double hi = lm + 1.0;
  while (G(hi).first <= 0.0) hi = lm + 2.0 * (hi - lm);
  const double right = detail::safeguarded_newton(G, lm, hi);
  return std::make_pair(left, right);
}

const char* to_string(PathKind k) {
  switch (k) {
    case PathKind::real_pair: return "real";
    case PathKind::complex_pair: return "complex";
    case PathKind::double_root: return "double";
  }
  return "?";
}

double splitting_constant(double lambda, double s, double psi, const SlepContext& ctx) {
  const auto e = ray_eval(lambda, s, psi, ctx);
  return -2.0 * ray_ds(e, psi) / e.d_lambda2;
}

namespace {

void push_real(EigenPath& path, double s, const SlepContext& ctx) {
  const auto rr = real_roots(s, path.psi, ctx);
  if (!rr) throw Error(Errc::no_convergence, "eigen path: expected a real pair");
  path.samples.push_back({s, rr->first, rr->second, PathKind::real_pair});
}

}  // namespace

EigenPath trace_eigen_path(double psi, double s_min, double s_max, const SlepContext& ctx, int n_real) {
  const auto lm = real_eig_landmarks(psi, ctx);
  if (!(s_min > 0.0 && s_min < lm.s_under && s_max > lm.s_over)) {
    std::ostringstream os;
    os << "eigen path: range [" << s_min << ", " << s_max << "] must enclose [" << lm.s_under << ", "
       << lm.s_over << "]";
    throw Error(Errc::domain_error, os.str());
  }
  EigenPath path;
  path.psi = psi;
  path.s_under = lm.s_under;
  path.s_over = lm.s_over;
  path.lambda_under = lm.lambda_under;
  path.lambda_over = lm.lambda_over;
  path.s_star = hopf_point(psi, ctx).s_star;
  path.c_minus = splitting_constant(lm.lambda_under, lm.s_under, psi, ctx);
  path.c_plus = splitting_constant(lm.lambda_over, lm.s_over, psi, ctx);

  // real pair below the merge, log spaced
  const double s_lo_end = lm.s_under * (1.0 - 1e-6);
  for (int i = 0; i < n_real; ++i) {
    const double t = static_cast<double>(i) / n_real;
    push_real(path, s_min * std::pow(s_lo_end / s_min, t), ctx);
  }
  path.samples.push_back({lm.s_under, lm.lambda_under, lm.lambda_under, PathKind::double_root});

  // complex pair between the merge points, continued in log s
  const double t_lo = std::log(lm.s_under), t_hi = std::log(lm.s_over);
  const double width = t_hi - t_lo;
  const double edge_zone = 1e-3 * width;
  const double t_end = t_hi - 1e-6 * width;
  const double floor = 1e-12;
  auto local_model = [&](double s) {
    if (s - lm.s_under < lm.s_over - s) {
      return cplx(lm.lambda_under, std::sqrt(std::abs(path.c_minus) * (s - lm.s_under)));
    }
    return cplx(lm.lambda_over, std::sqrt(std::abs(path.c_plus) * (lm.s_over - s)));
  };
  double t_prev = t_lo;
  cplx l_prev = lm.lambda_under;
  double t_cur = t_lo + 1e-6 * width;
  auto first = complex_root(std::exp(t_cur), psi, local_model(std::exp(t_cur)), ctx);
  if (!first || first->imag() <= 0.0) throw Error(Errc::continuation_stall, "eigen path: cannot leave the merge point");
  cplx l_cur = *first;
  // real operator: the partner is the exact conjugate
  auto push_complex = [&](double s, cplx l) { path.samples.push_back({s, l, std::conj(l), PathKind::complex_pair}); };
  push_complex(std::exp(t_cur), l_cur);
  double dt = width / 200.0;
  int easy = 0;
  while (t_cur < t_end) {
    const double step = std::min(dt, t_end - t_cur);
    const double t_next = t_cur + step;
    const double s_next = std::exp(t_next);
    const bool near_end = (t_next - t_lo) < edge_zone || (t_hi - t_next) < edge_zone;
    const bool secant = t_prev > t_lo && !near_end;
    const cplx pred = secant ? l_cur + (l_cur - l_prev) / (t_cur - t_prev) * step : local_model(s_next);
    int iters = 0;
    const auto corr = complex_root(s_next, psi, pred, ctx, 8, &iters);
    if (!corr || corr->imag() <= 0.0) {
      dt *= 0.5;
      easy = 0;
      if (dt < floor * width) throw Error(Errc::continuation_stall, "eigen path: step size underflow");
      continue;
    }
    t_prev = t_cur;
    l_prev = l_cur;
    t_cur = t_next;
    l_cur = *corr;
    push_complex(s_next, l_cur);
    if (iters <= 4 && ++easy >= 3) {
      dt = std::min(2.0 * dt, width / 50.0);
      easy = 0;
    }
  }
  path.samples.push_back({lm.s_over, lm.lambda_over, lm.lambda_over, PathKind::double_root});

  const double s_hi_start = lm.s_over * (1.0 + 1e-6);
  for (int i = 1; i <= n_real; ++i) {
    const double t = static_cast<double>(i) / n_real;
    push_real(path, s_hi_start * std::pow(s_max / s_hi_start, t), ctx);
  }
  return path;
}

std::vector<Codim2Point> codim2_points(const SlepContext& ctx, const std::vector<double>& psi_grid,
                                       int threads) {
  const auto line = drift_line(ctx);
  const auto curve = hopf_curve(psi_grid, ctx, threads);
  auto dist = [&](double psi) {
    const auto hp = hopf_point(psi, ctx);
    return line.excess(hp.tau_hat, hp.theta_hat);
  };
  std::vector<Codim2Point> out;
  const auto& pts = curve.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d0 = line.excess(pts[i].tau_hat, pts[i].theta_hat);
    const double d1 = line.excess(pts[i + 1].tau_hat, pts[i + 1].theta_hat);
    if ((d0 < 0.0) == (d1 < 0.0)) continue;
    // secant steps in psi kept inside the bracket
    double a = pts[i].psi, b = pts[i + 1].psi, fa = d0, fb = d1;
    double x = a - fa * (b - a) / (fb - fa);
    for (int it = 0; it < 60; ++it) {
      const double fx = dist(x);
      if (std::abs(fx) < 1e-14) break;
      if ((fx < 0.0) == (fa < 0.0)) { a = x; fa = fx; } else { b = x; fb = fx; }
      double next = a - fa * (b - a) / (fb - fa);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - x) < 1e-15) { x = next; break; }
      x = next;
    }
    const auto hp = hopf_point(x, ctx);
    out.push_back({x, hp.tau_hat, hp.theta_hat, hp.xi_star, std::abs(line.excess(hp.tau_hat, hp.theta_hat)),
                   hp.residual});
  }
  return out;
}

std::vector<Codim2Point> codim2_points(const SlepContext& ctx) {
  return codim2_points(ctx, default_psi_grid(), 1);
}

const char* to_string(Region r) {
  switch (r) {
    case Region::stable: return "stable";
    case Region::drift: return "drift";
    case Region::hopf: return "hopf";
    case Region::drift_hopf: return "drift+hopf";
  }
  return "?";
}

Region classify_region(double tau_hat, double theta_hat, const SlepContext& ctx) {
  if (!(tau_hat > 0.0 && theta_hat > 0.0)) throw Error(Errc::domain_error, "classify_region: rates must be positive");
  const bool drift = drift_line(ctx).excess(tau_hat, theta_hat) > -kDriftTie;
  const double s = std::hypot(tau_hat, theta_hat);
  const double psi = std::atan2(theta_hat, tau_hat);
  const auto hp = hopf_point(psi, ctx);
  bool hopf = false;
  if (s > hp.s_star) {
    const auto lm = real_eig_landmarks(psi, ctx);
    if (s >= lm.s_over) {
      const auto rr = real_roots(s, psi, ctx);
      hopf = rr && rr->second > 0.0;
    } else {
      // follow the crossing pair out from s* along the ray
      const int n = 32;
      cplx l(0.0, hp.xi_star);
      bool ok = true;
      for (int k = 1; k <= n && ok; ++k) {
        const double sk = hp.s_star + (s - hp.s_star) * k / n;
        const auto r = complex_root(sk, psi, l, ctx);
        ok = r.has_value();
        if (ok) l = *r;
      }
      hopf = ok && l.real() > 0.0;
    }
  }
  if (drift && hopf) return Region::drift_hopf;
  if (drift) return Region::drift;
  if (hopf) return Region::hopf;
  return Region::stable;
}

}  // namespace sleppulse
